#include "ddp/transition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ddp {

namespace {

std::size_t position_in(const std::vector<int>& span, int id) {
  auto it = std::lower_bound(span.begin(), span.end(), id);
  if (it == span.end() || *it != id) throw Error("EDU " + std::to_string(id) + " is not in the span");
  return static_cast<std::size_t>(it - span.begin());
}

// Rewrites span-aligned heads as a 1-based head array over positions.
std::vector<int> to_positions(const std::vector<int>& span, const SpanHeads& heads) {
  std::vector<int> out(heads.size());
  for (std::size_t k = 0; k < heads.size(); ++k) {
    out[k] = heads[k] == 0 ? 0 : static_cast<int>(position_in(span, heads[k])) + 1;
  }
  return out;
}

}  // namespace

std::string_view to_string(Action a) {
  switch (a) {
    case Action::kShift: return "Shift";
    case Action::kLeftArc: return "LeftArc";
    case Action::kRightArc: return "RightArc";
    case Action::kReduce: return "Reduce";
  }
  return "?";
}

std::optional<Action> action_from_string(std::string_view name) {
  for (Action a : kAllActions) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

ActionSet make_action_set(std::initializer_list<Action> actions) {
  ActionSet set;
  for (Action a : actions) set.insert(a);
  return set;
}

ParserState::ParserState(std::vector<int> span) : span_(std::move(span)) {
  if (span_.empty()) throw Error("cannot parse an empty span");
  if (!std::is_sorted(span_.begin(), span_.end()) ||
      std::adjacent_find(span_.begin(), span_.end()) != span_.end()) {
    throw Error("span ids must be strictly increasing");
  }
}

std::optional<int> ParserState::head_of(int id) const {
  if (auto it = arcs_.find(id); it != arcs_.end()) return it->second;
  return std::nullopt;
}

ParserState ParserState::from_parts(std::vector<int> span, std::vector<int> stack,
                                    std::size_t queue_front, std::map<int, int> arcs) {
  ParserState s(std::move(span));
  s.stack_ = std::move(stack);
  s.queue_front_ = queue_front;
  s.arcs_ = std::move(arcs);
  return s;
}

ParserState initial_state(std::vector<int> span) { return ParserState(std::move(span)); }

ActionSet legal_actions(const ParserState& s) {
  ActionSet set;
  const bool top_has_head = !s.stack_empty() && s.head_of(s.stack_top()).has_value();
  if (!s.queue_empty()) {
    set.insert(Action::kShift);
    if (!s.stack_empty()) {
      if (!top_has_head) set.insert(Action::kLeftArc);
      set.insert(Action::kRightArc);
    }
  }
  if (top_has_head) set.insert(Action::kReduce);
  return set;
}

ParserState apply(const ParserState& state, Action action) {
  const bool has_queue = !state.queue_empty();
  const bool has_stack = !state.stack_empty();
  const bool top_has_head = has_stack && state.head_of(state.stack_top()).has_value();
  auto fail = [&](const char* why) {
    throw Error(std::string(to_string(action)) + " is illegal: " + why);
  };

  ParserState next = state;
  switch (action) {
    case Action::kShift:
      if (!has_queue) fail("queue is empty");
      next.stack_.push_back(next.queue_front());
      ++next.queue_front_;
      break;
    case Action::kLeftArc:
      if (!has_queue) fail("queue is empty");
      if (!has_stack) fail("stack is empty");
      if (top_has_head) fail("stack top already has a head");
      next.arcs_[next.stack_top()] = next.queue_front();
      next.stack_.pop_back();
      break;
    case Action::kRightArc:
      if (!has_queue) fail("queue is empty");
      if (!has_stack) fail("stack is empty");
      next.arcs_[next.queue_front()] = next.stack_top();
      next.stack_.push_back(next.queue_front());
      ++next.queue_front_;
      break;
    case Action::kReduce:
      if (!has_stack) fail("stack is empty");
      if (!top_has_head) fail("stack top has no head");
      next.stack_.pop_back();
      break;
  }
  return next;
}

bool is_terminal(const ParserState& s) {
  if (!s.queue_empty()) return false;
  const auto headless = std::count_if(s.stack().begin(), s.stack().end(),
                                      [&](int id) { return !s.head_of(id).has_value(); });
  return headless == 1;
}

std::vector<Action> oracle_actions(const std::vector<int>& span, const SpanHeads& gold) {
  if (gold.size() != span.size()) throw Error("gold heads do not match the span length");
  const ValidationReport report = validate_heads(to_positions(span, gold));
  if (!report.valid()) throw Error("gold span tree is not usable for the oracle: " + report.summary());

  auto gold_head = [&](int id) { return gold[position_in(span, id)]; };

  std::vector<Action> actions;
  ParserState state = initial_state(span);
  while (!state.queue_empty()) {
    Action next = Action::kShift;
    if (!state.stack_empty()) {
      const int s0 = state.stack_top();
      const int q0 = state.queue_front();
      if (gold_head(s0) == q0) {
        next = Action::kLeftArc;
      } else if (gold_head(q0) == s0) {
        next = Action::kRightArc;
      } else if (state.head_of(s0)) {
        const auto queue = state.queue();
        const bool pending = std::any_of(queue.begin(), queue.end(),
                                         [&](int id) { return gold_head(id) == s0; });
        if (!pending) next = Action::kReduce;
      }
    }
    state = apply(state, next);
    actions.push_back(next);
  }

  if (replay(span, actions) != gold) throw Error("static oracle failed to reproduce the gold span tree");
  return actions;
}

SpanHeads replay(const std::vector<int>& span, std::span<const Action> actions) {
  ParserState state = initial_state(span);
  for (Action a : actions) state = apply(state, a);
  SpanHeads heads(span.size(), 0);
  for (const auto& [dep, head] : state.arcs()) heads[position_in(span, dep)] = head;
  return heads;
}

SpanParse decode(const std::vector<int>& span, const ScoreFn& score_fn) {
  SpanParse out;
  out.span = span;
  ParserState state = initial_state(span);

  while (!state.queue_empty()) {
    const ActionSet legal = legal_actions(state);
    int legal_count = 0;
    for (Action a : kAllActions) legal_count += legal.contains(a) ? 1 : 0;
    if (legal_count == 1) {
      state = apply(state, Action::kShift);
      out.actions.push_back(Action::kShift);
      continue;
    }
    const ActionScores scores = score_fn(state);
    std::optional<Action> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Action a : kAllActions) {
      if (!legal.contains(a)) continue;
      const double s = std::isnan(scores[static_cast<int>(a)])
                           ? -std::numeric_limits<double>::infinity()
                           : scores[static_cast<int>(a)];
      if (!best || s > best_score) {
        best = a;
        best_score = s;
      }
    }
    state = apply(state, *best);
    out.actions.push_back(*best);
  }
  while (!state.stack_empty() && state.head_of(state.stack_top())) {
    state = apply(state, Action::kReduce);
    out.actions.push_back(Action::kReduce);
  }

  out.heads.assign(span.size(), 0);
  for (const auto& [dep, head] : state.arcs()) out.heads[position_in(span, dep)] = head;

  // Headless EDUs can only remain on the stack; the bottom-most one becomes
  // the span root and adopts the others.
  std::optional<int> root;
  for (int id : state.stack()) {
    if (state.head_of(id)) continue;
    if (!root) {
      root = id;
    } else {
      out.heads[position_in(span, id)] = *root;
    }
  }
  out.root = *root;
  return out;
}

}  // namespace ddp
