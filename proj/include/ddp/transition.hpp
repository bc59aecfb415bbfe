#pragma once

// Arc-eager transition system over a span of EDU ids.
//
//   Shift     pushes the queue front onto the stack.
//   LeftArc   makes the queue front the head of the stack top, pops the stack.
//   RightArc  makes the stack top the head of the queue front, pushes it.
//   Reduce    pops the stack top (which must already have a head).
//
// A span is an increasing list of EDU ids. Intra-sentential spans are
// contiguous; the inter-sentential span holds the sentence roots.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ddp/corpus.hpp"

namespace ddp {

enum class Action : std::uint8_t { kShift = 0, kLeftArc = 1, kRightArc = 2, kReduce = 3 };

inline constexpr int kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::kShift, Action::kLeftArc, Action::kRightArc, Action::kReduce};

std::string_view to_string(Action a);
std::optional<Action> action_from_string(std::string_view name);

class ActionSet {
 public:
  void insert(Action a) { bits_ |= mask(a); }
  bool contains(Action a) const { return (bits_ & mask(a)) != 0; }
  bool empty() const { return bits_ == 0; }
  bool operator==(const ActionSet&) const = default;

 private:
  static std::uint8_t mask(Action a) { return static_cast<std::uint8_t>(1u << static_cast<int>(a)); }
  std::uint8_t bits_ = 0;
};

ActionSet make_action_set(std::initializer_list<Action> actions);

class ParserState {
 public:
  // Throws Error on an empty span.
  explicit ParserState(std::vector<int> span);

  const std::vector<int>& span() const { return span_; }
  const std::vector<int>& stack() const { return stack_; }
  std::span<const int> queue() const {
    return std::span<const int>(span_).subspan(queue_front_);
  }
  // Dependent id -> head id.
  const std::map<int, int>& arcs() const { return arcs_; }
  std::optional<int> head_of(int id) const;

  bool stack_empty() const { return stack_.empty(); }
  bool queue_empty() const { return queue_front_ >= span_.size(); }
  int stack_top() const { return stack_.back(); }
  int queue_front() const { return span_[queue_front_]; }

  // Test hook: builds an arbitrary configuration. Queue ids must be a suffix
  // of the span.
  static ParserState from_parts(std::vector<int> span, std::vector<int> stack,
                                std::size_t queue_front, std::map<int, int> arcs);

 private:
  friend ParserState apply(const ParserState&, Action);

  std::vector<int> span_;
  std::vector<int> stack_;
  std::size_t queue_front_ = 0;
  std::map<int, int> arcs_;
};

ParserState initial_state(std::vector<int> span);
ActionSet legal_actions(const ParserState& state);
// Throws Error naming the violated precondition when the action is illegal.
ParserState apply(const ParserState& state, Action action);
bool is_terminal(const ParserState& state);

// Head of every span member, aligned with the span; 0 marks the span root
// (its real head lies outside the span).
using SpanHeads = std::vector<int>;

// Canonical static oracle. Throws Error when the gold restriction is not
// single-rooted and projective over the span.
std::vector<Action> oracle_actions(const std::vector<int>& span, const SpanHeads& gold);

// Replays actions from the initial state and returns the resulting heads
// (0 for EDUs left without a head).
SpanHeads replay(const std::vector<int>& span, std::span<const Action> actions);

using ActionScores = std::array<double, kNumActions>;
using ScoreFn = std::function<ActionScores(const ParserState&)>;

struct SpanParse {
  std::vector<int> span;
  SpanHeads heads;
  int root = 0;
  std::vector<Action> actions;
};

// Greedy decoding; always returns a single-rooted projective tree over the
// span. score_fn is not called when Shift is the only legal action.
SpanParse decode(const std::vector<int>& span, const ScoreFn& score_fn);

}  // namespace ddp
