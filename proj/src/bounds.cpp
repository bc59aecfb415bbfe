#include "ddp/bounds.hpp"

#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "ddp/sentfirst.hpp"
#include "json.hpp"

namespace ddp {

namespace {

void require_dependency_guard(int l) {
  if (l < 1 || l > kMaxDependencyEdus) {
    throw Error("dependency enumeration needs 1 to " + std::to_string(kMaxDependencyEdus) + " EDUs, got " +
                std::to_string(l));
  }
}

// Interval decomposition: a tree over [i, j] picks a root r; its left and
// right dependents are sequences of consecutive subtrees attached to r.
class ProjectiveEnumerator {
 public:
  const std::vector<HeadArray>& trees(int i, int j) {
    const auto key = std::make_pair(i, j);
    if (auto it = trees_.find(key); it != trees_.end()) return it->second;
    std::vector<HeadArray> out;
    for (int r = i; r <= j; ++r) {
      const auto& left = forests(i, r - 1, r);
      const auto& right = forests(r + 1, j, r);
      for (const HeadArray& l : left) {
        for (const HeadArray& rt : right) {
          HeadArray h = l;
          h.push_back(0);
          h.insert(h.end(), rt.begin(), rt.end());
          out.push_back(std::move(h));
        }
      }
    }
    return trees_.emplace(key, std::move(out)).first->second;
  }

 private:
  const std::vector<HeadArray>& forests(int i, int j, int parent) {
    const auto key = std::make_tuple(i, j, parent);
    if (auto it = forests_.find(key); it != forests_.end()) return it->second;
    std::vector<HeadArray> out;
    if (i > j) {
      out.emplace_back();
    } else {
      for (int k = i; k <= j; ++k) {
        const auto& first = trees(i, k);
        const auto& rest = forests(k + 1, j, parent);
        for (const HeadArray& t : first) {
          for (const HeadArray& f : rest) {
            HeadArray h = t;
            for (int& v : h) {
              if (v == 0) v = parent;
            }
            h.insert(h.end(), f.begin(), f.end());
            out.push_back(std::move(h));
          }
        }
      }
    }
    return forests_.emplace(key, std::move(out)).first->second;
  }

  std::map<std::pair<int, int>, std::vector<HeadArray>> trees_;
  std::map<std::tuple<int, int, int>, std::vector<HeadArray>> forests_;
};

Document shape_document(const DocumentShape& shape) {
  std::vector<std::pair<std::string, int>> edus;
  for (int s = 0; s < shape.m(); ++s) {
    for (int k = 0; k < shape.sentence_lengths[static_cast<std::size_t>(s)]; ++k) edus.emplace_back("x", s);
  }
  return make_document("shape:" + shape.to_string(), edus);
}

void require_valid_shape(const DocumentShape& shape) {
  if (shape.sentence_lengths.empty()) throw Error("a document shape needs at least one sentence");
  for (int len : shape.sentence_lengths) {
    if (len < 1) throw Error("sentence lengths must be positive");
  }
}

void expand(std::vector<std::pair<int, int>>& pending, Constituents& constituents,
            const std::function<void(const Constituents&)>& visit) {
  if (pending.empty()) {
    visit(constituents);
    return;
  }
  const auto [a, b] = pending.back();
  pending.pop_back();
  if (a == b) {
    expand(pending, constituents, visit);
  } else {
    constituents.emplace_back(a, b);
    for (int k = a; k < b; ++k) {
      pending.emplace_back(k + 1, b);
      pending.emplace_back(a, k);
      expand(pending, constituents, visit);
      pending.pop_back();
      pending.pop_back();
    }
    constituents.pop_back();
  }
  pending.emplace_back(a, b);
}

}  // namespace

DocumentShape DocumentShape::parse(const std::string& text) {
  if (!text.empty() && text.back() == ',') throw Error("invalid shape \"" + text + "\"");
  DocumentShape shape;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    int len = 0;
    try {
      len = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw Error("invalid shape \"" + text + "\"");
    }
    if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos) {
      throw Error("invalid shape \"" + text + "\"");
    }
    shape.sentence_lengths.push_back(len);
  }
  require_valid_shape(shape);
  return shape;
}

int DocumentShape::n() const {
  int n = 0;
  for (int len : sentence_lengths) n += len >= 2 ? 1 : 0;
  return n;
}

int DocumentShape::total() const { return std::accumulate(sentence_lengths.begin(), sentence_lengths.end(), 0); }

std::vector<SentenceSpan> DocumentShape::spans() const {
  std::vector<SentenceSpan> out;
  int first = 1;
  for (int len : sentence_lengths) {
    out.push_back({first, first + len - 1});
    first += len;
  }
  return out;
}

std::string DocumentShape::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < sentence_lengths.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(sentence_lengths[k]);
  }
  return out;
}

std::vector<DocumentShape> shapes_up_to(int max_total, int min_sentences) {
  std::vector<DocumentShape> out;
  std::function<void(int, DocumentShape&)> grow = [&](int remaining, DocumentShape& cur) {
    if (remaining == 0) {
      if (cur.m() >= min_sentences) out.push_back(cur);
      return;
    }
    for (int len = 1; len <= remaining; ++len) {
      cur.sentence_lengths.push_back(len);
      grow(remaining - len, cur);
      cur.sentence_lengths.pop_back();
    }
  };
  for (int total = 1; total <= max_total; ++total) {
    DocumentShape cur;
    grow(total, cur);
  }
  return out;
}

std::vector<HeadArray> enumerate_projective_trees(int l) {
  require_dependency_guard(l);
  ProjectiveEnumerator e;
  return e.trees(1, l);
}

std::vector<HeadArray> enumerate_sentfirst_trees(const DocumentShape& shape) {
  require_valid_shape(shape);
  require_dependency_guard(shape.total());
  const Document doc = shape_document(shape);

  // Candidate parses per sentence, then the odometer over all combinations.
  std::vector<std::vector<SentenceParse>> per_sentence;
  for (int s = 0; s < shape.m(); ++s) {
    const SentenceSpan& span = doc.sentence_spans[static_cast<std::size_t>(s)];
    std::vector<int> ids(static_cast<std::size_t>(span.size()));
    std::iota(ids.begin(), ids.end(), span.first);
    std::vector<SentenceParse> options;
    for (const HeadArray& local : enumerate_projective_trees(span.size())) {
      SentenceParse sp;
      sp.sentence_index = s;
      sp.parse.span = ids;
      for (std::size_t k = 0; k < local.size(); ++k) {
        sp.parse.heads.push_back(local[k] == 0 ? 0 : local[k] + span.first - 1);
        if (local[k] == 0) sp.parse.root = ids[k];
      }
      options.push_back(std::move(sp));
    }
    per_sentence.push_back(std::move(options));
  }
  const std::vector<HeadArray> inter_trees = enumerate_projective_trees(shape.m());

  std::vector<HeadArray> out;
  std::vector<std::size_t> choice(per_sentence.size(), 0);
  while (true) {
    std::vector<SentenceParse> intra;
    std::vector<int> roots;
    for (std::size_t s = 0; s < choice.size(); ++s) {
      intra.push_back(per_sentence[s][choice[s]]);
      roots.push_back(intra.back().root_edu());
    }
    for (const HeadArray& t : inter_trees) {
      SpanParse inter;
      inter.span = roots;
      for (std::size_t k = 0; k < t.size(); ++k) {
        inter.heads.push_back(t[k] == 0 ? 0 : roots[static_cast<std::size_t>(t[k] - 1)]);
        if (t[k] == 0) inter.root = roots[k];
      }
      out.push_back(assemble(doc, intra, inter).heads);
    }
    std::size_t s = 0;
    while (s < choice.size() && ++choice[s] == per_sentence[s].size()) choice[s++] = 0;
    if (s == choice.size()) break;
  }
  return out;
}

std::vector<HeadArray> filter_sentfirst_trees(const DocumentShape& shape) {
  require_valid_shape(shape);
  const std::vector<SentenceSpan> spans = shape.spans();
  std::vector<HeadArray> out;
  for (HeadArray& h : enumerate_projective_trees(shape.total())) {
    if (has_sentfirst_structure(spans, h)) out.push_back(std::move(h));
  }
  return out;
}

void for_each_binary_tree(int l, const std::function<void(const Constituents&)>& visit) {
  if (l < 1 || l > kMaxConstituencyLeaves) {
    throw Error("binary tree enumeration needs 1 to " + std::to_string(kMaxConstituencyLeaves) + " leaves, got " +
                std::to_string(l));
  }
  std::vector<std::pair<int, int>> pending{{1, l}};
  Constituents constituents;
  expand(pending, constituents, visit);
}

std::uint64_t enumerate_binary_trees(int l) {
  std::uint64_t count = 0;
  for_each_binary_tree(l, [&](const Constituents&) { count = checked_add(count, 1); });
  return count;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) throw Error("count overflow");
  return a + b;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) throw Error("count overflow");
  return a * b;
}

BoundsReport check_theorem1(const DocumentShape& shape) {
  require_valid_shape(shape);
  require_dependency_guard(shape.total());
  BoundsReport r;
  r.shape = shape;
  r.theorem = 1;
  r.t_count = enumerate_projective_trees(shape.total()).size();
  r.tprime_count = enumerate_sentfirst_trees(shape).size();
  r.bound_numerator = checked_mul(2, r.t_count);
  r.bound_denominator = static_cast<std::uint64_t>(shape.n() + 1);
  r.holds = checked_mul(r.tprime_count, r.bound_denominator) <= r.bound_numerator;
  r.vacuous = shape.n() <= 1;
  return r;
}

BoundsReport check_theorem2(const DocumentShape& shape) {
  require_valid_shape(shape);
  if (shape.m() < 2) throw Error("theorem 2 needs at least two sentences, shape " + shape.to_string() + " has one");
  if (shape.total() > kMaxConstituencyLeaves) {
    throw Error("binary tree enumeration is limited to " + std::to_string(kMaxConstituencyLeaves) + " leaves");
  }
  BoundsReport r;
  r.shape = shape;
  r.theorem = 2;
  r.t_count = enumerate_binary_trees(shape.total());
  r.tprime_count = enumerate_binary_trees(shape.m());
  for (int len : shape.sentence_lengths) r.tprime_count = checked_mul(r.tprime_count, enumerate_binary_trees(len));
  r.bound_numerator = r.t_count;
  r.bound_denominator = std::uint64_t{1} << shape.n();
  r.holds = checked_mul(r.tprime_count, r.bound_denominator) <= r.bound_numerator;
  return r;
}

std::string report_json(const BoundsReport& report) {
  nlohmann::json j{{"theorem", report.theorem},
                   {"shape", report.shape.sentence_lengths},
                   {"m", report.shape.m()},
                   {"n", report.shape.n()},
                   {"t_count", report.t_count},
                   {"tprime_count", report.tprime_count},
                   {"bound", report.bound()},
                   {"bound_numerator", report.bound_numerator},
                   {"bound_denominator", report.bound_denominator},
                   {"holds", report.holds}};
  if (report.theorem == 1) j["vacuous"] = report.vacuous;
  return j.dump();
}

}  // namespace ddp
