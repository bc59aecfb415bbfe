#include "ddp/sentfirst.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ddp {

namespace {

std::vector<int> sentence_ids(const SentenceSpan& s) {
  std::vector<int> ids;
  for (int id = s.first; id <= s.last; ++id) ids.push_back(id);
  return ids;
}

int sentence_containing(const std::vector<SentenceSpan>& spans, int id) {
  for (std::size_t k = 0; k < spans.size(); ++k) {
    if (spans[k].contains(id)) return static_cast<int>(k);
  }
  throw Error("EDU " + std::to_string(id) + " is not covered by any sentence");
}

}  // namespace

StateFeature feature_slots(const ParserState& state) {
  StateFeature f;
  const auto& stack = state.stack();
  const auto queue = state.queue();
  auto set = [&](Slot s, std::optional<int> id) { f.slots[static_cast<std::size_t>(s)] = id; };
  if (!stack.empty()) {
    set(Slot::kS0, stack.back());
    set(Slot::kHeadS0, state.head_of(stack.back()));
  }
  if (stack.size() >= 2) {
    const int s1 = stack[stack.size() - 2];
    set(Slot::kS1, s1);
    set(Slot::kHeadS1, state.head_of(s1));
  }
  if (!queue.empty()) set(Slot::kQ0, queue[0]);
  if (queue.size() >= 2) set(Slot::kQ1, queue[1]);
  return f;
}

Eigen::VectorXd state_feature(const ParserState& state, const EduVectors& vectors, int dim) {
  const StateFeature f = feature_slots(state);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(kNumSlots * dim);
  for (int k = 0; k < kNumSlots; ++k) {
    const auto id = f.slots[static_cast<std::size_t>(k)];
    if (!id) continue;
    auto it = vectors.find(*id);
    if (it == vectors.end()) throw Error("no embedding for EDU " + std::to_string(*id));
    if (it->second.size() != dim) {
      throw Error("embedding for EDU " + std::to_string(*id) + " has dimension " +
                  std::to_string(it->second.size()) + ", expected " + std::to_string(dim));
    }
    out.segment(k * dim, dim) = it->second;
  }
  return out;
}

FeatureScorer model_scorer(const FeedForwardModel& model) {
  return [&model](const Eigen::VectorXd& feature) {
    const Eigen::VectorXd probs = model.forward(feature);
    ActionScores scores{};
    for (int k = 0; k < kNumActions; ++k) scores[static_cast<std::size_t>(k)] = std::log(probs[k]);
    return scores;
  };
}

DependencyTree assemble(const Document& doc, const std::vector<SentenceParse>& intra,
                        const SpanParse& inter) {
  if (static_cast<int>(intra.size()) != doc.sentence_count()) {
    throw Error("expected one sentence parse per sentence of " + doc.doc_id);
  }
  std::vector<int> roots;
  for (const SentenceParse& sp : intra) roots.push_back(sp.root_edu());
  if (roots != inter.span) throw Error("inter-sentential parse is not over the sentence roots");

  DependencyTree tree;
  tree.heads.assign(static_cast<std::size_t>(doc.size()), 0);
  tree.relations.assign(static_cast<std::size_t>(doc.size()), std::string(kUnlabeled));
  for (const SentenceParse& sp : intra) {
    const SentenceSpan& s = doc.sentence_spans.at(static_cast<std::size_t>(sp.sentence_index));
    if (sentence_ids(s) != sp.parse.span) throw Error("sentence parse does not cover its sentence");
    for (std::size_t k = 0; k < sp.parse.span.size(); ++k) {
      tree.heads[static_cast<std::size_t>(sp.parse.span[k] - 1)] = sp.parse.heads[k];
    }
  }
  for (std::size_t k = 0; k < inter.span.size(); ++k) {
    tree.heads[static_cast<std::size_t>(inter.span[k] - 1)] = inter.heads[k];
  }
  tree.relations[static_cast<std::size_t>(inter.root - 1)] = std::string(kRootLabel);
  return tree;
}

DocumentParse parse_document(const Document& doc, const FeatureScorer& intra_scorer,
                             const FeatureScorer& inter_scorer, const EduEncoder& encoder) {
  DocumentParse out;
  const int dim = encoder.dim();
  const EduVectors intra_vectors = encoder.intra(doc);
  for (int k = 0; k < doc.sentence_count(); ++k) {
    SentenceParse sp;
    sp.sentence_index = k;
    sp.parse = decode(sentence_ids(doc.sentence_spans[static_cast<std::size_t>(k)]),
                      [&](const ParserState& st) { return intra_scorer(state_feature(st, intra_vectors, dim)); });
    out.sentences.push_back(std::move(sp));
  }

  std::vector<int> roots;
  for (const SentenceParse& sp : out.sentences) roots.push_back(sp.root_edu());
  const EduVectors inter_vectors = encoder.inter(doc, roots);
  out.inter = decode(roots, [&](const ParserState& st) {
    return inter_scorer(state_feature(st, inter_vectors, dim));
  });
  out.tree = assemble(doc, out.sentences, out.inter);
  return out;
}

std::vector<int> sentence_roots(const std::vector<SentenceSpan>& spans, const std::vector<int>& heads) {
  std::vector<int> roots;
  for (const SentenceSpan& s : spans) {
    for (int id = s.first; id <= s.last; ++id) {
      const int h = heads.at(static_cast<std::size_t>(id - 1));
      if (h == 0 || !s.contains(h)) roots.push_back(id);
    }
  }
  return roots;
}

bool has_sentfirst_structure(const std::vector<SentenceSpan>& spans, const std::vector<int>& heads) {
  std::vector<bool> external(heads.size(), false);
  for (std::size_t k = 0; k < heads.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    const int h = heads[k];
    const int own = sentence_containing(spans, id);
    if (h == 0) {
      external[k] = true;
    } else if (sentence_containing(spans, h) != own) {
      external[k] = true;
      external[static_cast<std::size_t>(h - 1)] = true;
    }
  }
  for (const SentenceSpan& s : spans) {
    int count = 0;
    for (int id = s.first; id <= s.last; ++id) count += external[static_cast<std::size_t>(id - 1)] ? 1 : 0;
    if (count != 1) return false;
  }
  return true;
}

OracleExtraction extract_oracle(const Document& doc, const DependencyTree& gold, bool intra, bool inter) {
  OracleExtraction out;
  auto try_add = [&](OracleSpan span) {
    try {
      span.actions = oracle_actions(span.span, span.gold);
      out.spans.push_back(std::move(span));
    } catch (const Error&) {
      ++out.skipped;
    }
  };

  if (intra) {
    for (int k = 0; k < doc.sentence_count(); ++k) {
      const SentenceSpan& s = doc.sentence_spans[static_cast<std::size_t>(k)];
      OracleSpan span;
      span.sentence = k;
      span.span = sentence_ids(s);
      for (int id : span.span) {
        const int h = gold.head(id);
        span.gold.push_back(s.contains(h) ? h : 0);
      }
      try_add(std::move(span));
    }
  }

  if (inter) {
    const std::vector<int> roots = sentence_roots(doc.sentence_spans, gold.heads);
    if (static_cast<int>(roots.size()) != doc.sentence_count()) {
      ++out.skipped;
      return out;
    }
    OracleSpan span;
    span.span = roots;
    for (int r : roots) {
      const int h = gold.head(r);
      span.gold.push_back(h == 0 ? 0 : roots[static_cast<std::size_t>(doc.sentence_of(h))]);
    }
    try_add(std::move(span));
  }
  return out;
}

std::vector<ClassSample> oracle_samples(const OracleSpan& span, const EduVectors& vectors, int dim) {
  std::vector<ClassSample> samples;
  ParserState state = initial_state(span.span);
  for (Action a : span.actions) {
    samples.push_back({state_feature(state, vectors, dim), static_cast<int>(a)});
    state = apply(state, a);
  }
  return samples;
}

}  // namespace ddp
