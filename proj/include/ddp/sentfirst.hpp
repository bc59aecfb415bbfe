#pragma once

// Sent-First parsing: one arc-eager parse per sentence, then one parse over
// the sentence roots, assembled into a document tree.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "ddp/corpus.hpp"
#include "ddp/encoder.hpp"
#include "ddp/neural.hpp"
#include "ddp/transition.hpp"

namespace ddp {

// Feature template slots, in the order they are concatenated.
enum class Slot { kS0 = 0, kS1, kQ0, kQ1, kHeadS0, kHeadS1 };
inline constexpr int kNumSlots = 6;

struct StateFeature {
  std::array<std::optional<int>, kNumSlots> slots;

  std::optional<int> operator[](Slot s) const { return slots[static_cast<std::size_t>(s)]; }
};

StateFeature feature_slots(const ParserState& state);

// Concatenation of the six slot vectors (zeros for empty slots), 6 * dim
// entries. Throws Error naming the EDU when a vector is missing.
Eigen::VectorXd state_feature(const ParserState& state, const EduVectors& vectors, int dim);

using FeatureScorer = std::function<ActionScores(const Eigen::VectorXd& feature)>;

// Log-probabilities of a trained action model as decoding scores.
FeatureScorer model_scorer(const FeedForwardModel& model);

struct SentenceParse {
  int sentence_index = 0;
  SpanParse parse;  // span = the sentence's EDU ids

  int root_edu() const { return parse.root; }
};

struct DocumentParse {
  std::vector<SentenceParse> sentences;
  SpanParse inter;  // span = sentence roots in document order
  DependencyTree tree;
};

// Relations of the result are "ROOT" for the document root and "_" elsewhere.
DependencyTree assemble(const Document& doc, const std::vector<SentenceParse>& intra,
                        const SpanParse& inter);

DocumentParse parse_document(const Document& doc, const FeatureScorer& intra_scorer,
                             const FeatureScorer& inter_scorer, const EduEncoder& encoder);

// EDUs whose head is the virtual root or lies outside their own sentence,
// in document order.
std::vector<int> sentence_roots(const std::vector<SentenceSpan>& spans, const std::vector<int>& heads);

// True when every sentence has exactly one EDU with a head or a dependent
// outside the sentence (the virtual root counts as outside).
bool has_sentfirst_structure(const std::vector<SentenceSpan>& spans, const std::vector<int>& heads);

// Gold arc-eager training targets for one span of a document.
struct OracleSpan {
  std::optional<int> sentence;  // nullopt for the inter-sentential span
  std::vector<int> span;
  SpanHeads gold;
  std::vector<Action> actions;
};

struct OracleExtraction {
  std::vector<OracleSpan> spans;
  int skipped = 0;  // spans whose gold restriction is not a projective tree
};

// Intra spans restrict the gold tree to each sentence (an outside head
// becomes 0). The inter span holds the sentence roots; each root's head is
// mapped to the root of the sentence containing its gold head. Spans that are
// not single-rooted and projective after restriction are skipped.
OracleExtraction extract_oracle(const Document& doc, const DependencyTree& gold, bool intra, bool inter);

// (state feature, gold action) for every step of an oracle derivation.
std::vector<ClassSample> oracle_samples(const OracleSpan& span, const EduVectors& vectors, int dim);

}  // namespace ddp
