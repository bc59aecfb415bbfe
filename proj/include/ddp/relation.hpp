#pragma once

// Relation identification as stacked sequence labelling over EDU pairs.
//
// Every EDU e is tiled with its head h into a pair whose members are kept in
// document order. Layer one tags the whole pair sequence; layer two tags the
// pairs of the sentence roots and overwrites layer one's labels there.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "ddp/corpus.hpp"
#include "ddp/encoder.hpp"
#include "ddp/neural.hpp"

namespace ddp {

// PE_j = sin(No / 10000^(j/d)) + cos(ID / 10000^(j/d)), where No is the
// sentence index of the EDU and ID its index inside the sentence (both
// 0-based).
Eigen::VectorXd position_embedding(int sentence_no, int position_in_sentence, int dim);

struct PairRepr {
  int e_id = 0;
  int h_id = 0;
  int first = 0;   // document order; the root pair is (e, 0)
  int second = 0;
  Eigen::VectorXd vector;
  Eigen::VectorXd pe;

  Eigen::VectorXd combined() const { return vector + pe; }
};

// Ordered key of the pair (e, h).
std::pair<int, int> pair_key(int e_id, int h_id);

// One pair per EDU in id order. Throws Error if the encoder cannot supply a
// pair vector.
std::vector<PairRepr> build_pair_sequence(const Document& doc, const DependencyTree& tree,
                                          const EduEncoder& encoder);

struct StackedRelationLabeler {
  RelationSet labels;
  BiLstmTagger intra_layer;
  BiLstmTagger inter_layer;
};

struct DirectRelationClassifier {
  RelationSet labels;
  FeedForwardModel model;

  // Argmax over the pair vector, lowest index on ties.
  int classify(const Eigen::VectorXd& pair_vector) const;
};

// Relation labels for `tree`; the document root always gets "ROOT" and no
// other EDU does.
std::vector<std::string> label_relations(const Document& doc, const DependencyTree& tree,
                                         const StackedRelationLabeler& labeler,
                                         const EduEncoder& encoder);

std::vector<std::string> label_relations_direct(const Document& doc, const DependencyTree& tree,
                                                const DirectRelationClassifier& classifier,
                                                const EduEncoder& encoder);

struct RelationSamples {
  std::vector<SequenceSample> intra_layer;
  std::vector<SequenceSample> inter_layer;
  std::vector<ClassSample> direct;
};

// Appends gold training sequences for one document. Throws Error when a gold
// relation is missing from `labels`.
void append_relation_samples(const Document& doc, const DependencyTree& gold, const RelationSet& labels,
                             const EduEncoder& encoder, RelationSamples& out);

}  // namespace ddp
