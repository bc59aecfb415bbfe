#include "ddp/relation.hpp"

#include <cmath>

#include "ddp/sentfirst.hpp"

namespace ddp {

namespace {

int position_in_sentence(const Document& doc, int id) {
  return id - doc.sentence_spans.at(static_cast<std::size_t>(doc.sentence_of(id))).first;
}

std::vector<std::size_t> root_positions(const Document& doc, const DependencyTree& tree) {
  std::vector<std::size_t> out;
  for (int id : sentence_roots(doc.sentence_spans, tree.heads)) out.push_back(static_cast<std::size_t>(id - 1));
  return out;
}

std::vector<bool> non_root_mask(const RelationSet& labels) {
  std::vector<bool> mask(static_cast<std::size_t>(labels.size()), true);
  mask[static_cast<std::size_t>(labels.root_index())] = false;
  return mask;
}

}  // namespace

Eigen::VectorXd position_embedding(int sentence_no, int position_in_sentence, int dim) {
  if (sentence_no < 0 || position_in_sentence < 0) throw Error("positions must be non-negative");
  if (dim < 1) throw Error("position embedding dimension must be positive");
  Eigen::VectorXd pe(dim);
  for (int j = 0; j < dim; ++j) {
    const double scale = std::pow(10000.0, static_cast<double>(j) / dim);
    pe[j] = std::sin(sentence_no / scale) + std::cos(position_in_sentence / scale);
  }
  return pe;
}

std::pair<int, int> pair_key(int e_id, int h_id) {
  if (h_id == 0) return {e_id, 0};
  return {std::min(e_id, h_id), std::max(e_id, h_id)};
}

std::vector<PairRepr> build_pair_sequence(const Document& doc, const DependencyTree& tree,
                                          const EduEncoder& encoder) {
  if (tree.size() != doc.size()) throw Error("tree does not match document " + doc.doc_id);
  std::vector<PairRepr> out;
  out.reserve(static_cast<std::size_t>(doc.size()));
  for (const Edu& e : doc.edus) {
    PairRepr p;
    p.e_id = e.id;
    p.h_id = tree.head(e.id);
    std::tie(p.first, p.second) = pair_key(p.e_id, p.h_id);
    p.vector = encoder.pair(doc, p.first, p.second);
    p.pe = position_embedding(e.sentence_index, position_in_sentence(doc, e.id),
                              static_cast<int>(p.vector.size()));
    out.push_back(std::move(p));
  }
  return out;
}

int DirectRelationClassifier::classify(const Eigen::VectorXd& pair_vector) const {
  return argmax(model.logits(pair_vector));
}

std::vector<std::string> label_relations(const Document& doc, const DependencyTree& tree,
                                         const StackedRelationLabeler& labeler,
                                         const EduEncoder& encoder) {
  const std::vector<PairRepr> pairs = build_pair_sequence(doc, tree, encoder);
  const std::vector<bool> mask = non_root_mask(labeler.labels);

  std::vector<Eigen::VectorXd> inputs;
  for (const auto& p : pairs) inputs.push_back(p.combined());
  const auto layer1 = labeler.intra_layer.forward(inputs);
  std::vector<std::string> out;
  for (const auto& probs : layer1) out.push_back(labeler.labels.label(argmax(probs, mask)));

  const auto roots = root_positions(doc, tree);
  std::vector<Eigen::VectorXd> root_inputs;
  for (std::size_t k : roots) root_inputs.push_back(inputs[k]);
  const auto layer2 = labeler.inter_layer.forward(root_inputs);
  for (std::size_t r = 0; r < roots.size(); ++r) out[roots[r]] = labeler.labels.label(argmax(layer2[r], mask));

  for (int id = 1; id <= doc.size(); ++id) {
    if (tree.head(id) == 0) out[static_cast<std::size_t>(id - 1)] = std::string(kRootLabel);
  }
  return out;
}

std::vector<std::string> label_relations_direct(const Document& doc, const DependencyTree& tree,
                                                const DirectRelationClassifier& classifier,
                                                const EduEncoder& encoder) {
  const std::vector<PairRepr> pairs = build_pair_sequence(doc, tree, encoder);
  const std::vector<bool> mask = non_root_mask(classifier.labels);
  std::vector<std::string> out;
  for (const auto& p : pairs) {
    if (p.h_id == 0) {
      out.emplace_back(kRootLabel);
    } else {
      out.push_back(classifier.labels.label(argmax(classifier.model.logits(p.vector), mask)));
    }
  }
  return out;
}

void append_relation_samples(const Document& doc, const DependencyTree& gold, const RelationSet& labels,
                             const EduEncoder& encoder, RelationSamples& out) {
  const std::vector<PairRepr> pairs = build_pair_sequence(doc, gold, encoder);
  SequenceSample layer1;
  for (const auto& p : pairs) {
    const auto label = labels.index_of(gold.relation(p.e_id));
    if (!label) {
      throw Error("relation \"" + gold.relation(p.e_id) + "\" of " + doc.doc_id + " EDU " +
                  std::to_string(p.e_id) + " is not in the label set");
    }
    layer1.inputs.push_back(p.combined());
    layer1.gold.push_back(*label);
    out.direct.push_back({p.vector, *label});
  }
  SequenceSample layer2;
  for (std::size_t k : root_positions(doc, gold)) {
    layer2.inputs.push_back(layer1.inputs[k]);
    layer2.gold.push_back(layer1.gold[k]);
  }
  out.intra_layer.push_back(std::move(layer1));
  out.inter_layer.push_back(std::move(layer2));
}

}  // namespace ddp
