#pragma once

// Attachment scores and relation breakdowns. Corpus figures are
// micro-averaged over EDUs.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddp/corpus.hpp"

namespace ddp {

enum class LasMode { kGoldHeads, kPredictedHeads };

double uas(const std::vector<int>& gold_heads, const std::vector<int>& pred_heads);

// kGoldHeads: fraction of nodes whose relation is right (pred was labelled on
// gold heads). kPredictedHeads: head and relation both right. With
// count_root false the gold root node is left out of the denominator.
double las(const DependencyTree& gold, const DependencyTree& pred, LasMode mode, bool count_root = true);

struct LevelBreakdown {
  double intra_uas = 0.0;
  double inter_uas = 0.0;
  int intra_nodes = 0;
  int inter_nodes = 0;
};

// A node is intra-sentential when its gold head lies in its own sentence.
// A class with no nodes reports 0.
LevelBreakdown level_breakdown(const Document& doc, const DependencyTree& gold, const DependencyTree& pred);

struct LabelScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int support = 0;    // gold occurrences
  int predicted = 0;  // predicted occurrences
  bool precision_defined = true;  // false when the label was never predicted
};

// Per-label scores over aligned relation arrays.
std::map<std::string, LabelScores> per_relation_f1(const std::vector<std::string>& gold,
                                                   const std::vector<std::string>& pred);

struct SpanBucket {
  int correct = 0;
  int total = 0;
  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

inline constexpr int kMaxSpanBucket = 9;  // bucket 9 collects spans >= 9

// Relation accuracy bucketed by the gold span |i - head(i)|; the root is
// skipped.
std::map<int, SpanBucket> per_span_accuracy(const DependencyTree& gold, const DependencyTree& pred);

struct EvalOptions {
  bool count_root_relation = true;
};

struct Metrics {
  int nodes = 0;
  double uas = 0.0;
  double uas_without_root = 0.0;
  std::optional<double> las_gold;
  double las_pred = 0.0;
  double intra_uas = 0.0;
  double inter_uas = 0.0;
  int intra_nodes = 0;
  int inter_nodes = 0;
  int relation_nodes = 0;  // nodes scored for relations (root excluded if configured)
  std::map<std::string, LabelScores> per_relation;
  std::map<int, SpanBucket> per_span;
};

// Documents are matched by doc_id. `gold_head_pred` holds relations predicted
// on gold heads; when given it feeds las_gold and the per-relation and
// per-span breakdowns, otherwise those use `pred`.
Metrics evaluate_corpus(const std::vector<CorpusRecord>& gold, const std::vector<CorpusRecord>& pred,
                        const std::vector<CorpusRecord>* gold_head_pred, const EvalOptions& options);

std::string metrics_json(const Metrics& m);
std::string metrics_table(const Metrics& m);

}  // namespace ddp
