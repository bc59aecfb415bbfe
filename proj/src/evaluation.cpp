#include "ddp/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "ddp/log.hpp"
#include "json.hpp"

namespace ddp {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw Error("gold and predicted arrays differ in length (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
}

double ratio(long num, long den) { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

int span_bucket(int id, int head) { return std::min(kMaxSpanBucket, std::abs(id - head)); }

struct Counts {
  long nodes = 0, head_ok = 0, head_ok_nonroot = 0, nonroot = 0;
  long rel_nodes = 0, las_pred_ok = 0;
  long las_gold_ok = 0;
  long intra = 0, intra_ok = 0, inter = 0, inter_ok = 0;
  std::vector<std::string> rel_gold, rel_pred;
  std::map<int, SpanBucket> spans;
};

const CorpusRecord& find_doc(const std::vector<CorpusRecord>& records, const std::string& doc_id,
                             const char* what) {
  auto it = std::find_if(records.begin(), records.end(), [&](const CorpusRecord& r) { return r.doc.doc_id == doc_id; });
  if (it == records.end()) throw DataError(std::string(what) + " has no document " + doc_id);
  return *it;
}

}  // namespace

double uas(const std::vector<int>& gold_heads, const std::vector<int>& pred_heads) {
  require_same_length(gold_heads.size(), pred_heads.size());
  if (gold_heads.empty()) return 0.0;
  long ok = 0;
  for (std::size_t k = 0; k < gold_heads.size(); ++k) ok += gold_heads[k] == pred_heads[k] ? 1 : 0;
  return ratio(ok, static_cast<long>(gold_heads.size()));
}

double las(const DependencyTree& gold, const DependencyTree& pred, LasMode mode, bool count_root) {
  require_same_length(gold.heads.size(), pred.heads.size());
  require_same_length(gold.relations.size(), pred.relations.size());
  long ok = 0, total = 0;
  for (std::size_t k = 0; k < gold.heads.size(); ++k) {
    if (!count_root && gold.heads[k] == 0) continue;
    ++total;
    const bool head_ok = mode == LasMode::kGoldHeads || gold.heads[k] == pred.heads[k];
    if (head_ok && gold.relations[k] == pred.relations[k]) ++ok;
  }
  return ratio(ok, total);
}

LevelBreakdown level_breakdown(const Document& doc, const DependencyTree& gold, const DependencyTree& pred) {
  require_same_length(gold.heads.size(), pred.heads.size());
  long intra = 0, intra_ok = 0, inter = 0, inter_ok = 0;
  for (const Edu& e : doc.edus) {
    const int h = gold.head(e.id);
    const bool ok = h == pred.head(e.id);
    if (h != 0 && doc.sentence_of(h) == e.sentence_index) {
      ++intra;
      intra_ok += ok ? 1 : 0;
    } else {
      ++inter;
      inter_ok += ok ? 1 : 0;
    }
  }
  return {ratio(intra_ok, intra), ratio(inter_ok, inter), static_cast<int>(intra), static_cast<int>(inter)};
}

std::map<std::string, LabelScores> per_relation_f1(const std::vector<std::string>& gold,
                                                   const std::vector<std::string>& pred) {
  require_same_length(gold.size(), pred.size());
  std::map<std::string, LabelScores> out;
  std::map<std::string, int> hits;
  for (std::size_t k = 0; k < gold.size(); ++k) {
    ++out[gold[k]].support;
    ++out[pred[k]].predicted;
    if (gold[k] == pred[k]) ++hits[gold[k]];
  }
  for (auto& [label, s] : out) {
    const int tp = hits[label];
    s.precision_defined = s.predicted > 0;
    s.precision = s.predicted > 0 ? static_cast<double>(tp) / s.predicted : 0.0;
    s.recall = s.support > 0 ? static_cast<double>(tp) / s.support : 0.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  }
  return out;
}

std::map<int, SpanBucket> per_span_accuracy(const DependencyTree& gold, const DependencyTree& pred) {
  require_same_length(gold.heads.size(), pred.heads.size());
  std::map<int, SpanBucket> out;
  for (int id = 1; id <= gold.size(); ++id) {
    const int h = gold.head(id);
    if (h == 0) continue;
    SpanBucket& b = out[span_bucket(id, h)];
    ++b.total;
    if (gold.relation(id) == pred.relation(id)) ++b.correct;
  }
  return out;
}

Metrics evaluate_corpus(const std::vector<CorpusRecord>& gold, const std::vector<CorpusRecord>& pred,
                        const std::vector<CorpusRecord>* gold_head_pred, const EvalOptions& options) {
  Counts c;
  std::set<std::string> known_labels;
  for (const auto& g : gold) known_labels.insert(g.tree.relations.begin(), g.tree.relations.end());

  for (const CorpusRecord& g : gold) {
    const CorpusRecord& p = find_doc(pred, g.doc.doc_id, "prediction file");
    require_same_length(g.tree.heads.size(), p.tree.heads.size());
    const CorpusRecord* gh = gold_head_pred ? &find_doc(*gold_head_pred, g.doc.doc_id, "gold-head prediction file") : nullptr;
    if (gh) require_same_length(g.tree.heads.size(), gh->tree.heads.size());
    const DependencyTree& rel_source = gh ? gh->tree : p.tree;

    for (const Edu& e : g.doc.edus) {
      const auto k = static_cast<std::size_t>(e.id - 1);
      const int h = g.tree.heads[k];
      const bool head_ok = h == p.tree.heads[k];
      ++c.nodes;
      c.head_ok += head_ok ? 1 : 0;
      if (h != 0) {
        ++c.nonroot;
        c.head_ok_nonroot += head_ok ? 1 : 0;
      }
      if (h != 0 && g.doc.sentence_of(h) == e.sentence_index) {
        ++c.intra;
        c.intra_ok += head_ok ? 1 : 0;
      } else {
        ++c.inter;
        c.inter_ok += head_ok ? 1 : 0;
      }

      if (!options.count_root_relation && h == 0) continue;
      ++c.rel_nodes;
      const std::string& gold_rel = g.tree.relations[k];
      if (!known_labels.count(p.tree.relations[k])) {
        log::warn("unknown_relation").kv("doc_id", g.doc.doc_id).kv("edu", e.id).kv("label", p.tree.relations[k]);
      }
      if (head_ok && p.tree.relations[k] == gold_rel) ++c.las_pred_ok;
      if (gh && gh->tree.relations[k] == gold_rel) ++c.las_gold_ok;
      c.rel_gold.push_back(gold_rel);
      c.rel_pred.push_back(rel_source.relations[k]);
      if (h != 0) {
        SpanBucket& b = c.spans[span_bucket(e.id, h)];
        ++b.total;
        if (rel_source.relations[k] == gold_rel) ++b.correct;
      }
    }
  }

  Metrics m;
  m.nodes = static_cast<int>(c.nodes);
  m.uas = ratio(c.head_ok, c.nodes);
  m.uas_without_root = ratio(c.head_ok_nonroot, c.nonroot);
  m.las_pred = ratio(c.las_pred_ok, c.rel_nodes);
  if (gold_head_pred) m.las_gold = ratio(c.las_gold_ok, c.rel_nodes);
  m.intra_uas = ratio(c.intra_ok, c.intra);
  m.inter_uas = ratio(c.inter_ok, c.inter);
  m.intra_nodes = static_cast<int>(c.intra);
  m.inter_nodes = static_cast<int>(c.inter);
  m.relation_nodes = static_cast<int>(c.rel_nodes);
  m.per_relation = per_relation_f1(c.rel_gold, c.rel_pred);
  m.per_span = std::move(c.spans);
  return m;
}

std::string metrics_json(const Metrics& m) {
  using nlohmann::json;
  json per_rel = json::object();
  for (const auto& [label, s] : m.per_relation) {
    per_rel[label] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
                      {"support", s.support}, {"predicted", s.predicted},
                      {"precision_defined", s.precision_defined}};
  }
  json per_span = json::object();
  for (const auto& [span, b] : m.per_span) {
    const std::string key = span == kMaxSpanBucket ? ">=9" : std::to_string(span);
    per_span[key] = {{"accuracy", b.accuracy()}, {"correct", b.correct}, {"total", b.total}};
  }
  json j{{"nodes", m.nodes},
         {"uas", m.uas},
         {"uas_without_root", m.uas_without_root},
         {"las_gold", m.las_gold ? json(*m.las_gold) : json(nullptr)},
         {"las_pred", m.las_pred},
         {"intra_uas", m.intra_uas},
         {"inter_uas", m.inter_uas},
         {"intra_nodes", m.intra_nodes},
         {"inter_nodes", m.inter_nodes},
         {"relation_nodes", m.relation_nodes},
         {"per_relation_f1", std::move(per_rel)},
         {"per_span_accuracy", std::move(per_span)}};
  return j.dump(2);
}

std::string metrics_table(const Metrics& m) {
  std::ostringstream out;
  char line[160];
  auto row = [&](const char* name, double v) {
    std::snprintf(line, sizeof line, "%-18s %6.2f\n", name, 100.0 * v);
    out << line;
  };
  out << "metric             score\n";
  row("UAS", m.uas);
  row("UAS (no root)", m.uas_without_root);
  if (m.las_gold) row("LAS (gold heads)", *m.las_gold);
  row("LAS (pred heads)", m.las_pred);
  row("intra UAS", m.intra_uas);
  row("inter UAS", m.inter_uas);

  std::vector<std::pair<std::string, LabelScores>> rels(m.per_relation.begin(), m.per_relation.end());
  std::stable_sort(rels.begin(), rels.end(), [](const auto& a, const auto& b) { return a.second.support > b.second.support; });
  out << "\nrelation              P      R     F1  support\n";
  for (const auto& [label, s] : rels) {
    if (s.support == 0) continue;
    std::snprintf(line, sizeof line, "%-18s %6.2f%s %6.2f %6.2f %8d\n", label.c_str(), 100.0 * s.precision,
                  s.precision_defined ? " " : "*", 100.0 * s.recall, 100.0 * s.f1, s.support);
    out << line;
  }
  out << "\nspan  accuracy  total\n";
  for (const auto& [span, b] : m.per_span) {
    std::snprintf(line, sizeof line, "%-4s  %8.2f  %5d\n", span == kMaxSpanBucket ? ">=9" : std::to_string(span).c_str(),
                  100.0 * b.accuracy(), b.total);
    out << line;
  }
  return out.str();
}

}  // namespace ddp
