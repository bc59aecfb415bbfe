#include <random>

#include "doctest.h"
#include "ddp/bounds.hpp"
#include "ddp/evaluation.hpp"
#include "json.hpp"

using namespace ddp;

namespace {

DependencyTree tree_of(std::vector<int> heads, std::vector<std::string> rels) {
  DependencyTree t;
  t.heads = std::move(heads);
  t.relations = std::move(rels);
  return t;
}

CorpusRecord record(const std::string& id, const std::vector<int>& sentences, DependencyTree t) {
  std::vector<std::pair<std::string, int>> edus;
  for (int s : sentences) edus.emplace_back("w", s);
  return {make_document(id, edus), std::move(t), true};
}

}  // namespace

TEST_CASE("uas") {
  CHECK(uas({0, 1, 1}, {0, 1, 2}) == doctest::Approx(2.0 / 3.0));
  CHECK(uas({0, 1, 1}, {0, 1, 1}) == 1.0);
  CHECK(uas({0, 1, 1}, {2, 0, 2}) == 0.0);
  CHECK_THROWS_AS(uas({0, 1}, {0}), Error);
}

TEST_CASE("las in both modes") {
  const DependencyTree gold = tree_of({0, 1, 1, 1}, {"ROOT", "a", "b", "c"});
  const DependencyTree half = tree_of({0, 1, 1, 1}, {"ROOT", "a", "x", "x"});
  CHECK(las(gold, half, LasMode::kPredictedHeads) == 0.5);
  CHECK(las(gold, half, LasMode::kGoldHeads) == 0.5);
  CHECK(las(gold, half, LasMode::kPredictedHeads, false) == doctest::Approx(1.0 / 3.0));

  const DependencyTree wrong_head = tree_of({0, 1, 2, 1}, {"ROOT", "a", "b", "c"});
  CHECK(las(gold, wrong_head, LasMode::kPredictedHeads) == 0.75);
  CHECK(las(gold, wrong_head, LasMode::kGoldHeads) == 1.0);
}

TEST_CASE("level breakdown") {
  const Document one = make_document("d", {{"a", 0}, {"b", 0}, {"c", 0}});
  const auto b1 = level_breakdown(one, tree_of({0, 1, 1}, {}), tree_of({0, 1, 1}, {}));
  CHECK(b1.inter_nodes == 1);
  CHECK(b1.intra_nodes == 2);

  const Document two = make_document("d", {{"a", 0}, {"b", 0}, {"c", 1}, {"d", 1}});
  const auto b2 = level_breakdown(two, tree_of({0, 1, 1, 3}, {}), tree_of({2, 1, 2, 3}, {}));
  CHECK(b2.intra_uas == 1.0);
  CHECK(b2.inter_uas == 0.0);
  const double overall = uas({0, 1, 1, 3}, {2, 1, 2, 3});
  CHECK((b2.intra_uas * b2.intra_nodes + b2.inter_uas * b2.inter_nodes) / 4.0 == doctest::Approx(overall));
}

TEST_CASE("per-relation scores on a hand-computed confusion matrix") {
  // gold: a a a b b ; pred: a a b b a
  // a: tp 2, predicted 3, support 3 -> P 2/3, R 2/3
  // b: tp 1, predicted 2, support 2 -> P 1/2, R 1/2
  const auto f = per_relation_f1({"a", "a", "a", "b", "b"}, {"a", "a", "b", "b", "a"});
  CHECK(f.at("a").precision == doctest::Approx(2.0 / 3.0));
  CHECK(f.at("a").recall == doctest::Approx(2.0 / 3.0));
  CHECK(f.at("a").f1 == doctest::Approx(2.0 / 3.0));
  CHECK(f.at("b").f1 == doctest::Approx(0.5));
  CHECK(f.at("b").support == 2);

  const auto never = per_relation_f1({"a", "b"}, {"a", "a"});
  CHECK_FALSE(never.at("b").precision_defined);
  CHECK(never.at("b").precision == 0.0);
  CHECK(never.at("b").f1 == 0.0);

  const auto perfect = per_relation_f1({"a", "b", "c"}, {"a", "b", "c"});
  for (const auto& [label, s] : perfect) CHECK(s.f1 == 1.0);
}

TEST_CASE("per-span accuracy") {
  std::vector<int> heads(12, 1);
  heads[0] = 0;
  std::vector<std::string> rels(12, "r");
  rels[0] = "ROOT";
  const DependencyTree gold = tree_of(heads, rels);
  auto pred = gold;
  pred.relations[1] = "x";  // span 1 wrong
  const auto buckets = per_span_accuracy(gold, pred);
  CHECK(buckets.count(0) == 0);
  CHECK(buckets.at(1).total == 1);
  CHECK(buckets.at(1).accuracy() == 0.0);
  CHECK(buckets.at(kMaxSpanBucket).total == 3);  // spans 9, 10, 11
  CHECK(buckets.at(kMaxSpanBucket).accuracy() == 1.0);

  for (const auto& [span, b] : per_span_accuracy(gold, gold)) CHECK(b.accuracy() == 1.0);
}

TEST_CASE("corpus metrics identities on random tree pairs") {
  std::mt19937_64 rng(77);
  const std::vector<std::string> labels{"a", "b", "c"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<CorpusRecord> gold, pred;
    for (int d = 0; d < 3; ++d) {
      const auto shapes = shapes_up_to(5);
      const DocumentShape& shape = shapes[rng() % shapes.size()];
      const auto trees = enumerate_projective_trees(shape.total());
      std::vector<int> sentences;
      for (int s = 0; s < shape.m(); ++s) sentences.insert(sentences.end(), static_cast<std::size_t>(shape.sentence_lengths[static_cast<std::size_t>(s)]), s);
      auto random_tree = [&] {
        DependencyTree t;
        t.heads = trees[rng() % trees.size()];
        for (int h : t.heads) t.relations.push_back(h == 0 ? "ROOT" : labels[rng() % labels.size()]);
        return t;
      };
      const std::string id = "doc" + std::to_string(d);
      gold.push_back(record(id, sentences, random_tree()));
      pred.push_back(record(id, sentences, random_tree()));
    }
    std::reverse(pred.begin(), pred.end());  // matched by id, not position
    for (bool count_root : {true, false}) {
      const Metrics m = evaluate_corpus(gold, pred, nullptr, EvalOptions{count_root});
      // LAS and UAS compared over the same node set
      CHECK(m.las_pred <= (count_root ? m.uas : m.uas_without_root));
      CHECK(m.intra_nodes + m.inter_nodes == m.nodes);
      CHECK(m.intra_uas * m.intra_nodes + m.inter_uas * m.inter_nodes == doctest::Approx(m.uas * m.nodes).epsilon(1e-12));
      int support = 0;
      for (const auto& [label, s] : m.per_relation) support += s.support;
      CHECK(support == m.relation_nodes);
      CHECK(m.relation_nodes == (count_root ? m.nodes : m.nodes - 3));
    }
  }
}

TEST_CASE("corpus metrics with gold-head relations and reports") {
  const std::vector<CorpusRecord> gold{record("d", {0, 0, 1}, tree_of({0, 1, 1}, {"ROOT", "a", "b"}))};
  const std::vector<CorpusRecord> pred{record("d", {0, 0, 1}, tree_of({0, 1, 2}, {"ROOT", "a", "b"}))};
  const std::vector<CorpusRecord> on_gold{record("d", {0, 0, 1}, tree_of({0, 1, 1}, {"ROOT", "a", "a"}))};
  const Metrics m = evaluate_corpus(gold, pred, &on_gold, EvalOptions{});
  CHECK(m.uas == doctest::Approx(2.0 / 3.0));
  CHECK(m.las_pred == doctest::Approx(2.0 / 3.0));
  REQUIRE(m.las_gold.has_value());
  CHECK(*m.las_gold == doctest::Approx(2.0 / 3.0));
  CHECK(m.uas_without_root == 0.5);

  const Metrics no_root = evaluate_corpus(gold, pred, &on_gold, EvalOptions{false});
  CHECK(no_root.las_pred == 0.5);
  CHECK(*no_root.las_gold == 0.5);

  const auto j = nlohmann::json::parse(metrics_json(m));
  CHECK(j.at("uas").get<double>() == doctest::Approx(2.0 / 3.0));
  CHECK(j.at("per_relation_f1").contains("a"));
  CHECK(j.at("per_span_accuracy").contains("1"));
  const std::string table = metrics_table(m);
  CHECK(table.find("UAS") != std::string::npos);
  CHECK(table.find("LAS (gold heads)") != std::string::npos);

  const std::vector<CorpusRecord> other{record("e", {0}, tree_of({0}, {"ROOT"}))};
  CHECK_THROWS_AS(evaluate_corpus(gold, other, nullptr, EvalOptions{}), DataError);
}
