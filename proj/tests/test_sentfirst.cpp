#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "ddp/bounds.hpp"
#include "ddp/sentfirst.hpp"
#include "oracles.hpp"

using namespace ddp;

namespace {

Document shaped(const std::vector<int>& lengths) {
  std::vector<std::pair<std::string, int>> edus;
  int n = 0;
  for (std::size_t s = 0; s < lengths.size(); ++s) {
    for (int k = 0; k < lengths[s]; ++k) edus.emplace_back("edu" + std::to_string(++n) + " s" + std::to_string(s), static_cast<int>(s));
  }
  return make_document("doc", edus);
}

SentenceParse sentence(int index, std::vector<int> span, SpanHeads heads) {
  SentenceParse sp;
  sp.sentence_index = index;
  sp.parse.span = std::move(span);
  sp.parse.heads = std::move(heads);
  for (std::size_t k = 0; k < sp.parse.heads.size(); ++k) {
    if (sp.parse.heads[k] == 0) sp.parse.root = sp.parse.span[k];
  }
  return sp;
}

SpanParse inter_parse(std::vector<int> roots, SpanHeads heads) {
  SpanParse p;
  p.span = std::move(roots);
  p.heads = std::move(heads);
  for (std::size_t k = 0; k < p.heads.size(); ++k) {
    if (p.heads[k] == 0) p.root = p.span[k];
  }
  return p;
}

FeatureScorer random_scorer(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rng](const Eigen::VectorXd&) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return ActionScores{u(*rng), u(*rng), u(*rng), u(*rng)};
  };
}

}  // namespace

TEST_CASE("feature slots follow the template") {
  const ParserState init = initial_state({1, 2, 3});
  StateFeature f = feature_slots(init);
  CHECK(f[Slot::kQ0] == 1);
  CHECK(f[Slot::kQ1] == 2);
  CHECK_FALSE(f[Slot::kS0].has_value());
  CHECK_FALSE(f[Slot::kHeadS0].has_value());

  f = feature_slots(ParserState::from_parts({1, 2}, {1}, 1, {}));
  CHECK(f[Slot::kS0] == 1);
  CHECK(f[Slot::kQ0] == 2);
  CHECK_FALSE(f[Slot::kS1].has_value());
  CHECK_FALSE(f[Slot::kQ1].has_value());

  f = feature_slots(ParserState::from_parts({1, 2, 3}, {1, 2}, 2, {{2, 1}}));
  CHECK(f[Slot::kS0] == 2);
  CHECK(f[Slot::kHeadS0] == 1);
  CHECK(f[Slot::kS1] == 1);
  CHECK_FALSE(f[Slot::kHeadS1].has_value());
}

TEST_CASE("state features concatenate six slot vectors with zeros for empty slots") {
  const int dim = 3;
  EduVectors v;
  for (int id = 1; id <= 3; ++id) v[id] = Eigen::VectorXd::Constant(dim, id);
  const Eigen::VectorXd x = state_feature(ParserState::from_parts({1, 2, 3}, {1, 2}, 2, {{2, 1}}), v, dim);
  REQUIRE(x.size() == 6 * dim);
  CHECK(x.segment(0 * dim, dim).isApprox(v[2]));                    // s0
  CHECK(x.segment(1 * dim, dim).isApprox(v[1]));                    // s1
  CHECK(x.segment(2 * dim, dim).isApprox(v[3]));                    // q0
  CHECK(x.segment(3 * dim, dim).isZero());                          // q1
  CHECK(x.segment(4 * dim, dim).isApprox(v[1]));                    // head(s0)
  CHECK(x.segment(5 * dim, dim).isZero());                          // head(s1)

  const Eigen::VectorXd init = state_feature(initial_state({1, 2, 3}), v, dim);
  CHECK(init.segment(0, 2 * dim).isZero());
  CHECK(init.segment(4 * dim, 2 * dim).isZero());
}

TEST_CASE("missing slot embeddings name the EDU") {
  EduVectors v;
  v[1] = Eigen::VectorXd::Zero(2);
  try {
    state_feature(initial_state({1, 2}), v, 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("EDU 2") != std::string::npos);
  }
}

TEST_CASE("assemble substitutes intra and inter heads") {
  const Document d = shaped({2, 2});
  const DependencyTree t = assemble(d, {sentence(0, {1, 2}, {0, 1}), sentence(1, {3, 4}, {0, 3})},
                                    inter_parse({1, 3}, {0, 1}));
  CHECK(t.heads == std::vector<int>{0, 1, 1, 3});
  CHECK(t.relations == std::vector<std::string>{"ROOT", "_", "_", "_"});

  const Document single = shaped({3});
  const DependencyTree s = assemble(single, {sentence(0, {1, 2, 3}, {2, 0, 2})}, inter_parse({2}, {0}));
  CHECK(s.heads == std::vector<int>{2, 0, 2});

  const Document chain = shaped({1, 1, 1});
  const DependencyTree c = assemble(
      chain, {sentence(0, {1}, {0}), sentence(1, {2}, {0}), sentence(2, {3}, {0})}, inter_parse({1, 2, 3}, {0, 1, 2}));
  CHECK(c.heads == std::vector<int>{0, 1, 2});

  CHECK_THROWS_AS(assemble(d, {sentence(0, {1, 2}, {0, 1}), sentence(1, {3, 4}, {0, 3})}, inter_parse({1, 4}, {0, 1})),
                  Error);
  CHECK_THROWS_AS(assemble(d, {sentence(0, {1, 2}, {0, 1})}, inter_parse({1}, {0})), Error);
}

TEST_CASE("sentence roots and the structural property") {
  const std::vector<SentenceSpan> spans{{1, 2}, {3, 4}};
  CHECK(sentence_roots(spans, {0, 1, 1, 3}) == std::vector<int>{1, 3});
  CHECK(has_sentfirst_structure(spans, {0, 1, 1, 3}));
  // EDU 2 has a dependent in the other sentence: two touching EDUs in sentence 0
  CHECK_FALSE(has_sentfirst_structure(spans, {0, 1, 2, 3}));
  CHECK_FALSE(has_sentfirst_structure(spans, {0, 1, 2, 2}));
}

TEST_CASE("the structural property matches the reference definition on every tree up to 6 EDUs") {
  for (const DocumentShape& shape : shapes_up_to(6)) {
    const auto spans = shape.spans();
    for (const auto& h : enumerate_projective_trees(shape.total())) {
      CHECK(has_sentfirst_structure(spans, h) == oracle::sentfirst(h, shape.sentence_lengths));
    }
  }
}

TEST_CASE("parse_document degenerate cases") {
  const BuiltinEncoder enc(16, 1);
  const Document one = shaped({3});
  const DocumentParse p = parse_document(one, random_scorer(1), random_scorer(2), enc);
  REQUIRE(p.sentences.size() == 1);
  CHECK(p.tree.heads == p.sentences[0].parse.heads);
  CHECK(p.inter.span == std::vector<int>{p.sentences[0].root_edu()});

  const Document two = shaped({1, 1});
  const DocumentParse q = parse_document(two, random_scorer(3), random_scorer(4), enc);
  CHECK(q.inter.span == std::vector<int>{1, 2});
  CHECK(q.tree.heads == std::vector<int>(q.inter.heads.begin(), q.inter.heads.end()));
}

TEST_CASE("random models always produce Sent-First trees of the document shape") {
  const BuiltinEncoder enc(16, 7);
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> lengths;
    int total = 0;
    const int target = 1 + static_cast<int>(rng() % 8);
    while (total < target) {
      const int len = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::min(4, target - total)));
      lengths.push_back(len);
      total += len;
    }
    const Document d = shaped(lengths);
    const DocumentParse p = parse_document(d, random_scorer(rng()), random_scorer(rng()), enc);
    CHECK(validate_tree(d, p.tree).valid());
    const auto members = enumerate_sentfirst_trees(DocumentShape{lengths});
    CHECK(std::find(members.begin(), members.end(), p.tree.heads) != members.end());
    CHECK(p.tree.relations[static_cast<std::size_t>(p.inter.root - 1)] == "ROOT");
  }
}

TEST_CASE("oracle extraction restricts gold heads to each level") {
  const Document d = shaped({2, 2});
  DependencyTree gold;
  gold.heads = {0, 1, 1, 3};
  gold.relations = {"ROOT", "a", "b", "c"};
  const OracleExtraction ex = extract_oracle(d, gold, true, true);
  CHECK(ex.skipped == 0);
  REQUIRE(ex.spans.size() == 3);
  CHECK(ex.spans[0].gold == SpanHeads{0, 1});
  CHECK(ex.spans[1].gold == SpanHeads{0, 3});
  CHECK_FALSE(ex.spans[2].sentence.has_value());
  CHECK(ex.spans[2].span == std::vector<int>{1, 3});
  CHECK(ex.spans[2].gold == SpanHeads{0, 1});

  // head of EDU 3 is a non-root EDU of sentence 0: mapped to that sentence's root
  gold.heads = {0, 1, 2, 3};
  const OracleExtraction mapped = extract_oracle(d, gold, false, true);
  REQUIRE(mapped.spans.size() == 1);
  CHECK(mapped.spans[0].gold == SpanHeads{0, 1});

  // two EDUs of sentence 1 leave the sentence: inter span skipped
  gold.heads = {0, 1, 1, 1};
  const OracleExtraction skipped = extract_oracle(d, gold, true, true);
  CHECK(skipped.skipped == 2);
}

TEST_CASE("oracle samples pair each state feature with the gold action") {
  const Document d = shaped({2});
  const EduVectors v = BuiltinEncoder(16, 3).intra(d);
  OracleSpan span;
  span.span = {1, 2};
  span.gold = {0, 1};
  span.actions = oracle_actions(span.span, span.gold);
  const auto samples = oracle_samples(span, v, 16);
  REQUIRE(samples.size() == 2);
  CHECK(samples[0].gold == static_cast<int>(Action::kShift));
  CHECK(samples[1].gold == static_cast<int>(Action::kRightArc));
  CHECK(samples[1].input.size() == 6 * 16);
}
