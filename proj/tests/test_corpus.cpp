#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ddp/corpus.hpp"
#include "oracles.hpp"

using namespace ddp;

namespace {

std::string record(const std::string& doc_id, const std::vector<int>& heads, const std::vector<int>& sentences) {
  std::string out = "{\"doc_id\":\"" + doc_id + "\",\"edus\":[";
  for (std::size_t k = 0; k < heads.size(); ++k) {
    if (k) out += ',';
    out += "{\"id\":" + std::to_string(k + 1) + ",\"text\":\"edu " + std::to_string(k + 1) +
           "\",\"sentence\":" + std::to_string(sentences[k]) + ",\"head\":" + std::to_string(heads[k]) +
           ",\"relation\":\"" + (heads[k] == 0 ? "ROOT" : "elab") + "\"}";
  }
  return out + "]}";
}

std::string load_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_corpus(in);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

Document doc_of(int l) {
  std::vector<std::pair<std::string, int>> edus;
  for (int k = 0; k < l; ++k) edus.emplace_back("w" + std::to_string(k), 0);
  return make_document("d", edus);
}

DependencyTree tree_of(const std::vector<int>& heads) {
  DependencyTree t;
  t.heads = heads;
  for (int h : heads) t.relations.emplace_back(h == 0 ? "ROOT" : "elab");
  return t;
}

}  // namespace

TEST_CASE("minimal two-EDU record loads as a valid tree") {
  std::istringstream in(record("a", {0, 1}, {0, 0}) + "\n");
  const auto corpus = read_corpus(in);
  REQUIRE(corpus.size() == 1);
  CHECK(corpus[0].doc.size() == 2);
  CHECK(corpus[0].tree.heads == std::vector<int>{0, 1});
  CHECK(corpus[0].projective);
  CHECK(validate_tree(corpus[0].doc, corpus[0].tree).valid());
  CHECK(corpus[0].doc.edu(1).tokens == std::vector<std::string>{"edu", "1"});
}

TEST_CASE("a two-cycle is reported as a cycle") {
  const std::string msg = load_error(record("a", {2, 1}, {0, 0}));
  CHECK(msg.find("cycle") != std::string::npos);
  CHECK(msg.find("line 1") != std::string::npos);
}

TEST_CASE("two roots are reported as multiple roots") {
  CHECK(load_error(record("a", {0, 0}, {0, 0})).find("multiple roots") != std::string::npos);
}

TEST_CASE("malformed lines are reported with their line number") {
  const std::string good = record("a", {0, 1}, {0, 0});
  CHECK(load_error(good + "\n{not json\n").find("line 2") != std::string::npos);
  CHECK(load_error(good + "\n\n" + record("b", {0, 1}, {0, 2}) + "\n").find("line 3") != std::string::npos);
  CHECK(load_error("{\"doc_id\":\"x\",\"edus\":[{\"id\":2,\"text\":\"a\",\"sentence\":0,\"head\":0,\"relation\":\"ROOT\"}]}")
            .find("consecutive") != std::string::npos);
  CHECK(load_error("{\"doc_id\":\"x\",\"edus\":[{\"id\":1,\"text\":\"  \",\"sentence\":0,\"head\":0,\"relation\":\"ROOT\"}]}")
            .find("no tokens") != std::string::npos);
}

TEST_CASE("non-projective gold trees are kept and flagged") {
  std::istringstream in(record("np", {3, 0, 2, 2}, {0, 0, 0, 0}) + "\n" + record("ok", {0, 1}, {0, 1}) + "\n");
  const auto corpus = read_corpus(in);
  REQUIRE(corpus.size() == 2);
  CHECK_FALSE(corpus[0].projective);
  CHECK(corpus[1].projective);
  CHECK(corpus[1].doc.sentence_count() == 2);
}

TEST_CASE("validate_tree on hand-checked trees") {
  CHECK(validate_tree(doc_of(3), tree_of({0, 1, 2})).valid());
  CHECK(validate_tree(doc_of(3), tree_of({2, 0, 2})).valid());
  const auto report = validate_tree(doc_of(4), tree_of({3, 0, 2, 2}));
  CHECK(report.has(Violation::kNonProjective));
  CHECK(report.summary() == "non-projective");
  CHECK(validate_tree(doc_of(2), tree_of({1, 1})).has(Violation::kSelfLoop));
  CHECK(validate_tree(doc_of(2), tree_of({0, 5})).has(Violation::kHeadOutOfRange));
  CHECK_THROWS_AS(validate_tree(doc_of(3), tree_of({0, 1})), Error);
}

TEST_CASE("validate_heads agrees with the descendant-set checker on every head array up to 5 EDUs") {
  for (int l = 1; l <= 5; ++l) {
    for (const auto& h : oracle::all_head_arrays(l)) {
      INFO("l=" << l);
      CHECK(validate_heads(h).valid() == oracle::is_projective_tree(h));
    }
  }
}

TEST_CASE("save then load is the identity") {
  std::vector<CorpusRecord> corpus;
  corpus.push_back({make_document("d1", {{"Because it rains", 0}, {"we stay", 0}, {"inside , quietly", 1}}),
                    tree_of({2, 0, 2}), true});
  corpus.push_back({make_document("d2", {{"one \"quoted\" edu", 0}}), tree_of({0}), true});
  std::stringstream buf;
  write_corpus(buf, corpus);
  const auto back = read_corpus(buf);
  REQUIRE(back.size() == corpus.size());
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    CHECK(back[k].doc.doc_id == corpus[k].doc.doc_id);
    CHECK(back[k].tree == corpus[k].tree);
    REQUIRE(back[k].doc.size() == corpus[k].doc.size());
    for (int id = 1; id <= corpus[k].doc.size(); ++id) {
      CHECK(back[k].doc.edu(id).text == corpus[k].doc.edu(id).text);
      CHECK(back[k].doc.edu(id).tokens == corpus[k].doc.edu(id).tokens);
      CHECK(back[k].doc.edu(id).sentence_index == corpus[k].doc.edu(id).sentence_index);
    }
  }
  std::stringstream again;
  write_corpus(again, back);
  std::stringstream first;
  write_corpus(first, corpus);
  CHECK(again.str() == first.str());
}

TEST_CASE("sentence spans partition the document") {
  const Document d = make_document("d", {{"a", 0}, {"b", 0}, {"c", 1}, {"d", 2}, {"e", 2}});
  REQUIRE(d.sentence_count() == 3);
  CHECK(d.sentence_spans[0].first == 1);
  CHECK(d.sentence_spans[0].last == 2);
  CHECK(d.sentence_spans[1].first == 3);
  CHECK(d.sentence_spans[1].last == 3);
  CHECK(d.sentence_spans[2].first == 4);
  CHECK(d.sentence_spans[2].last == 5);
}

TEST_CASE("connective deletion") {
  const Document d = make_document("d", {{"because tests show", 0}, {"Because", 0}, {"tests show", 1}, {"BECAUSE it", 1}});
  const Document out = delete_connectives(d, {"because"});
  CHECK(out.edu(1).text == "tests show");
  CHECK(out.edu(1).tokens == std::vector<std::string>{"tests", "show"});
  CHECK(out.edu(2).text == "Because");
  CHECK(out.edu(3).text == "tests show");
  CHECK(out.edu(4).text == "it");
  CHECK(out.sentence_spans.size() == d.sentence_spans.size());

  const Document twice = delete_connectives(out, {"because"});
  for (int id = 1; id <= out.size(); ++id) CHECK(twice.edu(id).text == out.edu(id).text);
  CHECK_THROWS_AS(delete_connectives(d, {}), Error);
}

TEST_CASE("lexicon files skip comments and blank lines") {
  const auto path = std::filesystem::temp_directory_path() / "ddp_lexicon_test.txt";
  {
    std::ofstream out(path);
    out << "# connectives\nbecause\n\n  However \nthus # trailing\n";
  }
  const auto lex = load_lexicon(path.string());
  CHECK(lex == std::vector<std::string>{"because", "however", "thus"});
  std::filesystem::remove(path);
}

TEST_CASE("relation sets reserve ROOT at index 0") {
  const RelationSet a({"elab", "joint"});
  CHECK(a.label(0) == "ROOT");
  CHECK(a.size() == 3);
  CHECK(a.index_of("joint") == 2);
  CHECK_FALSE(a.index_of("missing").has_value());
  CHECK_THROWS_AS(RelationSet({"elab", "elab"}), Error);

  const RelationSet b = RelationSet::from_trees({tree_of({0, 1, 1})});
  CHECK(b.labels() == std::vector<std::string>{"ROOT", "elab"});
}
