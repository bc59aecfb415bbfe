#include <sstream>

#include "doctest.h"
#include "ddp/model_io.hpp"

using namespace ddp;

namespace {

std::string serialize(const ModelFile& m) {
  std::ostringstream out;
  write_model(out, m);
  return out.str();
}

ModelFile deserialize(const std::string& bytes) {
  std::istringstream in(bytes);
  return read_model(in);
}

std::string read_error(const std::string& bytes) {
  try {
    deserialize(bytes);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("action models round trip") {
  ActionModel m{"inter", FeedForwardModel(12, 5, 4)};
  m.model.initialize(3);
  const ModelFile back = deserialize(serialize(m));
  REQUIRE(std::holds_alternative<ActionModel>(back));
  const auto& a = std::get<ActionModel>(back);
  CHECK(a.level == "inter");
  CHECK(a.model.input_dim() == 12);
  CHECK(a.model.hidden() == 5);
  CHECK(a.model.params() == m.model.params());
}

TEST_CASE("direct classifiers round trip") {
  DirectRelationClassifier d{RelationSet({"elab", "joint"}), FeedForwardModel(8, 3, 3)};
  d.model.initialize(4);
  const ModelFile back = deserialize(serialize(d));
  REQUIRE(std::holds_alternative<DirectRelationClassifier>(back));
  const auto& r = std::get<DirectRelationClassifier>(back);
  CHECK(r.labels.labels() == d.labels.labels());
  CHECK(r.model.params() == d.model.params());
}

TEST_CASE("stacked labelers round trip") {
  StackedRelationLabeler s{RelationSet({"a", "b", "c"}), BiLstmTagger(6, 4, 4), BiLstmTagger(6, 4, 4)};
  s.intra_layer.initialize(1);
  s.inter_layer.initialize(2);
  const std::string bytes = serialize(s);
  CHECK(bytes.substr(0, 4) == "DDPM");
  const ModelFile back = deserialize(bytes);
  REQUIRE(std::holds_alternative<StackedRelationLabeler>(back));
  const auto& r = std::get<StackedRelationLabeler>(back);
  CHECK(r.labels.labels() == s.labels.labels());
  CHECK(r.intra_layer.params() == s.intra_layer.params());
  CHECK(r.inter_layer.params() == s.inter_layer.params());
  CHECK(serialize(back) == bytes);
}

TEST_CASE("corrupt model files are rejected") {
  ActionModel m{"intra", FeedForwardModel(6, 3, 4)};
  m.model.initialize(1);
  const std::string bytes = serialize(m);

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(read_error(bad_magic).find("magic") != std::string::npos);

  std::string bad_version = bytes;
  bad_version[4] = 7;
  CHECK(read_error(bad_version).find("version") != std::string::npos);

  for (std::size_t cut : {std::size_t{2}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1}) {
    CHECK(read_error(bytes.substr(0, cut)).find("truncated") != std::string::npos);
  }
  CHECK(read_error("").size() > 0);
  CHECK_THROWS_AS(load_model("/nonexistent/model.bin"), DataError);
}
