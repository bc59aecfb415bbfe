#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ddp/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using ddp::cli::run;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ddp_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run({"ddp"}) == ddp::cli::kExitUsage);
  CHECK(run({"ddp", "no-such-command"}) == ddp::cli::kExitUsage);
  CHECK(run({"ddp", "parse", "--corpus", "x.ndjson"}) == ddp::cli::kExitUsage);
  CHECK(run({"ddp", "train", "--corpus", "x", "--out", "m", "--level", "word"}) == ddp::cli::kExitUsage);
  CHECK(run({"ddp", "verify-bounds", "--theorem", "3", "--shape", "2,2"}) == ddp::cli::kExitUsage);
  CHECK(run({"ddp", "verify-bounds", "--theorem", "1"}) == ddp::cli::kExitUsage);
}

TEST_CASE("verify-bounds") {
  const fs::path out = scratch("bounds.jsonl");
  CHECK(run({"ddp", "verify-bounds", "--theorem", "1", "--sweep-max", "6", "--out", out.string()}) == 0);
  std::istringstream lines(read_file(out));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("holds") == true);
    ++count;
  }
  CHECK(count == 63);

  CHECK(run({"ddp", "verify-bounds", "--theorem", "2", "--shape", "2,2", "--out", out.string()}) == 0);
  const auto j = nlohmann::json::parse(read_file(out));
  CHECK(j.at("t_count") == 5);
  CHECK(j.at("tprime_count") == 1);
  CHECK(run({"ddp", "verify-bounds", "--theorem", "2", "--shape", "4"}) != 0);
}

TEST_CASE("data errors exit 1") {
  const fs::path bad = scratch("bad.ndjson");
  std::ofstream(bad) << "{\"doc_id\":\"d\",\"edus\":[{\"id\":1,\"text\":\"a\",\"sentence\":0,\"head\":1,\"relation\":\"x\"}]}\n";
  CHECK(run({"ddp", "oracle", "--corpus", bad.string()}) == ddp::cli::kExitDataError);
  CHECK(run({"ddp", "oracle", "--corpus", scratch("missing.ndjson").string()}) == ddp::cli::kExitDataError);
}

TEST_CASE("toy corpus, oracle and encoder commands") {
  const fs::path corpus = scratch("toy.ndjson"), oracle = scratch("oracle.ndjson"), emb = scratch("emb.ndjson");
  REQUIRE(run({"ddp", "make-toy", "--seed", "5", "--out", corpus.string()}) == 0);
  REQUIRE(run({"ddp", "oracle", "--corpus", corpus.string(), "--out", oracle.string()}) == 0);
  std::istringstream lines(read_file(oracle));
  std::string line;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("actions").size() >= j.at("span").size());
  }
  REQUIRE(run({"ddp", "encode-builtin", "--corpus", corpus.string(), "--dim", "16", "--out", emb.string()}) == 0);
  const std::string text = read_file(emb);
  const auto header = nlohmann::json::parse(text.substr(0, text.find('\n')));
  CHECK(header.at("dim") == 16);
}
