#include "ddp/encoder.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "ddp/log.hpp"
#include "json.hpp"

namespace ddp {

namespace {

using nlohmann::json;

std::string describe(const EmbeddingKey& key) {
  std::string s = key.doc_id + "/" + std::string(to_string(key.level)) + "/" + std::to_string(key.first);
  if (key.level == Level::kPair) s += "," + std::to_string(key.second);
  return s;
}

Eigen::VectorXd context_mean(const std::vector<Eigen::VectorXd>& raws) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(raws.front().size());
  for (const auto& r : raws) mean += r;
  return mean / static_cast<double>(raws.size());
}

void require_builtin_dim(int dim) {
  if (dim < 8) throw Error("builtin encoder needs dim >= 8, got " + std::to_string(dim));
}

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::kIntra: return "intra";
    case Level::kInter: return "inter";
    case Level::kPair: return "pair";
  }
  return "?";
}

std::optional<Level> level_from_string(std::string_view name) {
  for (Level l : {Level::kIntra, Level::kInter, Level::kPair}) {
    if (to_string(l) == name) return l;
  }
  return std::nullopt;
}

void EmbeddingTable::insert(EmbeddingKey key, Eigen::VectorXd vec) {
  if (vec.size() != dim_) {
    throw Error("vector for " + describe(key) + " has " + std::to_string(vec.size()) +
                " components, expected " + std::to_string(dim_));
  }
  if (!vec.allFinite()) throw Error("vector for " + describe(key) + " is not finite");
  const std::string where = describe(key);
  if (!entries_.emplace(std::move(key), std::move(vec)).second) {
    throw Error("duplicate embedding key " + where);
  }
}

const Eigen::VectorXd* EmbeddingTable::find(const EmbeddingKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

EmbeddingTable read_embeddings(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) throw DataError("embedding file is empty");
  int dim = 0;
  try {
    dim = json::parse(line).at("dim").get<int>();
  } catch (const json::exception& e) {
    throw DataError("embedding line 1: bad header: " + std::string(e.what()));
  }
  if (dim < 1) throw DataError("embedding header declares dim " + std::to_string(dim));

  EmbeddingTable table(dim);
  while (next_line()) {
    const std::string where = "embedding line " + std::to_string(line_no) + ": ";
    try {
      const json j = json::parse(line);
      EmbeddingKey key;
      key.doc_id = j.at("doc_id").get<std::string>();
      const auto level = level_from_string(j.at("level").get<std::string>());
      if (!level) throw DataError("unknown level " + j.at("level").dump());
      key.level = *level;
      const json& edu = j.at("edu");
      if (key.level == Level::kPair) {
        const auto ids = edu.get<std::vector<int>>();
        if (ids.size() != 2) throw DataError("pair key must have two ids");
        key.first = ids[0];
        key.second = ids[1];
      } else {
        key.first = edu.get<int>();
      }
      const auto values = j.at("vector").get<std::vector<double>>();
      table.insert(std::move(key), Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                                     static_cast<Eigen::Index>(values.size())));
    } catch (const json::exception& e) {
      throw DataError(where + e.what());
    } catch (const Error& e) {
      throw DataError(where + e.what());
    }
  }
  return table;
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings " + path);
  return read_embeddings(in);
}

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
  out << json{{"dim", table.dim()}}.dump() << '\n';
  for (const auto& [key, vec] : table.entries()) {
    json edu = key.level == Level::kPair ? json::array({key.first, key.second}) : json(key.first);
    // nlohmann/json prints doubles in their shortest round-trip form.
    json record{{"doc_id", key.doc_id},
                {"level", std::string(to_string(key.level))},
                {"edu", std::move(edu)},
                {"vector", std::vector<double>(vec.data(), vec.data() + vec.size())}};
    out << record.dump() << '\n';
  }
}

void save_embeddings(const std::string& path, const EmbeddingTable& table) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_embeddings(out, table);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Eigen::VectorXd token_vector(std::string_view token, int dim, std::uint64_t seed) {
  std::uint64_t state = fnv1a64(token) ^ (seed * 0x9E3779B97F4A7C15ULL);
  Eigen::VectorXd v(dim);
  for (int k = 0; k < dim; ++k) {
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    v[k] = 2.0 * u - 1.0;
  }
  const double norm = v.norm();
  if (norm == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / norm;
}

Eigen::VectorXd raw_edu_vector(const Edu& edu, int dim, std::uint64_t seed) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  for (const auto& tok : edu.tokens) sum += token_vector(tok, dim, seed);
  return sum / static_cast<double>(edu.tokens.size());
}

EduVectors encode_intra_builtin(const Document& doc, int dim, std::uint64_t seed) {
  require_builtin_dim(dim);
  EduVectors out;
  for (const SentenceSpan& s : doc.sentence_spans) {
    std::vector<Eigen::VectorXd> raws;
    for (int id = s.first; id <= s.last; ++id) raws.push_back(raw_edu_vector(doc.edu(id), dim, seed));
    const Eigen::VectorXd ctx = context_mean(raws);
    for (int id = s.first; id <= s.last; ++id) {
      out.emplace(id, raws[static_cast<std::size_t>(id - s.first)] + kContextWeight * ctx);
    }
  }
  return out;
}

EduVectors encode_inter_builtin(const Document& doc, std::span<const int> roots, int dim,
                                std::uint64_t seed) {
  require_builtin_dim(dim);
  if (roots.empty()) throw Error("inter encoding needs at least one root");
  std::vector<Eigen::VectorXd> raws;
  for (int id : roots) raws.push_back(raw_edu_vector(doc.edu(id), dim, seed));
  const Eigen::VectorXd ctx = context_mean(raws);
  EduVectors out;
  for (std::size_t k = 0; k < roots.size(); ++k) out.emplace(roots[k], raws[k] + kContextWeight * ctx);
  return out;
}

Eigen::VectorXd encode_pair_builtin(const Document& doc, int first, int second, int dim,
                                    std::uint64_t seed) {
  if (dim % 2 != 0 || dim < 16) {
    throw Error("builtin pair encoding needs an even dim >= 16, got " + std::to_string(dim));
  }
  const int half = dim / 2;
  auto intra_half = [&](int id) {
    const SentenceSpan& s = doc.sentence_spans.at(static_cast<std::size_t>(doc.sentence_of(id)));
    std::vector<Eigen::VectorXd> raws;
    for (int k = s.first; k <= s.last; ++k) raws.push_back(raw_edu_vector(doc.edu(k), half, seed));
    return Eigen::VectorXd(raws[static_cast<std::size_t>(id - s.first)] + kContextWeight * context_mean(raws));
  };
  Eigen::VectorXd out(dim);
  out.head(half) = intra_half(first);
  out.tail(half) = second == 0 ? out.head(half).eval() : intra_half(second);
  return out;
}

BuiltinEncoder::BuiltinEncoder(int dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  require_builtin_dim(dim);
}

EduVectors BuiltinEncoder::intra(const Document& doc) const {
  return encode_intra_builtin(doc, dim_, seed_);
}

EduVectors BuiltinEncoder::inter(const Document& doc, std::span<const int> roots) const {
  return encode_inter_builtin(doc, roots, dim_, seed_);
}

Eigen::VectorXd BuiltinEncoder::pair(const Document& doc, int first, int second) const {
  return encode_pair_builtin(doc, first, second, dim_, seed_);
}

TableEncoder::TableEncoder(std::shared_ptr<const EmbeddingTable> table, std::uint64_t seed)
    : table_(std::move(table)), fallback_(std::max(table_->dim(), 8), seed) {}

EduVectors TableEncoder::intra(const Document& doc) const {
  EduVectors out;
  for (const Edu& e : doc.edus) {
    const auto* v = table_->find({doc.doc_id, Level::kIntra, e.id, 0});
    if (!v) throw DataError("no intra embedding for " + doc.doc_id + " EDU " + std::to_string(e.id));
    out.emplace(e.id, *v);
  }
  return out;
}

EduVectors TableEncoder::inter(const Document& doc, std::span<const int> roots) const {
  EduVectors out;
  bool missing = false;
  for (int id : roots) {
    const auto* v = table_->find({doc.doc_id, Level::kInter, id, 0});
    if (!v) {
      missing = true;
      break;
    }
    out.emplace(id, *v);
  }
  if (!missing) return out;
  log::warn("inter_embedding_fallback").kv("doc_id", doc.doc_id);
  return fallback_.inter(doc, roots);
}

Eigen::VectorXd TableEncoder::pair(const Document& doc, int first, int second) const {
  if (const auto* v = table_->find({doc.doc_id, Level::kPair, first, second})) return *v;
  log::warn("pair_embedding_fallback").kv("doc_id", doc.doc_id).kv("pair", std::to_string(first) + "," + std::to_string(second));
  return fallback_.pair(doc, first, second);
}

}  // namespace ddp
