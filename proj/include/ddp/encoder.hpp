#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <Eigen/Core>

#include "ddp/corpus.hpp"

namespace ddp {

enum class Level { kIntra, kInter, kPair };

std::string_view to_string(Level level);
std::optional<Level> level_from_string(std::string_view name);

// Key of one table entry. `second` is 0 for intra/inter entries; pair keys
// hold (first, second) in document order, with second == 0 for the root pair.
struct EmbeddingKey {
  std::string doc_id;
  Level level = Level::kIntra;
  int first = 0;
  int second = 0;

  auto tie() const { return std::tie(doc_id, level, first, second); }
  bool operator<(const EmbeddingKey& o) const { return tie() < o.tie(); }
  bool operator==(const EmbeddingKey& o) const { return tie() == o.tie(); }
};

class EmbeddingTable {
 public:
  explicit EmbeddingTable(int dim = 0) : dim_(dim) {}

  int dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }

  // Throws Error on a dimension mismatch, non-finite values or a duplicate.
  void insert(EmbeddingKey key, Eigen::VectorXd vec);
  const Eigen::VectorXd* find(const EmbeddingKey& key) const;
  const std::map<EmbeddingKey, Eigen::VectorXd>& entries() const { return entries_; }

 private:
  int dim_;
  std::map<EmbeddingKey, Eigen::VectorXd> entries_;
};

EmbeddingTable read_embeddings(std::istream& in);
EmbeddingTable load_embeddings(const std::string& path);
void write_embeddings(std::ostream& out, const EmbeddingTable& table);
void save_embeddings(const std::string& path, const EmbeddingTable& table);

// EDU id -> vector for one document at one level.
using EduVectors = std::map<int, Eigen::VectorXd>;

// --- builtin encoder -------------------------------------------------------
//
// token vector: 64-bit FNV-1a over the token bytes, xor-ed with
//   seed * 0x9E3779B97F4A7C15, seeds a splitmix64 stream; each draw x gives
//   the component 2 * (x >> 11) * 2^-53 - 1; the result is scaled to unit norm.
// raw EDU vector: mean of its token vectors.
// contextual vector: raw + 0.5 * mean(raw vectors of the context window).

inline constexpr double kContextWeight = 0.5;
inline constexpr int kDefaultBuiltinDim = 64;

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64(std::uint64_t& state);
Eigen::VectorXd token_vector(std::string_view token, int dim, std::uint64_t seed);
Eigen::VectorXd raw_edu_vector(const Edu& edu, int dim, std::uint64_t seed);

// Context window: the EDU's sentence. Requires dim >= 8.
EduVectors encode_intra_builtin(const Document& doc, int dim, std::uint64_t seed);
// Context window: the pseudo sentence made of all roots.
EduVectors encode_inter_builtin(const Document& doc, std::span<const int> roots, int dim,
                                std::uint64_t seed);
// Pair vector [intra(first) ; intra(second)] with each half encoded at dim/2
// from the sentence context; the root pair (e, 0) duplicates intra(e).
// Requires an even dim >= 16.
Eigen::VectorXd encode_pair_builtin(const Document& doc, int first, int second, int dim,
                                    std::uint64_t seed);

// Supplies level-specific EDU and pair vectors for the parsing pipeline.
class EduEncoder {
 public:
  virtual ~EduEncoder() = default;
  virtual int dim() const = 0;
  virtual EduVectors intra(const Document& doc) const = 0;
  virtual EduVectors inter(const Document& doc, std::span<const int> roots) const = 0;
  // Pair key (first, second) in document order; second == 0 for the root.
  virtual Eigen::VectorXd pair(const Document& doc, int first, int second) const = 0;
};

class BuiltinEncoder : public EduEncoder {
 public:
  BuiltinEncoder(int dim, std::uint64_t seed);
  int dim() const override { return dim_; }
  EduVectors intra(const Document& doc) const override;
  EduVectors inter(const Document& doc, std::span<const int> roots) const override;
  Eigen::VectorXd pair(const Document& doc, int first, int second) const override;

 private:
  int dim_;
  std::uint64_t seed_;
};

// Serves vectors from an exported table. Inter and pair vectors missing from
// the table fall back to the builtin encoder (same dim) with a warning on
// stderr; missing intra vectors are an error.
class TableEncoder : public EduEncoder {
 public:
  TableEncoder(std::shared_ptr<const EmbeddingTable> table, std::uint64_t seed);
  int dim() const override { return table_->dim(); }
  EduVectors intra(const Document& doc) const override;
  EduVectors inter(const Document& doc, std::span<const int> roots) const override;
  Eigen::VectorXd pair(const Document& doc, int first, int second) const override;

 private:
  std::shared_ptr<const EmbeddingTable> table_;
  BuiltinEncoder fallback_;
};

}  // namespace ddp
