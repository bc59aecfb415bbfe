#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddp {

// Relation label of the document root and the label written for arcs that
// have not been labelled yet.
inline constexpr std::string_view kRootLabel = "ROOT";
inline constexpr std::string_view kUnlabeled = "_";

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised for malformed corpus, embedding, or model files.
struct DataError : Error {
  using Error::Error;
};

struct Edu {
  int id = 0;  // 1-based, document order
  std::string text;
  std::vector<std::string> tokens;
  int sentence_index = 0;  // 0-based
};

struct SentenceSpan {
  int first = 0;  // EDU ids, inclusive
  int last = 0;

  int size() const { return last - first + 1; }
  bool contains(int id) const { return id >= first && id <= last; }
};

struct Document {
  std::string doc_id;
  std::vector<Edu> edus;
  std::vector<SentenceSpan> sentence_spans;

  int size() const { return static_cast<int>(edus.size()); }
  int sentence_count() const { return static_cast<int>(sentence_spans.size()); }
  const Edu& edu(int id) const { return edus.at(static_cast<std::size_t>(id - 1)); }
  int sentence_of(int id) const { return edu(id).sentence_index; }
};

// heads[k] and relations[k] describe EDU k + 1. A head of 0 is the virtual
// root.
struct DependencyTree {
  std::vector<int> heads;
  std::vector<std::string> relations;

  int size() const { return static_cast<int>(heads.size()); }
  int head(int id) const { return heads.at(static_cast<std::size_t>(id - 1)); }
  const std::string& relation(int id) const {
    return relations.at(static_cast<std::size_t>(id - 1));
  }
  bool operator==(const DependencyTree&) const = default;
};

class RelationSet {
 public:
  RelationSet() = default;
  // "ROOT" is inserted at index 0 when absent; duplicates are rejected.
  explicit RelationSet(std::vector<std::string> labels);

  static RelationSet from_trees(const std::vector<DependencyTree>& trees);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int index) const { return labels_.at(static_cast<std::size_t>(index)); }
  std::optional<int> index_of(std::string_view label) const;
  int root_index() const { return *index_of(kRootLabel); }

 private:
  std::vector<std::string> labels_;
};

enum class Violation {
  kHeadOutOfRange,
  kSelfLoop,
  kNoRoot,
  kMultipleRoots,
  kCycle,
  kNonProjective,
};

std::string_view to_string(Violation v);

struct ValidationReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
  bool has(Violation v) const;
  // "valid" or the violations joined by ", ".
  std::string summary() const;
};

// Checks root count, acyclicity and projectivity of a head array over ids
// 1..heads.size().
ValidationReport validate_heads(const std::vector<int>& heads);

// Throws Error when the tree arrays do not have one entry per EDU.
ValidationReport validate_tree(const Document& doc, const DependencyTree& tree);

struct CorpusRecord {
  Document doc;
  DependencyTree tree;
  bool projective = true;
};

std::vector<CorpusRecord> read_corpus(std::istream& in);
std::vector<CorpusRecord> load_corpus(const std::string& path);
void write_corpus(std::ostream& out, const std::vector<CorpusRecord>& records);
void save_corpus(const std::string& path, const std::vector<CorpusRecord>& records);

// Builds a document with whitespace tokenisation from (text, sentence) pairs.
Document make_document(std::string doc_id,
                       const std::vector<std::pair<std::string, int>>& edus);

std::vector<std::string> load_lexicon(const std::string& path);

// Removes a leading connective from each EDU unless that would empty it.
Document delete_connectives(const Document& doc, const std::vector<std::string>& lexicon);

}  // namespace ddp
