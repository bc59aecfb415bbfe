#include "ddp/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ddp {

namespace {

using nlohmann::json;

std::vector<std::string> split_whitespace(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  for (std::string tok; in >> tok;) tokens.push_back(tok);
  return tokens;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<SentenceSpan> derive_spans(const std::vector<Edu>& edus) {
  std::vector<SentenceSpan> spans;
  for (const Edu& e : edus) {
    if (spans.empty() || e.sentence_index != edus[spans.back().last - 1].sentence_index) {
      spans.push_back({e.id, e.id});
    } else {
      spans.back().last = e.id;
    }
  }
  return spans;
}

CorpusRecord parse_record(const json& j) {
  if (!j.is_object()) throw DataError("record is not a JSON object");
  CorpusRecord rec;
  rec.doc.doc_id = j.at("doc_id").get<std::string>();
  const json& edus = j.at("edus");
  if (!edus.is_array() || edus.empty()) throw DataError("\"edus\" must be a non-empty array");
  int expected_sentence = 0;
  for (std::size_t k = 0; k < edus.size(); ++k) {
    const json& je = edus[k];
    Edu e;
    e.id = je.at("id").get<int>();
    if (e.id != static_cast<int>(k) + 1) {
      throw DataError("EDU ids must be consecutive from 1 (found " + std::to_string(e.id) +
                      " at position " + std::to_string(k + 1) + ")");
    }
    e.text = je.at("text").get<std::string>();
    if (auto it = je.find("tokens"); it != je.end() && !it->is_null()) {
      e.tokens = it->get<std::vector<std::string>>();
    } else {
      e.tokens = split_whitespace(e.text);
    }
    if (e.tokens.empty()) throw DataError("EDU " + std::to_string(e.id) + " has no tokens");
    e.sentence_index = je.at("sentence").get<int>();
    if (k == 0 && e.sentence_index != 0) throw DataError("first EDU must be in sentence 0");
    if (k > 0) {
      if (e.sentence_index != expected_sentence && e.sentence_index != expected_sentence + 1) {
        throw DataError("sentence indices must be non-decreasing and consecutive (EDU " +
                        std::to_string(e.id) + ")");
      }
    }
    expected_sentence = e.sentence_index;
    rec.tree.heads.push_back(je.at("head").get<int>());
    rec.tree.relations.push_back(je.at("relation").get<std::string>());
    rec.doc.edus.push_back(std::move(e));
  }
  rec.doc.sentence_spans = derive_spans(rec.doc.edus);
  return rec;
}

}  // namespace

RelationSet::RelationSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw Error("duplicate relation label: " + l);
  }
  if (!seen.count(std::string(kRootLabel))) labels_.insert(labels_.begin(), std::string(kRootLabel));
}

RelationSet RelationSet::from_trees(const std::vector<DependencyTree>& trees) {
  std::set<std::string> labels;
  for (const auto& t : trees) {
    for (const auto& r : t.relations) {
      if (r != kRootLabel && r != kUnlabeled) labels.insert(r);
    }
  }
  std::vector<std::string> ordered{std::string(kRootLabel)};
  ordered.insert(ordered.end(), labels.begin(), labels.end());
  return RelationSet(std::move(ordered));
}

std::optional<int> RelationSet::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::kHeadOutOfRange: return "head out of range";
    case Violation::kSelfLoop: return "self loop";
    case Violation::kNoRoot: return "no root";
    case Violation::kMultipleRoots: return "multiple roots";
    case Violation::kCycle: return "cycle";
    case Violation::kNonProjective: return "non-projective";
  }
  return "unknown";
}

bool ValidationReport::has(Violation v) const {
  return std::find(violations.begin(), violations.end(), v) != violations.end();
}

std::string ValidationReport::summary() const {
  if (valid()) return "valid";
  std::string out;
  for (Violation v : violations) {
    if (!out.empty()) out += ", ";
    out += to_string(v);
  }
  return out;
}

ValidationReport validate_heads(const std::vector<int>& heads) {
  ValidationReport report;
  const int l = static_cast<int>(heads.size());
  auto head = [&](int id) { return heads[static_cast<std::size_t>(id - 1)]; };

  bool in_range = true;
  for (int id = 1; id <= l; ++id) {
    if (head(id) < 0 || head(id) > l) in_range = false;
  }
  if (!in_range) {
    report.violations.push_back(Violation::kHeadOutOfRange);
    return report;
  }
  for (int id = 1; id <= l; ++id) {
    if (head(id) == id) {
      report.violations.push_back(Violation::kSelfLoop);
      break;
    }
  }
  const auto roots = std::count(heads.begin(), heads.end(), 0);
  if (roots == 0) report.violations.push_back(Violation::kNoRoot);
  if (roots > 1) report.violations.push_back(Violation::kMultipleRoots);

  // Every EDU must reach the virtual root within l steps.
  bool cyclic = false;
  for (int id = 1; id <= l && !cyclic; ++id) {
    int cur = id;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > l) {
        cyclic = true;
        break;
      }
      cur = head(cur);
    }
  }
  if (cyclic) report.violations.push_back(Violation::kCycle);
  if (cyclic || !report.valid()) return report;

  auto is_ancestor = [&](int anc, int node) {
    for (int cur = node; cur != 0; cur = head(cur)) {
      if (cur == anc) return true;
    }
    return false;
  };
  for (int dep = 1; dep <= l; ++dep) {
    const int h = head(dep);
    if (h == 0) continue;
    const int lo = std::min(h, dep), hi = std::max(h, dep);
    bool ok = true;
    for (int k = lo + 1; k < hi && ok; ++k) ok = is_ancestor(h, k);
    if (!ok) {
      report.violations.push_back(Violation::kNonProjective);
      break;
    }
  }
  return report;
}

ValidationReport validate_tree(const Document& doc, const DependencyTree& tree) {
  if (tree.heads.size() != doc.edus.size() || tree.relations.size() != doc.edus.size()) {
    throw Error("tree arrays have length " + std::to_string(tree.heads.size()) + "/" +
                std::to_string(tree.relations.size()) + " but document " + doc.doc_id + " has " +
                std::to_string(doc.edus.size()) + " EDUs");
  }
  return validate_heads(tree.heads);
}

std::vector<CorpusRecord> read_corpus(std::istream& in) {
  std::vector<CorpusRecord> records;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "corpus line " + std::to_string(line_no) + ": ";
    CorpusRecord rec;
    try {
      rec = parse_record(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(where + e.what());
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    ValidationReport report = validate_tree(rec.doc, rec.tree);
    if (report.has(Violation::kNonProjective) && report.violations.size() == 1) {
      rec.projective = false;
    } else if (!report.valid()) {
      throw DataError(where + "invalid tree for " + rec.doc.doc_id + ": " + report.summary());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<CorpusRecord> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path);
  return read_corpus(in);
}

void write_corpus(std::ostream& out, const std::vector<CorpusRecord>& records) {
  for (const auto& rec : records) {
    json edus = json::array();
    for (const Edu& e : rec.doc.edus) {
      edus.push_back({{"id", e.id},
                      {"text", e.text},
                      {"tokens", e.tokens},
                      {"sentence", e.sentence_index},
                      {"head", rec.tree.head(e.id)},
                      {"relation", rec.tree.relation(e.id)}});
    }
    out << json{{"doc_id", rec.doc.doc_id}, {"edus", std::move(edus)}}.dump() << '\n';
  }
}

void save_corpus(const std::string& path, const std::vector<CorpusRecord>& records) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_corpus(out, records);
}

Document make_document(std::string doc_id,
                       const std::vector<std::pair<std::string, int>>& edus) {
  Document doc;
  doc.doc_id = std::move(doc_id);
  int id = 1;
  for (const auto& [text, sentence] : edus) {
    doc.edus.push_back({id++, text, split_whitespace(text), sentence});
  }
  doc.sentence_spans = derive_spans(doc.edus);
  return doc;
}

std::vector<std::string> load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon " + path);
  std::vector<std::string> entries;
  for (std::string line; std::getline(in, line);) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto toks = split_whitespace(line);
    if (!toks.empty()) entries.push_back(ascii_lower(toks.front()));
  }
  return entries;
}

Document delete_connectives(const Document& doc, const std::vector<std::string>& lexicon) {
  if (lexicon.empty()) throw Error("connective lexicon is empty");
  std::set<std::string> entries;
  for (const auto& w : lexicon) entries.insert(ascii_lower(w));

  Document out = doc;
  for (Edu& e : out.edus) {
    if (e.tokens.size() < 2 || !entries.count(ascii_lower(e.tokens.front()))) continue;
    const std::string lead = e.tokens.front();
    e.tokens.erase(e.tokens.begin());
    const auto start = e.text.find_first_not_of(" \t");
    if (start != std::string::npos && e.text.compare(start, lead.size(), lead) == 0) {
      const auto rest = e.text.find_first_not_of(" \t", start + lead.size());
      e.text = rest == std::string::npos ? std::string() : e.text.substr(rest);
    } else {
      e.text.clear();
      for (const auto& t : e.tokens) e.text += (e.text.empty() ? "" : " ") + t;
    }
  }
  return out;
}

}  // namespace ddp
