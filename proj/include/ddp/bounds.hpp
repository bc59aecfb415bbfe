#pragma once

// Exhaustive enumeration of projective dependency trees and binary
// constituency trees over small documents, and the Sent-First
// search-space inequalities checked on them.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ddp/corpus.hpp"

namespace ddp {

inline constexpr int kMaxDependencyEdus = 9;
inline constexpr int kMaxConstituencyLeaves = 14;

struct DocumentShape {
  std::vector<int> sentence_lengths;

  // Parses "2,3,1". Throws Error on empty or non-positive entries.
  static DocumentShape parse(const std::string& text);

  int m() const { return static_cast<int>(sentence_lengths.size()); }
  int n() const;  // sentences with at least two EDUs
  int total() const;
  std::vector<SentenceSpan> spans() const;
  std::string to_string() const;  // "2,3,1"
};

// All compositions of 1..max_total with at least min_sentences parts, in
// order of total then lexicographic.
std::vector<DocumentShape> shapes_up_to(int max_total, int min_sentences = 1);

// heads[k] is the head of EDU k + 1; 0 is the virtual root.
using HeadArray = std::vector<int>;

// Every single-rooted projective tree over l EDUs, 1 <= l <= 9, in a fixed
// order without duplicates.
std::vector<HeadArray> enumerate_projective_trees(int l);

// Sent-First trees of a shape by assembling every combination of
// per-sentence trees with every tree over the sentence roots.
std::vector<HeadArray> enumerate_sentfirst_trees(const DocumentShape& shape);

// The same set obtained by filtering all projective trees over the shape's
// EDUs with has_sentfirst_structure.
std::vector<HeadArray> filter_sentfirst_trees(const DocumentShape& shape);

// A binary constituency tree given by its internal nodes as leaf intervals
// [first, last], 1-based and inclusive, in preorder.
using Constituents = std::vector<std::pair<int, int>>;

// Visits every binary tree over l leaves, 1 <= l <= 14.
void for_each_binary_tree(int l, const std::function<void(const Constituents&)>& visit);

// Number of trees visited by for_each_binary_tree.
std::uint64_t enumerate_binary_trees(int l);

// Overflow-checked arithmetic; throws Error on overflow.
std::uint64_t checked_add(std::uint64_t a, std::uint64_t b);
std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);

struct BoundsReport {
  DocumentShape shape;
  int theorem = 1;
  std::uint64_t t_count = 0;
  std::uint64_t tprime_count = 0;
  // Right-hand side as an exact fraction.
  std::uint64_t bound_numerator = 0;
  std::uint64_t bound_denominator = 1;
  bool holds = false;
  bool vacuous = false;  // theorem 1 with n <= 1: bound >= |T|

  double bound() const { return static_cast<double>(bound_numerator) / static_cast<double>(bound_denominator); }
};

// |T'| <= 2/(n+1) |T| with |T| and |T'| from the dependency enumerators.
BoundsReport check_theorem1(const DocumentShape& shape);

// |T'| <= (1/2)^n |T| over binary constituency trees where every sentence
// forms a constituent. Requires at least two sentences.
BoundsReport check_theorem2(const DocumentShape& shape);

std::string report_json(const BoundsReport& report);

}  // namespace ddp
