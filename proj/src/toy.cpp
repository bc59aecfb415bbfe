#include "ddp/toy.hpp"

#include <array>
#include <cstdio>
#include <random>
#include <string>

namespace ddp {

namespace {

constexpr std::array<const char*, 5> kIntraRelations = {"elab-addition", "attribution", "enablement", "joint",
                                                        "manner-means"};
constexpr std::array<const char*, 4> kInterRelations = {"bg-goal", "evaluation", "contrast", "progression"};
constexpr std::array<const char*, 6> kFillers = {"market", "report", "study", "method", "result", "claim"};

template <std::size_t N>
const char* pick(std::mt19937_64& rng, const std::array<const char*, N>& items) {
  return items[rng() % N];
}

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

const char* side(int id, int head) { return head > id ? "head-right" : "head-left"; }

}  // namespace

std::vector<CorpusRecord> make_toy_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CorpusRecord> out;
  for (int d = 0; d < kToyDocuments; ++d) {
    const int sentences = uniform(rng, 2, 4);
    std::vector<int> lengths, pivots;
    int first = 1;
    for (int s = 0; s < sentences; ++s) {
      lengths.push_back(uniform(rng, 1, 4));
      pivots.push_back(first + uniform(rng, 0, lengths.back() - 1));
      first += lengths.back();
    }
    const int thesis = uniform(rng, 0, sentences - 1);
    const int doc_root = pivots[static_cast<std::size_t>(thesis)];

    std::vector<std::pair<std::string, int>> edus;
    DependencyTree tree;
    int id = 1;
    for (int s = 0; s < sentences; ++s) {
      const int pivot = pivots[static_cast<std::size_t>(s)];
      for (int k = 0; k < lengths[static_cast<std::size_t>(s)]; ++k, ++id) {
        std::string text;
        if (id == doc_root) {
          text = std::string("thesis pivot ") + pick(rng, kFillers);
          tree.heads.push_back(0);
          tree.relations.emplace_back(kRootLabel);
        } else if (id == pivot) {
          const char* rel = pick(rng, kInterRelations);
          text = std::string(rel) + " " + side(id, doc_root) + " pivot";
          tree.heads.push_back(doc_root);
          tree.relations.emplace_back(rel);
        } else {
          const char* rel = pick(rng, kIntraRelations);
          text = std::string(rel) + " " + side(id, pivot) + " " + pick(rng, kFillers);
          tree.heads.push_back(pivot);
          tree.relations.emplace_back(rel);
        }
        edus.emplace_back(std::move(text), s);
      }
    }
    char doc_id[16];
    std::snprintf(doc_id, sizeof doc_id, "toy-%02d", d + 1);
    out.push_back({make_document(doc_id, edus), std::move(tree), true});
  }
  return out;
}

}  // namespace ddp
