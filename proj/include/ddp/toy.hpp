#pragma once

// Deterministic synthetic corpus. Each EDU's text names its gold relation
// and the side its head lies on, so the parsing and labelling tasks are
// learnable from the text alone.

#include <cstdint>
#include <vector>

#include "ddp/corpus.hpp"

namespace ddp {

inline constexpr int kToyDocuments = 20;

// 20 documents with 2-4 sentences of 1-4 EDUs each. Within a sentence every
// EDU attaches to one pivot EDU; every pivot attaches to the pivot of one
// thesis sentence, which heads the document.
std::vector<CorpusRecord> make_toy_corpus(std::uint64_t seed);

}  // namespace ddp
