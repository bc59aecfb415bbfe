#pragma once

// Binary model files. All integers and floats are little-endian.
//
//   "DDPM"                      4-byte magic
//   u32 version                 currently 1
//   4-byte architecture tag     "FFNN" or "SBIL"
//   string role                 "intra" | "inter" | "direct" | "relation"
//   u32 label count, strings    output labels (action names for scorers)
//   networks                    FFNN: one feed-forward block
//                               SBIL: layer-one tagger block, layer-two block
//
// A string is a u32 byte length followed by UTF-8 bytes. A network block is
// u32 input_dim, u32 hidden, u32 outputs, u64 parameter count, then the
// parameters as f64 in the order documented on the model class.

#include <iosfwd>
#include <string>
#include <variant>

#include "ddp/neural.hpp"
#include "ddp/relation.hpp"

namespace ddp {

inline constexpr std::uint32_t kModelFormatVersion = 1;

struct ActionModel {
  std::string level;  // "intra" or "inter"
  FeedForwardModel model;
};

using ModelFile = std::variant<ActionModel, DirectRelationClassifier, StackedRelationLabeler>;

void write_model(std::ostream& out, const ModelFile& model);
ModelFile read_model(std::istream& in);
void save_model(const std::string& path, const ModelFile& model);
ModelFile load_model(const std::string& path);

}  // namespace ddp
