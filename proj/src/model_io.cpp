#include "ddp/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "ddp/transition.hpp"

namespace ddp {

namespace {

constexpr std::array<char, 4> kMagic = {'D', 'D', 'P', 'M'};
constexpr std::array<char, 4> kFeedForwardTag = {'F', 'F', 'N', 'N'};
constexpr std::array<char, 4> kStackedTag = {'S', 'B', 'I', 'L'};
constexpr std::uint32_t kMaxCount = 1u << 30;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void tag(const std::array<char, 4>& t) { bytes(t.data(), t.size()); }
  void u32(std::uint32_t v) { unsigned_le(v, 4); }
  void u64(std::uint64_t v) { unsigned_le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  void unsigned_le(std::uint64_t v, int n) {
    char buf[8];
    for (int k = 0; k < n; ++k) buf[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
    bytes(buf, static_cast<std::size_t>(n));
  }
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) throw DataError("model file is truncated");
  }
  std::array<char, 4> tag() {
    std::array<char, 4> t{};
    bytes(t.data(), t.size());
    return t;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(unsigned_le(4)); }
  std::uint64_t u64() { return unsigned_le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > kMaxCount) throw DataError("model file string is too long");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }

 private:
  std::uint64_t unsigned_le(int n) {
    unsigned char buf[8];
    bytes(reinterpret_cast<char*>(buf), static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int k = n - 1; k >= 0; --k) v = (v << 8) | buf[k];
    return v;
  }
  std::istream& in_;
};

template <class Net>
void write_network(Writer& w, const Net& net) {
  w.u32(static_cast<std::uint32_t>(net.input_dim()));
  w.u32(static_cast<std::uint32_t>(net.hidden()));
  w.u32(static_cast<std::uint32_t>(net.outputs()));
  w.u64(net.params().size());
  for (double v : net.params()) w.f64(v);
}

template <class Net>
Net read_network(Reader& r) {
  const std::uint32_t input = r.u32(), hidden = r.u32(), outputs = r.u32();
  if (input == 0 || hidden == 0 || outputs == 0 || input > kMaxCount || hidden > kMaxCount || outputs > kMaxCount) {
    throw DataError("model file has invalid network dimensions");
  }
  Net net(static_cast<int>(input), static_cast<int>(hidden), static_cast<int>(outputs));
  const std::uint64_t count = r.u64();
  if (count != net.params().size()) {
    throw DataError("model file has " + std::to_string(count) + " parameters, dimensions imply " +
                    std::to_string(net.params().size()));
  }
  for (double& v : net.params()) v = r.f64();
  return net;
}

void write_labels(Writer& w, const std::vector<std::string>& labels) {
  w.u32(static_cast<std::uint32_t>(labels.size()));
  for (const auto& l : labels) w.str(l);
}

std::vector<std::string> action_labels() {
  std::vector<std::string> out;
  for (Action a : kAllActions) out.emplace_back(to_string(a));
  return out;
}

}  // namespace

void write_model(std::ostream& out, const ModelFile& model) {
  Writer w(out);
  w.tag(kMagic);
  w.u32(kModelFormatVersion);
  if (const auto* m = std::get_if<ActionModel>(&model)) {
    w.tag(kFeedForwardTag);
    w.str(m->level);
    write_labels(w, action_labels());
    write_network(w, m->model);
  } else if (const auto* d = std::get_if<DirectRelationClassifier>(&model)) {
    w.tag(kFeedForwardTag);
    w.str("direct");
    write_labels(w, d->labels.labels());
    write_network(w, d->model);
  } else {
    const auto& s = std::get<StackedRelationLabeler>(model);
    w.tag(kStackedTag);
    w.str("relation");
    write_labels(w, s.labels.labels());
    write_network(w, s.intra_layer);
    write_network(w, s.inter_layer);
  }
  if (!out) throw DataError("failed to write model");
}

ModelFile read_model(std::istream& in) {
  Reader r(in);
  if (r.tag() != kMagic) throw DataError("not a model file (bad magic)");
  if (const auto version = r.u32(); version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  const auto tag = r.tag();
  const std::string role = r.str();
  const std::uint32_t label_count = r.u32();
  if (label_count > kMaxCount) throw DataError("model file has too many labels");
  std::vector<std::string> labels;
  for (std::uint32_t k = 0; k < label_count; ++k) labels.push_back(r.str());

  if (tag == kFeedForwardTag && (role == "intra" || role == "inter")) {
    if (labels != action_labels()) throw DataError("action model has unexpected output labels");
    ActionModel m{role, read_network<FeedForwardModel>(r)};
    if (m.model.outputs() != kNumActions) throw DataError("action model must have 4 outputs");
    return m;
  }
  if (tag == kFeedForwardTag && role == "direct") {
    DirectRelationClassifier d{RelationSet(labels), read_network<FeedForwardModel>(r)};
    if (d.model.outputs() != d.labels.size()) throw DataError("direct classifier outputs do not match its labels");
    return d;
  }
  if (tag == kStackedTag && role == "relation") {
    StackedRelationLabeler s;
    s.labels = RelationSet(labels);
    s.intra_layer = read_network<BiLstmTagger>(r);
    s.inter_layer = read_network<BiLstmTagger>(r);
    if (s.intra_layer.outputs() != s.labels.size() || s.inter_layer.outputs() != s.labels.size()) {
      throw DataError("relation taggers do not match their labels");
    }
    return s;
  }
  throw DataError("unknown model architecture/role: " + std::string(tag.data(), tag.size()) + "/" + role);
}

void save_model(const std::string& path, const ModelFile& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model " + path);
  write_model(out, model);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model " + path);
  return read_model(in);
}

}  // namespace ddp
