#include <cstring>
#include <fstream>
#include <map>

#include "smellnet/nn/model.hpp"

namespace smellnet::nn {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

class Reader {
 public:
  explicit Reader(std::vector<unsigned char> bytes) : bytes_(std::move(bytes)) {}
  bool done() const { return pos_ == bytes_.size(); }

  std::uint32_t u32() {
    need(4);
    const unsigned char* p = &bytes_[pos_];
    pos_ += 4;
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  }

  std::string text(std::size_t n) {
    need(n);
    std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw CheckpointError("checkpoint truncated");
  }
  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& file, const NamedTensors& tensors) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint " + file.string());
  for (const auto& [name, t] : tensors) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : t.data) {
      const float f = static_cast<float>(v);
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      put_u32(out, bits);
    }
  }
}

NamedTensors load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw CheckpointError("cannot read checkpoint " + file.string());
  Reader r({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
  NamedTensors out;
  while (!r.done()) {
    std::string name = r.text(r.u32());
    const std::uint32_t rank = r.u32();
    Shape shape(rank);
    for (auto& d : shape) d = r.u32();
    Tensor t(shape);
    for (auto& v : t.data) {
      const std::uint32_t bits = r.u32();
      float f;
      std::memcpy(&f, &bits, 4);
      v = f;
    }
    out.emplace_back(std::move(name), std::move(t));
  }
  return out;
}

void save_weights(Sequential& model, const std::filesystem::path& file) {
  NamedTensors tensors;
  for (Param* p : model.params()) tensors.emplace_back(p->name, p->value);
  save_checkpoint(file, tensors);
}

void load_weights(Sequential& model, const std::filesystem::path& file) {
  std::map<std::string, Tensor> by_name;
  for (auto& [name, t] : load_checkpoint(file)) by_name[name] = std::move(t);
  for (Param* p : model.params()) {
    auto it = by_name.find(p->name);
    if (it == by_name.end()) throw CheckpointError("checkpoint lacks " + p->name);
    if (it->second.shape != p->value.shape) {
      throw CheckpointError("checkpoint shape mismatch for " + p->name);
    }
    p->value = it->second;
  }
}

}  // namespace smellnet::nn
