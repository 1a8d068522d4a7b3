#include "e2dpca/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "e2dpca/error.hpp"

namespace e2dpca {
namespace {

constexpr char kMagic[8] = {'E', '2', 'D', 'P', 'C', 'A', 'M', 'D'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void matrix(const Matrix& m) {
    for (double v : m.data()) f64(v);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DataError("model file truncated at byte " + std::to_string(pos_));
  }
  void bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::vector<double> doubles(std::uint64_t count) {
    if (count > (in_.size() - pos_) / 8) throw DataError("model file truncated reading " + std::to_string(count) + " values");
    std::vector<double> out(count);
    for (auto& v : out) v = f64();
    return out;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

template <typename Enum>
Enum checked_enum(std::uint8_t raw, std::uint8_t max_value, const char* what) {
  if (raw > max_value) throw DataError(std::string("model file has invalid ") + what + " code " + std::to_string(raw));
  return static_cast<Enum>(raw);
}

}  // namespace

std::vector<std::uint8_t> serialize(const ProjectionBasis& basis) {
  const ModelConfig& cfg = basis.config();
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.u8(static_cast<std::uint8_t>(cfg.method));
  w.u8(static_cast<std::uint8_t>(cfg.direction));
  w.u8(static_cast<std::uint8_t>(cfg.metric));
  w.u8(0);
  w.u64(cfg.r);
  w.u64(cfg.d);
  w.u64(basis.original_shape().rows);
  w.u64(basis.original_shape().cols);
  w.u64(basis.vectors().rows());
  w.u64(basis.vectors().cols());
  for (double v : basis.eigenvalues()) w.f64(v);
  w.matrix(basis.vectors());
  w.u64(basis.mean().rows());
  w.u64(basis.mean().cols());
  w.matrix(basis.mean());
  return w.take();
}

ProjectionBasis deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw DataError("not a model file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw DataError("unsupported model format version " + std::to_string(version));

  ModelConfig cfg;
  cfg.method = checked_enum<Method>(r.u8(), 2, "method");
  cfg.direction = checked_enum<Direction>(r.u8(), 1, "direction");
  cfg.metric = checked_enum<Metric>(r.u8(), 1, "metric");
  r.u8();
  cfg.r = r.u64();
  cfg.d = r.u64();
  const Shape shape{r.u64(), r.u64()};
  const std::uint64_t basis_rows = r.u64();
  const std::uint64_t basis_cols = r.u64();
  if (basis_cols != cfg.d) throw DataError("model file: basis has " + std::to_string(basis_cols) + " columns, d=" + std::to_string(cfg.d));
  std::vector<double> eigenvalues = r.doubles(cfg.d);
  if (basis_rows == 0 || basis_rows > bytes.size() / 8 / (basis_cols == 0 ? 1 : basis_cols)) {
    throw DataError("model file: implausible basis size");
  }
  Matrix vectors(basis_rows, basis_cols, r.doubles(basis_rows * basis_cols));
  const std::uint64_t mean_rows = r.u64();
  const std::uint64_t mean_cols = r.u64();
  if (mean_rows == 0 || mean_cols == 0 || mean_rows > bytes.size() / 8 / mean_cols) {
    throw DataError("model file: implausible mean image size");
  }
  Matrix mean(mean_rows, mean_cols, r.doubles(mean_rows * mean_cols));
  if (!r.done()) throw DataError("model file has trailing bytes");
  return ProjectionBasis(cfg, shape, std::move(vectors), std::move(eigenvalues), std::move(mean));
}

void save_model(const ProjectionBasis& basis, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = serialize(basis);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

ProjectionBasis load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace e2dpca
