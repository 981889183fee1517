#include "tmirs/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmirs {

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t h) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text) {
  return fnv1a64({reinterpret_cast<const unsigned char*>(text.data()), text.size()});
}

namespace {

template <typename T>
void put_le(std::vector<unsigned char>& buf, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits;
  std::memcpy(&bits, &value, sizeof bits);
  for (std::size_t i = 0; i < sizeof bits; ++i) buf.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& buf) : buf_(buf) {}

  template <typename T>
  T get_le() {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    need(sizeof(U));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof bits; ++i) bits |= static_cast<U>(buf_[pos_ + i]) << (8 * i);
    pos_ += sizeof bits;
    T value;
    std::memcpy(&value, &bits, sizeof value);
    return value;
  }

  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw std::runtime_error("checkpoint is truncated");
  }
  const std::vector<unsigned char>& buf_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(std::ostream& out, const nn::PolicyParams& params, nlohmann::json metadata) {
  params.validate();
  metadata["dims"] = params.dims;
  const std::string meta = metadata.dump(2);

  std::vector<unsigned char> buf(kCheckpointMagic.begin(), kCheckpointMagic.end());
  put_le(buf, kCheckpointVersion);
  put_le(buf, static_cast<std::uint64_t>(meta.size()));
  buf.insert(buf.end(), meta.begin(), meta.end());
  for (std::size_t i = 0; i < params.layers(); ++i) {
    const auto& w = params.weights[i];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) put_le(buf, w(r, c));
    for (Eigen::Index c = 0; c < params.biases[i].size(); ++c) put_le(buf, params.biases[i](c));
  }
  put_le(buf, params.logz);
  put_le(buf, fnv1a64(buf));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("failed to write checkpoint");
}

void save_checkpoint(const std::filesystem::path& path, const nn::PolicyParams& params, nlohmann::json metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save_checkpoint(out, params, std::move(metadata));
}

Checkpoint load_checkpoint(std::istream& in) {
  const std::vector<unsigned char> buf{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  Reader r(buf);
  if (r.get_bytes(kCheckpointMagic.size()) != kCheckpointMagic) throw std::runtime_error("not a checkpoint file (bad magic)");
  const auto version = r.get_le<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  const auto meta_len = r.get_le<std::uint64_t>();
  Checkpoint ck;
  ck.metadata = nlohmann::json::parse(r.get_bytes(meta_len));

  auto& p = ck.params;
  p.dims = ck.metadata.at("dims").get<std::vector<int>>();
  if (p.dims.size() < 2) throw std::runtime_error("checkpoint dims are malformed");
  for (std::size_t i = 0; i + 1 < p.dims.size(); ++i) {
    nn::Matrix w(p.dims[i], p.dims[i + 1]);
    for (Eigen::Index row = 0; row < w.rows(); ++row)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(row, c) = r.get_le<double>();
    nn::RowVector b(p.dims[i + 1]);
    for (Eigen::Index c = 0; c < b.size(); ++c) b(c) = r.get_le<double>();
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  p.logz = r.get_le<double>();
  const std::size_t body = r.pos();
  const auto stored = r.get_le<std::uint64_t>();
  if (r.pos() != buf.size()) throw std::runtime_error("checkpoint has trailing bytes");
  if (stored != fnv1a64({buf.data(), body})) throw std::runtime_error("checkpoint checksum mismatch");
  p.validate();
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  return load_checkpoint(in);
}

}  // namespace tmirs
