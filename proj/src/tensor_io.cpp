#include "xaibench/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "xaibench/error.hpp"

namespace xaibench {

namespace {

template <typename T>
void put_le(std::vector<std::byte>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xffu));
}

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  template <typename T>
  T get_le(const char* what) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    if (bytes_.size() - pos_ < sizeof(U)) {
      throw Error(ErrorKind::kCorruptFile, std::string("tensor truncated while reading ") + what);
    }
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(std::to_integer<unsigned>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

std::vector<std::byte> encode_tensor(const Tensor& t) {
  if (t.shape.size() > kMaxTensorRank) throw Error(ErrorKind::kInvalidArgument, "tensor rank exceeds 8");
  if (t.element_count() != t.data.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "tensor shape does not match its element count");
  }
  std::vector<std::byte> out;
  out.reserve(12 + 8 * t.shape.size() + 4 * t.data.size());
  for (char c : kTensorMagic) out.push_back(static_cast<std::byte>(c));
  put_le(out, kDtypeFloat32);
  put_le(out, static_cast<std::uint32_t>(t.shape.size()));
  for (auto d : t.shape) put_le(out, d);
  for (float v : t.data) put_le(out, v);
  return out;
}

Tensor decode_tensor(std::span<const std::byte> bytes) {
  if (bytes.size() < 4) throw Error(ErrorKind::kCorruptFile, "tensor shorter than its magic");
  if (std::memcmp(bytes.data(), kTensorMagic, 4) != 0) throw Error(ErrorKind::kBadMagic, "tensor magic is not FBT1");
  Reader in(bytes.subspan(4));
  const auto dtype = in.get_le<std::uint32_t>("dtype");
  if (dtype != kDtypeFloat32) throw Error(ErrorKind::kCorruptFile, "unsupported tensor dtype " + std::to_string(dtype));
  const auto rank = in.get_le<std::uint32_t>("rank");
  if (rank > kMaxTensorRank) throw Error(ErrorKind::kCorruptFile, "tensor rank " + std::to_string(rank) + " exceeds 8");

  Tensor t;
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const auto d = in.get_le<std::uint64_t>("dims");
    if (d != 0 && count > std::numeric_limits<std::size_t>::max() / 4 / d) {
      throw Error(ErrorKind::kCorruptFile, "tensor dims overflow");
    }
    count *= static_cast<std::size_t>(d);
    t.shape.push_back(d);
  }
  if (in.remaining() != count * 4) {
    throw Error(ErrorKind::kCorruptFile, "tensor payload holds " + std::to_string(in.remaining()) + " bytes, expected " +
                                             std::to_string(count * 4));
  }
  t.data.resize(count);
  for (auto& v : t.data) v = in.get_le<float>("payload");
  return t;
}

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> bytes(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size))) {
    throw Error(ErrorKind::kIo, "cannot read " + path.string());
  }
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

void write_tensor(const Tensor& t, const std::filesystem::path& path) { write_file_bytes(path, encode_tensor(t)); }

Tensor read_tensor(const std::filesystem::path& path) {
  try {
    return decode_tensor(read_file_bytes(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace xaibench
