#include "xaibench/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "xaibench/error.hpp"
#include "xaibench/tensor_io.hpp"

namespace xaibench {

namespace {

// Parses one whitespace-delimited decimal header field, skipping comments.
std::size_t header_field(std::span<const std::byte> bytes, std::size_t& pos) {
  auto ch = [&](std::size_t i) { return static_cast<char>(std::to_integer<unsigned char>(bytes[i])); };
  while (pos < bytes.size()) {
    if (ch(pos) == '#') {
      while (pos < bytes.size() && ch(pos) != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(ch(pos)))) {
      ++pos;
    } else {
      break;
    }
  }
  std::size_t value = 0;
  std::size_t digits = 0;
  while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(ch(pos))) && digits < 9) {
    value = value * 10 + static_cast<std::size_t>(ch(pos) - '0');
    ++pos;
    ++digits;
  }
  if (digits == 0) throw Error(ErrorKind::kCorruptFile, "malformed PPM header");
  return value;
}

}  // namespace

std::vector<std::byte> encode_ppm(const Image& img) {
  const std::string header = "P6\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
  std::vector<std::byte> out;
  out.reserve(header.size() + img.values().size());
  for (char c : header) out.push_back(static_cast<std::byte>(c));
  for (float v : img.values()) {
    const float q = std::round(std::clamp(v, 0.0f, 1.0f) * 255.0f);
    out.push_back(static_cast<std::byte>(static_cast<unsigned>(q)));
  }
  return out;
}

Image decode_ppm(std::span<const std::byte> bytes) {
  if (bytes.size() < 2) throw Error(ErrorKind::kCorruptFile, "PPM shorter than its magic");
  if (std::to_integer<char>(bytes[0]) != 'P' || std::to_integer<char>(bytes[1]) != '6') {
    throw Error(ErrorKind::kBadMagic, "image magic is not P6");
  }
  std::size_t pos = 2;
  const std::size_t cols = header_field(bytes, pos);
  const std::size_t rows = header_field(bytes, pos);
  const std::size_t maxval = header_field(bytes, pos);
  if (maxval != 255) throw Error(ErrorKind::kCorruptFile, "PPM maxval must be 255");
  if (pos >= bytes.size() || !std::isspace(std::to_integer<unsigned char>(bytes[pos]))) {
    throw Error(ErrorKind::kCorruptFile, "malformed PPM header");
  }
  ++pos;
  const std::size_t need = rows * cols * 3;
  if (bytes.size() - pos != need) {
    throw Error(ErrorKind::kCorruptFile,
                "PPM payload holds " + std::to_string(bytes.size() - pos) + " bytes, expected " + std::to_string(need));
  }
  Image img(rows, cols);
  auto values = img.values();
  for (std::size_t i = 0; i < need; ++i) {
    values[i] = static_cast<float>(std::to_integer<unsigned>(bytes[pos + i])) / 255.0f;
  }
  return img;
}

void write_ppm(const Image& img, const std::filesystem::path& path) { write_file_bytes(path, encode_ppm(img)); }

Image read_ppm(const std::filesystem::path& path) {
  try {
    return decode_ppm(read_file_bytes(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace xaibench
