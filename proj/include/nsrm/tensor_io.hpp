#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "nsrm/error.hpp"
#include "nsrm/maps.hpp"

namespace nsrm {

// Layout, all integers unsigned 32-bit little-endian:
//   "NSRM" | version | dtype | rank | channels | height | width | payload
// payload: channels*height*width IEEE-754 binary32 values, little-endian,
// channel-major then row-major.
inline constexpr char kTensorMagic[4] = {'N', 'S', 'R', 'M'};
inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr std::uint32_t kDtypeFloat32 = 1;
inline constexpr std::size_t kTensorHeaderBytes = 4 + 6 * 4;

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_tensor(const ChannelStack& stack) {
  if (!stack.uniform()) throw ShapeError("cannot serialize a stack with mixed channel sizes");
  std::vector<std::uint8_t> out(std::begin(kTensorMagic), std::end(kTensorMagic));
  const std::size_t pixels = static_cast<std::size_t>(stack.width()) * stack.height();
  out.reserve(kTensorHeaderBytes + 4 * stack.size() * pixels);
  detail::put_u32(out, kTensorVersion);
  detail::put_u32(out, kDtypeFloat32);
  detail::put_u32(out, 3);
  detail::put_u32(out, static_cast<std::uint32_t>(stack.size()));
  detail::put_u32(out, static_cast<std::uint32_t>(stack.height()));
  detail::put_u32(out, static_cast<std::uint32_t>(stack.width()));
  for (const auto& ch : stack.channels)
    for (float v : ch.values) detail::put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

inline ChannelStack decode_tensor(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kTensorHeaderBytes) throw FormatError("tensor header truncated");
  if (std::memcmp(bytes.data(), kTensorMagic, 4) != 0) throw FormatError("not an NSRM tensor (bad magic)");
  const std::uint8_t* p = bytes.data() + 4;
  const std::uint32_t version = detail::get_u32(p);
  if (version != kTensorVersion) throw FormatError("unsupported tensor version " + std::to_string(version));
  const std::uint32_t dtype = detail::get_u32(p + 4);
  if (dtype != kDtypeFloat32) throw FormatError("unsupported tensor dtype " + std::to_string(dtype));
  const std::uint32_t rank = detail::get_u32(p + 8);
  if (rank != 3) throw FormatError("unsupported tensor rank " + std::to_string(rank));
  const std::uint32_t channels = detail::get_u32(p + 12);
  const std::uint32_t height = detail::get_u32(p + 16);
  const std::uint32_t width = detail::get_u32(p + 20);
  const std::uint64_t pixels = std::uint64_t{height} * width;
  const std::uint64_t expected = kTensorHeaderBytes + 4 * std::uint64_t{channels} * pixels;
  if (bytes.size() < expected) throw FormatError("tensor payload truncated");
  if (bytes.size() > expected) throw FormatError("trailing bytes after tensor payload");

  ChannelStack stack;
  stack.channels.reserve(channels);
  const std::uint8_t* q = bytes.data() + kTensorHeaderBytes;
  for (std::uint32_t c = 0; c < channels; ++c) {
    MaskMap m(static_cast<int>(width), static_cast<int>(height));
    for (auto& v : m.values) {
      v = std::bit_cast<float>(detail::get_u32(q));
      q += 4;
    }
    stack.channels.push_back(std::move(m));
  }
  return stack;
}

inline void write_tensor(const ChannelStack& stack, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(stack);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline ChannelStack read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_tensor(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace nsrm
