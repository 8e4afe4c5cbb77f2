#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nsrm/error.hpp"

namespace nsrm {

/// Output lattice. Map pixel (row i, col j) sits at continuous map
/// coordinate (x = j, y = i); input-image coordinates map onto it by `scale()`.
struct GridSpec {
  int width = 46;
  int height = 46;
  int input_size = 368;

  double scale() const { return static_cast<double>(width) / static_cast<double>(input_size); }
  std::size_t pixels() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline void validate(const GridSpec& g) {
  if (g.width <= 0 || g.height <= 0 || g.input_size <= 0)
    throw ConfigError("grid width, height and input size must be positive");
}

/// One dense confidence channel, row-major.
template <class T>
struct BasicMaskMap {
  int width = 0;
  int height = 0;
  std::vector<T> values;
  std::string label;

  BasicMaskMap() = default;
  BasicMaskMap(int w, int h, std::string lbl = {})
      : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), T{0}),
        label(std::move(lbl)) {}

  T& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
  const T& at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
  std::size_t size() const { return values.size(); }

  bool same_shape(const BasicMaskMap& o) const { return width == o.width && height == o.height; }
  bool all_zero() const {
    for (T v : values)
      if (v != T{0}) return false;
    return true;
  }
};

/// Ordered channels sharing one lattice.
template <class T>
struct BasicChannelStack {
  std::vector<BasicMaskMap<T>> channels;

  std::size_t size() const { return channels.size(); }
  bool empty() const { return channels.empty(); }
  int width() const { return channels.empty() ? 0 : channels.front().width; }
  int height() const { return channels.empty() ? 0 : channels.front().height; }
  BasicMaskMap<T>& operator[](std::size_t c) { return channels[c]; }
  const BasicMaskMap<T>& operator[](std::size_t c) const { return channels[c]; }

  bool uniform() const {
    for (const auto& c : channels)
      if (!c.same_shape(channels.front())) return false;
    return true;
  }
  bool same_shape(const BasicChannelStack& o) const {
    if (size() != o.size()) return false;
    for (std::size_t c = 0; c < size(); ++c)
      if (!channels[c].same_shape(o.channels[c])) return false;
    return true;
  }
};

using MaskMap = BasicMaskMap<float>;
using ChannelStack = BasicChannelStack<float>;

/// Bitwise value equality (labels ignored).
template <class T>
bool values_equal(const BasicChannelStack<T>& a, const BasicChannelStack<T>& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t c = 0; c < a.size(); ++c)
    if (a[c].values != b[c].values) return false;
  return true;
}

}  // namespace nsrm
