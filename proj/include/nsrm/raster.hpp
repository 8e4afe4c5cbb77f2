#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "nsrm/error.hpp"
#include "nsrm/maps.hpp"

namespace nsrm {

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit raster, 1 (gray) or 3 (RGB) samples per pixel.
struct Image {
  int width = 0;
  int height = 0;
  int samples = 1;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int s, std::uint8_t fill = 0)
      : width(w), height(h), samples(s), data(static_cast<std::size_t>(w) * h * s, fill) {}

  std::uint8_t* pixel(int x, int y) { return data.data() + (static_cast<std::size_t>(y) * width + x) * samples; }
  const std::uint8_t* pixel(int x, int y) const {
    return data.data() + (static_cast<std::size_t>(y) * width + x) * samples;
  }

  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    auto* p = pixel(x, y);
    if (samples == 1) {
      p[0] = c[0];
    } else {
      p[0] = c[0];
      p[1] = c[1];
      p[2] = c[2];
    }
  }
};

inline std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

/// Binary netpbm: P5 for gray, P6 for RGB.
inline void write_pnm(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << (img.samples == 1 ? "P5" : "P6") << '\n' << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline const std::vector<Rgb>& channel_palette() {
  static const std::vector<Rgb> palette = {{255, 255, 255}, {255, 64, 64},  {255, 160, 32}, {240, 240, 48},
                                           {64, 220, 64},   {64, 160, 255}, {200, 96, 255}, {255, 128, 200}};
  return palette;
}

/// Gray image of the per-pixel maximum over `channels`; 0 -> black, 1 -> white.
/// Each map pixel becomes a `zoom` x `zoom` block.
inline Image render_gray(const ChannelStack& stack, std::span<const std::size_t> channels, int zoom = 1) {
  Image img(stack.width() * zoom, stack.height() * zoom, 1);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      float v = 0.0f;
      for (std::size_t c : channels) v = std::max(v, stack[c].at(y / zoom, x / zoom));
      img.pixel(x, y)[0] = to_byte(v);
    }
  return img;
}

/// Each channel tinted with its palette color; overlaps keep the brightest
/// component.
inline Image render_color(const ChannelStack& stack, std::span<const std::size_t> channels, int zoom = 1) {
  Image img(stack.width() * zoom, stack.height() * zoom, 3);
  const auto& palette = channel_palette();
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      std::array<double, 3> rgb{0, 0, 0};
      for (std::size_t i = 0; i < channels.size(); ++i) {
        const double v = stack[channels[i]].at(y / zoom, x / zoom);
        const Rgb& col = palette[i % palette.size()];
        for (int k = 0; k < 3; ++k) rgb[k] = std::max(rgb[k], v * col[k] / 255.0);
      }
      img.set(x, y, {to_byte(rgb[0]), to_byte(rgb[1]), to_byte(rgb[2])});
    }
  return img;
}

inline void draw_line(Image& img, int x0, int y0, int x1, int y1, Rgb c) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    img.set(x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

struct PlotSeries {
  std::vector<double> x;
  std::vector<double> y;  // in [0, 1]
  Rgb color;
};

/// Line chart on a white canvas: x spans the union of series abscissae,
/// y spans [0, 1] with grid lines every 0.1.
inline Image render_line_chart(std::span<const PlotSeries> series, int width = 640, int height = 480) {
  Image img(width, height, 3, 255);
  const int left = 50, right = width - 20, top = 20, bottom = height - 40;
  double xmin = 1e300, xmax = -1e300;
  for (const auto& s : series)
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  const auto px = [&](double v) { return left + static_cast<int>(std::lround((v - xmin) / (xmax - xmin) * (right - left))); };
  const auto py = [&](double v) { return bottom - static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * (bottom - top))); };

  for (int k = 0; k <= 10; ++k) {
    const int y = py(k / 10.0);
    draw_line(img, left, y, right, y, {225, 225, 225});
  }
  draw_line(img, left, bottom, right, bottom, {0, 0, 0});
  draw_line(img, left, top, left, bottom, {0, 0, 0});
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const int x = px(s.x[i]), y = py(s.y[i]);
      draw_line(img, x, bottom, x, bottom + 5, {0, 0, 0});
      for (int d = -2; d <= 2; ++d) {
        draw_line(img, x - 2, y + d, x + 2, y + d, s.color);
      }
      if (i > 0) draw_line(img, px(s.x[i - 1]), py(s.y[i - 1]), x, y, s.color);
    }
  }
  return img;
}

}  // namespace nsrm
