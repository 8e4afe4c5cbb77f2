#pragma once

#include <cstddef>
#include <vector>

#include "nsrm/geometry.hpp"

namespace nsrm {

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  bool visible = false;

  Point2 position() const { return {x, y}; }
  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

/// Annotated keypoints of one hand. Coordinates are meaningful only for
/// visible entries; the coordinate frame (original image, network input,
/// or map) depends on context.
struct KeypointSet {
  std::vector<Keypoint> points;

  KeypointSet() = default;
  explicit KeypointSet(std::size_t n) : points(n) {}
  explicit KeypointSet(std::vector<Keypoint> pts) : points(std::move(pts)) {}

  std::size_t size() const { return points.size(); }
  Keypoint& operator[](std::size_t i) { return points[i]; }
  const Keypoint& operator[](std::size_t i) const { return points[i]; }
  auto begin() const { return points.begin(); }
  auto end() const { return points.end(); }
  auto begin() { return points.begin(); }
  auto end() { return points.end(); }

  std::size_t visible_count() const {
    std::size_t n = 0;
    for (const auto& p : points) n += p.visible ? 1 : 0;
    return n;
  }

  friend bool operator==(const KeypointSet&, const KeypointSet&) = default;
};

}  // namespace nsrm
