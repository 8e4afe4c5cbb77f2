#pragma once

#include <cmath>

#include "nsrm/error.hpp"

namespace nsrm {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point2, Point2) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

/// Limb segment from keypoint `a` to keypoint `b`. a == b is allowed.
struct Segment {
  Point2 a;
  Point2 b;
};

inline Segment reversed(Segment s) { return {s.b, s.a}; }

/// Euclidean distance from p to the closest point of s.
inline double point_segment_distance(Point2 p, Segment s) {
  const Point2 ab = s.b - s.a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - s.a);
  double t = dot(p - s.a, ab) / len2;
  if (t <= 0.0) return norm(p - s.a);
  if (t >= 1.0) return norm(p - s.b);
  return norm(p - (s.a + t * ab));
}

/// Membership in the fixed-width rectangle around s: p projects onto the
/// segment (measured from b) and lies within half_width of its line.
/// Coincident endpoints fall back to a disk of radius half_width.
inline bool in_limb_rectangle(Point2 p, Segment s, double half_width) {
  if (!(half_width > 0.0)) throw ConfigError("limb half width must be positive");
  const Point2 along = s.a - s.b;
  const double len2 = dot(along, along);
  const Point2 rel = p - s.b;
  if (len2 == 0.0) return norm(rel) <= half_width;
  const double proj = dot(rel, along);
  if (proj < 0.0 || proj > len2) return false;
  // |rel . u_perp| with u_perp = perp(along) / |along|
  return std::abs(cross(along, rel)) / std::sqrt(len2) <= half_width;
}

}  // namespace nsrm
