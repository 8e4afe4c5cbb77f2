#pragma once

#include "nsrm/annotations.hpp"
#include "nsrm/error.hpp"
#include "nsrm/eval.hpp"
#include "nsrm/keypoints.hpp"

namespace nsrm {

/// Square hand patch in original-image pixels and the keypoints mapped into
/// network-input coordinates. Pixels of the patch outside the image are
/// zero-padded by whatever consumes the transform.
///
/// Forward map: q = (p - center) * scale + input_size / 2, scale = input_size / side.
struct CropResult {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double side = 0.0;
  Point2 center;
  double scale = 1.0;
  int input_size = 368;
  KeypointSet keypoints;

  Point2 to_patch(Point2 p) const {
    const double half = 0.5 * input_size;
    return {(p.x - center.x) * scale + half, (p.y - center.y) * scale + half};
  }
  Point2 to_original(Point2 q) const {
    const double half = 0.5 * input_size;
    return {(q.x - half) / scale + center.x, (q.y - half) / scale + center.y};
  }
};

inline KeypointSet map_keypoints(const KeypointSet& kps, auto&& fn) {
  KeypointSet out = kps;
  for (auto& p : out) {
    if (!p.visible) continue;
    const Point2 q = fn(p.position());
    p.x = q.x;
    p.y = q.y;
  }
  return out;
}

/// Square crop of side factor * B around the keypoint bounding box, where B
/// is the larger box dimension.
inline CropResult crop_hand(const AnnotationRecord& rec, double factor = 2.2, int input_size = 368) {
  if (!(factor > 1.0)) throw ConfigError("crop factor must exceed 1");
  if (input_size <= 0) throw ConfigError("input size must be positive");
  if (rec.keypoints.visible_count() < 2)
    throw ConfigError("record '" + rec.image_id + "': cropping needs at least 2 visible keypoints");
  const BBox box = tightest_bbox(rec.keypoints);
  const double b = box.dimension();
  if (!(b > 0.0)) throw ConfigError("record '" + rec.image_id + "': keypoint bounding box has zero dimension");

  CropResult crop;
  crop.side = factor * b;
  crop.center = box.center();
  crop.origin_x = crop.center.x - crop.side / 2.0;
  crop.origin_y = crop.center.y - crop.side / 2.0;
  crop.input_size = input_size;
  crop.scale = static_cast<double>(input_size) / crop.side;
  crop.keypoints = map_keypoints(rec.keypoints, [&](Point2 p) { return crop.to_patch(p); });
  return crop;
}

inline KeypointSet uncrop(const CropResult& crop, const KeypointSet& patch_kps) {
  return map_keypoints(patch_kps, [&](Point2 q) { return crop.to_original(q); });
}

/// Stretches the whole image onto the input square. Images of unknown size
/// are assumed to already be input-sized.
inline KeypointSet resize_to_input(const AnnotationRecord& rec, int input_size = 368) {
  if (rec.image_width <= 0 || rec.image_height <= 0) return rec.keypoints;
  const double sx = static_cast<double>(input_size) / rec.image_width;
  const double sy = static_cast<double>(input_size) / rec.image_height;
  return map_keypoints(rec.keypoints, [&](Point2 p) { return Point2{p.x * sx, p.y * sy}; });
}

}  // namespace nsrm
