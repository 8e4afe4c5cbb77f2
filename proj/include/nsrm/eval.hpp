#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsrm/error.hpp"
#include "nsrm/keypoints.hpp"
#include "nsrm/maps.hpp"
#include "nsrm/parallel.hpp"

namespace nsrm {

struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double dimension() const { return std::max(width(), height()); }
  Point2 center() const { return {(x_min + x_max) / 2.0, (y_min + y_max) / 2.0}; }
};

/// Extent of the visible keypoints.
inline BBox tightest_bbox(const KeypointSet& kps) {
  bool any = false;
  BBox b;
  for (const auto& p : kps) {
    if (!p.visible) continue;
    if (!any) {
      b = {p.x, p.y, p.x, p.y};
      any = true;
      continue;
    }
    b.x_min = std::min(b.x_min, p.x);
    b.y_min = std::min(b.y_min, p.y);
    b.x_max = std::max(b.x_max, p.x);
    b.y_max = std::max(b.y_max, p.y);
  }
  if (!any) throw ConfigError("bounding box of a hand with no visible keypoints");
  return b;
}

/// Argmax per channel, first maximum in row-major order, mapped back to
/// input-image coordinates. An all-zero channel decodes as invisible.
template <class T>
KeypointSet decode_keypoints(const BasicChannelStack<T>& kcm, const GridSpec& grid) {
  const double s = grid.scale();
  KeypointSet out(kcm.size());
  for (std::size_t c = 0; c < kcm.size(); ++c) {
    const auto& m = kcm[c];
    if (m.values.empty()) continue;
    const auto it = std::max_element(m.values.begin(), m.values.end());
    if (!(*it > T{0})) continue;
    const auto idx = static_cast<std::size_t>(it - m.values.begin());
    const auto row = static_cast<double>(idx / static_cast<std::size_t>(m.width));
    const auto col = static_cast<double>(idx % static_cast<std::size_t>(m.width));
    out[c] = {col / s, row / s, true};
  }
  return out;
}

struct PckCurve {
  std::vector<double> thresholds;
  std::vector<double> values;
  double average = 0.0;
};

inline double mean_of(std::span<const double> values) {
  if (values.empty()) throw ConfigError("mean of an empty list");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

inline PckCurve make_curve(std::vector<double> thresholds, std::vector<double> values) {
  if (thresholds.size() != values.size()) throw ConfigError("curve thresholds and values differ in length");
  PckCurve c{std::move(thresholds), std::move(values), 0.0};
  c.average = mean_of(c.values);
  return c;
}

namespace thresholds {
inline std::vector<double> onehand10k() { return {0.1, 0.15, 0.2, 0.25, 0.3}; }
inline std::vector<double> panoptic() { return {0.04, 0.06, 0.08, 0.10, 0.12}; }
}  // namespace thresholds

inline void validate_thresholds(std::span<const double> ts) {
  if (ts.empty()) throw ConfigError("threshold list is empty");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > 0.0 && ts[i] <= 1.0)) throw ConfigError("PCK thresholds must lie in (0, 1]");
    if (i > 0 && !(ts[i] > ts[i - 1])) throw ConfigError("PCK thresholds must be strictly increasing");
  }
}

/// Pooled PCK: over all records, the fraction of visible ground-truth
/// keypoints whose prediction lies within threshold * bbox dimension.
/// Invisible ground truth is excluded; an invisible prediction of a visible
/// keypoint counts as a miss.
inline PckCurve pck(std::span<const KeypointSet> preds, std::span<const KeypointSet> gts,
                    std::span<const double> ts, int jobs = 1) {
  if (gts.empty()) throw ConfigError("PCK needs at least one record");
  if (preds.size() != gts.size())
    throw ConfigError("PCK got " + std::to_string(preds.size()) + " predictions for " +
                      std::to_string(gts.size()) + " ground-truth records");
  validate_thresholds(ts);

  const std::size_t nt = ts.size();
  std::vector<std::size_t> correct(gts.size() * nt, 0);
  std::vector<std::size_t> counted(gts.size(), 0);
  parallel_for(gts.size(), jobs, [&](std::size_t r) {
    const KeypointSet& gt = gts[r];
    const KeypointSet& pr = preds[r];
    if (pr.size() != gt.size())
      throw ConfigError("record " + std::to_string(r) + ": prediction has " + std::to_string(pr.size()) +
                        " keypoints, ground truth " + std::to_string(gt.size()));
    if (gt.visible_count() == 0) throw ConfigError("record " + std::to_string(r) + ": no visible keypoints");
    const double dim = tightest_bbox(gt).dimension();
    if (!(dim > 0.0)) throw ConfigError("record " + std::to_string(r) + ": ground-truth bounding box has zero dimension");
    for (std::size_t k = 0; k < gt.size(); ++k) {
      if (!gt[k].visible) continue;
      ++counted[r];
      if (!pr[k].visible) continue;
      const double d = norm(pr[k].position() - gt[k].position()) / dim;
      for (std::size_t t = 0; t < nt; ++t)
        if (d <= ts[t]) ++correct[r * nt + t];
    }
  });

  const std::size_t total = std::accumulate(counted.begin(), counted.end(), std::size_t{0});
  std::vector<double> values(nt, 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    std::size_t c = 0;
    for (std::size_t r = 0; r < gts.size(); ++r) c += correct[r * nt + t];
    values[t] = static_cast<double>(c) / static_cast<double>(total);
  }
  return make_curve(std::vector<double>(ts.begin(), ts.end()), std::move(values));
}

struct Improvement {
  double absolute = 0.0;
  double relative = 0.0;  // fraction of the baseline
};

inline Improvement improvement(double base_ave, double new_ave) {
  if (!(base_ave > 0.0)) throw ConfigError("baseline average must be positive");
  return {new_ave - base_ave, (new_ave - base_ave) / base_ave};
}

/// "+1.02 (+1.17%)"; `absolute` is printed in the caller's units.
inline std::string format_improvement(const Improvement& imp) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.2f (%+.2f%%)", imp.absolute, imp.relative * 100.0);
  return buf;
}

}  // namespace nsrm
