#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsrm/error.hpp"
#include "nsrm/geometry.hpp"
#include "nsrm/handmodel.hpp"
#include "nsrm/keypoints.hpp"
#include "nsrm/maps.hpp"
#include "nsrm/parallel.hpp"

namespace nsrm {

enum class Representation { LDM, LPM };
enum class LpmDistanceMode { LINEAR, SQUARED };

inline std::string_view to_string(Representation r) { return r == Representation::LDM ? "LDM" : "LPM"; }
inline std::string_view to_string(LpmDistanceMode m) {
  return m == LpmDistanceMode::LINEAR ? "LINEAR" : "SQUARED";
}

inline Representation parse_representation(std::string_view s) {
  if (s == "LDM") return Representation::LDM;
  if (s == "LPM") return Representation::LPM;
  throw ConfigError("unknown representation '" + std::string(s) + "' (expected LDM or LPM)");
}

inline LpmDistanceMode parse_lpm_mode(std::string_view s) {
  if (s == "LINEAR") return LpmDistanceMode::LINEAR;
  if (s == "SQUARED") return LpmDistanceMode::SQUARED;
  throw ConfigError("unknown LPM distance mode '" + std::string(s) + "' (expected LINEAR or SQUARED)");
}

/// Widths are in map pixels.
struct SynthesisConfig {
  double sigma_ldm = 1.0;
  double sigma_lpm = 1.0;
  double sigma_kcm = 1.0;
  LpmDistanceMode lpm_distance_mode = LpmDistanceMode::LINEAR;
  GridSpec grid;
};

inline void validate(const SynthesisConfig& cfg) {
  if (!(cfg.sigma_ldm > 0.0) || !std::isfinite(cfg.sigma_ldm)) throw ConfigError("sigma_ldm must be positive");
  if (!(cfg.sigma_lpm > 0.0) || !std::isfinite(cfg.sigma_lpm)) throw ConfigError("sigma_lpm must be positive");
  if (!(cfg.sigma_kcm > 0.0) || !std::isfinite(cfg.sigma_kcm)) throw ConfigError("sigma_kcm must be positive");
  validate(cfg.grid);
}

/// Probabilistic limb confidence at a point `distance` away from the limb.
/// LINEAR uses the distance itself in the exponent, SQUARED its square.
inline double lpm_value(double distance, double sigma, LpmDistanceMode mode) {
  const double d = mode == LpmDistanceMode::LINEAR ? distance : distance * distance;
  return std::exp(-d / (2.0 * sigma * sigma));
}

/// Gaussian keypoint confidence from the squared distance to the keypoint.
inline double kcm_value(double squared_distance, double sigma) {
  return std::exp(-squared_distance / (2.0 * sigma * sigma));
}

inline KeypointSet to_map_coords(const KeypointSet& kps, const GridSpec& grid) {
  const double s = grid.scale();
  KeypointSet out = kps;
  for (auto& p : out) {
    if (!p.visible) continue;
    p.x *= s;
    p.y *= s;
  }
  return out;
}

namespace detail {

inline const Keypoint& endpoint(const KeypointSet& kps, KeypointId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= kps.size())
    throw ConfigError("limb references keypoint " + std::to_string(id) + " outside the keypoint set");
  return kps[static_cast<std::size_t>(id)];
}

inline std::string limb_label(const Limb& limb) {
  return "limb" + std::to_string(limb.parent) + "-" + std::to_string(limb.child);
}

template <class Value>
MaskMap rasterize(const GridSpec& grid, std::string label, Value&& value) {
  MaskMap m(grid.width, grid.height, std::move(label));
  for (int i = 0; i < grid.height; ++i)
    for (int j = 0; j < grid.width; ++j) m.at(i, j) = static_cast<float>(value(Point2{double(j), double(i)}));
  return m;
}

inline void check_keypoints(const KeypointSet& kps, const HandTopology& topo) {
  if (static_cast<int>(kps.size()) != topo.keypoint_count)
    throw ConfigError("expected " + std::to_string(topo.keypoint_count) + " keypoints, got " +
                      std::to_string(kps.size()));
  for (std::size_t k = 0; k < kps.size(); ++k)
    if (kps[k].visible && !(std::isfinite(kps[k].x) && std::isfinite(kps[k].y)))
      throw ConfigError("visible keypoint " + std::to_string(k) + " has a non-finite coordinate");
}

}  // namespace detail

/// Deterministic limb mask: 1 inside the rectangle of half width sigma_ldm
/// around the limb, 0 elsewhere. `kps_map` is in map coordinates; a limb with
/// an invisible endpoint yields the zero map.
inline MaskMap ldm_limb(const KeypointSet& kps_map, const Limb& limb, const SynthesisConfig& cfg) {
  const Keypoint& a = detail::endpoint(kps_map, limb.parent);
  const Keypoint& b = detail::endpoint(kps_map, limb.child);
  if (!a.visible || !b.visible) return MaskMap(cfg.grid.width, cfg.grid.height, detail::limb_label(limb));
  const Segment seg{a.position(), b.position()};
  const double w = cfg.sigma_ldm;
  return detail::rasterize(cfg.grid, detail::limb_label(limb),
                           [&](Point2 p) { return in_limb_rectangle(p, seg, w) ? 1.0 : 0.0; });
}

/// Probabilistic limb mask decaying with point-to-segment distance.
inline MaskMap lpm_limb(const KeypointSet& kps_map, const Limb& limb, const SynthesisConfig& cfg) {
  const Keypoint& a = detail::endpoint(kps_map, limb.parent);
  const Keypoint& b = detail::endpoint(kps_map, limb.child);
  if (!a.visible || !b.visible) return MaskMap(cfg.grid.width, cfg.grid.height, detail::limb_label(limb));
  const Segment seg{a.position(), b.position()};
  return detail::rasterize(cfg.grid, detail::limb_label(limb), [&](Point2 p) {
    return lpm_value(point_segment_distance(p, seg), cfg.sigma_lpm, cfg.lpm_distance_mode);
  });
}

inline MaskMap limb_mask(Representation repr, const KeypointSet& kps_map, const Limb& limb,
                         const SynthesisConfig& cfg) {
  return repr == Representation::LDM ? ldm_limb(kps_map, limb, cfg) : lpm_limb(kps_map, limb, cfg);
}

/// Pointwise maximum.
template <class T>
BasicMaskMap<T> compose(std::span<const BasicMaskMap<T>* const> maps) {
  if (maps.empty()) throw ConfigError("compose needs at least one map");
  BasicMaskMap<T> out = *maps.front();
  for (const auto* m : maps.subspan(1)) {
    if (!m->same_shape(out)) throw ShapeError("compose: map dimensions differ");
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = std::max(out.values[i], m->values[i]);
  }
  return out;
}

template <class T>
BasicMaskMap<T> compose(std::span<const BasicMaskMap<T>> maps) {
  std::vector<const BasicMaskMap<T>*> ptrs;
  ptrs.reserve(maps.size());
  for (const auto& m : maps) ptrs.push_back(&m);
  return compose<T>(std::span<const BasicMaskMap<T>* const>(ptrs));
}

template <class T>
BasicMaskMap<T> compose(const std::vector<BasicMaskMap<T>>& maps) {
  return compose<T>(std::span<const BasicMaskMap<T>>(maps));
}

/// Structure ground truth: one composed channel per limb group, in the order
/// given by groups(topo, scheme). `kps` is in network-input coordinates.
inline ChannelStack synthesize_structure(const KeypointSet& kps, const HandTopology& topo, GroupScheme scheme,
                                         Representation repr, const SynthesisConfig& cfg) {
  validate(cfg);
  detail::check_keypoints(kps, topo);
  const KeypointSet kps_map = to_map_coords(kps, cfg.grid);

  std::vector<MaskMap> limb_maps;
  limb_maps.reserve(topo.limbs.size());
  for (const auto& limb : topo.limbs) limb_maps.push_back(limb_mask(repr, kps_map, limb, cfg));

  ChannelStack out;
  for (const auto& group : groups(topo, scheme)) {
    std::vector<const MaskMap*> members;
    for (std::size_t li : group.limb_indices) members.push_back(&limb_maps.at(li));
    MaskMap m = compose<float>(std::span<const MaskMap* const>(members));
    m.label = group.name;
    out.channels.push_back(std::move(m));
  }
  return out;
}

/// Keypoint confidence maps: one Gaussian channel per keypoint, zero for
/// invisible keypoints.
inline ChannelStack synthesize_kcm(const KeypointSet& kps, const SynthesisConfig& cfg) {
  validate(cfg);
  const KeypointSet kps_map = to_map_coords(kps, cfg.grid);
  ChannelStack out;
  out.channels.reserve(kps_map.size());
  for (std::size_t k = 0; k < kps_map.size(); ++k) {
    const Keypoint& kp = kps_map[k];
    std::string label = "kp" + std::to_string(k);
    if (!kp.visible) {
      out.channels.emplace_back(cfg.grid.width, cfg.grid.height, std::move(label));
      continue;
    }
    if (!(std::isfinite(kp.x) && std::isfinite(kp.y)))
      throw ConfigError("visible keypoint " + std::to_string(k) + " has a non-finite coordinate");
    const Point2 c = kp.position();
    out.channels.push_back(detail::rasterize(cfg.grid, std::move(label), [&](Point2 p) {
      const Point2 d = p - c;
      return kcm_value(dot(d, d), cfg.sigma_kcm);
    }));
  }
  return out;
}

struct SynthesizedRecord {
  ChannelStack structure;
  ChannelStack kcm;
};

/// Per-record synthesis across `jobs` workers; output order matches input.
inline std::vector<SynthesizedRecord> synthesize_batch(std::span<const KeypointSet> batch, const HandTopology& topo,
                                                       GroupScheme scheme, Representation repr,
                                                       const SynthesisConfig& cfg, int jobs = 1) {
  validate(cfg);
  std::vector<SynthesizedRecord> out(batch.size());
  parallel_for(batch.size(), jobs, [&](std::size_t i) {
    out[i].structure = synthesize_structure(batch[i], topo, scheme, repr, cfg);
    out[i].kcm = synthesize_kcm(batch[i], cfg);
  });
  return out;
}

}  // namespace nsrm
