#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nsrm/error.hpp"
#include "nsrm/handmodel.hpp"
#include "nsrm/maps.hpp"
#include "nsrm/parallel.hpp"
#include "nsrm/synthesis.hpp"

namespace nsrm {

/// Lower bound applied to each log argument of the cross-entropy.
inline constexpr double kLogClampEpsilon = 1e-7;

/// One prediction stack per cascade stage.
template <class T>
using StagePredictions = std::vector<BasicChannelStack<T>>;

struct LossWeights {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double decay_ratio = 0.1;
  int decay_period = 20;
};

inline void validate(const LossWeights& w) {
  if (!(w.lambda1 >= 0.0) || !(w.lambda2 >= 0.0)) throw ConfigError("loss weights must be non-negative");
  if (!(w.decay_ratio > 0.0 && w.decay_ratio <= 1.0)) throw ConfigError("decay ratio must lie in (0, 1]");
  if (w.decay_period < 1) throw ConfigError("decay period must be at least 1 epoch");
}

namespace detail {

template <class T, class U>
std::size_t check_stage_shapes(std::span<const BasicChannelStack<T>> preds, const BasicChannelStack<U>& gt) {
  if (gt.empty()) throw ShapeError("ground truth has no channels");
  if (!gt.uniform()) throw ShapeError("ground-truth channels differ in size");
  for (std::size_t t = 0; t < preds.size(); ++t) {
    const auto& p = preds[t];
    bool ok = p.size() == gt.size();
    for (std::size_t c = 0; ok && c < p.size(); ++c)
      ok = p[c].width == gt[c].width && p[c].height == gt[c].height;
    if (!ok) throw ShapeError("stage " + std::to_string(t) + " prediction shape does not match ground truth");
  }
  return gt[0].size();
}

// Flattened (stage, channel, pixel) addressing shared by both losses.
struct FlatIndex {
  std::size_t channels;
  std::size_t pixels;
  std::size_t stage(std::size_t i) const { return i / (channels * pixels); }
  std::size_t channel(std::size_t i) const { return (i / pixels) % channels; }
  std::size_t pixel(std::size_t i) const { return i % pixels; }
};

inline double cross_entropy_term(double target, double pred) {
  double term = 0.0;
  if (target != 0.0) term -= target * std::log(std::max(pred, kLogClampEpsilon));
  if (target != 1.0) term -= (1.0 - target) * std::log(std::max(1.0 - pred, kLogClampEpsilon));
  return term;
}

inline double cross_entropy_derivative(double target, double pred) {
  double g = 0.0;
  if (target != 0.0 && pred > kLogClampEpsilon) g -= target / pred;
  if (target != 1.0 && 1.0 - pred > kLogClampEpsilon) g += (1.0 - target) / (1.0 - pred);
  return g;
}

template <class T, class U, class Term>
double stage_reduction(std::span<const BasicChannelStack<T>> preds, const BasicChannelStack<U>& gt, int jobs,
                       Term&& term) {
  const std::size_t pixels = check_stage_shapes(preds, gt);
  const FlatIndex ix{gt.size(), pixels};
  const std::size_t n = preds.size() * gt.size() * pixels;
  return deterministic_sum(n, jobs, [&](std::size_t i) {
    const std::size_t c = ix.channel(i);
    const std::size_t p = ix.pixel(i);
    return term(static_cast<double>(gt[c].values[p]), static_cast<double>(preds[ix.stage(i)][c].values[p]));
  });
}

template <class T, class U, class Derivative>
StagePredictions<double> stage_gradient(std::span<const BasicChannelStack<T>> preds, const BasicChannelStack<U>& gt,
                                        Derivative&& derivative) {
  check_stage_shapes(preds, gt);
  StagePredictions<double> grad(preds.size());
  for (std::size_t t = 0; t < preds.size(); ++t) {
    for (std::size_t c = 0; c < gt.size(); ++c) {
      BasicMaskMap<double> g(gt[c].width, gt[c].height, gt[c].label);
      for (std::size_t p = 0; p < g.values.size(); ++p)
        g.values[p] = derivative(static_cast<double>(gt[c].values[p]), static_cast<double>(preds[t][c].values[p]));
      grad[t].channels.push_back(std::move(g));
    }
  }
  return grad;
}

}  // namespace detail

/// Cross-entropy of structure predictions against composed masks, summed over
/// stages, groups and pixels. Each log argument is floored at
/// kLogClampEpsilon, so a perfect 0/1 prediction scores exactly zero.
template <class T, class U>
double structure_loss(std::span<const BasicChannelStack<T>> preds, const BasicChannelStack<U>& gt, int jobs = 1) {
  return detail::stage_reduction(preds, gt, jobs, detail::cross_entropy_term);
}

template <class T, class U>
double structure_loss(const StagePredictions<T>& preds, const BasicChannelStack<U>& gt, int jobs = 1) {
  return structure_loss(std::span<const BasicChannelStack<T>>(preds), gt, jobs);
}

/// d(structure_loss)/d(prediction), same layout as `preds`.
template <class T, class U>
StagePredictions<double> structure_loss_gradient(const StagePredictions<T>& preds, const BasicChannelStack<U>& gt) {
  return detail::stage_gradient(std::span<const BasicChannelStack<T>>(preds), gt, detail::cross_entropy_derivative);
}

/// Sum of squared errors over stages, keypoints and pixels.
template <class T, class U>
double pose_loss(std::span<const BasicChannelStack<T>> preds, const BasicChannelStack<U>& gt, int jobs = 1) {
  return detail::stage_reduction(preds, gt, jobs, [](double target, double pred) {
    const double r = target - pred;
    return r * r;
  });
}

template <class T, class U>
double pose_loss(const StagePredictions<T>& preds, const BasicChannelStack<U>& gt, int jobs = 1) {
  return pose_loss(std::span<const BasicChannelStack<T>>(preds), gt, jobs);
}

template <class T, class U>
StagePredictions<double> pose_loss_gradient(const StagePredictions<T>& preds, const BasicChannelStack<U>& gt) {
  return detail::stage_gradient(std::span<const BasicChannelStack<T>>(preds), gt,
                                [](double target, double pred) { return -2.0 * (target - pred); });
}

/// Weighted combination of the pose loss and the structure losses. G1 takes
/// only the whole-hand term; G1AND6 requires the six-group term as well.
inline double total_loss(double pose, double struct_g1, std::optional<double> struct_g6, const LossWeights& w,
                         GroupScheme scheme) {
  switch (scheme) {
    case GroupScheme::G1:
      if (struct_g6) throw ConfigError("G1 total loss takes no six-group structure term");
      return pose + w.lambda1 * struct_g1;
    case GroupScheme::G1AND6:
      if (!struct_g6) throw ConfigError("G1AND6 total loss needs the six-group structure term");
      return pose + w.lambda1 * struct_g1 + w.lambda2 * *struct_g6;
    case GroupScheme::G6:
      break;
  }
  throw ConfigError("total loss is defined for the G1 and G1AND6 schemes only");
}

/// Structure weights after the step decay: lambda * ratio^floor(epoch / period).
inline std::pair<double, double> weights_at_epoch(const LossWeights& w, int epoch) {
  if (epoch < 0) throw ConfigError("epoch must be non-negative");
  if (w.decay_period < 1) throw ConfigError("decay period must be at least 1 epoch");
  const double factor = std::pow(w.decay_ratio, epoch / w.decay_period);
  return {w.lambda1 * factor, w.lambda2 * factor};
}

/// Weights that put the structure and pose losses on the same scale at the
/// start of training. G6 on its own reuses the G1AND6 values.
inline LossWeights default_weights(Representation repr, GroupScheme scheme) {
  const bool ldm = repr == Representation::LDM;
  LossWeights w;
  if (scheme == GroupScheme::G1) {
    w.lambda1 = ldm ? 1.0 : 0.5;
  } else {
    w.lambda1 = ldm ? 0.2 : 0.1;
    w.lambda2 = ldm ? 0.04 : 0.02;
  }
  return w;
}

}  // namespace nsrm
