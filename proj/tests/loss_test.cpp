#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nsrm/loss.hpp"
#include "test_support.hpp"

using namespace nsrm;

namespace {

BasicChannelStack<double> random_stack(std::mt19937_64& rng, std::size_t channels, int w, int h, double lo,
                                       double hi) {
  BasicChannelStack<double> s;
  for (std::size_t c = 0; c < channels; ++c) s.channels.push_back(fixtures::random_map<double>(rng, w, h, lo, hi));
  return s;
}

BasicChannelStack<double> single(double v) {
  BasicChannelStack<double> s;
  s.channels.emplace_back(1, 1);
  s[0].values[0] = v;
  return s;
}

// ||analytic - central difference|| / ||central difference||
template <class LossFn, class GradFn>
double gradient_relative_error(StagePredictions<double> preds, const BasicChannelStack<double>& gt, LossFn loss,
                               GradFn grad, double h = 1e-5) {
  const auto analytic = grad(preds, gt);
  double num = 0, den = 0;
  for (std::size_t t = 0; t < preds.size(); ++t)
    for (std::size_t c = 0; c < preds[t].size(); ++c)
      for (std::size_t p = 0; p < preds[t][c].values.size(); ++p) {
        double& x = preds[t][c].values[p];
        const double x0 = x;
        x = x0 + h;
        const double up = loss(preds, gt);
        x = x0 - h;
        const double down = loss(preds, gt);
        x = x0;
        const double fd = (up - down) / (2 * h);
        const double diff = analytic[t][c].values[p] - fd;
        num += diff * diff;
        den += fd * fd;
      }
  return std::sqrt(num / den);
}

}  // namespace

TEST(StructureLoss, ZeroForPerfectBinaryPrediction) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.5);
  BasicChannelStack<double> gt = random_stack(rng, 3, 6, 5, 0, 1);
  for (auto& ch : gt.channels)
    for (auto& v : ch.values) v = coin(rng) ? 1.0 : 0.0;
  EXPECT_EQ(structure_loss(StagePredictions<double>{gt, gt, gt}, gt), 0.0);
}

TEST(StructureLoss, HalfPredictionSinglePixel) {
  EXPECT_NEAR(structure_loss(StagePredictions<double>{single(0.5)}, single(1.0)), 0.6931471805599453, 1e-15);
  EXPECT_NEAR(structure_loss(StagePredictions<double>{single(0.5)}, single(0.0)), 0.6931471805599453, 1e-15);
}

TEST(StructureLoss, ClampKeepsLossFinite) {
  const double l = structure_loss(StagePredictions<double>{single(0.0)}, single(1.0));
  EXPECT_NEAR(l, -std::log(kLogClampEpsilon), 1e-9);
  const double l2 = structure_loss(StagePredictions<double>{single(1.0)}, single(0.0));
  EXPECT_NEAR(l2, -std::log(kLogClampEpsilon), 1e-9);
}

TEST(StructureLoss, SumsOverStages) {
  const auto gt = single(1.0);
  EXPECT_NEAR(structure_loss(StagePredictions<double>{single(0.5), single(0.5), single(0.5)}, gt),
              3 * 0.6931471805599453, 1e-14);
}

TEST(StructureLoss, NonNegative) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto gt = random_stack(rng, 2, 5, 5, 0, 1);
    EXPECT_GE(structure_loss(StagePredictions<double>{random_stack(rng, 2, 5, 5, 0, 1)}, gt), 0.0);
  }
}

TEST(StructureLoss, ConstantPredictionMinimizedAtMean) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto gt = random_stack(rng, 1, 6, 6, 0, 1);
    double mean = 0;
    for (double v : gt[0].values) mean += v;
    mean /= static_cast<double>(gt[0].values.size());
    double best_c = 0, best = 1e300;
    for (int k = 1; k < 1000; ++k) {
      BasicChannelStack<double> pred = gt;
      const double c = k / 1000.0;
      for (auto& v : pred[0].values) v = c;
      const double l = structure_loss(StagePredictions<double>{pred}, gt);
      if (l < best) {
        best = l;
        best_c = c;
      }
    }
    EXPECT_NEAR(best_c, mean, 1e-3);
  }
}

TEST(StructureLoss, ShapeMismatchThrows) {
  BasicChannelStack<double> gt = single(1.0);
  BasicChannelStack<double> wrong;
  wrong.channels.emplace_back(2, 1);
  EXPECT_THROW(structure_loss(StagePredictions<double>{wrong}, gt), ShapeError);
  EXPECT_THROW(pose_loss(StagePredictions<double>{wrong}, gt), ShapeError);
}

TEST(StructureLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto gt = random_stack(rng, 3, 4, 5, 0, 1);
    StagePredictions<double> preds{random_stack(rng, 3, 4, 5, 0.05, 0.95), random_stack(rng, 3, 4, 5, 0.05, 0.95)};
    const double err = gradient_relative_error(
        preds, gt, [](const auto& p, const auto& g) { return structure_loss(p, g); },
        [](const auto& p, const auto& g) { return structure_loss_gradient(p, g); });
    EXPECT_LT(err, 1e-5);
  }
}

TEST(PoseLoss, ZeroForPerfectPrediction) {
  std::mt19937_64 rng(5);
  const auto gt = random_stack(rng, 21, 6, 6, 0, 1);
  EXPECT_EQ(pose_loss(StagePredictions<double>{gt, gt}, gt), 0.0);
}

TEST(PoseLoss, SinglePixel) {
  EXPECT_NEAR(pose_loss(StagePredictions<double>{single(0.4)}, single(1.0)), 0.36, 1e-15);
}

TEST(PoseLoss, DoublingResidualQuadruples) {
  std::mt19937_64 rng(6);
  const auto gt = random_stack(rng, 4, 5, 5, 0, 1);
  auto pred = random_stack(rng, 4, 5, 5, 0, 1);
  auto pred2 = pred;
  for (std::size_t c = 0; c < pred.size(); ++c)
    for (std::size_t p = 0; p < pred[c].values.size(); ++p)
      pred2[c].values[p] = gt[c].values[p] - 2 * (gt[c].values[p] - pred[c].values[p]);
  EXPECT_NEAR(pose_loss(StagePredictions<double>{pred2}, gt), 4 * pose_loss(StagePredictions<double>{pred}, gt), 1e-12);
}

TEST(PoseLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto gt = random_stack(rng, 3, 4, 5, 0, 1);
    StagePredictions<double> preds{random_stack(rng, 3, 4, 5, -0.5, 1.5)};
    const double err = gradient_relative_error(
        preds, gt, [](const auto& p, const auto& g) { return pose_loss(p, g); },
        [](const auto& p, const auto& g) { return pose_loss_gradient(p, g); });
    EXPECT_LT(err, 1e-5);
  }
}

TEST(Losses, DeterministicAcrossJobs) {
  std::mt19937_64 rng(8);
  const auto gt = random_stack(rng, 7, 46, 46, 0, 1);
  StagePredictions<float> preds;
  for (int t = 0; t < 3; ++t) {
    BasicChannelStack<float> s;
    for (int c = 0; c < 7; ++c) s.channels.push_back(fixtures::random_map<float>(rng, 46, 46, 0.01, 0.99));
    preds.push_back(std::move(s));
  }
  const double s1 = structure_loss(preds, gt, 1);
  const double p1 = pose_loss(preds, gt, 1);
  for (int jobs : {2, 3, 8}) {
    EXPECT_EQ(structure_loss(preds, gt, jobs), s1);
    EXPECT_EQ(pose_loss(preds, gt, jobs), p1);
  }
}

TEST(TotalLoss, Combinations) {
  LossWeights w;
  w.lambda1 = 1;
  EXPECT_DOUBLE_EQ(total_loss(2, 3, std::nullopt, w, GroupScheme::G1), 5);
  w.lambda1 = 0.1;
  w.lambda2 = 0.02;
  EXPECT_NEAR(total_loss(1, 10, 50.0, w, GroupScheme::G1AND6), 3.0, 1e-15);
  w.lambda1 = w.lambda2 = 0;
  EXPECT_EQ(total_loss(1.25, 10, 50.0, w, GroupScheme::G1AND6), 1.25);
}

TEST(TotalLoss, OperandMismatch) {
  LossWeights w;
  EXPECT_THROW(total_loss(1, 1, 1.0, w, GroupScheme::G1), ConfigError);
  EXPECT_THROW(total_loss(1, 1, std::nullopt, w, GroupScheme::G1AND6), ConfigError);
  EXPECT_THROW(total_loss(1, 1, 1.0, w, GroupScheme::G6), ConfigError);
}

TEST(Schedule, StepDecay) {
  LossWeights w;
  w.lambda1 = 1;
  EXPECT_EQ(weights_at_epoch(w, 0).first, 1.0);
  EXPECT_NEAR(weights_at_epoch(w, 20).first, 0.1, 1e-16);
  w.lambda1 = 0.5;
  EXPECT_NEAR(weights_at_epoch(w, 45).first, 0.005, 1e-16);
  EXPECT_THROW(weights_at_epoch(w, -1), ConfigError);
}

TEST(Schedule, NonincreasingAndPiecewiseConstant) {
  LossWeights w{0.7, 0.3, 0.1, 20};
  for (int e = 1; e < 200; ++e) {
    const auto prev = weights_at_epoch(w, e - 1), cur = weights_at_epoch(w, e);
    EXPECT_LE(cur.first, prev.first);
    EXPECT_LE(cur.second, prev.second);
    if (e % 20 != 0) { EXPECT_EQ(cur, prev); }
  }
}

TEST(DefaultWeights, Table) {
  EXPECT_EQ(default_weights(Representation::LDM, GroupScheme::G1).lambda1, 1.0);
  EXPECT_EQ(default_weights(Representation::LPM, GroupScheme::G1).lambda1, 0.5);
  const auto ldm = default_weights(Representation::LDM, GroupScheme::G1AND6);
  EXPECT_EQ(ldm.lambda1, 0.2);
  EXPECT_EQ(ldm.lambda2, 0.04);
  const auto lpm = default_weights(Representation::LPM, GroupScheme::G1AND6);
  EXPECT_EQ(lpm.lambda1, 0.1);
  EXPECT_EQ(lpm.lambda2, 0.02);
  for (auto r : {Representation::LDM, Representation::LPM})
    for (auto s : {GroupScheme::G1, GroupScheme::G6, GroupScheme::G1AND6}) {
      EXPECT_EQ(default_weights(r, s).decay_ratio, 0.1);
      EXPECT_EQ(default_weights(r, s).decay_period, 20);
    }
}
