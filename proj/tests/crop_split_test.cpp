#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "nsrm/crop.hpp"
#include "nsrm/split.hpp"
#include "nsrm/synthesis.hpp"
#include "test_support.hpp"

using namespace nsrm;

namespace {

AnnotationRecord with_points(std::vector<Keypoint> pts) {
  AnnotationRecord r;
  r.image_id = "r";
  r.keypoints = KeypointSet(std::move(pts));
  return r;
}

std::vector<AnnotationRecord> numbered(std::size_t n) {
  std::vector<AnnotationRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].image_id = "id" + std::to_string(i);
    out[i].keypoints = KeypointSet(21);
  }
  return out;
}

std::vector<std::string> ids(const std::vector<AnnotationRecord>& v) {
  std::vector<std::string> out;
  for (const auto& r : v) out.push_back(r.image_id);
  return out;
}

}  // namespace

TEST(Crop, BoxArithmetic) {
  const CropResult c = crop_hand(with_points({{0, 0, true}, {100, 50, true}, {-400, 900, false}}));
  EXPECT_DOUBLE_EQ(c.side, 220.0);
  EXPECT_EQ(c.center, (Point2{50, 25}));
  EXPECT_DOUBLE_EQ(c.origin_x, -60.0);
  EXPECT_DOUBLE_EQ(c.origin_y, -85.0);
  EXPECT_EQ(c.keypoints[2], (Keypoint{-400, 900, false}));
}

TEST(Crop, CenterMapsToPatchCenter) {
  const CropResult c = crop_hand(with_points({{0, 0, true}, {100, 50, true}, {50, 25, true}}));
  EXPECT_EQ(c.keypoints[2].x, 184.0);
  EXPECT_EQ(c.keypoints[2].y, 184.0);
}

TEST(Crop, InverseRecoversOriginals) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    AnnotationRecord r;
    r.keypoints = fixtures::random_hand(rng, -500, 3000, 0.1);
    const CropResult c = crop_hand(r);
    const KeypointSet back = uncrop(c, c.keypoints);
    for (std::size_t k = 0; k < 21; ++k) {
      if (!r.keypoints[k].visible) continue;
      EXPECT_LT(norm(back[k].position() - r.keypoints[k].position()), 1e-9);
    }
  }
}

TEST(Crop, Errors) {
  EXPECT_THROW(crop_hand(with_points({{1, 1, true}, {1, 1, true}})), ConfigError);
  EXPECT_THROW(crop_hand(with_points({{1, 1, true}, {5, 5, false}})), ConfigError);
  EXPECT_THROW(crop_hand(with_points({{1, 1, true}, {5, 5, true}}), 1.0), ConfigError);
}

TEST(Crop, ThenSynthesizeIsTranslationInvariant) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> coord(0, 1000), shift(-5000, 5000);
  for (int t = 0; t < 20; ++t) {
    AnnotationRecord a;
    a.keypoints = KeypointSet(21);
    for (auto& p : a.keypoints) p = {double(coord(rng)), double(coord(rng)), true};
    AnnotationRecord b = a;
    const double dx = shift(rng), dy = shift(rng);
    for (auto& p : b.keypoints) {
      p.x += dx;
      p.y += dy;
    }
    for (auto repr : {Representation::LDM, Representation::LPM}) {
      const auto sa = synthesize_structure(crop_hand(a).keypoints, default_topology(), GroupScheme::G1AND6, repr, {});
      const auto sb = synthesize_structure(crop_hand(b).keypoints, default_topology(), GroupScheme::G1AND6, repr, {});
      EXPECT_TRUE(values_equal(sa, sb));
    }
  }
}

TEST(Resize, StretchesToInput) {
  AnnotationRecord r = with_points({{320, 120, true}, {0, 0, false}});
  r.image_width = 640;
  r.image_height = 240;
  const KeypointSet k = resize_to_input(r);
  EXPECT_EQ(k[0], (Keypoint{184, 184, true}));
}

TEST(Split, PanopticSizes) {
  const SplitSizes s = split_sizes(14817, {0.8, 0.1, 0.1});
  EXPECT_EQ(s.train, 11855u);
  EXPECT_EQ(s.validation, 1481u);
  EXPECT_EQ(s.test, 1481u);
  EXPECT_THROW(split_sizes(10, {0.5, 0.1, 0.1}), ConfigError);
}

TEST(Split, DeterministicPerSeed) {
  const auto a = split_dataset(numbered(100), {0.8, 0.1, 0.1}, 42);
  const auto b = split_dataset(numbered(100), {0.8, 0.1, 0.1}, 42);
  EXPECT_EQ(ids(a.train), ids(b.train));
  EXPECT_EQ(ids(a.test), ids(b.test));
  const auto c = split_dataset(numbered(100), {0.8, 0.1, 0.1}, 43);
  EXPECT_NE(ids(a.train), ids(c.train));
}

TEST(Split, PartitionOfInput) {
  const auto s = split_dataset(numbered(257), {0.7, 0.2, 0.1}, 9);
  std::multiset<std::string> all;
  for (const auto* part : {&s.train, &s.validation, &s.test})
    for (const auto& r : *part) all.insert(r.image_id);
  EXPECT_EQ(all.size(), 257u);
  EXPECT_EQ(std::set<std::string>(all.begin(), all.end()).size(), 257u);
  EXPECT_EQ(s.validation.size(), 51u);
  EXPECT_EQ(s.test.size(), 25u);
}

TEST(Split, InvariantToInputOrder) {
  auto recs = numbered(60);
  const auto a = split_dataset(recs, {0.8, 0.1, 0.1}, 5);
  std::mt19937_64 rng(3);
  std::shuffle(recs.begin(), recs.end(), rng);
  const auto b = split_dataset(recs, {0.8, 0.1, 0.1}, 5);
  EXPECT_EQ(ids(a.train), ids(b.train));
  EXPECT_EQ(ids(a.validation), ids(b.validation));
}

TEST(Split, GeneratorValuesAreFrozen) {
  // Reference SplitMix64 outputs for seed 0 (first three draws of the
  // sequential generator with state starting at 0).
  EXPECT_EQ(splitmix64_at(0, 0), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(splitmix64_at(0, 1), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(splitmix64_at(0, 2), 0x06C45D188009454FULL);
  const auto p = seeded_permutation(10, 0);
  std::vector<std::size_t> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(sorted[i], i);
}
