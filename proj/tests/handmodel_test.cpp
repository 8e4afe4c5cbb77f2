#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "nsrm/handmodel.hpp"

using namespace nsrm;

TEST(Topology, HasTwentyLimbsOverTwentyOneKeypoints) {
  const HandTopology t = default_topology();
  EXPECT_EQ(t.keypoint_count, 21);
  EXPECT_EQ(t.limbs.size(), 20u);
  EXPECT_NO_THROW(validate(t));
}

TEST(Topology, WristHasDegreeFive) {
  EXPECT_EQ(degree(default_topology(), 0), 5);
}

TEST(Topology, EachFingerContributesFourLimbs) {
  const HandTopology t = default_topology();
  ASSERT_EQ(t.finger_chains.size(), 5u);
  for (const auto& chain : t.finger_chains) {
    ASSERT_EQ(chain.keypoints.size(), 4u);
    int limbs = 0;
    for (const auto& l : t.limbs)
      if (std::find(chain.keypoints.begin(), chain.keypoints.end(), l.child) != chain.keypoints.end()) ++limbs;
    EXPECT_EQ(limbs, 4) << chain.name;
  }
}

TEST(Topology, CanonicalIndexOrder) {
  const HandTopology t = default_topology();
  EXPECT_EQ(t.finger_chains[0].name, "thumb");
  EXPECT_EQ(t.finger_chains[0].keypoints, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(t.finger_chains[4].name, "little");
  EXPECT_EQ(t.finger_chains[4].keypoints, (std::vector<int>{17, 18, 19, 20}));
  EXPECT_EQ(t.limbs[0], (Limb{0, 1}));
  EXPECT_EQ(t.limbs[1], (Limb{1, 2}));
  EXPECT_EQ(t.limbs[4], (Limb{0, 5}));
}

TEST(Topology, EveryNonRootKeypointIsChildOfExactlyOneLimb) {
  const HandTopology t = default_topology();
  std::vector<int> seen(21, 0);
  for (const auto& l : t.limbs) ++seen[l.child];
  EXPECT_EQ(seen[0], 0);
  for (int k = 1; k < 21; ++k) EXPECT_EQ(seen[k], 1) << k;
}

TEST(Topology, Deterministic) { EXPECT_EQ(default_topology(), default_topology()); }

TEST(Topology, ValidateRejectsBrokenSkeletons) {
  HandTopology t = default_topology();
  t.limbs[3] = {3, 3};
  EXPECT_THROW(validate(t), ConfigError);

  t = default_topology();
  t.limbs[3].child = 2;  // keypoint 2 gets two parents, 4 none
  EXPECT_THROW(validate(t), ConfigError);

  t = default_topology();
  t.limbs.pop_back();
  EXPECT_THROW(validate(t), ConfigError);

  t = default_topology();
  t.finger_chains[1].keypoints = {5, 7};
  EXPECT_THROW(validate(t), ConfigError);
}

TEST(Groups, G1IsOneGroupOfAllLimbs) {
  const auto g = groups(default_topology(), GroupScheme::G1);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].limb_indices.size(), 20u);
}

TEST(Groups, G6IsPalmPlusFingers) {
  const auto g = groups(default_topology(), GroupScheme::G6);
  ASSERT_EQ(g.size(), 6u);
  std::vector<std::size_t> sizes;
  for (const auto& grp : g) sizes.push_back(grp.limb_indices.size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{5, 3, 3, 3, 3, 3}));
  EXPECT_EQ(g[0].name, "palm");
  const HandTopology t = default_topology();
  for (std::size_t li : g[0].limb_indices) EXPECT_EQ(t.limbs[li].parent, 0);
}

TEST(Groups, G6PartitionsTheLimbs) {
  const auto g = groups(default_topology(), GroupScheme::G6);
  std::multiset<std::size_t> all;
  for (const auto& grp : g) all.insert(grp.limb_indices.begin(), grp.limb_indices.end());
  EXPECT_EQ(all.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(all.count(i), 1u) << i;
}

TEST(Groups, G1And6IsG1ThenG6) {
  const HandTopology t = default_topology();
  const auto g = groups(t, GroupScheme::G1AND6);
  ASSERT_EQ(g.size(), 7u);
  EXPECT_EQ(g[0], groups(t, GroupScheme::G1)[0]);
  const auto six = groups(t, GroupScheme::G6);
  std::set<std::size_t> uni;
  for (std::size_t i = 1; i < 7; ++i) {
    EXPECT_EQ(g[i], six[i - 1]);
    uni.insert(g[i].limb_indices.begin(), g[i].limb_indices.end());
  }
  EXPECT_EQ(uni, std::set<std::size_t>(g[0].limb_indices.begin(), g[0].limb_indices.end()));
}

TEST(Groups, EveryLimbCoveredUnderEveryScheme) {
  for (auto s : {GroupScheme::G1, GroupScheme::G6, GroupScheme::G1AND6}) {
    std::set<std::size_t> seen;
    for (const auto& grp : groups(default_topology(), s)) {
      EXPECT_FALSE(grp.limb_indices.empty());
      seen.insert(grp.limb_indices.begin(), grp.limb_indices.end());
    }
    EXPECT_EQ(seen.size(), 20u) << to_string(s);
  }
}

TEST(Groups, SchemeNamesParse) {
  EXPECT_EQ(parse_scheme("G1"), GroupScheme::G1);
  EXPECT_EQ(parse_scheme("G1&6"), GroupScheme::G1AND6);
  EXPECT_THROW(parse_scheme("G3"), ConfigError);
}
