#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nsrm/error.hpp"

namespace nsrm {

using KeypointId = int;

struct Limb {
  KeypointId parent = 0;
  KeypointId child = 0;

  friend bool operator==(const Limb&, const Limb&) = default;
};

struct FingerChain {
  std::string name;
  std::vector<KeypointId> keypoints;  // base to tip

  friend bool operator==(const FingerChain&, const FingerChain&) = default;
};

/// Skeleton as data: keypoints, the limbs joining them, and the chains that
/// define per-finger groups. The root keypoint is always id 0.
struct HandTopology {
  int keypoint_count = 0;
  std::vector<Limb> limbs;
  std::vector<FingerChain> finger_chains;

  friend bool operator==(const HandTopology&, const HandTopology&) = default;
};

struct LimbGroup {
  std::string name;
  std::vector<std::size_t> limb_indices;

  friend bool operator==(const LimbGroup&, const LimbGroup&) = default;
};

enum class GroupScheme { G1, G6, G1AND6 };

inline std::string_view to_string(GroupScheme s) {
  switch (s) {
    case GroupScheme::G1: return "G1";
    case GroupScheme::G6: return "G6";
    case GroupScheme::G1AND6: return "G1AND6";
  }
  return "?";
}

inline GroupScheme parse_scheme(std::string_view s) {
  if (s == "G1") return GroupScheme::G1;
  if (s == "G6") return GroupScheme::G6;
  if (s == "G1AND6" || s == "G1&6" || s == "G16") return GroupScheme::G1AND6;
  throw ConfigError("unknown group scheme '" + std::string(s) + "' (expected G1, G6 or G1AND6)");
}

/// Canonical 21-point hand: 0 = wrist, then thumb, index, middle, ring and
/// little finger, four points each from base to tip. Limbs run wrist->base
/// and then along each finger.
inline HandTopology default_topology() {
  static constexpr std::array<const char*, 5> kFingerNames = {"thumb", "index", "middle", "ring",
                                                              "little"};
  HandTopology topo;
  topo.keypoint_count = 21;
  for (int f = 0; f < 5; ++f) {
    FingerChain chain{kFingerNames[f], {}};
    KeypointId prev = 0;
    for (int k = 0; k < 4; ++k) {
      const KeypointId id = 1 + 4 * f + k;
      chain.keypoints.push_back(id);
      topo.limbs.push_back({prev, id});
      prev = id;
    }
    topo.finger_chains.push_back(std::move(chain));
  }
  return topo;
}

/// Checks the structural invariants shared by every skeleton: valid distinct
/// endpoints, a tree rooted at keypoint 0, and chains that walk along limbs
/// starting from a child of the root.
inline void validate(const HandTopology& topo) {
  const int n = topo.keypoint_count;
  if (n < 2) throw ConfigError("topology needs at least 2 keypoints");
  if (static_cast<int>(topo.limbs.size()) != n - 1)
    throw ConfigError("topology with " + std::to_string(n) + " keypoints must have " +
                      std::to_string(n - 1) + " limbs, got " + std::to_string(topo.limbs.size()));

  std::vector<int> parent_of(n, -1);
  for (std::size_t i = 0; i < topo.limbs.size(); ++i) {
    const auto [a, b] = topo.limbs[i];
    if (a < 0 || a >= n || b < 0 || b >= n || a == b)
      throw ConfigError("limb " + std::to_string(i) + " has invalid endpoints");
    if (b == 0) throw ConfigError("limb " + std::to_string(i) + " has the root as its child");
    if (parent_of[b] != -1)
      throw ConfigError("keypoint " + std::to_string(b) + " is the child of more than one limb");
    parent_of[b] = a;
  }
  // Every keypoint must reach the root; n-1 limbs with unique children then form a tree.
  for (int k = 1; k < n; ++k) {
    int cur = k;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > n) throw ConfigError("limbs contain a cycle through keypoint " + std::to_string(k));
      cur = parent_of[cur];
    }
  }

  for (const auto& chain : topo.finger_chains) {
    if (chain.keypoints.empty()) throw ConfigError("finger chain '" + chain.name + "' is empty");
    KeypointId prev = 0;
    for (KeypointId k : chain.keypoints) {
      if (k <= 0 || k >= n || parent_of[k] != prev)
        throw ConfigError("finger chain '" + chain.name + "' does not follow the limbs");
      prev = k;
    }
  }
}

inline int degree(const HandTopology& topo, KeypointId id) {
  return static_cast<int>(std::count_if(topo.limbs.begin(), topo.limbs.end(), [id](const Limb& l) {
    return l.parent == id || l.child == id;
  }));
}

namespace detail {

inline std::size_t limb_index_of_child(const HandTopology& topo, KeypointId child) {
  for (std::size_t i = 0; i < topo.limbs.size(); ++i)
    if (topo.limbs[i].child == child) return i;
  throw ConfigError("no limb ends at keypoint " + std::to_string(child));
}

inline LimbGroup whole_hand(const HandTopology& topo) {
  LimbGroup g{"hand", {}};
  for (std::size_t i = 0; i < topo.limbs.size(); ++i) g.limb_indices.push_back(i);
  return g;
}

// Palm: every limb leaving the root. Each finger: its chain's limbs past the base.
inline std::vector<LimbGroup> palm_and_fingers(const HandTopology& topo) {
  std::vector<LimbGroup> out;
  LimbGroup palm{"palm", {}};
  for (std::size_t i = 0; i < topo.limbs.size(); ++i)
    if (topo.limbs[i].parent == 0) palm.limb_indices.push_back(i);
  out.push_back(std::move(palm));
  for (const auto& chain : topo.finger_chains) {
    LimbGroup g{chain.name, {}};
    for (std::size_t k = 1; k < chain.keypoints.size(); ++k)
      g.limb_indices.push_back(limb_index_of_child(topo, chain.keypoints[k]));
    if (!g.limb_indices.empty()) out.push_back(std::move(g));
  }
  return out;
}

}  // namespace detail

inline std::vector<LimbGroup> groups(const HandTopology& topo, GroupScheme scheme) {
  switch (scheme) {
    case GroupScheme::G1: return {detail::whole_hand(topo)};
    case GroupScheme::G6: return detail::palm_and_fingers(topo);
    case GroupScheme::G1AND6: {
      std::vector<LimbGroup> out{detail::whole_hand(topo)};
      auto six = detail::palm_and_fingers(topo);
      out.insert(out.end(), six.begin(), six.end());
      return out;
    }
  }
  return {};
}

inline std::size_t group_count(const HandTopology& topo, GroupScheme scheme) {
  return groups(topo, scheme).size();
}

}  // namespace nsrm
