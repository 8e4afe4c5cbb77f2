#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <tuple>
#include <vector>

#include "nsrm/annotations.hpp"
#include "nsrm/error.hpp"

namespace nsrm {

/// SplitMix64 finalizer applied to seed + (counter + 1) * golden gamma.
/// Stateless, so draw k depends only on (seed, k).
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Permutation of [0, n): Fisher-Yates from the back, draw k picks
/// j = splitmix64_at(seed, k) mod (i + 1) for i = n-1, n-2, ..., 1.
inline std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::uint64_t k = 0;
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(splitmix64_at(seed, k++) % i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

/// Validation and test get floor(n * f); the remainder goes to training.
inline SplitSizes split_sizes(std::size_t n, std::array<double, 3> fractions) {
  for (double f : fractions)
    if (!(f >= 0.0)) throw ConfigError("split fractions must be non-negative");
  if (std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) > 1e-9)
    throw ConfigError("split fractions must sum to 1");
  const auto part = [n](double f) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * f + 1e-9));
  };
  SplitSizes s;
  s.validation = part(fractions[1]);
  s.test = part(fractions[2]);
  s.train = n - s.validation - s.test;
  return s;
}

struct DatasetSplit {
  std::vector<AnnotationRecord> train;
  std::vector<AnnotationRecord> validation;
  std::vector<AnnotationRecord> test;
};

/// Sorts by (image_id, image_path), shuffles with seeded_permutation, then
/// takes train, validation and test in that order.
inline DatasetSplit split_dataset(std::vector<AnnotationRecord> records,
                                  std::array<double, 3> fractions = {0.8, 0.1, 0.1}, std::uint64_t seed = 0) {
  const SplitSizes sizes = split_sizes(records.size(), fractions);
  std::stable_sort(records.begin(), records.end(), [](const AnnotationRecord& a, const AnnotationRecord& b) {
    return std::tie(a.image_id, a.image_path) < std::tie(b.image_id, b.image_path);
  });
  const auto perm = seeded_permutation(records.size(), seed);
  DatasetSplit out;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    auto& rec = records[perm[i]];
    if (i < sizes.train)
      out.train.push_back(std::move(rec));
    else if (i < sizes.train + sizes.validation)
      out.validation.push_back(std::move(rec));
    else
      out.test.push_back(std::move(rec));
  }
  return out;
}

}  // namespace nsrm
