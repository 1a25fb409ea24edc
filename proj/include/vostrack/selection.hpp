#pragma once

#include <cstdint>
#include <vector>

#include "vostrack/pool.hpp"

namespace vostrack {

struct SelectionWeights {
    double w_sal = 0.5;
    double w_freq = 1.0;
};

// Mean of the per-appearance mean-in-mask saliency.
double saliency_score(const TrackedInstance& instance);

// Appearance count relative to the growth horizon, clamped to [0,1].
double frequency_score(const TrackedInstance& instance, int M);

double selection_score(const TrackedInstance& instance, const SelectionWeights& weights,
                       int M);

// Keeps the K instances with the highest combined score (ties keep the
// lower id), drops the rest, locks the pool. Returns the surviving ids in
// ascending order.
std::vector<int> select_key_instances(ObjectPool& pool, int K,
                                      const SelectionWeights& weights, int M);

// Baseline: keeps a uniformly random K-subset, deterministic per seed.
std::vector<int> random_select_instances(ObjectPool& pool, int K, std::uint64_t seed);

}  // namespace vostrack
