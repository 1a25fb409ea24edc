#include "vostrack/selection.hpp"

#include <algorithm>

#include "vostrack/errors.hpp"
#include "vostrack/rng.hpp"

namespace vostrack {

double saliency_score(const TrackedInstance& instance) {
    if (instance.frequency < 1)
        raise(ErrorCode::input, "instance was never assigned");
    return instance.saliency_sum / static_cast<double>(instance.frequency);
}

double frequency_score(const TrackedInstance& instance, int M) {
    if (M < 1) raise(ErrorCode::config, "growth horizon must be at least 1");
    return std::min(static_cast<double>(instance.frequency) / static_cast<double>(M), 1.0);
}

double selection_score(const TrackedInstance& instance, const SelectionWeights& weights,
                       int M) {
    return weights.w_sal * saliency_score(instance) +
           weights.w_freq * frequency_score(instance, M);
}

namespace {

// Rebuilds the pool keeping only `keep` (pool-order indices), locks it, and
// reports the surviving ids.
std::vector<int> finish_selection(ObjectPool& pool, std::vector<std::size_t> keep) {
    std::sort(keep.begin(), keep.end());
    std::vector<TrackedInstance> kept;
    kept.reserve(keep.size());
    for (std::size_t index : keep) kept.push_back(std::move(pool.instances[index]));
    pool.instances = std::move(kept);
    pool.phase = PoolPhase::locked;
    std::vector<int> ids;
    ids.reserve(pool.instances.size());
    for (const TrackedInstance& instance : pool.instances) ids.push_back(instance.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace

std::vector<int> select_key_instances(ObjectPool& pool, int K,
                                      const SelectionWeights& weights, int M) {
    if (K < 1) raise(ErrorCode::config, "K must be at least 1");
    std::vector<std::size_t> order(pool.instances.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> scores(pool.instances.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        scores[i] = selection_score(pool.instances[i], weights, M);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return pool.instances[a].id < pool.instances[b].id;
    });
    if (order.size() > static_cast<std::size_t>(K)) order.resize(K);
    return finish_selection(pool, std::move(order));
}

std::vector<int> random_select_instances(ObjectPool& pool, int K, std::uint64_t seed) {
    if (K < 1) raise(ErrorCode::config, "K must be at least 1");
    std::vector<std::size_t> order(pool.instances.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    if (order.size() > static_cast<std::size_t>(K)) order.resize(K);
    return finish_selection(pool, std::move(order));
}

}  // namespace vostrack
