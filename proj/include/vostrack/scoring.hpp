#pragma once

#include <vector>

#include "vostrack/geometry.hpp"
#include "vostrack/mask.hpp"
#include "vostrack/types.hpp"

namespace vostrack {

struct TrackedInstance;

// How the trajectory score turns two box vectors into a closeness value.
// `distance` uses the Euclidean norm of their difference; `inner_product`
// plugs the raw inner product into the same normalization, kept selectable
// because it behaves very differently.
enum class TrajMetric {
    distance,
    inner_product,
};

struct ScoreWeights {
    double w_iou = 0.12;
    double w_traj = 0.575;
    double w_reid = 0.3;
    double w_rel = 0.0065;
    double alpha_traj = 0.0;  // > 0 required at scoring time
    double alpha_reid = 1.0;
    TrajMetric traj_metric = TrajMetric::distance;
};

struct ScoreCell {
    double iou = 0.0;
    double traj = 0.0;
    double reid = 0.0;
    double rel = 0.0;
    double total = 0.0;
};

// L instances by N candidates, row-major.
struct ScoreMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<ScoreCell> cells;

    ScoreCell& at(int row, int col) {
        return cells[static_cast<std::size_t>(row) * cols + col];
    }
    const ScoreCell& at(int row, int col) const {
        return cells[static_cast<std::size_t>(row) * cols + col];
    }
};

double score_traj(const BoxVector& predicted, const BoxVector& candidate,
                  double alpha_traj, TrajMetric metric = TrajMetric::distance);

// Distance to the nearest descriptor in the pool, normalized and inverted.
// Throws Error(empty_pool) when the pool has no descriptors.
double score_reid(const std::vector<std::vector<double>>& descriptor_pool,
                  const std::vector<double>& descriptor, double alpha_reid);

// Normalizes one candidate's per-instance reid column by its maximum.
// An all-zero column stays all-zero.
std::vector<double> score_rel(const std::vector<double>& reid_column);

double score_total(const ScoreCell& cell, const ScoreWeights& weights);

// Fills every cell for the current frame. reference_masks[l] is instance
// l's mask carried into this frame (propagated or last assigned); it drives
// the iou component.
ScoreMatrix build_score_matrix(const std::vector<TrackedInstance>& instances,
                               const std::vector<CandidateProposal>& candidates,
                               const std::vector<RleMask>& reference_masks,
                               const std::vector<BoxVector>& predicted_boxes,
                               const ScoreWeights& weights);

}  // namespace vostrack
