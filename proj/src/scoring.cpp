#include "vostrack/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "vostrack/errors.hpp"
#include "vostrack/pool.hpp"

namespace vostrack {

namespace {

double clamp01(double value) { return std::min(1.0, std::max(0.0, value)); }

double descriptor_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        raise(ErrorCode::dimension_mismatch, "descriptor lengths differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace

double score_traj(const BoxVector& predicted, const BoxVector& candidate,
                  double alpha_traj, TrajMetric metric) {
    if (alpha_traj <= 0.0) raise(ErrorCode::config, "alpha_traj must be positive");
    const double measure = metric == TrajMetric::distance
                               ? box_distance(predicted, candidate)
                               : box_inner_product(predicted, candidate);
    return clamp01(1.0 - std::min(measure / alpha_traj, 1.0));
}

double score_reid(const std::vector<std::vector<double>>& descriptor_pool,
                  const std::vector<double>& descriptor, double alpha_reid) {
    if (descriptor_pool.empty())
        raise(ErrorCode::empty_pool, "instance has no positive descriptors");
    if (alpha_reid <= 0.0) raise(ErrorCode::config, "alpha_reid must be positive");
    double nearest = descriptor_distance(descriptor_pool[0], descriptor);
    for (std::size_t j = 1; j < descriptor_pool.size(); ++j)
        nearest = std::min(nearest, descriptor_distance(descriptor_pool[j], descriptor));
    return 1.0 - std::min(nearest / alpha_reid, 1.0);
}

std::vector<double> score_rel(const std::vector<double>& reid_column) {
    std::vector<double> rel(reid_column.size(), 0.0);
    double max_value = 0.0;
    for (double value : reid_column) max_value = std::max(max_value, value);
    if (max_value <= 0.0) return rel;  // all-zero column stays zero
    for (std::size_t i = 0; i < reid_column.size(); ++i)
        rel[i] = reid_column[i] / max_value;
    return rel;
}

double score_total(const ScoreCell& cell, const ScoreWeights& weights) {
    return weights.w_iou * cell.iou + weights.w_traj * cell.traj +
           weights.w_reid * cell.reid + weights.w_rel * cell.rel;
}

ScoreMatrix build_score_matrix(const std::vector<TrackedInstance>& instances,
                               const std::vector<CandidateProposal>& candidates,
                               const std::vector<RleMask>& reference_masks,
                               const std::vector<BoxVector>& predicted_boxes,
                               const ScoreWeights& weights) {
    ScoreMatrix matrix;
    matrix.rows = static_cast<int>(instances.size());
    matrix.cols = static_cast<int>(candidates.size());
    matrix.cells.resize(static_cast<std::size_t>(matrix.rows) * matrix.cols);
    if (matrix.rows == 0 || matrix.cols == 0) return matrix;
    if (reference_masks.size() != instances.size() ||
        predicted_boxes.size() != instances.size())
        raise(ErrorCode::dimension_mismatch, "per-instance inputs out of step");

    for (int row = 0; row < matrix.rows; ++row) {
        const TrackedInstance& instance = instances[row];
        for (int col = 0; col < matrix.cols; ++col) {
            const CandidateProposal& cand = candidates[col];
            ScoreCell& cell = matrix.at(row, col);
            cell.iou = mask_iou(reference_masks[row], cand.mask);
            cell.traj = score_traj(predicted_boxes[row], to_box_vector(cand.box),
                                   weights.alpha_traj, weights.traj_metric);
            cell.reid =
                score_reid(instance.descriptor_pool, cand.descriptor, weights.alpha_reid);
        }
    }
    // The relative reid score normalizes each candidate's column after all
    // plain reid scores exist.
    std::vector<double> column(matrix.rows);
    for (int col = 0; col < matrix.cols; ++col) {
        for (int row = 0; row < matrix.rows; ++row) column[row] = matrix.at(row, col).reid;
        const std::vector<double> rel = score_rel(column);
        for (int row = 0; row < matrix.rows; ++row) {
            ScoreCell& cell = matrix.at(row, col);
            cell.rel = rel[row];
            cell.total = score_total(cell, weights);
        }
    }
    return matrix;
}

}  // namespace vostrack
