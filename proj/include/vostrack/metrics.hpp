#pragma once

#include <vector>

#include "vostrack/mask.hpp"
#include "vostrack/types.hpp"

namespace vostrack {

// Region similarity; both-empty counts as perfect agreement.
double jaccard(const RleMask& pred, const RleMask& gt);

// F-measure over boundary pixels within a Euclidean pixel tolerance.
// Boundary pixels are foreground pixels 4-adjacent to background or to the
// image border. Both boundaries empty scores 1, exactly one empty scores 0.
double boundary_f(const RleMask& pred, const RleMask& gt, double tolerance);

// DAVIS-style convention relative to the frame size.
double default_boundary_tolerance(int width, int height);

struct SeriesStats {
    double mean = 0.0;
    double recall = 0.0;  // fraction of frames strictly above 0.5
    double decay = 0.0;   // first temporal quarter mean minus last
};

SeriesStats sequence_measures(const std::vector<double>& values);

struct InstanceMeasure {
    int gt_id = 0;
    int pred_id = 0;  // -1 when no prediction matched
    std::vector<double> j_values;
    std::vector<double> f_values;
};

struct SequenceReport {
    double j_mean = 0.0;
    double j_recall = 0.0;
    double j_decay = 0.0;
    double f_mean = 0.0;
    double f_recall = 0.0;
    double f_decay = 0.0;
    double global_mean = 0.0;
};

// Pairs predicted ids with ground-truth ids, maximizing summed
// (J mean + F mean)/2 over each gt instance's lifespan. Returns one entry
// per gt instance, unmatched ones with all-zero series.
std::vector<InstanceMeasure> match_instances(const std::vector<FrameLabels>& pred,
                                             const std::vector<FrameLabels>& gt,
                                             double tolerance);

SequenceReport evaluate(const std::vector<FrameLabels>& pred,
                        const std::vector<FrameLabels>& gt, double tolerance);

}  // namespace vostrack
