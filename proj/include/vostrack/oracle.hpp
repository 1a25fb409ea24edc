#pragma once

#include "vostrack/pipeline.hpp"

namespace vostrack {

// Reference tracker with the same contract as run_sequence, used by the test
// suite to cross-check the production path. Masks live as dense pixel grids
// instead of run-length streams, and each frame's assignment is found by
// enumerating every one-to-one partial matching above the threshold and
// keeping the one the greedy rule ranks first (highest score, then lowest
// row, then lowest column, longer matchings extending equal prefixes).
//
// The enumeration is exponential, so frames with more than 6 tracked
// instances or more than 6 detector candidates raise ErrorCode::size_limit;
// propagated candidates ride along on top of those bounds.
SequenceResult oracle_track(const SequenceInput& input, const PipelineConfig& config);

}  // namespace vostrack
