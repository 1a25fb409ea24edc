#include <string>
#include <vector>

#include "doctest.h"
#include "op_examples.hpp"
#include "test_helpers.hpp"
#include "vostrack/errors.hpp"
#include "vostrack/oracle.hpp"
#include "vostrack/pipeline.hpp"
#include "vostrack/synth.hpp"

using namespace vostrack;

TEST_CASE("reference tracker documented examples") {
    for (const std::string& failure : opx::run_module("oracle")) FAIL_CHECK(failure);
}

TEST_CASE("production and reference trackers agree on a seeded sweep") {
    for (int index = 0; index < 5; ++index) {
        CAPTURE(index);
        const SequenceInput input =
            generate_scenario(testutil::equivalence_fixture_spec(index));
        const PipelineConfig config = testutil::equivalence_fixture_config(index);
        const SequenceResult fast = run_sequence(input, config);
        const SequenceResult slow = oracle_track(input, config);
        CHECK(testutil::same_result(fast, slow));
    }
}

TEST_CASE("the reference tracker refuses frames outside the exhaustive regime") {
    SequenceInput input;
    input.width = 32;
    input.height = 16;
    input.frame_count = 1;
    input.descriptor_dim = 2;
    input.candidates.resize(1);
    input.saliency.push_back(testutil::flat_saliency(32, 16, 0.5));
    for (int k = 0; k < 7; ++k) {
        const BoundingBox box{4 * k, 2, 3, 3};
        input.candidates[0].push_back(testutil::make_candidate(
            0, box, make_box_mask(32, 16, box), 0.9, {0.1 * k, 0.0}));
    }

    try {
        oracle_track(input, PipelineConfig{});
        FAIL("expected a size_limit error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::size_limit);
    }
    // The production tracker has no such bound.
    const SequenceResult result = run_sequence(input, PipelineConfig{});
    CHECK(result.provenance.size() == 7);
}
