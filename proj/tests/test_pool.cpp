#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "doctest.h"
#include "op_examples.hpp"
#include "test_helpers.hpp"
#include "vostrack/errors.hpp"
#include "vostrack/pool.hpp"
#include "vostrack/rng.hpp"
#include "vostrack/synth.hpp"

using namespace vostrack;

namespace {

ScoreMatrix random_matrix(Rng& rng, int rows, int cols) {
    ScoreMatrix matrix;
    matrix.rows = rows;
    matrix.cols = cols;
    matrix.cells.resize(static_cast<std::size_t>(rows) * cols);
    for (ScoreCell& cell : matrix.cells) cell.total = rng.uniform(0.0, 1.2);
    return matrix;
}

std::set<std::pair<int, int>> bound_pairs(const ScoreMatrix& matrix, double threshold) {
    const AssignmentSet set = assign_ids(matrix, threshold);
    std::set<std::pair<int, int>> pairs;
    for (int row = 0; row < matrix.rows; ++row)
        if (set.instance_match[static_cast<std::size_t>(row)])
            pairs.insert({row, *set.instance_match[static_cast<std::size_t>(row)]});
    return pairs;
}

}  // namespace

TEST_CASE("pool documented examples") {
    for (const std::string& failure : opx::run_module("pool")) FAIL_CHECK(failure);
}

TEST_CASE("assignments are mutually exclusive and consistent") {
    Rng rng(4001);
    for (int iter = 0; iter < 1500; ++iter) {
        const int rows = static_cast<int>(rng.below(7));
        const int cols = static_cast<int>(rng.below(7));
        const double threshold = rng.uniform(0.0, 1.2);
        const ScoreMatrix matrix = random_matrix(rng, rows, cols);
        const AssignmentSet set = assign_ids(matrix, threshold);

        REQUIRE(set.instance_match.size() == static_cast<std::size_t>(rows));
        REQUIRE(set.candidate_owner.size() == static_cast<std::size_t>(cols));
        REQUIRE(set.instance_score.size() == static_cast<std::size_t>(rows));

        std::set<int> used_candidates;
        for (int row = 0; row < rows; ++row) {
            const auto match = set.instance_match[static_cast<std::size_t>(row)];
            if (!match) continue;
            CHECK(used_candidates.insert(*match).second);  // no candidate reuse
            CHECK(set.candidate_owner[static_cast<std::size_t>(*match)] ==
                  std::optional<int>{row});
            CHECK(set.instance_score[static_cast<std::size_t>(row)] ==
                  matrix.at(row, *match).total);
            CHECK(matrix.at(row, *match).total >= threshold);
        }
        for (int col = 0; col < cols; ++col) {
            const auto owner = set.candidate_owner[static_cast<std::size_t>(col)];
            if (owner)
                CHECK(set.instance_match[static_cast<std::size_t>(*owner)] ==
                      std::optional<int>{col});
        }
    }
}

TEST_CASE("raising the threshold only removes matches") {
    Rng rng(4002);
    for (int iter = 0; iter < 400; ++iter) {
        const int rows = 1 + static_cast<int>(rng.below(6));
        const int cols = 1 + static_cast<int>(rng.below(6));
        const ScoreMatrix matrix = random_matrix(rng, rows, cols);
        const double lo = rng.uniform(0.0, 0.6);
        const double hi = lo + rng.uniform(0.0, 0.6);
        const auto at_lo = bound_pairs(matrix, lo);
        const auto at_hi = bound_pairs(matrix, hi);
        for (const auto& pair : at_hi) CHECK(at_lo.count(pair) == 1);
    }
}

TEST_CASE("greedy order prefers lower rows then lower columns on ties") {
    ScoreMatrix matrix;
    matrix.rows = 2;
    matrix.cols = 2;
    matrix.cells.resize(4);
    matrix.at(0, 0).total = 0.9;
    matrix.at(0, 1).total = 0.9;
    matrix.at(1, 0).total = 0.9;
    matrix.at(1, 1).total = 0.2;
    const AssignmentSet set = assign_ids(matrix, 0.1);
    // (0,0) wins first; the leftover diagonal pairs (1,1) at 0.2.
    CHECK(set.instance_match[0] == std::optional<int>{0});
    CHECK(set.instance_match[1] == std::optional<int>{1});
}

TEST_CASE("translate propagation skips instances supported last frame") {
    SequenceInput input;
    input.width = 8;
    input.height = 1;
    input.frame_count = 4;
    input.descriptor_dim = 1;
    const auto propagator = make_propagator("translate", input, 0.5);

    TrackedInstance supported = testutil::make_instance(
        1, 2, BoundingBox{2, 0, 2, 1}, testutil::mask_of(8, 1, {2, 3}), {0.5});
    REQUIRE(supported.last_supported_frame == 2);
    CHECK(!propagator->make_candidate(supported, 3).has_value());

    TrackedInstance stale = testutil::make_instance(
        2, 1, BoundingBox{2, 0, 2, 1}, testutil::mask_of(8, 1, {2, 3}), {0.5});
    const auto cand = propagator->make_candidate(stale, 3);
    REQUIRE(cand.has_value());
    CHECK(cand->source == Source::propagated);
    CHECK(cand->source_instance == 2);
    CHECK(cand->mask == stale.last_mask);  // single history entry, no motion

    // The reference mask is the translated last mask either way.
    CHECK(propagator->reference_mask(supported, 3) == supported.last_mask);
}

TEST_CASE("none propagation never emits and keeps the stale mask") {
    SequenceInput input;
    input.width = 8;
    input.height = 1;
    input.frame_count = 2;
    input.descriptor_dim = 1;
    const auto propagator = make_propagator("none", input, 0.5);
    TrackedInstance stale = testutil::make_instance(
        1, 0, BoundingBox{2, 0, 2, 1}, testutil::mask_of(8, 1, {2, 3}), {0.5});
    CHECK(!propagator->make_candidate(stale, 1).has_value());
    CHECK(propagator->reference_mask(stale, 1) == stale.last_mask);
}

TEST_CASE("oracle propagation follows the overlapping ground-truth track") {
    const SequenceInput input = generate_scenario(testutil::two_object_spec(4));
    const auto propagator = make_propagator("oracle", input, 0.5);

    // An instance whose last mask equals gt instance 2 at frame 1 must read
    // gt instance 2's mask at frame 2.
    TrackedInstance follower;
    follower.id = 9;
    follower.descriptor_pool.push_back({0.0, 0.0, 0.0, 0.0});
    follower.last_mask = input.ground_truth[1].instance_masks.at(2);
    follower.bbox_history.emplace_back(1, to_box_vector(mask_bbox(follower.last_mask)));
    follower.last_supported_frame = 1;

    const RleMask want = input.ground_truth[2].instance_masks.at(2);
    CHECK(propagator->reference_mask(follower, 2) == want);
    const auto cand = propagator->make_candidate(follower, 2);
    REQUIRE(cand.has_value());
    CHECK(cand->mask == want);
    CHECK(cand->source_instance == 9);

    // Frame 0 has no previous frame to resolve against.
    CHECK(!propagator->make_candidate(follower, 0).has_value());
    CHECK(propagator->reference_mask(follower, 0) == follower.last_mask);
}

TEST_CASE("propagator construction validates its inputs") {
    SequenceInput plain;
    plain.width = 4;
    plain.height = 4;
    plain.frame_count = 1;
    plain.descriptor_dim = 1;
    try {
        make_propagator("oracle", plain, 0.5);
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::config);
    }
    try {
        make_propagator("teleport", plain, 0.5);
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::config);
    }
}

TEST_CASE("trajectory state is required for prediction") {
    TrackedInstance blank;
    blank.id = 1;
    try {
        predict_box(blank, 1);
        FAIL("expected input error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::input);
    }
}

TEST_CASE("mask translation rejects a frame size mismatch") {
    TrackedInstance inst = testutil::make_instance(
        1, 0, BoundingBox{0, 0, 2, 1}, testutil::mask_of(8, 1, {0, 1}), {0.5});
    try {
        translate_to_frame(inst, 1, 16, 2);
        FAIL("expected dimension error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::dimension_mismatch);
    }
}

TEST_CASE("descriptor pool length always equals frequency") {
    Rng rng(4003);
    ObjectPool pool;
    const SaliencyMap sal = testutil::flat_saliency(16, 8, 0.5);
    PoolConfig config;
    config.spawn_objectness_min = 0.5;
    for (int frame = 0; frame < 12; ++frame) {
        std::vector<CandidateProposal> candidates;
        const int count = 1 + static_cast<int>(rng.below(4));
        for (int i = 0; i < count; ++i) {
            const int x = static_cast<int>(rng.below(12));
            const int y = static_cast<int>(rng.below(5));
            candidates.push_back(testutil::make_candidate(
                frame, BoundingBox{x, y, 4, 3},
                make_box_mask(16, 8, BoundingBox{x, y, 4, 3}), rng.uniform(),
                {rng.uniform(), rng.uniform()}));
        }
        ScoreWeights weights;
        weights.alpha_traj = 20.0;
        std::vector<RleMask> refs;
        std::vector<BoxVector> preds;
        for (const TrackedInstance& inst : pool.instances) {
            refs.push_back(inst.last_mask);
            preds.push_back(predict_box(inst, frame));
        }
        const ScoreMatrix matrix =
            build_score_matrix(pool.instances, candidates, refs, preds, weights);
        const AssignmentSet set = assign_ids(matrix, 0.4);
        apply_assignments(pool, set, candidates, sal, frame);
        spawn_new_ids(pool, candidates, set, frame, sal, config);
        for (const TrackedInstance& inst : pool.instances) {
            CHECK(inst.descriptor_pool.size() == static_cast<std::size_t>(inst.frequency));
            CHECK(inst.bbox_history.size() == static_cast<std::size_t>(inst.frequency));
        }
    }
    // Ids are handed out sequentially and never reused.
    std::set<int> ids;
    for (const TrackedInstance& inst : pool.instances) {
        CHECK(ids.insert(inst.id).second);
        CHECK(inst.id < pool.next_id);
        CHECK(inst.id >= 1);
    }
}

TEST_CASE("propagated candidates never spawn") {
    ObjectPool pool;
    AssignmentSet set;
    set.candidate_owner = {std::nullopt};
    CandidateProposal ghost = testutil::make_candidate(
        0, BoundingBox{0, 0, 2, 2}, testutil::mask_of(4, 2, {0, 1}), 0.99, {0.5});
    ghost.source = Source::propagated;
    ghost.source_instance = 5;
    PoolConfig config;
    const auto spawned = spawn_new_ids(pool, {ghost}, set, 0,
                                       testutil::flat_saliency(4, 2, 0.5), config);
    CHECK(spawned.empty());
    CHECK(pool.instances.empty());
}

TEST_CASE("spawn seeds the accumulators from the candidate") {
    ObjectPool pool;
    AssignmentSet set;
    set.candidate_owner = {std::nullopt};
    const SaliencyMap sal = testutil::flat_saliency(4, 2, 0.75);
    const auto cand = testutil::make_candidate(
        2, BoundingBox{0, 0, 2, 2}, testutil::mask_of(4, 2, {0, 1, 4, 5}), 0.8, {0.1, 0.9});
    PoolConfig config;
    // Frame 2 in the growing phase with nothing claimed: the overlap rule is
    // vacuous and the objectness floor decides alone.
    const auto spawned = spawn_new_ids(pool, {cand}, set, 2, sal, config);
    REQUIRE(spawned == std::vector<int>{0});
    const TrackedInstance& inst = pool.instances[0];
    CHECK(inst.id == 1);
    CHECK(inst.created_at == 2);
    CHECK(inst.last_supported_frame == 2);
    CHECK(inst.frequency == 1);
    CHECK(inst.descriptor_pool == std::vector<std::vector<double>>{{0.1, 0.9}});
    CHECK(inst.last_mask == cand.mask);
    CHECK(inst.saliency_sum == 0.75);
    CHECK(inst.bbox_history.size() == 1);
    CHECK(inst.bbox_history[0].first == 2);
    CHECK(pool.next_id == 2);
}
