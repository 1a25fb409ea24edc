#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vostrack/geometry.hpp"
#include "vostrack/mask.hpp"
#include "vostrack/scoring.hpp"
#include "vostrack/types.hpp"

namespace vostrack {

// A persistent identity. The descriptor pool holds every descriptor of a
// candidate this instance was assigned (one per assignment, seeded at
// spawn), so its length always equals frequency.
struct TrackedInstance {
    int id = 0;
    std::vector<std::vector<double>> descriptor_pool;
    std::vector<std::pair<int, BoxVector>> bbox_history;  // ascending frames
    RleMask last_mask;
    int frequency = 0;
    double saliency_sum = 0.0;
    int created_at = 0;
    int last_supported_frame = -1;  // last frame matched or spawned
};

enum class PoolPhase {
    growing,
    locked,
};

struct PoolConfig {
    double tau1 = 0.55;
    double tau2 = 0.35;
    int M = 10;
    int K = 20;
    double spawn_objectness_min = 0.7;
    double spawn_overlap_max = 0.2;
    double propagated_objectness = 0.5;
    ScoreWeights weights;
};

// One frame's resolved matching. instance_match runs parallel to the pool's
// instance list, candidate_owner parallel to the frame's candidate list.
struct AssignmentSet {
    std::vector<std::optional<int>> instance_match;   // candidate index
    std::vector<std::optional<int>> candidate_owner;  // instance row in the pool
    std::vector<double> instance_score;               // total score of the match
};

struct ObjectPool {
    std::vector<TrackedInstance> instances;
    int next_id = 1;
    PoolPhase phase = PoolPhase::growing;

    const TrackedInstance* find(int id) const;
};

// Constant-velocity extrapolation of the center from the last two history
// entries; size carried from the last. A single entry is returned as is.
BoxVector predict_box(const TrackedInstance& instance, int target_frame);

// Translates the instance's last mask by the rounded predicted center
// displacement, clipping at the frame border. The result can be empty.
RleMask translate_to_frame(const TrackedInstance& instance, int target_frame,
                           int frame_width, int frame_height);

// Builds a propagated candidate from the translated mask. Empty-after-clip
// masks yield nullopt so the caller can drop them.
std::optional<CandidateProposal> propagate_mask(const TrackedInstance& instance,
                                                int target_frame, int frame_width,
                                                int frame_height,
                                                double propagated_objectness);

// Supplies each instance's current-frame mask estimate and decides whether
// to emit a propagated candidate for it.
class MaskPropagator {
public:
    virtual ~MaskPropagator() = default;

    // Mask carried into `frame` for scoring; falls back to last_mask when
    // the implementation has nothing better.
    virtual RleMask reference_mask(const TrackedInstance& instance, int frame) = 0;

    // Propagated candidate for `frame`, or nullopt when the implementation
    // declines (policy, empty mask, no data).
    virtual std::optional<CandidateProposal> make_candidate(
        const TrackedInstance& instance, int frame) = 0;
};

// translate: shifts last_mask by predicted motion. Emits a candidate only
// for instances with no support (match or spawn) in the previous frame;
// supported instances already follow real detections, and feeding them
// their own extrapolation back as a candidate would outscore every
// detection and freeze the track on stale motion.
// none: reference is last_mask unchanged, never emits.
// oracle: looks up the ground-truth instance best overlapping last_mask and
// reads its mask for the target frame; always emits when the mask exists.
std::unique_ptr<MaskPropagator> make_propagator(const std::string& name,
                                                const SequenceInput& input,
                                                double propagated_objectness);

// Greedy mutual exclusion: repeatedly bind the highest remaining cell of
// the matrix while it clears the threshold. Ties prefer the lower row,
// then the lower column.
AssignmentSet assign_ids(const ScoreMatrix& matrix, double threshold);

// Folds one frame's matches into the pool: descriptor appended, history
// extended, mask replaced, frequency and saliency accumulators bumped.
void apply_assignments(ObjectPool& pool, const AssignmentSet& assignments,
                       const std::vector<CandidateProposal>& candidates,
                       const SaliencyMap& saliency, int frame);

// Spawn rules. Frame 0 admits every detector candidate clearing the
// objectness floor. Later growing-phase frames also require the candidate
// to stay clear of every mask already claimed this frame. Returns the
// candidate indices that spawned, in ascending order.
std::vector<int> spawn_new_ids(ObjectPool& pool,
                               const std::vector<CandidateProposal>& candidates,
                               const AssignmentSet& assignments, int frame,
                               const SaliencyMap& saliency, const PoolConfig& config);

}  // namespace vostrack
