#include "vostrack/pool.hpp"

#include <algorithm>
#include <cmath>

#include "vostrack/errors.hpp"

namespace vostrack {

const TrackedInstance* ObjectPool::find(int id) const {
    for (const TrackedInstance& instance : instances)
        if (instance.id == id) return &instance;
    return nullptr;
}

BoxVector predict_box(const TrackedInstance& instance, int target_frame) {
    if (instance.bbox_history.empty())
        raise(ErrorCode::input, "instance has no trajectory state");
    const auto& [last_frame, last_box] = instance.bbox_history.back();
    if (instance.bbox_history.size() == 1) return last_box;
    const auto& [prev_frame, prev_box] =
        instance.bbox_history[instance.bbox_history.size() - 2];
    const double span = static_cast<double>(last_frame - prev_frame);
    const double vx = (last_box.cx - prev_box.cx) / span;
    const double vy = (last_box.cy - prev_box.cy) / span;
    const double dt = static_cast<double>(target_frame - last_frame);
    return BoxVector{last_box.cx + vx * dt, last_box.cy + vy * dt, last_box.w, last_box.h};
}

RleMask translate_to_frame(const TrackedInstance& instance, int target_frame,
                           int frame_width, int frame_height) {
    if (instance.last_mask.width != frame_width ||
        instance.last_mask.height != frame_height)
        raise(ErrorCode::dimension_mismatch, "instance mask size differs from frame");
    const BoxVector predicted = predict_box(instance, target_frame);
    const BoxVector& anchor = instance.bbox_history.back().second;
    const int dx = static_cast<int>(std::lround(predicted.cx - anchor.cx));
    const int dy = static_cast<int>(std::lround(predicted.cy - anchor.cy));
    return translate_mask(instance.last_mask, dx, dy);
}

std::optional<CandidateProposal> propagate_mask(const TrackedInstance& instance,
                                                int target_frame, int frame_width,
                                                int frame_height,
                                                double propagated_objectness) {
    RleMask mask = translate_to_frame(instance, target_frame, frame_width, frame_height);
    if (mask_empty(mask)) return std::nullopt;
    CandidateProposal cand;
    cand.frame_index = target_frame;
    cand.box = mask_bbox(mask);
    cand.mask = std::move(mask);
    cand.objectness = propagated_objectness;
    cand.descriptor = instance.descriptor_pool.back();
    cand.source = Source::propagated;
    cand.source_instance = instance.id;
    return cand;
}

namespace {

class TranslatePropagator : public MaskPropagator {
public:
    TranslatePropagator(const SequenceInput& input, double propagated_objectness)
        : width_(input.width), height_(input.height), objectness_(propagated_objectness) {}

    RleMask reference_mask(const TrackedInstance& instance, int frame) override {
        RleMask mask = translate_to_frame(instance, frame, width_, height_);
        if (mask.counts.empty()) return instance.last_mask;
        return mask;
    }

    std::optional<CandidateProposal> make_candidate(const TrackedInstance& instance,
                                                    int frame) override {
        if (instance.last_supported_frame == frame - 1) return std::nullopt;
        return propagate_mask(instance, frame, width_, height_, objectness_);
    }

private:
    int width_;
    int height_;
    double objectness_;
};

class NonePropagator : public MaskPropagator {
public:
    RleMask reference_mask(const TrackedInstance& instance, int) override {
        return instance.last_mask;
    }
    std::optional<CandidateProposal> make_candidate(const TrackedInstance&, int) override {
        return std::nullopt;
    }
};

class OraclePropagator : public MaskPropagator {
public:
    OraclePropagator(const SequenceInput& input, double propagated_objectness)
        : input_(input), objectness_(propagated_objectness) {
        if (!input.has_ground_truth)
            raise(ErrorCode::config, "oracle propagator needs ground truth");
    }

    RleMask reference_mask(const TrackedInstance& instance, int frame) override {
        const RleMask* mask = lookup(instance, frame);
        return mask ? *mask : instance.last_mask;
    }

    std::optional<CandidateProposal> make_candidate(const TrackedInstance& instance,
                                                    int frame) override {
        const RleMask* mask = lookup(instance, frame);
        if (!mask || mask_empty(*mask)) return std::nullopt;
        CandidateProposal cand;
        cand.frame_index = frame;
        cand.box = mask_bbox(*mask);
        cand.mask = *mask;
        cand.objectness = objectness_;
        cand.descriptor = instance.descriptor_pool.back();
        cand.source = Source::propagated;
        cand.source_instance = instance.id;
        return cand;
    }

private:
    // Resolves which ground-truth identity this instance follows by best
    // overlap with its last assigned mask in the previous frame.
    const RleMask* lookup(const TrackedInstance& instance, int frame) {
        if (frame <= 0 || frame >= static_cast<int>(input_.ground_truth.size()))
            return nullptr;
        const GroundTruthFrame& prev = input_.ground_truth[frame - 1];
        int best_id = -1;
        double best_iou = 0.0;
        for (const auto& [id, mask] : prev.instance_masks) {
            const double iou = mask_iou(instance.last_mask, mask);
            if (iou > best_iou) {
                best_iou = iou;
                best_id = id;
            }
        }
        if (best_id < 0) return nullptr;
        const GroundTruthFrame& cur = input_.ground_truth[frame];
        const auto it = cur.instance_masks.find(best_id);
        if (it == cur.instance_masks.end()) return nullptr;
        return &it->second;
    }

    const SequenceInput& input_;
    double objectness_;
};

}  // namespace

std::unique_ptr<MaskPropagator> make_propagator(const std::string& name,
                                                const SequenceInput& input,
                                                double propagated_objectness) {
    if (name == "translate")
        return std::make_unique<TranslatePropagator>(input, propagated_objectness);
    if (name == "none") return std::make_unique<NonePropagator>();
    if (name == "oracle")
        return std::make_unique<OraclePropagator>(input, propagated_objectness);
    raise(ErrorCode::config, "unknown propagator `" + name + "`");
}

AssignmentSet assign_ids(const ScoreMatrix& matrix, double threshold) {
    AssignmentSet set;
    set.instance_match.resize(matrix.rows);
    set.candidate_owner.resize(matrix.cols);
    set.instance_score.assign(matrix.rows, 0.0);
    std::vector<bool> row_done(matrix.rows, false);
    std::vector<bool> col_done(matrix.cols, false);
    while (true) {
        int best_row = -1, best_col = -1;
        double best = -1.0;
        for (int row = 0; row < matrix.rows; ++row) {
            if (row_done[row]) continue;
            for (int col = 0; col < matrix.cols; ++col) {
                if (col_done[col]) continue;
                const double total = matrix.at(row, col).total;
                if (total > best) {
                    best = total;
                    best_row = row;
                    best_col = col;
                }
            }
        }
        if (best_row < 0 || best < threshold) break;
        set.instance_match[best_row] = best_col;
        set.candidate_owner[best_col] = best_row;
        set.instance_score[best_row] = best;
        row_done[best_row] = true;
        col_done[best_col] = true;
    }
    return set;
}

void apply_assignments(ObjectPool& pool, const AssignmentSet& assignments,
                       const std::vector<CandidateProposal>& candidates,
                       const SaliencyMap& saliency, int frame) {
    if (assignments.instance_match.size() != pool.instances.size())
        raise(ErrorCode::dimension_mismatch, "assignment set out of step with pool");
    for (std::size_t row = 0; row < pool.instances.size(); ++row) {
        if (!assignments.instance_match[row]) continue;
        const CandidateProposal& cand = candidates[*assignments.instance_match[row]];
        TrackedInstance& instance = pool.instances[row];
        instance.descriptor_pool.push_back(cand.descriptor);
        instance.bbox_history.emplace_back(frame, to_box_vector(cand.box));
        instance.last_mask = cand.mask;
        instance.frequency += 1;
        instance.saliency_sum += mask_mean_saliency(cand.mask, saliency);
        instance.last_supported_frame = frame;
    }
}

std::vector<int> spawn_new_ids(ObjectPool& pool,
                               const std::vector<CandidateProposal>& candidates,
                               const AssignmentSet& assignments, int frame,
                               const SaliencyMap& saliency, const PoolConfig& config) {
    std::vector<int> spawned;
    if (pool.phase != PoolPhase::growing) return spawned;
    // Masks already claimed this frame: matched candidates plus the masks of
    // candidates spawned earlier in this very pass.
    std::vector<const RleMask*> claimed;
    for (std::size_t col = 0; col < assignments.candidate_owner.size(); ++col)
        if (assignments.candidate_owner[col]) claimed.push_back(&candidates[col].mask);
    for (std::size_t col = 0; col < candidates.size(); ++col) {
        const CandidateProposal& cand = candidates[col];
        if (cand.source != Source::detector) continue;
        if (col < assignments.candidate_owner.size() && assignments.candidate_owner[col])
            continue;
        if (cand.objectness < config.spawn_objectness_min) continue;
        if (frame > 0) {
            bool overlapped = false;
            for (const RleMask* mask : claimed) {
                if (mask_iou(cand.mask, *mask) >= config.spawn_overlap_max) {
                    overlapped = true;
                    break;
                }
            }
            if (overlapped) continue;
        }
        TrackedInstance instance;
        instance.id = pool.next_id++;
        instance.descriptor_pool.push_back(cand.descriptor);
        instance.bbox_history.emplace_back(frame, to_box_vector(cand.box));
        instance.last_mask = cand.mask;
        instance.frequency = 1;
        instance.saliency_sum = mask_mean_saliency(cand.mask, saliency);
        instance.created_at = frame;
        instance.last_supported_frame = frame;
        pool.instances.push_back(std::move(instance));
        claimed.push_back(&cand.mask);
        spawned.push_back(static_cast<int>(col));
    }
    return spawned;
}

}  // namespace vostrack
