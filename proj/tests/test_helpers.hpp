#pragma once

// Shared builders for the test suites: masks from pixel lists, saliency
// fills, pool and candidate construction, scratch directories, result
// comparison, and the seeded fixture families used by the equivalence
// sweeps and the timing checks.

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "vostrack/mask.hpp"
#include "vostrack/pipeline.hpp"
#include "vostrack/pool.hpp"
#include "vostrack/synth.hpp"
#include "vostrack/types.hpp"

namespace testutil {

inline vostrack::RleMask mask_of(int width, int height, const std::vector<int>& pixels) {
    std::vector<std::uint8_t> grid(static_cast<std::size_t>(width) * height, 0);
    for (int p : pixels) grid[static_cast<std::size_t>(p)] = 1;
    return vostrack::rle_encode(width, height, grid);
}

inline vostrack::RleMask empty_mask(int width, int height) {
    return mask_of(width, height, {});
}

inline vostrack::SaliencyMap flat_saliency(int width, int height, double value) {
    vostrack::SaliencyMap sal;
    sal.width = width;
    sal.height = height;
    sal.values.assign(static_cast<std::size_t>(width) * height, value);
    return sal;
}

inline vostrack::CandidateProposal make_candidate(int frame, const vostrack::BoundingBox& box,
                                                  vostrack::RleMask mask, double objectness,
                                                  std::vector<double> descriptor) {
    vostrack::CandidateProposal cand;
    cand.frame_index = frame;
    cand.box = box;
    cand.mask = std::move(mask);
    cand.objectness = objectness;
    cand.descriptor = std::move(descriptor);
    return cand;
}

// An instance with one history entry, as freshly spawned state would look.
inline vostrack::TrackedInstance make_instance(int id, int frame,
                                               const vostrack::BoundingBox& box,
                                               vostrack::RleMask mask,
                                               std::vector<double> descriptor) {
    vostrack::TrackedInstance inst;
    inst.id = id;
    inst.descriptor_pool.push_back(std::move(descriptor));
    inst.bbox_history.emplace_back(frame, vostrack::to_box_vector(box));
    inst.last_mask = std::move(mask);
    inst.frequency = 1;
    inst.created_at = frame;
    inst.last_supported_frame = frame;
    return inst;
}

inline bool same_labels(const vostrack::FrameLabels& a, const vostrack::FrameLabels& b) {
    return a.width == b.width && a.height == b.height && a.labels == b.labels;
}

inline bool same_result(const vostrack::SequenceResult& a, const vostrack::SequenceResult& b) {
    if (a.width != b.width || a.height != b.height) return false;
    if (a.labels.size() != b.labels.size()) return false;
    for (std::size_t t = 0; t < a.labels.size(); ++t)
        if (!same_labels(a.labels[t], b.labels[t])) return false;
    if (a.provenance.size() != b.provenance.size()) return false;
    for (std::size_t i = 0; i < a.provenance.size(); ++i) {
        const auto& pa = a.provenance[i];
        const auto& pb = b.provenance[i];
        if (pa.frame != pb.frame || pa.instance_id != pb.instance_id ||
            pa.kind != pb.kind || pa.candidate_index != pb.candidate_index)
            return false;
        if (pa.total_score != pb.total_score) return false;  // bit-for-bit
    }
    return a.selected_ids == b.selected_ids;
}

// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        const int n = counter.fetch_add(1);
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(n));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path_.string(); }
    std::string sub(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

// Noise-free two-object scenario: A drifts right through the top band, B
// drifts left through the bottom band. `b_last` trims B's visibility so a
// low-frequency, low-saliency competitor can be staged.
inline vostrack::ScenarioSpec two_object_spec(int frames, int b_last = -1,
                                              double b_saliency = 0.8) {
    vostrack::ScenarioSpec spec;
    spec.frame_count = frames;
    spec.width = 48;
    spec.height = 32;
    spec.descriptor_dim = 4;
    spec.seed = 5;

    vostrack::ObjectSpec a;
    a.cx0 = 8.0;
    a.cy0 = 8.0;
    a.vx = 1.5;
    a.w = 8;
    a.h = 6;
    a.desc_seed = 11;
    a.saliency = 0.9;
    a.objectness = 0.92;
    spec.objects.push_back(a);

    vostrack::ObjectSpec b;
    b.cx0 = 36.0;
    b.cy0 = 24.0;
    b.vx = -1.5;
    b.w = 8;
    b.h = 6;
    b.desc_seed = 12;
    b.saliency = b_saliency;
    b.objectness = 0.9;
    b.last = b_last;
    spec.objects.push_back(b);
    return spec;
}

// Seeded small-fixture family for the reference-tracker equivalence sweeps:
// 2..4 objects on 48x32 over 5 frames, jittered boxes, occasional drops,
// clutter too weak to spawn. Candidate and pool counts stay inside the
// exhaustive regime (asserted by the consuming tests).
inline vostrack::ScenarioSpec equivalence_fixture_spec(int index) {
    vostrack::ScenarioSpec spec;
    spec.frame_count = 5;
    spec.width = 48;
    spec.height = 32;
    spec.descriptor_dim = 6;
    spec.seed = 7000 + static_cast<std::uint64_t>(index);
    spec.bbox_jitter = 0.6;
    spec.drop_prob = 0.08;
    spec.clutter_rate = 0.25;

    const int object_count = 2 + index % 3;
    for (int k = 0; k < object_count; ++k) {
        vostrack::ObjectSpec obj;
        obj.trajectory = (k % 2 == 1) ? vostrack::Trajectory::sinusoidal
                                      : vostrack::Trajectory::linear;
        obj.cx0 = 8.0 + 10.0 * k;
        obj.cy0 = 7.0 + 6.0 * k;
        obj.vx = (k % 2 == 0) ? 1.2 : -0.8;
        obj.vy = 0.0;
        obj.amp = (k % 2 == 1) ? 2.0 : 0.0;
        obj.period = 10.0;
        obj.w = 7;
        obj.h = 6;
        obj.desc_seed = 30 + 3 * static_cast<std::uint64_t>(k);
        obj.desc_noise = 0.05;
        obj.saliency = 0.2 + 0.2 * k;
        obj.objectness = 0.9;
        obj.first = (k == 3) ? 1 : 0;
        obj.last = (k == 2) ? 3 : -1;
        spec.objects.push_back(obj);
    }
    return spec;
}

// Config variants for the same sweeps: alternate propagators, selection
// modes and K so both pool phases and both tau regimes are exercised.
inline vostrack::PipelineConfig equivalence_fixture_config(int index) {
    vostrack::PipelineConfig config;
    config.pool.M = 3;
    config.pool.K = (index % 2 == 0) ? 10 : 2;
    switch (index % 3) {
        case 0: config.propagator = "translate"; break;
        case 1: config.propagator = "none"; break;
        default: config.propagator = "oracle"; break;
    }
    if (index % 4 == 1) {
        config.selection_mode = vostrack::SelectionMode::random;
        config.selection_seed = static_cast<std::uint64_t>(index);
    }
    return config;
}

}  // namespace testutil
