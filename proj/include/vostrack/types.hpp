#pragma once

#include <map>
#include <string>
#include <vector>

#include "vostrack/geometry.hpp"
#include "vostrack/mask.hpp"

namespace vostrack {

enum class Source {
    detector,
    propagated,
};

// One per-frame object proposal: a box, a mask, an objectness score and an
// appearance descriptor. Propagated proposals remember which instance
// produced them.
struct CandidateProposal {
    int frame_index = 0;
    BoundingBox box;
    RleMask mask;
    double objectness = 0.0;
    std::vector<double> descriptor;
    Source source = Source::detector;
    int source_instance = -1;  // valid when source == propagated
};

// Dense per-pixel instance labels for one frame; 0 is background.
struct FrameLabels {
    int width = 0;
    int height = 0;
    std::vector<int> labels;

    int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

// Ground truth for one frame, kept per instance so empty sub-masks can be
// omitted on disk.
struct GroundTruthFrame {
    std::map<int, RleMask> instance_masks;
};

struct SequenceInput {
    int width = 0;
    int height = 0;
    int frame_count = 0;
    int descriptor_dim = 0;
    std::vector<std::vector<CandidateProposal>> candidates;  // per frame
    std::vector<SaliencyMap> saliency;                       // per frame
    std::vector<GroundTruthFrame> ground_truth;              // empty when absent
    bool has_ground_truth = false;
};

enum class MatchKind {
    detector,    // bound to a detector proposal
    propagated,  // bound to its own propagated proposal
    spawn,       // newly created from a detector proposal
};

struct ProvenanceRecord {
    int frame = 0;
    int instance_id = 0;
    double total_score = 0.0;
    MatchKind kind = MatchKind::detector;
    int candidate_index = -1;  // index into the frame's candidate list
};

struct SequenceResult {
    int width = 0;
    int height = 0;
    std::vector<FrameLabels> labels;  // per frame
    std::vector<ProvenanceRecord> provenance;
    std::vector<int> selected_ids;  // ids kept by key selection, ascending
};

}  // namespace vostrack
