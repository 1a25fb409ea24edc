#pragma once

#include <string>
#include <vector>

#include "vostrack/types.hpp"

namespace vostrack {

// Reads a sequence directory: sequence.txt (candidates), saliency_%05d.txt
// per frame, and an optional gt/ subdirectory with labels_%05d.txt.
SequenceInput load_sequence(const std::string& dir);
void save_sequence(const std::string& dir, const SequenceInput& input);

// Instance label maps stored per frame as sparse per-instance run lengths.
GroundTruthFrame load_label_frame(const std::string& path, int* width, int* height);
void save_label_frame(const std::string& path, int width, int height,
                      const GroundTruthFrame& frame);

// Converts between dense labels and the sparse per-instance form. Instances
// in the sparse form must not overlap.
FrameLabels labels_from_instances(int width, int height, const GroundTruthFrame& frame);
GroundTruthFrame instances_from_labels(const FrameLabels& labels);

// A result directory holds labels_%05d.txt per frame plus provenance.txt.
void save_result(const std::string& dir, const SequenceResult& result);
SequenceResult load_result(const std::string& dir);

// Loads just the label maps from a directory (either a result directory or
// a gt directory), frame numbers taken from the file names, which must be
// contiguous from zero.
std::vector<FrameLabels> load_label_maps(const std::string& dir);

std::string frame_file_name(const std::string& stem, int frame);

}  // namespace vostrack
