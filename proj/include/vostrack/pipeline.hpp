#pragma once

#include <cstdint>
#include <string>

#include "vostrack/pool.hpp"
#include "vostrack/selection.hpp"
#include "vostrack/types.hpp"

namespace vostrack {

enum class SelectionMode {
    key,
    random,
};

struct PipelineConfig {
    PoolConfig pool;
    SelectionWeights selection;
    SelectionMode selection_mode = SelectionMode::key;
    std::uint64_t selection_seed = 0;
    std::string propagator = "translate";
    // <= 0 means derive from the frame size at run time.
    double boundary_tolerance = 0.0;
};

PipelineConfig default_config();

// Flat `key = value` overrides on the defaults; unknown keys are errors so
// sweep typos fail loudly.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config_text(const std::string& text, const std::string& origin);

void validate_config(const PipelineConfig& config);

std::string config_to_text(const PipelineConfig& config);

// Drives the whole loop: candidate gathering (detector plus propagated),
// scoring, thresholded assignment, spawning while growing, the one-time key
// selection after frame M-1's round, and per-frame rasterization.
SequenceResult run_sequence(const SequenceInput& input, const PipelineConfig& config);

// Writes a binary PPM visualization of one frame's labels.
void render_overlay(const SequenceInput& input, const SequenceResult& result,
                    int frame_index, const std::string& out_path);

// Deterministic display color for an instance id.
void id_color(int id, unsigned char rgb[3]);

}  // namespace vostrack
