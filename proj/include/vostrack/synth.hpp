#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vostrack/types.hpp"

namespace vostrack {

enum class Trajectory {
    linear,
    sinusoidal,
};

// One synthetic actor: a rectangle following a parametric track, with its
// own descriptor cluster, saliency amplitude and visibility window.
struct ObjectSpec {
    Trajectory trajectory = Trajectory::linear;
    double cx0 = 0.0, cy0 = 0.0;  // center at frame 0
    double vx = 0.0, vy = 0.0;    // pixels per frame
    double amp = 0.0;             // sinusoidal vertical swing
    double period = 16.0;         // frames per cycle
    int w = 8, h = 8;
    std::uint64_t desc_seed = 0;  // descriptor cluster identity
    double desc_noise = 0.0;
    double saliency = 0.0;
    double objectness = 0.9;
    int first = 0, last = -1;  // visibility window, inclusive; -1 = to end
};

struct ScenarioSpec {
    int frame_count = 1;
    int width = 64, height = 64;
    int descriptor_dim = 8;
    std::uint64_t seed = 0;
    double bbox_jitter = 0.0;
    double drop_prob = 0.0;
    double clutter_rate = 0.0;
    double clutter_obj_lo = 0.2;
    double clutter_obj_hi = 0.65;
    std::vector<ObjectSpec> objects;
};

void validate_scenario_spec(const ScenarioSpec& spec);

ScenarioSpec parse_scenario_spec(const std::string& text, const std::string& origin);
ScenarioSpec load_scenario_spec(const std::string& path);
std::string scenario_spec_to_text(const ScenarioSpec& spec);

// True center of an object at a frame.
void object_center(const ObjectSpec& object, int frame, double* cx, double* cy);

// Renders the scenario: ground-truth masks and label maps from the exact
// tracks, detector candidates jittered per the noise model (minus drops,
// plus clutter), descriptors sampled around per-object cluster centers,
// saliency stamped inside the true masks. Deterministic per seed.
SequenceInput generate_scenario(const ScenarioSpec& spec);

// The committed benchmark family used by the selection and search tests:
// two salient persistent movers in separate horizontal bands plus eight
// short-lived low-saliency distractors through the middle, light detector
// noise and sub-spawn-grade clutter. `index` selects the seeded variant.
ScenarioSpec salient_distractor_scenario(int index);

}  // namespace vostrack
