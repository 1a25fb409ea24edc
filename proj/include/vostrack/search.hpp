#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vostrack/pipeline.hpp"

namespace vostrack {

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Uniform sampling box over the score weights, thresholds and selection
// weights; lo == hi pins a parameter to a single value.
struct SearchSpace {
    ParamRange w_iou{0.0, 1.0};
    ParamRange w_traj{0.0, 1.0};
    ParamRange w_reid{0.0, 1.0};
    ParamRange w_rel{0.0, 1.0};
    ParamRange tau1{0.0, 1.0};
    ParamRange tau2{0.0, 1.0};
    ParamRange w_sal{0.0, 1.0};
    ParamRange w_freq{0.0, 1.0};
    int trials = 50;
    std::uint64_t seed = 0;
};

void validate_search_space(const SearchSpace& space);
SearchSpace parse_search_space(const std::string& text, const std::string& origin);
SearchSpace load_search_space(const std::string& path);
std::string search_space_to_text(const SearchSpace& space);

// One sequence with its ground-truth label maps, ready for scoring.
struct EvalScenario {
    std::string name;
    SequenceInput input;
    std::vector<FrameLabels> gt_labels;
};

EvalScenario make_eval_scenario(std::string name, SequenceInput input);

// Loads every subdirectory of `dir` that contains a sequence.txt, sorted by
// name. The sequences must carry ground truth.
std::vector<EvalScenario> load_eval_scenarios(const std::string& dir);

// Runs the tracker with `config` on every scenario and returns the mean
// global measure.
double score_config(const PipelineConfig& config,
                    const std::vector<EvalScenario>& scenarios);

struct SearchTrial {
    int index = 0;
    PipelineConfig config;
    double score = 0.0;
};

struct SearchResult {
    std::vector<SearchTrial> trials;
    int best_index = 0;
};

// Seeded uniform random search: each trial samples the eight searched
// parameters into a copy of `base`, runs the full tracker plus evaluation on
// every scenario, and the argmax trial wins (first trial on ties). The trial
// log is complete and reproducible per seed.
SearchResult search_hyperparams(const SearchSpace& space,
                                const std::vector<EvalScenario>& scenarios,
                                const PipelineConfig& base = PipelineConfig{});

std::string search_log_to_text(const SearchResult& result);

struct SelectionRow {
    int K = 0;
    double key_score = 0.0;
    double random_score = 0.0;  // mean over seeds
};

// Key selection against the random-selection baseline on the same scenarios,
// one row per K; the random column averages over the given seeds.
std::vector<SelectionRow> selection_experiment(const std::vector<EvalScenario>& scenarios,
                                               const std::vector<int>& k_values,
                                               const std::vector<std::uint64_t>& seeds,
                                               const PipelineConfig& base = PipelineConfig{});

std::string selection_table_to_text(const std::vector<SelectionRow>& rows);

}  // namespace vostrack
