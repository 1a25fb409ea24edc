#include "vostrack/search.hpp"

#include <algorithm>
#include <filesystem>
#include <utility>

#include "vostrack/errors.hpp"
#include "vostrack/io.hpp"
#include "vostrack/kv.hpp"
#include "vostrack/metrics.hpp"
#include "vostrack/rng.hpp"

namespace vostrack {

namespace {

struct RangeSlot {
    const char* key;
    ParamRange SearchSpace::* range;
};

constexpr RangeSlot kRangeSlots[] = {
    {"w_iou", &SearchSpace::w_iou},   {"w_traj", &SearchSpace::w_traj},
    {"w_reid", &SearchSpace::w_reid}, {"w_rel", &SearchSpace::w_rel},
    {"tau1", &SearchSpace::tau1},     {"tau2", &SearchSpace::tau2},
    {"w_sal", &SearchSpace::w_sal},   {"w_freq", &SearchSpace::w_freq},
};

ParamRange parse_range(const std::string& value, const std::string& context) {
    const std::size_t colon = value.find(':');
    if (colon == std::string::npos) {
        const double point = parse_double(value, context);
        return ParamRange{point, point};
    }
    ParamRange range;
    range.lo = parse_double(trim(value.substr(0, colon)), context);
    range.hi = parse_double(trim(value.substr(colon + 1)), context);
    return range;
}

std::string format_range(const ParamRange& range) {
    if (range.lo == range.hi) return format_double(range.lo);
    return format_double(range.lo) + ":" + format_double(range.hi);
}

// Applies the eight sampled values onto a copy of the base config, in the
// fixed slot order so the draw sequence is stable.
PipelineConfig apply_sample(const PipelineConfig& base, const double values[8]) {
    PipelineConfig config = base;
    config.pool.weights.w_iou = values[0];
    config.pool.weights.w_traj = values[1];
    config.pool.weights.w_reid = values[2];
    config.pool.weights.w_rel = values[3];
    config.pool.tau1 = values[4];
    config.pool.tau2 = values[5];
    config.selection.w_sal = values[6];
    config.selection.w_freq = values[7];
    return config;
}

}  // namespace

void validate_search_space(const SearchSpace& space) {
    for (const RangeSlot& slot : kRangeSlots) {
        const ParamRange& range = space.*slot.range;
        if (range.lo > range.hi)
            raise(ErrorCode::config,
                  std::string("range for ") + slot.key + " has lo > hi");
        if (range.lo < 0.0)
            raise(ErrorCode::config,
                  std::string("range for ") + slot.key + " must be non-negative");
    }
    if (space.w_sal.hi == 0.0 && space.w_freq.hi == 0.0)
        raise(ErrorCode::config, "selection weight ranges pin both weights to zero");
    if (space.trials < 1) raise(ErrorCode::config, "trial budget must be at least 1");
}

SearchSpace parse_search_space(const std::string& text, const std::string& origin) {
    SearchSpace space;
    for (const KvEntry& entry : parse_kv_text(text, origin)) {
        const std::string context = origin + ":" + std::to_string(entry.line);
        bool matched = false;
        for (const RangeSlot& slot : kRangeSlots) {
            if (entry.key != slot.key) continue;
            space.*slot.range = parse_range(entry.value, context);
            matched = true;
            break;
        }
        if (matched) continue;
        if (entry.key == "trials")
            space.trials = static_cast<int>(parse_long(entry.value, context));
        else if (entry.key == "seed")
            space.seed = static_cast<std::uint64_t>(parse_long(entry.value, context));
        else
            raise(ErrorCode::config, context + ": unknown key `" + entry.key + "`");
    }
    validate_search_space(space);
    return space;
}

SearchSpace load_search_space(const std::string& path) {
    return parse_search_space(read_text_file(path), path);
}

std::string search_space_to_text(const SearchSpace& space) {
    std::string text;
    for (const RangeSlot& slot : kRangeSlots)
        text += std::string(slot.key) + " = " + format_range(space.*slot.range) + "\n";
    text += "trials = " + std::to_string(space.trials) + "\n";
    text += "seed = " + std::to_string(space.seed) + "\n";
    return text;
}

EvalScenario make_eval_scenario(std::string name, SequenceInput input) {
    if (!input.has_ground_truth)
        raise(ErrorCode::input, "scenario `" + name + "` carries no ground truth");
    EvalScenario scenario;
    scenario.gt_labels.reserve(input.ground_truth.size());
    for (const GroundTruthFrame& frame : input.ground_truth)
        scenario.gt_labels.push_back(
            labels_from_instances(input.width, input.height, frame));
    scenario.name = std::move(name);
    scenario.input = std::move(input);
    return scenario;
}

std::vector<EvalScenario> load_eval_scenarios(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> names;
    std::error_code ec;
    for (const fs::directory_entry& entry : fs::directory_iterator(dir, ec)) {
        if (!entry.is_directory()) continue;
        if (!fs::exists(entry.path() / "sequence.txt")) continue;
        names.push_back(entry.path().filename().string());
    }
    if (ec) raise(ErrorCode::io, "cannot list " + dir + ": " + ec.message());
    if (names.empty()) raise(ErrorCode::input, "no scenario directories under " + dir);
    std::sort(names.begin(), names.end());
    std::vector<EvalScenario> scenarios;
    scenarios.reserve(names.size());
    for (const std::string& name : names)
        scenarios.push_back(
            make_eval_scenario(name, load_sequence((fs::path(dir) / name).string())));
    return scenarios;
}

double score_config(const PipelineConfig& config,
                    const std::vector<EvalScenario>& scenarios) {
    if (scenarios.empty()) raise(ErrorCode::input, "no scenarios to score");
    double sum = 0.0;
    for (const EvalScenario& scenario : scenarios) {
        const SequenceResult result = run_sequence(scenario.input, config);
        const double tolerance =
            config.boundary_tolerance > 0.0
                ? config.boundary_tolerance
                : default_boundary_tolerance(scenario.input.width,
                                             scenario.input.height);
        sum += evaluate(result.labels, scenario.gt_labels, tolerance).global_mean;
    }
    return sum / static_cast<double>(scenarios.size());
}

SearchResult search_hyperparams(const SearchSpace& space,
                                const std::vector<EvalScenario>& scenarios,
                                const PipelineConfig& base) {
    validate_search_space(space);
    if (scenarios.empty()) raise(ErrorCode::input, "no scenarios to search over");

    // All draws come from one stream so trial i's parameters depend only on
    // the seed and i; evaluation order is then free.
    Rng rng(space.seed);
    std::vector<PipelineConfig> configs;
    configs.reserve(space.trials);
    for (int trial = 0; trial < space.trials; ++trial) {
        double values[8];
        for (std::size_t slot = 0; slot < 8; ++slot) {
            const ParamRange& range = space.*kRangeSlots[slot].range;
            values[slot] = rng.uniform(range.lo, range.hi);
        }
        configs.push_back(apply_sample(base, values));
    }

    SearchResult result;
    result.trials.reserve(space.trials);
    for (int trial = 0; trial < space.trials; ++trial) {
        SearchTrial entry;
        entry.index = trial;
        entry.config = configs[trial];
        entry.score = score_config(configs[trial], scenarios);
        result.trials.push_back(std::move(entry));
    }
    result.best_index = 0;
    for (int trial = 1; trial < space.trials; ++trial)
        if (result.trials[trial].score > result.trials[result.best_index].score)
            result.best_index = trial;
    return result;
}

std::string search_log_to_text(const SearchResult& result) {
    std::string text =
        "# columns: trial w_iou w_traj w_reid w_rel tau1 tau2 w_sal w_freq score\n";
    for (const SearchTrial& trial : result.trials) {
        const PipelineConfig& c = trial.config;
        text += std::to_string(trial.index);
        text += " " + format_double(c.pool.weights.w_iou);
        text += " " + format_double(c.pool.weights.w_traj);
        text += " " + format_double(c.pool.weights.w_reid);
        text += " " + format_double(c.pool.weights.w_rel);
        text += " " + format_double(c.pool.tau1);
        text += " " + format_double(c.pool.tau2);
        text += " " + format_double(c.selection.w_sal);
        text += " " + format_double(c.selection.w_freq);
        text += " " + format_double(trial.score);
        text += "\n";
    }
    if (!result.trials.empty()) {
        text += "# best_trial: " + std::to_string(result.best_index) + "\n";
        text += "# best_score: " +
                format_double(result.trials[result.best_index].score) + "\n";
    }
    return text;
}

std::vector<SelectionRow> selection_experiment(const std::vector<EvalScenario>& scenarios,
                                               const std::vector<int>& k_values,
                                               const std::vector<std::uint64_t>& seeds,
                                               const PipelineConfig& base) {
    if (scenarios.empty()) raise(ErrorCode::input, "no scenarios to score");
    if (seeds.empty()) raise(ErrorCode::input, "random baseline needs seeds");
    std::vector<SelectionRow> rows;
    rows.reserve(k_values.size());
    for (int k : k_values) {
        SelectionRow row;
        row.K = k;
        PipelineConfig config = base;
        config.pool.K = k;
        config.selection_mode = SelectionMode::key;
        row.key_score = score_config(config, scenarios);
        config.selection_mode = SelectionMode::random;
        double sum = 0.0;
        for (std::uint64_t seed : seeds) {
            config.selection_seed = seed;
            sum += score_config(config, scenarios);
        }
        row.random_score = sum / static_cast<double>(seeds.size());
        rows.push_back(row);
    }
    return rows;
}

std::string selection_table_to_text(const std::vector<SelectionRow>& rows) {
    std::string text = "# columns: K key random gap\n";
    for (const SelectionRow& row : rows) {
        text += std::to_string(row.K);
        text += " " + format_double(row.key_score);
        text += " " + format_double(row.random_score);
        text += " " + format_double(row.key_score - row.random_score);
        text += "\n";
    }
    return text;
}

}  // namespace vostrack
