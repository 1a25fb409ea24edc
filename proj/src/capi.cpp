#include "vostrack.h"

#include <exception>
#include <string>
#include <utility>

#include "vostrack/errors.hpp"
#include "vostrack/io.hpp"
#include "vostrack/kv.hpp"
#include "vostrack/metrics.hpp"
#include "vostrack/pipeline.hpp"
#include "vostrack/search.hpp"
#include "vostrack/synth.hpp"

struct vostrack_sequence {
    vostrack::SequenceInput input;
};

struct vostrack_config {
    vostrack::PipelineConfig config;
};

struct vostrack_result {
    vostrack::SequenceResult result;
};

namespace {

thread_local std::string g_last_error;

vostrack_status status_of(vostrack::ErrorCode code) {
    using vostrack::ErrorCode;
    switch (code) {
        case ErrorCode::io: return VOSTRACK_ERR_IO;
        case ErrorCode::parse: return VOSTRACK_ERR_PARSE;
        case ErrorCode::config: return VOSTRACK_ERR_CONFIG;
        case ErrorCode::input: return VOSTRACK_ERR_INPUT;
        case ErrorCode::spec: return VOSTRACK_ERR_SPEC;
        case ErrorCode::malformed_rle: return VOSTRACK_ERR_MALFORMED_RLE;
        case ErrorCode::dimension_mismatch: return VOSTRACK_ERR_DIMENSION;
        case ErrorCode::missing_frame: return VOSTRACK_ERR_MISSING_FRAME;
        case ErrorCode::empty_pool: return VOSTRACK_ERR_EMPTY_POOL;
        case ErrorCode::size_limit: return VOSTRACK_ERR_SIZE_LIMIT;
    }
    return VOSTRACK_ERR_UNKNOWN;
}

// Runs the body, translating exceptions into status codes and the
// thread-local error message.
template <typename Fn>
vostrack_status guarded(Fn&& body) {
    try {
        body();
        g_last_error.clear();
        return VOSTRACK_OK;
    } catch (const vostrack::Error& error) {
        g_last_error = error.what();
        return status_of(error.code());
    } catch (const std::exception& error) {
        g_last_error = error.what();
        return VOSTRACK_ERR_UNKNOWN;
    } catch (...) {
        g_last_error = "unknown failure";
        return VOSTRACK_ERR_UNKNOWN;
    }
}

vostrack_status fail_null(const char* what) {
    g_last_error = std::string("null argument: ") + what;
    return VOSTRACK_ERR_INPUT;
}

}  // namespace

extern "C" {

const char* vostrack_version(void) { return "0.1.0"; }

const char* vostrack_status_name(vostrack_status status) {
    switch (status) {
        case VOSTRACK_OK: return "ok";
        case VOSTRACK_ERR_IO: return "io";
        case VOSTRACK_ERR_PARSE: return "parse";
        case VOSTRACK_ERR_CONFIG: return "config";
        case VOSTRACK_ERR_INPUT: return "input";
        case VOSTRACK_ERR_SPEC: return "spec";
        case VOSTRACK_ERR_MALFORMED_RLE: return "malformed_rle";
        case VOSTRACK_ERR_DIMENSION: return "dimension_mismatch";
        case VOSTRACK_ERR_MISSING_FRAME: return "missing_frame";
        case VOSTRACK_ERR_EMPTY_POOL: return "empty_pool";
        case VOSTRACK_ERR_SIZE_LIMIT: return "size_limit";
        case VOSTRACK_ERR_UNKNOWN: break;
    }
    return "unknown";
}

const char* vostrack_last_error(void) { return g_last_error.c_str(); }

vostrack_status vostrack_sequence_load(const char* dir, vostrack_sequence** out) {
    if (!dir) return fail_null("dir");
    if (!out) return fail_null("out");
    return guarded([&] {
        auto sequence = new vostrack_sequence{vostrack::load_sequence(dir)};
        *out = sequence;
    });
}

void vostrack_sequence_free(vostrack_sequence* sequence) { delete sequence; }

int vostrack_sequence_frame_count(const vostrack_sequence* sequence) {
    return sequence ? sequence->input.frame_count : 0;
}

int vostrack_sequence_width(const vostrack_sequence* sequence) {
    return sequence ? sequence->input.width : 0;
}

int vostrack_sequence_height(const vostrack_sequence* sequence) {
    return sequence ? sequence->input.height : 0;
}

vostrack_status vostrack_config_default(vostrack_config** out) {
    if (!out) return fail_null("out");
    return guarded([&] { *out = new vostrack_config{vostrack::default_config()}; });
}

vostrack_status vostrack_config_load(const char* path, vostrack_config** out) {
    if (!path) return fail_null("path");
    if (!out) return fail_null("out");
    return guarded([&] { *out = new vostrack_config{vostrack::load_config(path)}; });
}

vostrack_status vostrack_config_set(vostrack_config* config, const char* key,
                                    const char* value) {
    if (!config) return fail_null("config");
    if (!key) return fail_null("key");
    if (!value) return fail_null("value");
    return guarded([&] {
        // Round-trips through the config text form so keys, syntax and
        // validation stay identical to config files; the appended line wins.
        const std::string text = vostrack::config_to_text(config->config) + key +
                                 " = " + value + "\n";
        config->config = vostrack::parse_config_text(text, "<set>");
    });
}

void vostrack_config_free(vostrack_config* config) { delete config; }

vostrack_status vostrack_run(const vostrack_sequence* sequence,
                             const vostrack_config* config, vostrack_result** out) {
    if (!sequence) return fail_null("sequence");
    if (!config) return fail_null("config");
    if (!out) return fail_null("out");
    return guarded([&] {
        *out = new vostrack_result{
            vostrack::run_sequence(sequence->input, config->config)};
    });
}

void vostrack_result_free(vostrack_result* result) { delete result; }

vostrack_status vostrack_result_save(const vostrack_result* result, const char* dir) {
    if (!result) return fail_null("result");
    if (!dir) return fail_null("dir");
    return guarded([&] { vostrack::save_result(dir, result->result); });
}

vostrack_status vostrack_result_load(const char* dir, vostrack_result** out) {
    if (!dir) return fail_null("dir");
    if (!out) return fail_null("out");
    return guarded([&] { *out = new vostrack_result{vostrack::load_result(dir)}; });
}

vostrack_status vostrack_evaluate_dirs(const char* pred_dir, const char* gt_dir,
                                       double tolerance, vostrack_report* out) {
    if (!pred_dir) return fail_null("pred_dir");
    if (!gt_dir) return fail_null("gt_dir");
    if (!out) return fail_null("out");
    return guarded([&] {
        const auto pred = vostrack::load_label_maps(pred_dir);
        const auto gt = vostrack::load_label_maps(gt_dir);
        double tol = tolerance;
        if (tol <= 0.0 && !gt.empty())
            tol = vostrack::default_boundary_tolerance(gt[0].width, gt[0].height);
        const vostrack::SequenceReport report = vostrack::evaluate(pred, gt, tol);
        out->j_mean = report.j_mean;
        out->j_recall = report.j_recall;
        out->j_decay = report.j_decay;
        out->f_mean = report.f_mean;
        out->f_recall = report.f_recall;
        out->f_decay = report.f_decay;
        out->global_mean = report.global_mean;
    });
}

vostrack_status vostrack_report_save(const vostrack_report* report, const char* path) {
    if (!report) return fail_null("report");
    if (!path) return fail_null("path");
    return guarded([&] {
        std::string text;
        text += "j_mean: " + vostrack::format_double(report->j_mean) + "\n";
        text += "j_recall: " + vostrack::format_double(report->j_recall) + "\n";
        text += "j_decay: " + vostrack::format_double(report->j_decay) + "\n";
        text += "f_mean: " + vostrack::format_double(report->f_mean) + "\n";
        text += "f_recall: " + vostrack::format_double(report->f_recall) + "\n";
        text += "f_decay: " + vostrack::format_double(report->f_decay) + "\n";
        text += "global_mean: " + vostrack::format_double(report->global_mean) + "\n";
        vostrack::write_text_file(path, text);
    });
}

vostrack_status vostrack_render(const vostrack_sequence* sequence,
                                const vostrack_result* result, int frame,
                                const char* out_path) {
    if (!sequence) return fail_null("sequence");
    if (!result) return fail_null("result");
    if (!out_path) return fail_null("out_path");
    return guarded([&] {
        vostrack::render_overlay(sequence->input, result->result, frame, out_path);
    });
}

vostrack_status vostrack_synth_generate(const char* spec_path, const char* out_dir) {
    if (!spec_path) return fail_null("spec_path");
    if (!out_dir) return fail_null("out_dir");
    return guarded([&] {
        const vostrack::ScenarioSpec spec = vostrack::load_scenario_spec(spec_path);
        vostrack::save_sequence(out_dir, vostrack::generate_scenario(spec));
    });
}

vostrack_status vostrack_search_run(const char* space_path, const char* scenarios_dir,
                                    int trials, const char* seed, const char* log_path,
                                    double* best_score) {
    if (!space_path) return fail_null("space_path");
    if (!scenarios_dir) return fail_null("scenarios_dir");
    if (!log_path) return fail_null("log_path");
    return guarded([&] {
        vostrack::SearchSpace space = vostrack::load_search_space(space_path);
        if (trials > 0) space.trials = trials;
        if (seed)
            space.seed = static_cast<std::uint64_t>(
                vostrack::parse_long(seed, "seed override"));
        vostrack::validate_search_space(space);
        const auto scenarios = vostrack::load_eval_scenarios(scenarios_dir);
        const vostrack::SearchResult result =
            vostrack::search_hyperparams(space, scenarios);
        vostrack::write_text_file(log_path, vostrack::search_log_to_text(result));
        if (best_score) *best_score = result.trials[result.best_index].score;
    });
}

}  // extern "C"
