#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vostrack.h"

namespace {

int fail(vostrack_status status) {
    std::fprintf(stderr, "error (%s): %s\n", vostrack_status_name(status),
                 vostrack_last_error());
    return 1;
}

using SequencePtr = std::unique_ptr<vostrack_sequence, void (*)(vostrack_sequence*)>;
using ConfigPtr = std::unique_ptr<vostrack_config, void (*)(vostrack_config*)>;
using ResultPtr = std::unique_ptr<vostrack_result, void (*)(vostrack_result*)>;

int cmd_run(const std::string& input, const std::string& config_path,
            const std::vector<std::string>& sets, const std::string& out) {
    vostrack_sequence* seq_raw = nullptr;
    vostrack_status status = vostrack_sequence_load(input.c_str(), &seq_raw);
    if (status != VOSTRACK_OK) return fail(status);
    SequencePtr sequence(seq_raw, vostrack_sequence_free);

    vostrack_config* config_raw = nullptr;
    status = config_path.empty() ? vostrack_config_default(&config_raw)
                                 : vostrack_config_load(config_path.c_str(), &config_raw);
    if (status != VOSTRACK_OK) return fail(status);
    ConfigPtr config(config_raw, vostrack_config_free);

    for (const std::string& set : sets) {
        const std::size_t eq = set.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --set expects key=value, got `%s`\n",
                         set.c_str());
            return 1;
        }
        status = vostrack_config_set(config.get(), set.substr(0, eq).c_str(),
                                     set.substr(eq + 1).c_str());
        if (status != VOSTRACK_OK) return fail(status);
    }

    vostrack_result* result_raw = nullptr;
    status = vostrack_run(sequence.get(), config.get(), &result_raw);
    if (status != VOSTRACK_OK) return fail(status);
    ResultPtr result(result_raw, vostrack_result_free);

    status = vostrack_result_save(result.get(), out.c_str());
    if (status != VOSTRACK_OK) return fail(status);
    std::printf("tracked %d frames -> %s\n",
                vostrack_sequence_frame_count(sequence.get()), out.c_str());
    return 0;
}

int cmd_eval(const std::string& pred, const std::string& gt, double tolerance,
             std::string report_path) {
    vostrack_report report;
    const vostrack_status status =
        vostrack_evaluate_dirs(pred.c_str(), gt.c_str(), tolerance, &report);
    if (status != VOSTRACK_OK) return fail(status);

    std::printf("%-12s %10s\n", "measure", "value");
    std::printf("%-12s %10.6f\n", "j_mean", report.j_mean);
    std::printf("%-12s %10.6f\n", "j_recall", report.j_recall);
    std::printf("%-12s %10.6f\n", "j_decay", report.j_decay);
    std::printf("%-12s %10.6f\n", "f_mean", report.f_mean);
    std::printf("%-12s %10.6f\n", "f_recall", report.f_recall);
    std::printf("%-12s %10.6f\n", "f_decay", report.f_decay);
    std::printf("%-12s %10.6f\n", "global_mean", report.global_mean);

    if (report_path.empty()) report_path = pred + "/report.txt";
    const vostrack_status save_status =
        vostrack_report_save(&report, report_path.c_str());
    if (save_status != VOSTRACK_OK) return fail(save_status);
    return 0;
}

int cmd_render(const std::string& input, const std::string& result_dir, int frame,
               const std::string& out) {
    vostrack_sequence* seq_raw = nullptr;
    vostrack_status status = vostrack_sequence_load(input.c_str(), &seq_raw);
    if (status != VOSTRACK_OK) return fail(status);
    SequencePtr sequence(seq_raw, vostrack_sequence_free);

    vostrack_result* result_raw = nullptr;
    status = vostrack_result_load(result_dir.c_str(), &result_raw);
    if (status != VOSTRACK_OK) return fail(status);
    ResultPtr result(result_raw, vostrack_result_free);

    status = vostrack_render(sequence.get(), result.get(), frame, out.c_str());
    if (status != VOSTRACK_OK) return fail(status);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int cmd_synth(const std::string& spec, const std::string& out) {
    const vostrack_status status = vostrack_synth_generate(spec.c_str(), out.c_str());
    if (status != VOSTRACK_OK) return fail(status);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int cmd_search(const std::string& space, const std::string& scenarios, int trials,
               const std::string& seed, const std::string& out) {
    double best_score = 0.0;
    const vostrack_status status =
        vostrack_search_run(space.c_str(), scenarios.c_str(), trials,
                            seed.empty() ? nullptr : seed.c_str(), out.c_str(),
                            &best_score);
    if (status != VOSTRACK_OK) return fail(status);
    std::printf("best score %.6f, log -> %s\n", best_score, out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"video instance tracker over precomputed proposals"};
    app.require_subcommand(1);

    std::string run_input, run_config, run_out;
    std::vector<std::string> run_sets;
    CLI::App* run = app.add_subcommand("run", "track a sequence directory");
    run->add_option("--input", run_input, "sequence directory")->required();
    run->add_option("--config", run_config, "config file (defaults when omitted)");
    run->add_option("--set", run_sets, "config override as key=value");
    run->add_option("--out", run_out, "result directory")->required();

    std::string eval_pred, eval_gt, eval_report;
    double eval_tolerance = 0.0;
    CLI::App* eval = app.add_subcommand("eval", "score predictions against ground truth");
    eval->add_option("--pred", eval_pred, "predicted label directory")->required();
    eval->add_option("--gt", eval_gt, "ground-truth label directory")->required();
    eval->add_option("--tolerance", eval_tolerance,
                     "boundary tolerance in pixels (0 = automatic)");
    eval->add_option("--report", eval_report,
                     "report file (default <pred>/report.txt)");

    std::string render_input, render_result, render_out;
    int render_frame = 0;
    CLI::App* render = app.add_subcommand("render", "draw one tracked frame as PPM");
    render->add_option("--input", render_input, "sequence directory")->required();
    render->add_option("--result", render_result, "result directory")->required();
    render->add_option("--frame", render_frame, "frame index")->required();
    render->add_option("--out", render_out, "output image path")->required();

    std::string synth_spec, synth_out;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic sequence");
    synth->add_option("--spec", synth_spec, "scenario spec file")->required();
    synth->add_option("--out", synth_out, "output sequence directory")->required();

    std::string search_space, search_scenarios, search_seed, search_out;
    int search_trials = 0;
    CLI::App* search = app.add_subcommand("search", "random hyperparameter search");
    search->add_option("--space", search_space, "search space file")->required();
    search->add_option("--scenarios", search_scenarios, "directory of sequence dirs")
        ->required();
    search->add_option("--trials", search_trials, "trial budget (0 = from file)");
    search->add_option("--seed", search_seed, "seed override");
    search->add_option("--out", search_out, "trial log file")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(run_input, run_config, run_sets, run_out);
    if (eval->parsed()) return cmd_eval(eval_pred, eval_gt, eval_tolerance, eval_report);
    if (render->parsed())
        return cmd_render(render_input, render_result, render_frame, render_out);
    if (synth->parsed()) return cmd_synth(synth_spec, synth_out);
    if (search->parsed())
        return cmd_search(search_space, search_scenarios, search_trials, search_seed,
                          search_out);
    return 1;
}
