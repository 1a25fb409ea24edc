#include "vostrack/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "vostrack/errors.hpp"
#include "vostrack/kv.hpp"

namespace vostrack {

PipelineConfig default_config() { return PipelineConfig{}; }

PipelineConfig parse_config_text(const std::string& text, const std::string& origin) {
    PipelineConfig config = default_config();
    for (const KvEntry& entry : parse_kv_text(text, origin)) {
        const std::string context = origin + ":" + std::to_string(entry.line);
        const std::string& key = entry.key;
        const std::string& value = entry.value;
        if (key == "w_iou") config.pool.weights.w_iou = parse_double(value, context);
        else if (key == "w_traj") config.pool.weights.w_traj = parse_double(value, context);
        else if (key == "w_reid") config.pool.weights.w_reid = parse_double(value, context);
        else if (key == "w_rel") config.pool.weights.w_rel = parse_double(value, context);
        else if (key == "alpha_traj")
            config.pool.weights.alpha_traj = parse_double(value, context);
        else if (key == "alpha_reid")
            config.pool.weights.alpha_reid = parse_double(value, context);
        else if (key == "traj_metric") {
            if (value == "distance") config.pool.weights.traj_metric = TrajMetric::distance;
            else if (value == "inner_product")
                config.pool.weights.traj_metric = TrajMetric::inner_product;
            else raise(ErrorCode::config, context + ": unknown traj_metric `" + value + "`");
        } else if (key == "tau1") config.pool.tau1 = parse_double(value, context);
        else if (key == "tau2") config.pool.tau2 = parse_double(value, context);
        else if (key == "M") config.pool.M = static_cast<int>(parse_long(value, context));
        else if (key == "K") config.pool.K = static_cast<int>(parse_long(value, context));
        else if (key == "spawn_objectness_min")
            config.pool.spawn_objectness_min = parse_double(value, context);
        else if (key == "spawn_overlap_max")
            config.pool.spawn_overlap_max = parse_double(value, context);
        else if (key == "propagated_objectness")
            config.pool.propagated_objectness = parse_double(value, context);
        else if (key == "w_sal") config.selection.w_sal = parse_double(value, context);
        else if (key == "w_freq") config.selection.w_freq = parse_double(value, context);
        else if (key == "selection_mode") {
            if (value == "key") config.selection_mode = SelectionMode::key;
            else if (value == "random") config.selection_mode = SelectionMode::random;
            else
                raise(ErrorCode::config,
                      context + ": unknown selection_mode `" + value + "`");
        } else if (key == "selection_seed")
            config.selection_seed = static_cast<std::uint64_t>(parse_long(value, context));
        else if (key == "propagator") config.propagator = value;
        else if (key == "boundary_tolerance")
            config.boundary_tolerance = parse_double(value, context);
        else raise(ErrorCode::config, context + ": unknown key `" + key + "`");
    }
    validate_config(config);
    return config;
}

PipelineConfig load_config(const std::string& path) {
    return parse_config_text(read_text_file(path), path);
}

void validate_config(const PipelineConfig& config) {
    const ScoreWeights& w = config.pool.weights;
    if (w.w_iou < 0 || w.w_traj < 0 || w.w_reid < 0 || w.w_rel < 0)
        raise(ErrorCode::config, "score weights must be non-negative");
    if (w.alpha_traj < 0)
        raise(ErrorCode::config, "alpha_traj must be positive (or 0 for automatic)");
    if (w.alpha_reid <= 0) raise(ErrorCode::config, "alpha_reid must be positive");
    if (!std::isfinite(config.pool.tau1) || !std::isfinite(config.pool.tau2))
        raise(ErrorCode::config, "thresholds must be finite");
    if (config.pool.M < 1) raise(ErrorCode::config, "M must be at least 1");
    if (config.pool.K < 1) raise(ErrorCode::config, "K must be at least 1");
    const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(config.pool.spawn_objectness_min) ||
        !in_unit(config.pool.spawn_overlap_max) ||
        !in_unit(config.pool.propagated_objectness))
        raise(ErrorCode::config, "spawn/propagation scores must lie in [0,1]");
    if (config.selection.w_sal < 0 || config.selection.w_freq < 0)
        raise(ErrorCode::config, "selection weights must be non-negative");
    if (config.selection.w_sal == 0 && config.selection.w_freq == 0)
        raise(ErrorCode::config, "selection weights must not both be zero");
    if (config.propagator != "translate" && config.propagator != "none" &&
        config.propagator != "oracle")
        raise(ErrorCode::config, "unknown propagator `" + config.propagator + "`");
    if (config.boundary_tolerance < 0)
        raise(ErrorCode::config, "boundary_tolerance must be non-negative");
}

std::string config_to_text(const PipelineConfig& config) {
    const ScoreWeights& w = config.pool.weights;
    std::string text;
    text += "w_iou = " + format_double(w.w_iou) + "\n";
    text += "w_traj = " + format_double(w.w_traj) + "\n";
    text += "w_reid = " + format_double(w.w_reid) + "\n";
    text += "w_rel = " + format_double(w.w_rel) + "\n";
    text += "alpha_traj = " + format_double(w.alpha_traj) + "\n";
    text += "alpha_reid = " + format_double(w.alpha_reid) + "\n";
    text += std::string("traj_metric = ") +
            (w.traj_metric == TrajMetric::distance ? "distance" : "inner_product") + "\n";
    text += "tau1 = " + format_double(config.pool.tau1) + "\n";
    text += "tau2 = " + format_double(config.pool.tau2) + "\n";
    text += "M = " + std::to_string(config.pool.M) + "\n";
    text += "K = " + std::to_string(config.pool.K) + "\n";
    text += "spawn_objectness_min = " + format_double(config.pool.spawn_objectness_min) +
            "\n";
    text += "spawn_overlap_max = " + format_double(config.pool.spawn_overlap_max) + "\n";
    text += "propagated_objectness = " + format_double(config.pool.propagated_objectness) +
            "\n";
    text += "w_sal = " + format_double(config.selection.w_sal) + "\n";
    text += "w_freq = " + format_double(config.selection.w_freq) + "\n";
    text += std::string("selection_mode = ") +
            (config.selection_mode == SelectionMode::key ? "key" : "random") + "\n";
    text += "selection_seed = " + std::to_string(config.selection_seed) + "\n";
    text += "propagator = " + config.propagator + "\n";
    text += "boundary_tolerance = " + format_double(config.boundary_tolerance) + "\n";
    return text;
}

namespace {

void validate_input(const SequenceInput& input) {
    if (input.frame_count < 1) raise(ErrorCode::input, "sequence needs at least 1 frame");
    if (input.width <= 0 || input.height <= 0)
        raise(ErrorCode::input, "frame size must be positive");
    if (static_cast<int>(input.candidates.size()) != input.frame_count ||
        static_cast<int>(input.saliency.size()) != input.frame_count)
        raise(ErrorCode::input, "per-frame lists out of step with frame_count");
    for (int t = 0; t < input.frame_count; ++t) {
        if (input.saliency[t].width != input.width ||
            input.saliency[t].height != input.height)
            raise(ErrorCode::dimension_mismatch, "saliency map size mismatch");
        for (const CandidateProposal& cand : input.candidates[t]) {
            if (cand.mask.width != input.width || cand.mask.height != input.height)
                raise(ErrorCode::dimension_mismatch, "candidate mask size mismatch");
            if (static_cast<int>(cand.descriptor.size()) != input.descriptor_dim)
                raise(ErrorCode::dimension_mismatch, "descriptor length mismatch");
        }
    }
}

}  // namespace

SequenceResult run_sequence(const SequenceInput& input, const PipelineConfig& config) {
    validate_input(input);
    validate_config(config);
    PoolConfig pool_config = config.pool;
    if (pool_config.weights.alpha_traj <= 0.0)
        pool_config.weights.alpha_traj = 0.5 * frame_diagonal(input.width, input.height);
    const auto propagator =
        make_propagator(config.propagator, input, pool_config.propagated_objectness);

    SequenceResult result;
    result.width = input.width;
    result.height = input.height;
    result.labels.resize(input.frame_count);

    ObjectPool pool;
    for (int t = 0; t < input.frame_count; ++t) {
        std::vector<CandidateProposal> candidates = input.candidates[t];
        if (t > 0) {
            for (const TrackedInstance& instance : pool.instances) {
                auto cand = propagator->make_candidate(instance, t);
                if (cand) candidates.push_back(std::move(*cand));
            }
        }

        std::vector<RleMask> reference_masks;
        std::vector<BoxVector> predicted_boxes;
        reference_masks.reserve(pool.instances.size());
        predicted_boxes.reserve(pool.instances.size());
        for (const TrackedInstance& instance : pool.instances) {
            reference_masks.push_back(propagator->reference_mask(instance, t));
            predicted_boxes.push_back(predict_box(instance, t));
        }

        const ScoreMatrix matrix =
            build_score_matrix(pool.instances, candidates, reference_masks,
                               predicted_boxes, pool_config.weights);
        const double tau =
            pool.phase == PoolPhase::growing ? pool_config.tau1 : pool_config.tau2;
        const AssignmentSet assignments = assign_ids(matrix, tau);

        // Rasterization priority per id, gathered before selection can
        // reshuffle the pool.
        std::map<int, double> frame_score;
        for (std::size_t row = 0; row < pool.instances.size(); ++row) {
            if (!assignments.instance_match[row]) continue;
            const CandidateProposal& cand = candidates[*assignments.instance_match[row]];
            ProvenanceRecord rec;
            rec.frame = t;
            rec.instance_id = pool.instances[row].id;
            rec.total_score = assignments.instance_score[row];
            if (cand.source == Source::propagated) {
                rec.kind = MatchKind::propagated;
                rec.candidate_index = -1;
            } else {
                rec.kind = MatchKind::detector;
                rec.candidate_index = *assignments.instance_match[row];
            }
            result.provenance.push_back(rec);
            frame_score[rec.instance_id] = rec.total_score;
        }

        apply_assignments(pool, assignments, candidates, input.saliency[t], t);
        const std::vector<int> spawned = spawn_new_ids(pool, candidates, assignments, t,
                                                       input.saliency[t], pool_config);
        const std::size_t first_new = pool.instances.size() - spawned.size();
        for (std::size_t k = 0; k < spawned.size(); ++k) {
            ProvenanceRecord rec;
            rec.frame = t;
            rec.instance_id = pool.instances[first_new + k].id;
            rec.total_score = candidates[spawned[k]].objectness;
            rec.kind = MatchKind::spawn;
            rec.candidate_index = spawned[k];
            result.provenance.push_back(rec);
            frame_score[rec.instance_id] = rec.total_score;
        }

        if (pool.phase == PoolPhase::growing && t == pool_config.M - 1) {
            result.selected_ids =
                config.selection_mode == SelectionMode::key
                    ? select_key_instances(pool, pool_config.K, config.selection,
                                           pool_config.M)
                    : random_select_instances(pool, pool_config.K, config.selection_seed);
        }

        // Label survivors supported this frame; a higher assignment score
        // wins a contested pixel, the first writer (lower id) keeps ties.
        FrameLabels& labels = result.labels[t];
        labels.width = input.width;
        labels.height = input.height;
        labels.labels.assign(static_cast<std::size_t>(input.width) * input.height, 0);
        std::vector<double> claim(labels.labels.size(), -1.0);
        for (const TrackedInstance& instance : pool.instances) {
            if (instance.last_supported_frame != t) continue;
            const auto it = frame_score.find(instance.id);
            if (it == frame_score.end()) continue;
            const double score = it->second;
            const auto grid = rle_decode(instance.last_mask);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (!grid[i] || score <= claim[i]) continue;
                claim[i] = score;
                labels.labels[i] = instance.id;
            }
        }
    }
    return result;
}

void id_color(int id, unsigned char rgb[3]) {
    // Golden-angle hue walk keeps nearby ids visually distinct.
    const double hue = std::fmod(static_cast<double>(id) * 137.50776405003785, 360.0);
    const double s = 0.75, v = 0.95;
    const double c = v * s;
    const double hp = hue / 60.0;
    const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) r = c, g = x;
    else if (hp < 2) r = x, g = c;
    else if (hp < 3) g = c, b = x;
    else if (hp < 4) g = x, b = c;
    else if (hp < 5) r = x, b = c;
    else r = c, b = x;
    const double m = v - c;
    rgb[0] = static_cast<unsigned char>(std::lround((r + m) * 255.0));
    rgb[1] = static_cast<unsigned char>(std::lround((g + m) * 255.0));
    rgb[2] = static_cast<unsigned char>(std::lround((b + m) * 255.0));
}

void render_overlay(const SequenceInput& input, const SequenceResult& result,
                    int frame_index, const std::string& out_path) {
    if (frame_index < 0 || frame_index >= static_cast<int>(result.labels.size()))
        raise(ErrorCode::input, "frame index out of range");
    const FrameLabels& labels = result.labels[frame_index];
    if (labels.width != input.width || labels.height != input.height)
        raise(ErrorCode::dimension_mismatch, "result frame size differs from input");
    std::ofstream out(out_path, std::ios::binary);
    if (!out) raise(ErrorCode::io, "cannot write " + out_path);
    out << "P6\n" << labels.width << ' ' << labels.height << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(labels.width) * 3);
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            unsigned char* px = &row[static_cast<std::size_t>(x) * 3];
            const int id = labels.at(x, y);
            if (id == 0) {
                px[0] = px[1] = px[2] = 128;
            } else {
                id_color(id, px);
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
    if (!out) raise(ErrorCode::io, "write failed for " + out_path);
}

}  // namespace vostrack
