#include "vostrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vostrack/errors.hpp"
#include "vostrack/kv.hpp"
#include "vostrack/rng.hpp"

namespace vostrack {

void validate_scenario_spec(const ScenarioSpec& spec) {
    if (spec.frame_count < 1) raise(ErrorCode::spec, "frame_count must be at least 1");
    if (spec.width <= 0 || spec.height <= 0)
        raise(ErrorCode::spec, "frame size must be positive");
    if (spec.descriptor_dim < 1) raise(ErrorCode::spec, "descriptor_dim must be positive");
    if (spec.bbox_jitter < 0) raise(ErrorCode::spec, "bbox_jitter must be non-negative");
    if (spec.drop_prob < 0 || spec.drop_prob > 1)
        raise(ErrorCode::spec, "drop_prob must lie in [0,1]");
    if (spec.clutter_rate < 0) raise(ErrorCode::spec, "clutter_rate must be non-negative");
    if (spec.clutter_obj_lo < 0 || spec.clutter_obj_hi > 1 ||
        spec.clutter_obj_lo > spec.clutter_obj_hi)
        raise(ErrorCode::spec, "clutter objectness range invalid");
    for (const ObjectSpec& object : spec.objects) {
        if (object.w < 1 || object.h < 1)
            raise(ErrorCode::spec, "object size must be positive");
        if (object.desc_noise < 0)
            raise(ErrorCode::spec, "desc_noise must be non-negative");
        if (object.saliency < 0 || object.saliency > 1)
            raise(ErrorCode::spec, "object saliency must lie in [0,1]");
        if (object.objectness < 0 || object.objectness > 1)
            raise(ErrorCode::spec, "object objectness must lie in [0,1]");
        if (object.trajectory == Trajectory::sinusoidal && object.period <= 0)
            raise(ErrorCode::spec, "sinusoidal period must be positive");
        if (object.first < 0) raise(ErrorCode::spec, "visibility window starts below 0");
    }
}

namespace {

ObjectSpec parse_object(const std::string& value, const std::string& context) {
    ObjectSpec object;
    for (const std::string& part : split(value, ',')) {
        const std::string item = trim(part);
        if (item.empty()) continue;
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            raise(ErrorCode::parse, context + ": expected `key=value` in object spec");
        const std::string key = trim(item.substr(0, eq));
        const std::string val = trim(item.substr(eq + 1));
        if (key == "trajectory") {
            if (val == "linear") object.trajectory = Trajectory::linear;
            else if (val == "sinusoidal") object.trajectory = Trajectory::sinusoidal;
            else raise(ErrorCode::parse, context + ": unknown trajectory `" + val + "`");
        } else if (key == "cx0") object.cx0 = parse_double(val, context);
        else if (key == "cy0") object.cy0 = parse_double(val, context);
        else if (key == "vx") object.vx = parse_double(val, context);
        else if (key == "vy") object.vy = parse_double(val, context);
        else if (key == "amp") object.amp = parse_double(val, context);
        else if (key == "period") object.period = parse_double(val, context);
        else if (key == "w") object.w = static_cast<int>(parse_long(val, context));
        else if (key == "h") object.h = static_cast<int>(parse_long(val, context));
        else if (key == "desc_seed")
            object.desc_seed = static_cast<std::uint64_t>(parse_long(val, context));
        else if (key == "desc_noise") object.desc_noise = parse_double(val, context);
        else if (key == "saliency") object.saliency = parse_double(val, context);
        else if (key == "objectness") object.objectness = parse_double(val, context);
        else if (key == "first") object.first = static_cast<int>(parse_long(val, context));
        else if (key == "last") object.last = static_cast<int>(parse_long(val, context));
        else raise(ErrorCode::parse, context + ": unknown object key `" + key + "`");
    }
    return object;
}

std::string object_to_text(const ObjectSpec& object) {
    std::string text = "object = ";
    text += std::string("trajectory=") +
            (object.trajectory == Trajectory::linear ? "linear" : "sinusoidal");
    text += ", cx0=" + format_double(object.cx0) + ", cy0=" + format_double(object.cy0);
    text += ", vx=" + format_double(object.vx) + ", vy=" + format_double(object.vy);
    if (object.trajectory == Trajectory::sinusoidal)
        text += ", amp=" + format_double(object.amp) +
                ", period=" + format_double(object.period);
    text += ", w=" + std::to_string(object.w) + ", h=" + std::to_string(object.h);
    text += ", desc_seed=" + std::to_string(object.desc_seed);
    text += ", desc_noise=" + format_double(object.desc_noise);
    text += ", saliency=" + format_double(object.saliency);
    text += ", objectness=" + format_double(object.objectness);
    text += ", first=" + std::to_string(object.first);
    text += ", last=" + std::to_string(object.last);
    return text;
}

}  // namespace

ScenarioSpec parse_scenario_spec(const std::string& text, const std::string& origin) {
    ScenarioSpec spec;
    for (const KvEntry& entry : parse_kv_text(text, origin)) {
        const std::string context = origin + ":" + std::to_string(entry.line);
        const std::string& key = entry.key;
        const std::string& value = entry.value;
        if (key == "frame_count")
            spec.frame_count = static_cast<int>(parse_long(value, context));
        else if (key == "width") spec.width = static_cast<int>(parse_long(value, context));
        else if (key == "height")
            spec.height = static_cast<int>(parse_long(value, context));
        else if (key == "descriptor_dim")
            spec.descriptor_dim = static_cast<int>(parse_long(value, context));
        else if (key == "seed")
            spec.seed = static_cast<std::uint64_t>(parse_long(value, context));
        else if (key == "bbox_jitter") spec.bbox_jitter = parse_double(value, context);
        else if (key == "drop_prob") spec.drop_prob = parse_double(value, context);
        else if (key == "clutter_rate") spec.clutter_rate = parse_double(value, context);
        else if (key == "clutter_obj_lo")
            spec.clutter_obj_lo = parse_double(value, context);
        else if (key == "clutter_obj_hi")
            spec.clutter_obj_hi = parse_double(value, context);
        else if (key == "object") spec.objects.push_back(parse_object(value, context));
        else raise(ErrorCode::parse, context + ": unknown key `" + key + "`");
    }
    validate_scenario_spec(spec);
    return spec;
}

ScenarioSpec load_scenario_spec(const std::string& path) {
    return parse_scenario_spec(read_text_file(path), path);
}

std::string scenario_spec_to_text(const ScenarioSpec& spec) {
    std::string text;
    text += "frame_count = " + std::to_string(spec.frame_count) + "\n";
    text += "width = " + std::to_string(spec.width) + "\n";
    text += "height = " + std::to_string(spec.height) + "\n";
    text += "descriptor_dim = " + std::to_string(spec.descriptor_dim) + "\n";
    text += "seed = " + std::to_string(spec.seed) + "\n";
    text += "bbox_jitter = " + format_double(spec.bbox_jitter) + "\n";
    text += "drop_prob = " + format_double(spec.drop_prob) + "\n";
    text += "clutter_rate = " + format_double(spec.clutter_rate) + "\n";
    text += "clutter_obj_lo = " + format_double(spec.clutter_obj_lo) + "\n";
    text += "clutter_obj_hi = " + format_double(spec.clutter_obj_hi) + "\n";
    for (const ObjectSpec& object : spec.objects) text += object_to_text(object) + "\n";
    return text;
}

void object_center(const ObjectSpec& object, int frame, double* cx, double* cy) {
    *cx = object.cx0 + object.vx * frame;
    *cy = object.cy0 + object.vy * frame;
    if (object.trajectory == Trajectory::sinusoidal)
        *cy += object.amp *
               std::sin(2.0 * std::numbers::pi * static_cast<double>(frame) /
                        object.period);
}

namespace {

std::vector<double> cluster_center(std::uint64_t desc_seed, int dim) {
    Rng rng(0x9E3779B97F4A7C15ull ^ (desc_seed * 0xBF58476D1CE4E5B9ull));
    std::vector<double> center(dim);
    double norm2 = 0.0;
    for (int i = 0; i < dim; ++i) {
        center[i] = rng.normal(0.0, 1.0);
        norm2 += center[i] * center[i];
    }
    const double norm = std::sqrt(norm2);
    // Unit direction scaled well past the reid radius so clusters are far
    // apart compared with intra-cluster noise.
    for (int i = 0; i < dim; ++i) center[i] = norm > 0 ? center[i] / norm * 4.0 : 4.0;
    return center;
}

BoundingBox centered_box(double cx, double cy, double w, double h) {
    return to_bounding_box(BoxVector{cx, cy, w, h});
}

bool visible(const ObjectSpec& object, int frame, int frame_count) {
    const int last = object.last < 0 ? frame_count - 1 : object.last;
    return frame >= object.first && frame <= last;
}

}  // namespace

SequenceInput generate_scenario(const ScenarioSpec& spec) {
    validate_scenario_spec(spec);
    SequenceInput input;
    input.frame_count = spec.frame_count;
    input.width = spec.width;
    input.height = spec.height;
    input.descriptor_dim = spec.descriptor_dim;
    input.candidates.resize(spec.frame_count);
    input.saliency.resize(spec.frame_count);
    input.ground_truth.resize(spec.frame_count);
    input.has_ground_truth = true;

    std::vector<std::vector<double>> centers;
    centers.reserve(spec.objects.size());
    for (const ObjectSpec& object : spec.objects)
        centers.push_back(cluster_center(object.desc_seed, spec.descriptor_dim));

    Rng rng(spec.seed);
    const std::size_t pixels =
        static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height);
    for (int t = 0; t < spec.frame_count; ++t) {
        SaliencyMap& sal = input.saliency[t];
        sal.width = spec.width;
        sal.height = spec.height;
        sal.values.assign(pixels, 0.0);

        for (std::size_t k = 0; k < spec.objects.size(); ++k) {
            const ObjectSpec& object = spec.objects[k];
            if (!visible(object, t, spec.frame_count)) continue;
            double cx = 0.0, cy = 0.0;
            object_center(object, t, &cx, &cy);
            const BoundingBox true_box = centered_box(cx, cy, object.w, object.h);
            const RleMask true_mask = make_box_mask(spec.width, spec.height, true_box);
            if (mask_empty(true_mask)) continue;
            input.ground_truth[t].instance_masks[static_cast<int>(k) + 1] = true_mask;
            const BoundingBox clipped = clip_box(true_box, spec.width, spec.height);
            for (int y = clipped.y; y < clipped.y + clipped.h; ++y)
                for (int x = clipped.x; x < clipped.x + clipped.w; ++x) {
                    double& value = sal.values[static_cast<std::size_t>(y) * spec.width + x];
                    value = std::max(value, object.saliency);
                }

            if (spec.drop_prob > 0.0 && rng.uniform() < spec.drop_prob) continue;
            const double jcx = cx + rng.normal(0.0, spec.bbox_jitter);
            const double jcy = cy + rng.normal(0.0, spec.bbox_jitter);
            const double jw =
                std::max(1.0, object.w + rng.normal(0.0, spec.bbox_jitter));
            const double jh =
                std::max(1.0, object.h + rng.normal(0.0, spec.bbox_jitter));
            CandidateProposal cand;
            cand.frame_index = t;
            cand.box = centered_box(jcx, jcy, jw, jh);
            cand.mask = make_box_mask(spec.width, spec.height, cand.box);
            if (mask_empty(cand.mask)) continue;
            cand.box = mask_bbox(cand.mask);
            cand.objectness = object.objectness;
            cand.descriptor.resize(spec.descriptor_dim);
            for (int d = 0; d < spec.descriptor_dim; ++d)
                cand.descriptor[d] = centers[k][d] + rng.normal(0.0, object.desc_noise);
            input.candidates[t].push_back(std::move(cand));
        }

        if (spec.clutter_rate > 0.0) {
            const int count = rng.poisson(spec.clutter_rate);
            for (int c = 0; c < count; ++c) {
                const double ccx = rng.uniform(0.0, spec.width);
                const double ccy = rng.uniform(0.0, spec.height);
                const int cw = rng.int_in(3, std::max(4, spec.width / 8));
                const int ch = rng.int_in(3, std::max(4, spec.height / 8));
                CandidateProposal cand;
                cand.frame_index = t;
                cand.box = centered_box(ccx, ccy, cw, ch);
                cand.mask = make_box_mask(spec.width, spec.height, cand.box);
                cand.objectness = rng.uniform(spec.clutter_obj_lo, spec.clutter_obj_hi);
                cand.descriptor.resize(spec.descriptor_dim);
                for (int d = 0; d < spec.descriptor_dim; ++d)
                    cand.descriptor[d] = rng.normal(0.0, 1.0);
                if (mask_empty(cand.mask)) continue;
                cand.box = mask_bbox(cand.mask);
                input.candidates[t].push_back(std::move(cand));
            }
        }
    }
    return input;
}

ScenarioSpec salient_distractor_scenario(int index) {
    ScenarioSpec spec;
    spec.frame_count = 40;
    spec.width = 96;
    spec.height = 64;
    spec.descriptor_dim = 8;
    spec.seed = 101 + static_cast<std::uint64_t>(index);
    spec.bbox_jitter = 0.5;
    spec.drop_prob = 0.04;
    spec.clutter_rate = 0.3;
    spec.clutter_obj_lo = 0.2;
    spec.clutter_obj_hi = 0.65;

    // Two persistent salient movers in their own horizontal bands.
    ObjectSpec main_a;
    main_a.cx0 = 12;
    main_a.cy0 = 10;
    main_a.vx = 1.8;
    main_a.vy = 0.1;
    main_a.w = 14;
    main_a.h = 10;
    main_a.desc_seed = 11;
    main_a.desc_noise = 0.05;
    main_a.saliency = 0.9;
    main_a.objectness = 0.92;
    spec.objects.push_back(main_a);

    ObjectSpec main_b;
    main_b.trajectory = Trajectory::sinusoidal;
    main_b.cx0 = 84;
    main_b.cy0 = 52;
    main_b.vx = -1.6;
    main_b.vy = 0.0;
    main_b.amp = 3.0;
    main_b.period = 20.0;
    main_b.w = 12;
    main_b.h = 9;
    main_b.desc_seed = 12;
    main_b.desc_noise = 0.05;
    main_b.saliency = 0.85;
    main_b.objectness = 0.9;
    spec.objects.push_back(main_b);

    // Transient low-saliency distractors drifting through the middle band.
    // Every distractor dies before the pool locks, so the key-vs-random gap
    // measures retention of the persistent movers alone.
    const int firsts[8] = {0, 0, 1, 2, 0, 3, 4, 2};
    const int lasts[8] = {8, 7, 8, 8, 6, 8, 8, 7};
    const double sal[8] = {0.06, 0.1, 0.08, 0.12, 0.07, 0.15, 0.09, 0.11};
    for (int k = 0; k < 8; ++k) {
        ObjectSpec d;
        d.cx0 = 6.0 + 11.0 * k;
        d.cy0 = 29.0 + (k % 2) * 4.0;
        d.vx = 0.25;  // common drift keeps the band spacing fixed
        d.vy = 0.0;
        d.w = 7;
        d.h = 6;
        d.desc_seed = 20 + static_cast<std::uint64_t>(k);
        d.desc_noise = 0.05;
        d.saliency = sal[k];
        d.objectness = 0.85;
        d.first = firsts[k];
        d.last = lasts[k];
        spec.objects.push_back(d);
    }
    return spec;
}

}  // namespace vostrack
