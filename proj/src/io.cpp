#include "vostrack/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "vostrack/errors.hpp"
#include "vostrack/kv.hpp"

namespace fs = std::filesystem;

namespace vostrack {

namespace {

std::vector<std::uint32_t> parse_rle_counts(const std::string& text,
                                            const std::string& context) {
    std::vector<std::uint32_t> counts;
    if (trim(text).empty()) return counts;
    for (const std::string& part : split(text, ',')) {
        const long value = parse_long(part, context);
        if (value < 0) raise(ErrorCode::malformed_rle, context + ": negative run length");
        counts.push_back(static_cast<std::uint32_t>(value));
    }
    return counts;
}

std::string format_rle_counts(const std::vector<std::uint32_t>& counts) {
    std::string out;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(counts[i]);
    }
    return out;
}

std::string format_descriptor(const std::vector<double>& descriptor) {
    std::string out;
    for (std::size_t i = 0; i < descriptor.size(); ++i) {
        if (i) out += ',';
        out += format_double(descriptor[i]);
    }
    return out;
}

std::vector<std::string> tokenize_ws(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream stream(line);
    std::string token;
    while (stream >> token) tokens.push_back(token);
    return tokens;
}

SaliencyMap load_saliency_map(const std::string& path, int width, int height) {
    const std::string text = read_text_file(path);
    SaliencyMap map;
    map.width = width;
    map.height = height;
    map.values.reserve(static_cast<std::size_t>(width) * height);
    std::istringstream stream(text);
    std::string token;
    while (stream >> token)
        map.values.push_back(parse_double(token, path));
    if (map.values.size() != static_cast<std::size_t>(width) * height)
        raise(ErrorCode::dimension_mismatch,
              path + ": expected " + std::to_string(width * height) + " values, got " +
                  std::to_string(map.values.size()));
    return map;
}

void save_saliency_map(const std::string& path, const SaliencyMap& map) {
    std::string text;
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            if (x) text += ' ';
            text += format_double(map.at(x, y));
        }
        text += '\n';
    }
    write_text_file(path, text);
}

}  // namespace

std::string frame_file_name(const std::string& stem, int frame) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%s_%05d.txt", stem.c_str(), frame);
    return buffer;
}

SequenceInput load_sequence(const std::string& dir) {
    const fs::path base(dir);
    const std::string seq_path = (base / "sequence.txt").string();
    const std::string text = read_text_file(seq_path);

    SequenceInput input;
    int line_no = 0;
    bool header_done = false;
    std::istringstream stream(text);
    std::string line;
    std::map<std::string, long> header;
    const auto finish_header = [&] {
        for (const char* key : {"frame_count", "width", "height", "descriptor_dim"})
            if (!header.count(key))
                raise(ErrorCode::parse, seq_path + ": missing header field " + key);
        input.frame_count = static_cast<int>(header["frame_count"]);
        input.width = static_cast<int>(header["width"]);
        input.height = static_cast<int>(header["height"]);
        input.descriptor_dim = static_cast<int>(header["descriptor_dim"]);
        if (input.frame_count < 0 || input.width <= 0 || input.height <= 0 ||
            input.descriptor_dim <= 0)
            raise(ErrorCode::input, seq_path + ": invalid header values");
        input.candidates.resize(input.frame_count);
        header_done = true;
    };
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::string context = seq_path + ":" + std::to_string(line_no);
        const std::size_t colon = stripped.find(':');
        if (!header_done && colon != std::string::npos &&
            stripped.find(' ') > colon) {
            const std::string key = trim(stripped.substr(0, colon));
            header[key] = parse_long(stripped.substr(colon + 1), context);
            continue;
        }
        if (!header_done) finish_header();
        // frame x y w h objectness source rle descriptor
        const auto tokens = tokenize_ws(stripped);
        if (tokens.size() != 9)
            raise(ErrorCode::parse, context + ": expected 9 fields, got " +
                                        std::to_string(tokens.size()));
        const long frame = parse_long(tokens[0], context);
        if (frame < 0 || frame >= input.frame_count)
            raise(ErrorCode::input, context + ": frame index out of range");
        CandidateProposal cand;
        cand.frame_index = static_cast<int>(frame);
        cand.box.x = static_cast<int>(parse_long(tokens[1], context));
        cand.box.y = static_cast<int>(parse_long(tokens[2], context));
        cand.box.w = static_cast<int>(parse_long(tokens[3], context));
        cand.box.h = static_cast<int>(parse_long(tokens[4], context));
        cand.objectness = parse_double(tokens[5], context);
        if (tokens[6] == "detector") {
            cand.source = Source::detector;
        } else if (tokens[6].rfind("propagated:", 0) == 0) {
            cand.source = Source::propagated;
            cand.source_instance =
                static_cast<int>(parse_long(tokens[6].substr(11), context));
        } else {
            raise(ErrorCode::parse, context + ": unknown source `" + tokens[6] + "`");
        }
        cand.mask.width = input.width;
        cand.mask.height = input.height;
        cand.mask.counts = parse_rle_counts(tokens[7], context);
        try {
            validate_rle(cand.mask);
        } catch (const Error& err) {
            raise(ErrorCode::parse, context + ": " + err.what());
        }
        for (const std::string& part : split(tokens[8], ','))
            cand.descriptor.push_back(parse_double(part, context));
        if (cand.descriptor.size() != static_cast<std::size_t>(input.descriptor_dim))
            raise(ErrorCode::dimension_mismatch,
                  context + ": descriptor has " + std::to_string(cand.descriptor.size()) +
                      " values, expected " + std::to_string(input.descriptor_dim));
        input.candidates[frame].push_back(std::move(cand));
    }
    if (!header_done) finish_header();

    input.saliency.reserve(input.frame_count);
    for (int frame = 0; frame < input.frame_count; ++frame) {
        const std::string path = (base / frame_file_name("saliency", frame)).string();
        if (!fs::exists(path))
            raise(ErrorCode::missing_frame, "missing " + path);
        input.saliency.push_back(load_saliency_map(path, input.width, input.height));
    }

    const fs::path gt_dir = base / "gt";
    if (fs::exists(gt_dir)) {
        input.has_ground_truth = true;
        input.ground_truth.resize(input.frame_count);
        for (int frame = 0; frame < input.frame_count; ++frame) {
            const std::string path = (gt_dir / frame_file_name("labels", frame)).string();
            if (!fs::exists(path))
                raise(ErrorCode::missing_frame, "missing " + path);
            int w = 0, h = 0;
            input.ground_truth[frame] = load_label_frame(path, &w, &h);
            if (w != input.width || h != input.height)
                raise(ErrorCode::dimension_mismatch, path + ": frame size mismatch");
        }
    }
    return input;
}

void save_sequence(const std::string& dir, const SequenceInput& input) {
    fs::create_directories(dir);
    const fs::path base(dir);
    std::string text;
    text += "frame_count: " + std::to_string(input.frame_count) + "\n";
    text += "width: " + std::to_string(input.width) + "\n";
    text += "height: " + std::to_string(input.height) + "\n";
    text += "descriptor_dim: " + std::to_string(input.descriptor_dim) + "\n";
    for (int frame = 0; frame < input.frame_count; ++frame) {
        for (const CandidateProposal& cand : input.candidates[frame]) {
            text += std::to_string(frame);
            text += ' ' + std::to_string(cand.box.x) + ' ' + std::to_string(cand.box.y) +
                    ' ' + std::to_string(cand.box.w) + ' ' + std::to_string(cand.box.h);
            text += ' ' + format_double(cand.objectness);
            if (cand.source == Source::detector)
                text += " detector";
            else
                text += " propagated:" + std::to_string(cand.source_instance);
            text += ' ' + format_rle_counts(cand.mask.counts);
            text += ' ' + format_descriptor(cand.descriptor);
            text += '\n';
        }
    }
    write_text_file((base / "sequence.txt").string(), text);
    for (int frame = 0; frame < input.frame_count; ++frame)
        save_saliency_map((base / frame_file_name("saliency", frame)).string(),
                          input.saliency[frame]);
    if (input.has_ground_truth) {
        fs::create_directories(base / "gt");
        for (int frame = 0; frame < input.frame_count; ++frame)
            save_label_frame((base / "gt" / frame_file_name("labels", frame)).string(),
                             input.width, input.height, input.ground_truth[frame]);
    }
}

GroundTruthFrame load_label_frame(const std::string& path, int* width, int* height) {
    const std::string text = read_text_file(path);
    GroundTruthFrame frame;
    int w = -1, h = -1;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::string context = path + ":" + std::to_string(line_no);
        const std::size_t colon = stripped.find(':');
        if (colon == std::string::npos)
            raise(ErrorCode::parse, context + ": expected `key: value`");
        const std::string key = trim(stripped.substr(0, colon));
        const std::string value = trim(stripped.substr(colon + 1));
        if (key == "width") {
            w = static_cast<int>(parse_long(value, context));
        } else if (key == "height") {
            h = static_cast<int>(parse_long(value, context));
        } else if (key == "instance") {
            if (w <= 0 || h <= 0)
                raise(ErrorCode::parse, context + ": instance before frame size");
            const auto tokens = tokenize_ws(value);
            if (tokens.size() != 2)
                raise(ErrorCode::parse, context + ": expected `instance: <id> <runs>`");
            const int id = static_cast<int>(parse_long(tokens[0], context));
            if (id <= 0) raise(ErrorCode::input, context + ": instance ids are positive");
            if (frame.instance_masks.count(id))
                raise(ErrorCode::input, context + ": duplicate instance id");
            RleMask mask;
            mask.width = w;
            mask.height = h;
            mask.counts = parse_rle_counts(tokens[1], context);
            try {
                validate_rle(mask);
            } catch (const Error& err) {
                raise(ErrorCode::parse, context + ": " + err.what());
            }
            frame.instance_masks.emplace(id, std::move(mask));
        } else {
            raise(ErrorCode::parse, context + ": unknown key `" + key + "`");
        }
    }
    if (w <= 0 || h <= 0)
        raise(ErrorCode::parse, path + ": missing frame size header");
    *width = w;
    *height = h;
    return frame;
}

void save_label_frame(const std::string& path, int width, int height,
                      const GroundTruthFrame& frame) {
    std::string text;
    text += "width: " + std::to_string(width) + "\n";
    text += "height: " + std::to_string(height) + "\n";
    for (const auto& [id, mask] : frame.instance_masks) {
        if (mask_empty(mask)) continue;
        text += "instance: " + std::to_string(id) + ' ' + format_rle_counts(mask.counts) +
                "\n";
    }
    write_text_file(path, text);
}

FrameLabels labels_from_instances(int width, int height, const GroundTruthFrame& frame) {
    FrameLabels labels;
    labels.width = width;
    labels.height = height;
    labels.labels.assign(static_cast<std::size_t>(width) * height, 0);
    for (const auto& [id, mask] : frame.instance_masks) {
        if (mask.width != width || mask.height != height)
            raise(ErrorCode::dimension_mismatch, "instance mask size mismatch");
        const auto grid = rle_decode(mask);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!grid[i]) continue;
            if (labels.labels[i] != 0)
                raise(ErrorCode::input, "instance masks overlap at pixel " +
                                            std::to_string(i));
            labels.labels[i] = id;
        }
    }
    return labels;
}

GroundTruthFrame instances_from_labels(const FrameLabels& labels) {
    std::map<int, std::vector<std::uint8_t>> grids;
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
        const int id = labels.labels[i];
        if (id == 0) continue;
        auto& grid = grids[id];
        if (grid.empty()) grid.assign(labels.labels.size(), 0);
        grid[i] = 1;
    }
    GroundTruthFrame frame;
    for (auto& [id, grid] : grids)
        frame.instance_masks.emplace(id, rle_encode(labels.width, labels.height, grid));
    return frame;
}

void save_result(const std::string& dir, const SequenceResult& result) {
    fs::create_directories(dir);
    const fs::path base(dir);
    for (std::size_t frame = 0; frame < result.labels.size(); ++frame)
        save_label_frame((base / frame_file_name("labels", static_cast<int>(frame))).string(),
                         result.width, result.height,
                         instances_from_labels(result.labels[frame]));
    std::string text;
    text += "# frame instance_id total_score match\n";
    for (const ProvenanceRecord& rec : result.provenance) {
        text += std::to_string(rec.frame) + ' ' + std::to_string(rec.instance_id) + ' ' +
                format_double(rec.total_score) + ' ';
        switch (rec.kind) {
            case MatchKind::detector: text += std::to_string(rec.candidate_index); break;
            case MatchKind::propagated: text += "propagated"; break;
            case MatchKind::spawn:
                text += "spawn:" + std::to_string(rec.candidate_index);
                break;
        }
        text += '\n';
    }
    std::string selected = "# selected_ids:";
    for (int id : result.selected_ids) selected += ' ' + std::to_string(id);
    text += selected + "\n";
    write_text_file((base / "provenance.txt").string(), text);
}

std::vector<FrameLabels> load_label_maps(const std::string& dir) {
    const fs::path base(dir);
    if (!fs::exists(base)) raise(ErrorCode::io, "no such directory: " + dir);
    std::vector<FrameLabels> frames;
    for (int frame = 0;; ++frame) {
        const std::string path = (base / frame_file_name("labels", frame)).string();
        if (!fs::exists(path)) {
            if (frame == 0)
                raise(ErrorCode::missing_frame, "no label files in " + dir);
            break;
        }
        int w = 0, h = 0;
        const GroundTruthFrame gt = load_label_frame(path, &w, &h);
        frames.push_back(labels_from_instances(w, h, gt));
    }
    // Reject gaps: a stray higher-numbered file means a frame went missing.
    int max_seen = -1;
    for (const auto& entry : fs::directory_iterator(base)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("labels_", 0) != 0 || name.size() != 16) continue;
        const int number = std::atoi(name.substr(7, 5).c_str());
        max_seen = std::max(max_seen, number);
    }
    if (max_seen + 1 != static_cast<int>(frames.size()))
        raise(ErrorCode::missing_frame,
              dir + ": label files are not contiguous from frame 0");
    return frames;
}

SequenceResult load_result(const std::string& dir) {
    SequenceResult result;
    result.labels = load_label_maps(dir);
    if (!result.labels.empty()) {
        result.width = result.labels[0].width;
        result.height = result.labels[0].height;
    }
    const std::string prov_path = (fs::path(dir) / "provenance.txt").string();
    if (!fs::exists(prov_path)) return result;
    const std::string text = read_text_file(prov_path);
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::string context = prov_path + ":" + std::to_string(line_no);
        if (stripped[0] == '#') {
            const std::string tag = "# selected_ids:";
            if (stripped.rfind(tag, 0) == 0) {
                for (const auto& token : tokenize_ws(stripped.substr(tag.size())))
                    result.selected_ids.push_back(
                        static_cast<int>(parse_long(token, context)));
            }
            continue;
        }
        const auto tokens = tokenize_ws(stripped);
        if (tokens.size() != 4)
            raise(ErrorCode::parse, context + ": expected 4 fields");
        ProvenanceRecord rec;
        rec.frame = static_cast<int>(parse_long(tokens[0], context));
        rec.instance_id = static_cast<int>(parse_long(tokens[1], context));
        rec.total_score = parse_double(tokens[2], context);
        if (tokens[3] == "propagated") {
            rec.kind = MatchKind::propagated;
        } else if (tokens[3].rfind("spawn:", 0) == 0) {
            rec.kind = MatchKind::spawn;
            rec.candidate_index = static_cast<int>(parse_long(tokens[3].substr(6), context));
        } else {
            rec.kind = MatchKind::detector;
            rec.candidate_index = static_cast<int>(parse_long(tokens[3], context));
        }
        result.provenance.push_back(rec);
    }
    return result;
}

}  // namespace vostrack
