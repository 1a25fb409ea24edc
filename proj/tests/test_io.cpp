#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "doctest.h"
#include "op_examples.hpp"
#include "test_helpers.hpp"
#include "vostrack/errors.hpp"
#include "vostrack/io.hpp"
#include "vostrack/kv.hpp"
#include "vostrack/rng.hpp"
#include "vostrack/synth.hpp"

using namespace vostrack;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::io;
}

bool same_candidate(const CandidateProposal& a, const CandidateProposal& b) {
    return a.frame_index == b.frame_index && a.box.x == b.box.x && a.box.y == b.box.y &&
           a.box.w == b.box.w && a.box.h == b.box.h && a.objectness == b.objectness &&
           a.descriptor == b.descriptor && a.mask == b.mask && a.source == b.source &&
           (a.source != Source::propagated || a.source_instance == b.source_instance);
}

bool same_input(const SequenceInput& a, const SequenceInput& b) {
    if (a.width != b.width || a.height != b.height || a.frame_count != b.frame_count ||
        a.descriptor_dim != b.descriptor_dim || a.has_ground_truth != b.has_ground_truth)
        return false;
    for (int t = 0; t < a.frame_count; ++t) {
        const auto& ca = a.candidates[static_cast<std::size_t>(t)];
        const auto& cb = b.candidates[static_cast<std::size_t>(t)];
        if (ca.size() != cb.size()) return false;
        for (std::size_t i = 0; i < ca.size(); ++i)
            if (!same_candidate(ca[i], cb[i])) return false;
        if (a.saliency[static_cast<std::size_t>(t)].values !=
            b.saliency[static_cast<std::size_t>(t)].values)
            return false;
        if (a.has_ground_truth && a.ground_truth[static_cast<std::size_t>(t)].instance_masks !=
                                      b.ground_truth[static_cast<std::size_t>(t)].instance_masks)
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("io documented examples") {
    for (const std::string& failure : opx::run_module("io")) FAIL_CHECK(failure);
}

TEST_CASE("format_double round trips random values") {
    Rng rng(2001);
    std::vector<double> values = {0.0,   1.0,       -1.0,   0.5,    0.1,
                                  1e-12, 1e300,     -1e300, 1.0015, 1e-300,
                                  2.0,   1.0 / 3.0, 3.141592653589793};
    for (int iter = 0; iter < 1000; ++iter) {
        switch (iter % 4) {
            case 0: values.push_back(rng.uniform()); break;
            case 1: values.push_back(rng.uniform(-1e6, 1e6)); break;
            case 2: values.push_back(rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(-30, 30))); break;
            default: values.push_back(std::floor(rng.uniform(-1e9, 1e9))); break;
        }
    }
    for (double value : values) {
        const std::string text = format_double(value);
        const double back = std::strtod(text.c_str(), nullptr);
        CHECK(back == value);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("kv parsing skips comments and trims whitespace") {
    const auto entries = parse_kv_text("# header\n\n  a =  1 \nb= x y \n", "inline");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].key == "a");
    CHECK(entries[0].value == "1");
    CHECK(entries[0].line == 3);
    CHECK(entries[1].key == "b");
    CHECK(entries[1].value == "x y");
    CHECK(entries[1].line == 4);
}

TEST_CASE("kv parsing reports the offending line") {
    try {
        parse_kv_text("a = 1\nnot a pair\n", "cfg");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parse);
        CHECK(std::string(e.what()).find("cfg") != std::string::npos);
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("numeric parsing rejects trailing garbage") {
    CHECK(parse_double("0.25", "ctx") == 0.25);
    CHECK(parse_long("-3", "ctx") == -3);
    CHECK(code_of([] { parse_double("1.5x", "ctx"); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_double("", "ctx"); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_long("2.5", "ctx"); }) == ErrorCode::parse);
}

TEST_CASE("split keeps empty fields") {
    CHECK(split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
    CHECK(split("", ',') == std::vector<std::string>{""});
    CHECK(split("x,", ',') == std::vector<std::string>{"x", ""});
    CHECK(trim("  padded \t") == "padded");
    CHECK(trim("") == "");
}

TEST_CASE("frame file names are zero padded") {
    CHECK(frame_file_name("labels", 0) == "labels_00000.txt");
    CHECK(frame_file_name("labels", 123) == "labels_00123.txt");
    CHECK(frame_file_name("saliency", 99999) == "saliency_99999.txt");
}

TEST_CASE("label frame round trip") {
    Rng rng(2002);
    for (int iter = 0; iter < 50; ++iter) {
        const int width = 4 + static_cast<int>(rng.below(20));
        const int height = 4 + static_cast<int>(rng.below(12));
        FrameLabels labels;
        labels.width = width;
        labels.height = height;
        labels.labels.resize(static_cast<std::size_t>(width) * height);
        for (int& id : labels.labels) id = static_cast<int>(rng.below(4));  // 0..3

        const GroundTruthFrame frame = instances_from_labels(labels);
        CHECK(testutil::same_labels(labels_from_instances(width, height, frame), labels));

        testutil::TempDir dir("io-labelframe");
        const std::string path = dir.sub("labels_00000.txt");
        save_label_frame(path, width, height, frame);
        int got_w = 0;
        int got_h = 0;
        const GroundTruthFrame loaded = load_label_frame(path, &got_w, &got_h);
        CHECK(got_w == width);
        CHECK(got_h == height);
        CHECK(loaded.instance_masks == frame.instance_masks);
    }
}

TEST_CASE("overlapping instance masks are rejected") {
    GroundTruthFrame frame;
    frame.instance_masks[1] = testutil::mask_of(4, 2, {0, 1, 2});
    frame.instance_masks[2] = testutil::mask_of(4, 2, {2, 3});
    CHECK(code_of([&] { labels_from_instances(4, 2, frame); }) == ErrorCode::input);
}

TEST_CASE("result directory round trip") {
    SequenceResult result;
    result.width = 6;
    result.height = 4;
    for (int t = 0; t < 3; ++t) {
        FrameLabels labels;
        labels.width = 6;
        labels.height = 4;
        labels.labels.assign(24, 0);
        labels.labels[static_cast<std::size_t>(t)] = 2;
        labels.labels[23 - static_cast<std::size_t>(t)] = 7;
        result.labels.push_back(labels);
    }
    result.provenance.push_back({0, 2, 0.9, MatchKind::spawn, 0});
    result.provenance.push_back({1, 2, 0.1 + 0.2, MatchKind::detector, 1});
    // Propagated matches carry no input candidate index.
    result.provenance.push_back({2, 7, 1.0 / 3.0, MatchKind::propagated, -1});
    result.selected_ids = {2, 7};

    testutil::TempDir dir("io-result");
    save_result(dir.str(), result);
    const SequenceResult loaded = load_result(dir.str());
    CHECK(testutil::same_result(result, loaded));
}

TEST_CASE("label map loading requires contiguous frames") {
    testutil::TempDir dir("io-labelmaps");
    GroundTruthFrame frame;
    frame.instance_masks[1] = testutil::mask_of(4, 2, {0});
    save_label_frame(dir.sub("labels_00000.txt"), 4, 2, frame);
    save_label_frame(dir.sub("labels_00002.txt"), 4, 2, frame);  // gap at 1
    CHECK(code_of([&] { load_label_maps(dir.str()); }) == ErrorCode::missing_frame);

    testutil::TempDir empty("io-empty");
    CHECK(code_of([&] { load_label_maps(empty.str()); }) == ErrorCode::missing_frame);
    CHECK(code_of([&] { load_label_maps(empty.sub("absent")); }) == ErrorCode::io);

    save_label_frame(dir.sub("labels_00001.txt"), 4, 2, frame);
    const auto maps = load_label_maps(dir.str());
    CHECK(maps.size() == 3);
    CHECK(maps[0].at(0, 0) == 1);
}

TEST_CASE("sequence loading validates sizes and sources") {
    testutil::TempDir dir("io-badseq");
    const auto write_seq = [&](const std::string& body) {
        write_text_file(dir.sub("sequence.txt"),
                        "frame_count: 1\nwidth: 4\nheight: 2\ndescriptor_dim: 2\n" + body);
    };
    write_text_file(dir.sub("saliency_00000.txt"), "0 0 0 0\n0 0 0 0\n");

    write_seq("0 0 0 2 2 0.9 teleported 0,2,2,2,2 0.1,0.2\n");
    CHECK(code_of([&] { load_sequence(dir.str()); }) == ErrorCode::parse);

    write_seq("0 0 0 2 2 0.9 detector 0,2,2,2,2 0.1,0.2,0.3\n");
    CHECK(code_of([&] { load_sequence(dir.str()); }) == ErrorCode::dimension_mismatch);

    write_seq("3 0 0 2 2 0.9 detector 0,2,2,2,2 0.1,0.2\n");
    CHECK(code_of([&] { load_sequence(dir.str()); }) == ErrorCode::input);

    write_seq("0 0 0 2 2 0.9 detector 0,2,2,2,2\n");
    CHECK(code_of([&] { load_sequence(dir.str()); }) == ErrorCode::parse);

    // Saliency grid narrower than the declared frame.
    write_seq("0 0 0 2 2 0.9 detector 0,2,2,2,2 0.1,0.2\n");
    write_text_file(dir.sub("saliency_00000.txt"), "0 0 0\n0 0 0\n");
    CHECK(code_of([&] { load_sequence(dir.str()); }) == ErrorCode::dimension_mismatch);

    // Missing saliency frame.
    std::filesystem::remove(dir.sub("saliency_00000.txt"));
    CHECK(code_of([&] { load_sequence(dir.str()); }) == ErrorCode::missing_frame);

    CHECK(code_of([&] { load_sequence(dir.sub("nowhere")); }) == ErrorCode::io);
}

TEST_CASE("generated sequences survive a save and load") {
    ScenarioSpec spec = testutil::two_object_spec(6);
    spec.bbox_jitter = 0.7;
    spec.drop_prob = 0.1;
    spec.clutter_rate = 1.5;
    const SequenceInput input = generate_scenario(spec);

    testutil::TempDir dir("io-seqround");
    save_sequence(dir.str(), input);
    const SequenceInput loaded = load_sequence(dir.str());
    CHECK(same_input(input, loaded));
}
