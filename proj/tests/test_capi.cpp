#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "vostrack.h"

// The shared library is the only dependency here; staging goes through the
// standard filesystem so the test exercises exactly what an embedder sees.
namespace {

struct ScopedDir {
    std::filesystem::path root;

    explicit ScopedDir(const std::string& tag) {
        root = std::filesystem::temp_directory_path() /
               ("vostrack-capi-" + tag + "-" + std::to_string(::getpid()));
        std::filesystem::remove_all(root);
        std::filesystem::create_directories(root);
    }
    ~ScopedDir() {
        std::error_code ec;
        std::filesystem::remove_all(root, ec);
    }
    std::string sub(const std::string& name) const { return (root / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    REQUIRE(out.good());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

const char* kScenarioSpec =
    "frame_count = 6\n"
    "width = 48\n"
    "height = 32\n"
    "descriptor_dim = 4\n"
    "seed = 9\n"
    "object = cx0=10, cy0=10, vx=1, w=8, h=6, desc_seed=3, saliency=0.9,"
    " objectness=0.9\n"
    "object = cx0=36, cy0=22, vx=-1, w=8, h=6, desc_seed=4, saliency=0.6,"
    " objectness=0.9\n";

}  // namespace

TEST_CASE("version and status names are stable strings") {
    CHECK(std::string(vostrack_version()) == "0.1.0");
    CHECK(std::string(vostrack_status_name(VOSTRACK_OK)) == "ok");
    CHECK(std::string(vostrack_status_name(VOSTRACK_ERR_CONFIG)) == "config");
    CHECK(std::string(vostrack_status_name(VOSTRACK_ERR_MALFORMED_RLE)) ==
          "malformed_rle");
    CHECK(std::string(vostrack_status_name(VOSTRACK_ERR_UNKNOWN)) == "unknown");
}

TEST_CASE("failures set a readable last error") {
    vostrack_config* config = nullptr;
    REQUIRE(vostrack_config_default(&config) == VOSTRACK_OK);
    CHECK(vostrack_config_set(config, "no_such_key", "1") == VOSTRACK_ERR_CONFIG);
    CHECK(std::string(vostrack_last_error()).find("no_such_key") != std::string::npos);
    CHECK(vostrack_config_set(config, "tau1", "brisk") == VOSTRACK_ERR_PARSE);
    CHECK(vostrack_config_set(config, "K", "8") == VOSTRACK_OK);
    vostrack_config_free(config);

    vostrack_sequence* sequence = nullptr;
    CHECK(vostrack_sequence_load("/no/such/dir", &sequence) == VOSTRACK_ERR_IO);
    CHECK(sequence == nullptr);
    CHECK(std::string(vostrack_last_error()).empty() == false);

    // Null arguments are rejected, not dereferenced.
    CHECK(vostrack_sequence_load(nullptr, &sequence) != VOSTRACK_OK);
    CHECK(vostrack_config_default(nullptr) != VOSTRACK_OK);
}

TEST_CASE("generate, track, evaluate, render and search through the C surface") {
    ScopedDir dir("flow");
    const std::string spec_path = dir.sub("scene.spec");
    const std::string seq_dir = dir.sub("seq");
    write_file(spec_path, kScenarioSpec);

    REQUIRE(vostrack_synth_generate(spec_path.c_str(), seq_dir.c_str()) == VOSTRACK_OK);

    vostrack_sequence* sequence = nullptr;
    REQUIRE(vostrack_sequence_load(seq_dir.c_str(), &sequence) == VOSTRACK_OK);
    CHECK(vostrack_sequence_frame_count(sequence) == 6);
    CHECK(vostrack_sequence_width(sequence) == 48);
    CHECK(vostrack_sequence_height(sequence) == 32);

    vostrack_config* config = nullptr;
    REQUIRE(vostrack_config_default(&config) == VOSTRACK_OK);
    REQUIRE(vostrack_config_set(config, "M", "4") == VOSTRACK_OK);
    REQUIRE(vostrack_config_set(config, "K", "2") == VOSTRACK_OK);

    vostrack_result* result = nullptr;
    REQUIRE(vostrack_run(sequence, config, &result) == VOSTRACK_OK);

    const std::string pred_dir = dir.sub("pred");
    REQUIRE(vostrack_result_save(result, pred_dir.c_str()) == VOSTRACK_OK);

    vostrack_result* reloaded = nullptr;
    REQUIRE(vostrack_result_load(pred_dir.c_str(), &reloaded) == VOSTRACK_OK);

    vostrack_report report{};
    const std::string gt_dir = (std::filesystem::path(seq_dir) / "gt").string();
    REQUIRE(vostrack_evaluate_dirs(pred_dir.c_str(), gt_dir.c_str(), 0.0, &report) ==
            VOSTRACK_OK);
    CHECK(report.j_mean >= 0.0);
    CHECK(report.j_mean <= 1.0);
    CHECK(report.global_mean == (report.j_mean + report.f_mean) / 2.0);
    // Clean synthetic boxes track near-perfectly.
    CHECK(report.global_mean > 0.9);

    const std::string report_path = dir.sub("report.txt");
    REQUIRE(vostrack_report_save(&report, report_path.c_str()) == VOSTRACK_OK);
    CHECK(slurp(report_path).find("global_mean") != std::string::npos);

    const std::string frame_path = dir.sub("frame3.ppm");
    REQUIRE(vostrack_render(sequence, result, 3, frame_path.c_str()) == VOSTRACK_OK);
    const std::string ppm = slurp(frame_path);
    const std::string header = "P6\n48 32\n255\n";
    CHECK(ppm.rfind(header, 0) == 0);
    CHECK(ppm.size() == header.size() + 48u * 32u * 3u);
    CHECK(vostrack_render(sequence, result, 99, frame_path.c_str()) ==
          VOSTRACK_ERR_INPUT);

    // Search over a copy of the sequence as a one-scenario corpus.
    const std::string corpus = dir.sub("corpus");
    std::filesystem::create_directories(corpus);
    REQUIRE(vostrack_synth_generate(
                spec_path.c_str(),
                (std::filesystem::path(corpus) / "scene").string().c_str()) ==
            VOSTRACK_OK);
    const std::string space_path = dir.sub("space.txt");
    write_file(space_path,
               "tau1 = 0.3:0.7\n"
               "tau2 = 0.1:0.4\n"
               "trials = 3\n"
               "seed = 11\n");
    const std::string log_path = dir.sub("search.log");
    double best = -1.0;
    REQUIRE(vostrack_search_run(space_path.c_str(), corpus.c_str(), 0, "17",
                                log_path.c_str(), &best) == VOSTRACK_OK);
    CHECK(best >= 0.0);
    CHECK(best <= 1.0);
    const std::string log = slurp(log_path);
    CHECK(log.find("best_score") != std::string::npos);
    CHECK(log.find("\n0 ") != std::string::npos);
    CHECK(log.find("\n2 ") != std::string::npos);

    vostrack_result_free(reloaded);
    vostrack_result_free(result);
    vostrack_config_free(config);
    vostrack_sequence_free(sequence);
}
