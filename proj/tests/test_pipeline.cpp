#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "testutil.hpp"
#include "topogrow/errors.hpp"
#include "topogrow/pipeline.hpp"

using namespace topogrow;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Desk config that runs in well under a second: target 1 means the placed
/// seed is the only snapshot, no flow iterations.
DatasetConfig tiny_config(const fs::path& out) {
    DatasetConfig cfg;
    cfg.genus_min = 0;
    cfg.genus_max = 0;
    cfg.samples_per_genus = 1;
    cfg.voxel_resolution = 32;
    cfg.target_area_min = cfg.target_area_max = 1.0;
    cfg.noise_octaves.clear();
    cfg.smoothing_sigma = 0.0;
    cfg.point_count = 128;
    cfg.master_seed = 11;
    cfg.output_directory = out;
    return cfg;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Manifest text with the volatile timing field zeroed, for byte comparisons.
std::string canonical_manifest(const fs::path& p) {
    std::ifstream in(p);
    std::string line, out;
    while (std::getline(in, line)) {
        auto doc = nlohmann::json::parse(line);
        doc["wallTimeSeconds"] = 0.0;
        out += doc.dump();
        out += '\n';
    }
    return out;
}

}  // namespace

TEST_CASE("stage seeds separate runs, stages and levels") {
    const auto a = stage_seed(1, 3, 0, Stage::Noise, 2);
    CHECK(a == stage_seed(1, 3, 0, Stage::Noise, 2));
    CHECK(a != stage_seed(1, 3, 0, Stage::Noise, 3));
    CHECK(a != stage_seed(1, 3, 0, Stage::Points, 2));
    CHECK(a != stage_seed(1, 3, 1, Stage::Noise, 2));
    CHECK(a != stage_seed(2, 3, 0, Stage::Noise, 2));
}

TEST_CASE("config json") {
    SUBCASE("empty document keeps defaults") {
        const DatasetConfig cfg = DatasetConfig::from_json(nlohmann::json::object());
        CHECK(cfg.genus_min == 0);
        CHECK(cfg.genus_max == 5);
        CHECK(cfg.voxel_resolution == 64);
        CHECK(cfg.point_count == 8192);
        CHECK(cfg.noise_octaves.size() == 3);
    }
    SUBCASE("round trip") {
        DatasetConfig cfg;
        cfg.genus_min = 2;
        cfg.genus_max = 4;
        cfg.master_seed = 77;
        cfg.growth.inflation_step_length = 0.033;
        const DatasetConfig back = DatasetConfig::from_json(cfg.to_json());
        CHECK(back.genus_min == 2);
        CHECK(back.genus_max == 4);
        CHECK(back.master_seed == 77);
        CHECK(back.growth.inflation_step_length == 0.033);
    }
    SUBCASE("unknown keys are rejected") {
        CHECK_THROWS_AS(DatasetConfig::from_json({{"genusRang", {0, 1}}}), std::invalid_argument);
        CHECK_THROWS_AS(DatasetConfig::from_json({{"growth", {{"alfa", 2.0}}}}),
                        std::invalid_argument);
    }
    SUBCASE("invalid ranges are rejected") {
        CHECK_THROWS_AS(DatasetConfig::from_json({{"genusRange", {3, 1}}}), std::invalid_argument);
        CHECK_THROWS_AS(DatasetConfig::from_json({{"trainTestSplit", 1.0}}), std::invalid_argument);
        CHECK_THROWS_AS(DatasetConfig::from_json({{"samplesPerGenus", 0}}), std::invalid_argument);
    }
}

TEST_CASE("split assignment is deterministic and converges to the fraction") {
    CHECK(assign_split("g00_s000", 0.8) == assign_split("g00_s000", 0.8));
    int train = 0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "g%02d_s%03d", i % 21, i / 21);
        if (assign_split(buf, 0.8) == "train") ++train;
    }
    const double sigma = std::sqrt(n * 0.8 * 0.2);
    CHECK(std::abs(train - n * 0.8) < 5.0 * sigma);
}

TEST_CASE("tiny dataset round trip") {
    const fs::path out = fresh_dir("topogrow_tiny");
    const GenerationResult result = generate_dataset(tiny_config(out));

    REQUIRE(result.failures.empty());
    REQUIRE(result.entries.size() == 1);  // target 1 -> level 0 only
    const SampleManifestEntry& entry = result.entries[0];
    CHECK(entry.sample_id == "g00_s000_c0");
    CHECK(entry.genus_label == 0);
    CHECK(entry.complexity_level == 0);
    CHECK(entry.verification.pass());
    CHECK(entry.verification.actual == BettiTriple{1, 0, 0, 1});
    CHECK(entry.growth_violations == 0);
    CHECK(entry.mesh_chi == 2);
    CHECK((entry.split == "train" || entry.split == "test"));

    SUBCASE("all referenced artifacts exist") {
        CHECK(fs::exists(out / entry.files.mesh));
        CHECK(fs::exists(out / entry.files.voxel));
        CHECK(fs::exists(out / entry.files.point_cloud));
        REQUIRE(entry.files.slices.size() == 5);
        for (const auto& s : entry.files.slices) CHECK(fs::exists(out / s));
        CHECK(fs::exists(out / "samples" / "g00_s000" / "trace.csv"));
    }
    SUBCASE("manifest parses back") {
        const auto entries = load_manifest(result.manifest_path);
        REQUIRE(entries.size() == 1);
        CHECK(entries[0].sample_id == entry.sample_id);
        CHECK(entries[0].verification.actual == entry.verification.actual);
        CHECK(entries[0].rng_subseed == entry.rng_subseed);
    }
    SUBCASE("verify_dataset confirms an untouched dataset") {
        const VerifySummary summary = verify_dataset(result.manifest_path);
        CHECK(summary.total_entries == 1);
        CHECK(summary.verified == 1);
        CHECK(summary.consistency_mismatches == 0);
        CHECK(summary.missing_files == 0);
        CHECK(summary.label_pass_fraction == 1.0);
    }
    SUBCASE("a payload bit flip is flagged") {
        const fs::path voxel_path = out / entry.files.voxel;
        std::fstream f(voxel_path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(16 + 100);
        char byte;
        f.seekg(16 + 100);
        f.get(byte);
        byte = static_cast<char>(byte ^ 0x10);
        f.seekp(16 + 100);
        f.put(byte);
        f.close();
        const VerifySummary summary = verify_dataset(result.manifest_path);
        CHECK(summary.consistency_mismatches == 1);
        REQUIRE(summary.mismatches.size() == 1);
        CHECK(summary.mismatches[0].sample_id == entry.sample_id);
    }
    SUBCASE("missing file is listed, not fatal") {
        fs::remove(out / entry.files.voxel);
        const VerifySummary summary = verify_dataset(result.manifest_path);
        CHECK(summary.missing_files == 1);
        CHECK(summary.verified == 0);
    }
    SUBCASE("export views") {
        const fs::path dir = export_views(result.manifest_path, entry.sample_id);
        for (int s = 0; s < 5; ++s)
            CHECK(fs::exists(dir / ("slice_z" + std::to_string(s) + ".pgm")));
        CHECK(fs::exists(dir / "mesh.obj"));
        CHECK_THROWS_AS(export_views(result.manifest_path, "g99_s999_c9"), std::invalid_argument);
    }
    fs::remove_all(out);
}

TEST_CASE("generation is reproducible byte for byte") {
    const fs::path out_a = fresh_dir("topogrow_det_a");
    const fs::path out_b = fresh_dir("topogrow_det_b");
    DatasetConfig cfg_a = tiny_config(out_a);
    DatasetConfig cfg_b = tiny_config(out_b);
    const GenerationResult a = generate_dataset(cfg_a);
    const GenerationResult b = generate_dataset(cfg_b, 2);  // worker count must not matter

    REQUIRE(a.entries.size() == b.entries.size());
    CHECK(canonical_manifest(a.manifest_path) == canonical_manifest(b.manifest_path));
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(read_file(out_a / a.entries[i].files.voxel) ==
              read_file(out_b / b.entries[i].files.voxel));
        CHECK(read_file(out_a / a.entries[i].files.mesh) ==
              read_file(out_b / b.entries[i].files.mesh));
        CHECK(read_file(out_a / a.entries[i].files.point_cloud) ==
              read_file(out_b / b.entries[i].files.point_cloud));
    }
    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

TEST_CASE("a short grown run produces six verified levels per sample") {
    const fs::path out = fresh_dir("topogrow_grown");
    DatasetConfig cfg = tiny_config(out);
    cfg.genus_min = cfg.genus_max = 1;
    cfg.target_area_min = cfg.target_area_max = 1.4;
    cfg.seed_params.subdivision = 1;
    cfg.growth.inflation_step_length = 0.08;
    cfg.growth.descent_step_length = 0.08;
    cfg.growth.max_iterations = 500;
    // 32^3 voxels are coarse; keep surface wrinkles above the voxel scale
    cfg.displacement_intensity = 0.15;
    cfg.master_seed = 3;

    const GenerationResult result = generate_dataset(cfg, 2);
    REQUIRE(result.failures.empty());
    REQUIRE(result.entries.size() == 6);
    for (const auto& entry : result.entries) {
        CAPTURE(entry.sample_id);
        CHECK(entry.mesh_chi == 0);  // genus 1
        CHECK(entry.growth_violations == 0);
        CHECK(entry.verification.actual.beta0 == 1);
        CHECK(entry.verification.actual.beta1 == 1);
        CHECK(entry.verification.actual.beta2 == 0);
    }
    double prev = 0.0;
    for (const auto& entry : result.entries) {
        CHECK(entry.area_ratio >= prev);
        prev = entry.area_ratio;
    }
    CHECK(result.entries.back().area_ratio == doctest::Approx(1.4).epsilon(0.02));
    fs::remove_all(out);
}

TEST_CASE("wfc environments plug into the pipeline config") {
    const auto doc = nlohmann::json::parse(R"({
        "environment": {
            "type": "wfc",
            "gridDims": [3, 3, 3],
            "cellSize": 6.0,
            "tileset": {
                "tiles": [
                    {"name": "empty"},
                    {"name": "pillar", "boxes": [[[0.45, 0.45, 0.0], [0.55, 0.55, 1.0]]]}
                ],
                "rules": [
                    {"from": "empty", "to": "empty", "axis": "x"},
                    {"from": "empty", "to": "empty", "axis": "y"},
                    {"from": "empty", "to": "empty", "axis": "z"},
                    {"from": "empty", "to": "pillar", "axis": "x"},
                    {"from": "pillar", "to": "empty", "axis": "x"},
                    {"from": "empty", "to": "pillar", "axis": "y"},
                    {"from": "pillar", "to": "empty", "axis": "y"},
                    {"from": "empty", "to": "pillar", "axis": "z"},
                    {"from": "pillar", "to": "empty", "axis": "z"}
                ]
            }
        }
    })");
    const DatasetConfig cfg = DatasetConfig::from_json(doc);
    REQUIRE(cfg.environment.type == EnvironmentConfig::Type::Wfc);
    const Environment env = cfg.environment.build(5);
    CHECK(env.cube_side == doctest::Approx(18.0));
    for (const Box& b : env.boxes) {
        CHECK(b.max.x - b.min.x == doctest::Approx(0.6));
        CHECK(b.max.z - b.min.z == doctest::Approx(6.0));
    }
}

TEST_CASE("unwritable output directory fails early") {
    DatasetConfig cfg = tiny_config("/proc/topogrow_nope");
    CHECK_THROWS_AS(generate_dataset(cfg), IoError);
}
