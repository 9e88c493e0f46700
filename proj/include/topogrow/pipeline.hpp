#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "topogrow/envgen.hpp"
#include "topogrow/growth.hpp"
#include "topogrow/mesh.hpp"
#include "topogrow/rasterize.hpp"
#include "topogrow/topology.hpp"
#include "topogrow/wfc.hpp"

namespace topogrow {

struct EnvironmentConfig {
    enum class Type { RandomGrid, Wfc };
    Type type = Type::RandomGrid;
    RandomGridSpec grid;
    // WFC variant
    GridDims wfc_dims{4, 4, 4};
    double wfc_cell_size = 5.0;
    int wfc_max_restarts = 32;
    std::optional<TileSet> wfc_tiles;

    Environment build(std::uint64_t rng_seed) const;
};

struct DatasetConfig {
    int genus_min = 0;
    int genus_max = 5;
    int samples_per_genus = 1;
    int voxel_resolution = 64;
    double target_area_min = 3.0;
    double target_area_max = 5.0;
    GrowthConfig growth;  ///< target_area_multiplier is drawn per run from the range above
    SeedParams seed_params;
    EnvironmentConfig environment;
    std::vector<NoiseOctaveSpec> noise_octaves = default_noise_octaves();
    double smoothing_sigma = 0.25;
    double displacement_intensity = 0.5;
    double displacement_feature_size = 0.1;
    int point_count = 8192;
    std::uint64_t master_seed = 1;
    double train_test_split = 0.8;
    std::filesystem::path output_directory;

    void validate() const;
    nlohmann::json to_json() const;
    static DatasetConfig from_json(const nlohmann::json& doc);
    static DatasetConfig load(const std::filesystem::path& path);
};

struct SampleFilePaths {
    std::string mesh;
    std::string voxel;
    std::string point_cloud;
    std::vector<std::string> slices;
};

struct SampleManifestEntry {
    std::string sample_id;
    int genus_label = 0;
    int complexity_level = 0;
    std::uint64_t rng_subseed = 0;
    double area_ratio = 1.0;
    std::int64_t mesh_chi = 0;
    int growth_violations = 0;
    SampleFilePaths files;
    VerificationReport verification;
    std::string split;  // "train" or "test"
    double wall_time_seconds = 0.0;

    nlohmann::json to_json() const;
    static SampleManifestEntry from_json(const nlohmann::json& doc);
};

struct FailedRun {
    std::string run_id;
    int genus = 0;
    std::string reason;
};

struct GenerationResult {
    std::vector<SampleManifestEntry> entries;
    std::vector<FailedRun> failures;
    std::vector<int> failed_classes;  ///< genus values with zero successful runs
    std::filesystem::path manifest_path;
};

/// Runs the full per-sample pipeline (seed, environment, placement, growth,
/// displacement, voxelize, noise, smooth, verify, point cloud, export) for
/// every (genus, sample index), with `jobs` samples in flight. Failed samples
/// are logged and skipped. Writes manifest.jsonl sorted by (genus, index,
/// level); every artifact is a pure function of (config, genus, index).
GenerationResult generate_dataset(const DatasetConfig& config, int jobs = 1,
                                  std::ostream* log = nullptr);

struct VerifyMismatch {
    std::string sample_id;
    std::string kind;  // "missing-file" | "betti-mismatch"
};

struct VerifySummary {
    std::int64_t total_entries = 0;
    std::int64_t verified = 0;
    std::int64_t missing_files = 0;
    std::int64_t consistency_mismatches = 0;
    double label_pass_fraction = 0.0;  ///< among verified entries
    std::vector<VerifyMismatch> mismatches;
    bool consistent() const { return consistency_mismatches == 0 && missing_files == 0; }
};

/// Recomputes Betti numbers for every referenced voxel file and compares them
/// with the stored reports. Missing files are listed, not fatal.
VerifySummary verify_dataset(const std::filesystem::path& manifest_path);

std::vector<SampleManifestEntry> load_manifest(const std::filesystem::path& manifest_path);

/// Writes 5 evenly spaced z slices plus the snapshot mesh for one sample into
/// <manifest dir>/views/<sampleId>/ (or `out_dir` when given).
std::filesystem::path export_views(const std::filesystem::path& manifest_path,
                                   const std::string& sample_id,
                                   std::optional<std::filesystem::path> out_dir = std::nullopt);

/// Stage stream derivation, shared by the pipeline and by tests that re-run
/// single stages in isolation.
enum class Stage : std::uint64_t {
    Environment = 1,
    Placement = 2,
    Growth = 3,
    Displacement = 4,
    Noise = 5,
    Points = 6,
};
std::uint64_t stage_seed(std::uint64_t master_seed, int genus, int sample_index, Stage stage,
                         int level = 0);

/// Deterministic hash-based split: all complexity levels of one grown run get
/// the same tag, and adding runs never reshuffles existing membership.
std::string assign_split(const std::string& run_id, double train_fraction);

}  // namespace topogrow
