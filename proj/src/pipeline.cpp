#include "topogrow/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "topogrow/errors.hpp"
#include "topogrow/intersect.hpp"
#include "topogrow/mesh_io.hpp"
#include "topogrow/rng.hpp"

namespace topogrow {

namespace fs = std::filesystem;

std::uint64_t stage_seed(std::uint64_t master_seed, int genus, int sample_index, Stage stage,
                         int level) {
    return hash_mix({master_seed, static_cast<std::uint64_t>(genus),
                     static_cast<std::uint64_t>(sample_index), static_cast<std::uint64_t>(stage),
                     static_cast<std::uint64_t>(level)});
}

std::string assign_split(const std::string& run_id, double train_fraction) {
    // FNV alone is visibly biased on short, similar ids; run it through the
    // stream mixer before mapping to [0, 1).
    const double u = static_cast<double>(hash_mix({hash_string(run_id)})) * 0x1.0p-64;
    return u < train_fraction ? "train" : "test";
}

Environment EnvironmentConfig::build(std::uint64_t rng_seed) const {
    if (type == Type::RandomGrid) return random_grid_environment(grid, rng_seed);
    if (!wfc_tiles) throw std::invalid_argument("wfc environment needs a tile set");
    return wfc_environment(wfc_dims, *wfc_tiles, wfc_cell_size, rng_seed, wfc_max_restarts);
}

void DatasetConfig::validate() const {
    if (genus_min < 0 || genus_max < genus_min)
        throw std::invalid_argument("genus range must satisfy 0 <= min <= max");
    if (genus_max > seed_params.max_genus)
        throw std::invalid_argument("genus range exceeds the seed genus ceiling");
    if (samples_per_genus < 1) throw std::invalid_argument("samplesPerGenus must be positive");
    if (voxel_resolution < 8) throw std::invalid_argument("voxelResolution must be at least 8");
    if (target_area_min < 1.0 || target_area_max < target_area_min)
        throw std::invalid_argument("target area range must satisfy 1 <= min <= max");
    if (point_count < 1) throw std::invalid_argument("pointCount must be positive");
    if (!(train_test_split > 0.0 && train_test_split < 1.0))
        throw std::invalid_argument("trainTestSplit must lie strictly between 0 and 1");
    if (smoothing_sigma < 0.0) throw std::invalid_argument("sigma must be nonnegative");
    if (displacement_intensity < 0.0 || displacement_feature_size <= 0.0)
        throw std::invalid_argument("invalid displacement parameters");
    GrowthConfig probe = growth;
    probe.target_area_multiplier = target_area_max;
    probe.validate();
}

namespace {

void check_keys(const nlohmann::json& doc, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end())
            throw std::invalid_argument("unknown key '" + key + "' in " + where);
    }
}

NoiseOctaveSpec octave_from_json(const nlohmann::json& doc) {
    check_keys(doc, {"scale", "threshold", "mode"}, "noise octave");
    NoiseOctaveSpec spec;
    spec.scale = doc.at("scale").get<double>();
    spec.threshold = doc.at("threshold").get<double>();
    const std::string mode = doc.at("mode").get<std::string>();
    if (mode == "add")
        spec.mode = NoiseOctaveSpec::Mode::Add;
    else if (mode == "subtract")
        spec.mode = NoiseOctaveSpec::Mode::Subtract;
    else
        throw std::invalid_argument("octave mode must be 'add' or 'subtract'");
    return spec;
}

nlohmann::json octave_to_json(const NoiseOctaveSpec& spec) {
    return {{"scale", spec.scale},
            {"threshold", spec.threshold},
            {"mode", spec.mode == NoiseOctaveSpec::Mode::Add ? "add" : "subtract"}};
}

}  // namespace

nlohmann::json DatasetConfig::to_json() const {
    nlohmann::json env;
    if (environment.type == EnvironmentConfig::Type::RandomGrid) {
        env = {{"type", "randomGrid"},
               {"cubeSide", environment.grid.cube_side},
               {"chunksPerAxis", environment.grid.chunks_per_axis},
               {"subchunkSide", environment.grid.subchunk_side},
               {"axisResolutionRange",
                {environment.grid.axis_resolution_min, environment.grid.axis_resolution_max}},
               {"connectionProbabilityRange",
                {environment.grid.connection_probability_min,
                 environment.grid.connection_probability_max}},
               {"edgeThicknessRange",
                {environment.grid.edge_thickness_min, environment.grid.edge_thickness_max}}};
    } else {
        env = {{"type", "wfc"},
               {"gridDims",
                {environment.wfc_dims.nx, environment.wfc_dims.ny, environment.wfc_dims.nz}},
               {"cellSize", environment.wfc_cell_size},
               {"maxRestarts", environment.wfc_max_restarts}};
    }
    nlohmann::json octaves = nlohmann::json::array();
    for (const auto& o : noise_octaves) octaves.push_back(octave_to_json(o));
    return {
        {"genusRange", {genus_min, genus_max}},
        {"samplesPerGenus", samples_per_genus},
        {"voxelResolution", voxel_resolution},
        {"growth",
         {{"targetAreaRange", {target_area_min, target_area_max}},
          {"inflationStepLength", growth.inflation_step_length},
          {"descentStepLength", growth.descent_step_length},
          {"alpha", growth.alpha},
          {"beta", growth.beta},
          {"environmentPenaltyWeight", growth.environment_penalty_weight},
          {"environmentMargin", growth.environment_margin},
          {"maxIterations", growth.max_iterations},
          {"snapshotFractions", growth.snapshot_fractions},
          {"cutoffFactor", growth.cutoff_factor},
          {"smoothGradient", growth.smooth_gradient},
          {"contactFloorFactor", growth.contact_floor_factor},
          {"fairingWeight", growth.fairing_weight}}},
        {"seed",
         {{"cellSize", seed_params.cell_size},
          {"holeCells", seed_params.hole_cells},
          {"wallCells", seed_params.wall_cells},
          {"thicknessCells", seed_params.thickness_cells},
          {"subdivision", seed_params.subdivision},
          {"maxGenus", seed_params.max_genus}}},
        {"environment", env},
        {"noise", {{"octaves", octaves}, {"sigma", smoothing_sigma}}},
        {"displacement",
         {{"intensity", displacement_intensity}, {"featureSize", displacement_feature_size}}},
        {"pointCount", point_count},
        {"masterSeed", master_seed},
        {"trainTestSplit", train_test_split},
    };
}

DatasetConfig DatasetConfig::from_json(const nlohmann::json& doc) {
    check_keys(doc,
               {"genusRange", "samplesPerGenus", "voxelResolution", "growth", "seed",
                "environment", "noise", "displacement", "pointCount", "masterSeed",
                "trainTestSplit"},
               "config");
    DatasetConfig cfg;
    if (doc.contains("genusRange")) {
        cfg.genus_min = doc.at("genusRange").at(0).get<int>();
        cfg.genus_max = doc.at("genusRange").at(1).get<int>();
    }
    if (doc.contains("samplesPerGenus")) cfg.samples_per_genus = doc.at("samplesPerGenus").get<int>();
    if (doc.contains("voxelResolution")) cfg.voxel_resolution = doc.at("voxelResolution").get<int>();
    if (doc.contains("growth")) {
        const auto& g = doc.at("growth");
        check_keys(g,
                   {"targetAreaRange", "inflationStepLength", "descentStepLength", "alpha", "beta",
                    "environmentPenaltyWeight", "environmentMargin", "maxIterations",
                    "snapshotFractions", "cutoffFactor", "smoothGradient",
                    "contactFloorFactor", "fairingWeight"},
                   "growth");
        if (g.contains("targetAreaRange")) {
            cfg.target_area_min = g.at("targetAreaRange").at(0).get<double>();
            cfg.target_area_max = g.at("targetAreaRange").at(1).get<double>();
        }
        if (g.contains("inflationStepLength"))
            cfg.growth.inflation_step_length = g.at("inflationStepLength").get<double>();
        if (g.contains("descentStepLength"))
            cfg.growth.descent_step_length = g.at("descentStepLength").get<double>();
        if (g.contains("alpha")) cfg.growth.alpha = g.at("alpha").get<double>();
        if (g.contains("beta")) cfg.growth.beta = g.at("beta").get<double>();
        if (g.contains("environmentPenaltyWeight"))
            cfg.growth.environment_penalty_weight = g.at("environmentPenaltyWeight").get<double>();
        if (g.contains("environmentMargin"))
            cfg.growth.environment_margin = g.at("environmentMargin").get<double>();
        if (g.contains("maxIterations")) cfg.growth.max_iterations = g.at("maxIterations").get<int>();
        if (g.contains("snapshotFractions"))
            cfg.growth.snapshot_fractions = g.at("snapshotFractions").get<std::vector<double>>();
        if (g.contains("cutoffFactor")) cfg.growth.cutoff_factor = g.at("cutoffFactor").get<double>();
        if (g.contains("smoothGradient")) cfg.growth.smooth_gradient = g.at("smoothGradient").get<bool>();
        if (g.contains("contactFloorFactor"))
            cfg.growth.contact_floor_factor = g.at("contactFloorFactor").get<double>();
        if (g.contains("fairingWeight"))
            cfg.growth.fairing_weight = g.at("fairingWeight").get<double>();
    }
    if (doc.contains("seed")) {
        const auto& s = doc.at("seed");
        check_keys(s, {"cellSize", "holeCells", "wallCells", "thicknessCells", "subdivision",
                       "maxGenus"},
                   "seed");
        if (s.contains("cellSize")) cfg.seed_params.cell_size = s.at("cellSize").get<double>();
        if (s.contains("holeCells")) cfg.seed_params.hole_cells = s.at("holeCells").get<int>();
        if (s.contains("wallCells")) cfg.seed_params.wall_cells = s.at("wallCells").get<int>();
        if (s.contains("thicknessCells"))
            cfg.seed_params.thickness_cells = s.at("thicknessCells").get<int>();
        if (s.contains("subdivision")) cfg.seed_params.subdivision = s.at("subdivision").get<int>();
        if (s.contains("maxGenus")) cfg.seed_params.max_genus = s.at("maxGenus").get<int>();
    }
    if (doc.contains("environment")) {
        const auto& e = doc.at("environment");
        const std::string type = e.value("type", std::string("randomGrid"));
        if (type == "randomGrid") {
            check_keys(e,
                       {"type", "cubeSide", "chunksPerAxis", "subchunkSide", "axisResolutionRange",
                        "connectionProbabilityRange", "edgeThicknessRange"},
                       "environment");
            cfg.environment.type = EnvironmentConfig::Type::RandomGrid;
            auto& grid = cfg.environment.grid;
            if (e.contains("cubeSide")) grid.cube_side = e.at("cubeSide").get<double>();
            if (e.contains("chunksPerAxis")) grid.chunks_per_axis = e.at("chunksPerAxis").get<int>();
            if (e.contains("subchunkSide"))
                grid.subchunk_side = e.at("subchunkSide").get<double>();
            else
                grid.subchunk_side = grid.cube_side / grid.chunks_per_axis;
            if (e.contains("axisResolutionRange")) {
                grid.axis_resolution_min = e.at("axisResolutionRange").at(0).get<int>();
                grid.axis_resolution_max = e.at("axisResolutionRange").at(1).get<int>();
            }
            if (e.contains("connectionProbabilityRange")) {
                grid.connection_probability_min =
                    e.at("connectionProbabilityRange").at(0).get<double>();
                grid.connection_probability_max =
                    e.at("connectionProbabilityRange").at(1).get<double>();
            }
            if (e.contains("edgeThicknessRange")) {
                grid.edge_thickness_min = e.at("edgeThicknessRange").at(0).get<double>();
                grid.edge_thickness_max = e.at("edgeThicknessRange").at(1).get<double>();
            }
        } else if (type == "wfc") {
            check_keys(e, {"type", "gridDims", "cellSize", "maxRestarts", "tileset", "tilesetPath"},
                       "environment");
            cfg.environment.type = EnvironmentConfig::Type::Wfc;
            if (e.contains("gridDims")) {
                cfg.environment.wfc_dims = {e.at("gridDims").at(0).get<int>(),
                                            e.at("gridDims").at(1).get<int>(),
                                            e.at("gridDims").at(2).get<int>()};
            }
            if (e.contains("cellSize")) cfg.environment.wfc_cell_size = e.at("cellSize").get<double>();
            if (e.contains("maxRestarts"))
                cfg.environment.wfc_max_restarts = e.at("maxRestarts").get<int>();
            if (e.contains("tileset"))
                cfg.environment.wfc_tiles = TileSet::from_json(e.at("tileset"));
            else if (e.contains("tilesetPath"))
                cfg.environment.wfc_tiles = TileSet::load(e.at("tilesetPath").get<std::string>());
            else
                throw std::invalid_argument("wfc environment needs 'tileset' or 'tilesetPath'");
        } else {
            throw std::invalid_argument("environment type must be 'randomGrid' or 'wfc'");
        }
    }
    if (doc.contains("noise")) {
        const auto& n = doc.at("noise");
        check_keys(n, {"octaves", "sigma"}, "noise");
        if (n.contains("octaves")) {
            cfg.noise_octaves.clear();
            for (const auto& o : n.at("octaves")) cfg.noise_octaves.push_back(octave_from_json(o));
        }
        if (n.contains("sigma")) cfg.smoothing_sigma = n.at("sigma").get<double>();
    }
    if (doc.contains("displacement")) {
        const auto& d = doc.at("displacement");
        check_keys(d, {"intensity", "featureSize"}, "displacement");
        if (d.contains("intensity")) cfg.displacement_intensity = d.at("intensity").get<double>();
        if (d.contains("featureSize"))
            cfg.displacement_feature_size = d.at("featureSize").get<double>();
    }
    if (doc.contains("pointCount")) cfg.point_count = doc.at("pointCount").get<int>();
    if (doc.contains("masterSeed")) cfg.master_seed = doc.at("masterSeed").get<std::uint64_t>();
    if (doc.contains("trainTestSplit")) cfg.train_test_split = doc.at("trainTestSplit").get<double>();
    cfg.validate();
    return cfg;
}

DatasetConfig DatasetConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config is not valid JSON: " + std::string(e.what()));
    }
    return from_json(doc);
}

nlohmann::json SampleManifestEntry::to_json() const {
    return {
        {"sampleId", sample_id},
        {"genusLabel", genus_label},
        {"complexityLevel", complexity_level},
        {"rngSubseed", rng_subseed},
        {"areaRatio", area_ratio},
        {"meshChi", mesh_chi},
        {"growthViolations", growth_violations},
        {"files",
         {{"mesh", files.mesh},
          {"voxel", files.voxel},
          {"pointCloud", files.point_cloud},
          {"slices", files.slices}}},
        {"verification", verification.to_json()},
        {"split", split},
        {"wallTimeSeconds", wall_time_seconds},
    };
}

SampleManifestEntry SampleManifestEntry::from_json(const nlohmann::json& doc) {
    SampleManifestEntry e;
    e.sample_id = doc.at("sampleId").get<std::string>();
    e.genus_label = doc.at("genusLabel").get<int>();
    e.complexity_level = doc.at("complexityLevel").get<int>();
    e.rng_subseed = doc.at("rngSubseed").get<std::uint64_t>();
    e.area_ratio = doc.at("areaRatio").get<double>();
    e.mesh_chi = doc.at("meshChi").get<std::int64_t>();
    e.growth_violations = doc.at("growthViolations").get<int>();
    const auto& f = doc.at("files");
    e.files.mesh = f.at("mesh").get<std::string>();
    e.files.voxel = f.at("voxel").get<std::string>();
    e.files.point_cloud = f.at("pointCloud").get<std::string>();
    e.files.slices = f.at("slices").get<std::vector<std::string>>();
    e.verification = VerificationReport::from_json(doc.at("verification"));
    e.split = doc.at("split").get<std::string>();
    e.wall_time_seconds = doc.at("wallTimeSeconds").get<double>();
    return e;
}

namespace {

std::string run_id_string(int genus, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "g%02d_s%03d", genus, index);
    return buf;
}

/// Write through a temporary name and rename into place, so a crashed run
/// never leaves half-written artifacts under their final names.
template <typename WriteFn>
void atomic_write(const fs::path& final_path, WriteFn&& write) {
    const fs::path tmp = final_path.string() + ".tmp";
    write(tmp);
    fs::rename(tmp, final_path);
}

struct RunOutput {
    std::vector<SampleManifestEntry> entries;
    std::optional<FailedRun> failure;
};

RunOutput execute_run(const DatasetConfig& cfg, int genus, int index) {
    const auto t_start = std::chrono::steady_clock::now();
    const std::string run_id = run_id_string(genus, index);
    RunOutput out;
    try {
        const fs::path run_dir = cfg.output_directory / "samples" / run_id;
        fs::create_directories(run_dir);

        const TriangleMesh seed = make_genus_g_seed(genus, cfg.seed_params);

        // Obstacles may run straight through the cube center, where placement
        // is pinned; rotations and jitters cannot always clear them. Redraw
        // the whole environment (fresh substream per attempt) until the seed
        // fits, so a dense draw costs retries instead of the sample.
        Environment env;
        TriangleMesh placed = seed;
        bool placed_ok = false;
        std::string placement_error;
        for (int env_attempt = 0; env_attempt < 16 && !placed_ok; ++env_attempt) {
            env = cfg.environment.build(
                stage_seed(cfg.master_seed, genus, index, Stage::Environment, env_attempt));
            Rng placement_rng(
                stage_seed(cfg.master_seed, genus, index, Stage::Placement, env_attempt));
            try {
                placed = place_seed(seed, env, placement_rng);
                placed_ok = true;
            } catch (const PlacementError& e) {
                placement_error = e.what();
            }
        }
        if (!placed_ok)
            throw PlacementError(placement_error + " (16 environments tried)");

        GrowthConfig growth_cfg = cfg.growth;
        Rng growth_rng(stage_seed(cfg.master_seed, genus, index, Stage::Growth));
        growth_cfg.target_area_multiplier =
            cfg.target_area_min == cfg.target_area_max
                ? cfg.target_area_min
                : growth_rng.uniform(cfg.target_area_min, cfg.target_area_max);
        const GrowthResult grown =
            grow(placed, env, growth_cfg, stage_seed(cfg.master_seed, genus, index, Stage::Growth, 1));

        atomic_write(run_dir / "trace.csv", [&](const fs::path& p) {
            std::ofstream trace(p);
            trace << "iteration,energy,areaRatio,accepted\n";
            for (const auto& row : grown.trace)
                trace << row.iteration << ',' << row.energy << ',' << row.area_ratio << ','
                      << (row.accepted ? 1 : 0) << '\n';
            if (!trace) throw IoError("write failed: " + p.string());
        });

        const std::string split = assign_split(run_id, cfg.train_test_split);

        std::vector<SampleManifestEntry> entries;
        for (const GrowthSnapshot& snap : grown.snapshots) {
            const int level = snap.complexity_level;
            const TriangleMesh displaced = cellular_displacement(
                snap.mesh, cfg.displacement_intensity, cfg.displacement_feature_size,
                stage_seed(cfg.master_seed, genus, index, Stage::Displacement, level));

            VoxelGrid grid = voxelize_solid(displaced, cfg.voxel_resolution);
            if (!cfg.noise_octaves.empty())
                grid = apply_noise_octaves(
                    grid, cfg.noise_octaves,
                    stage_seed(cfg.master_seed, genus, index, Stage::Noise, level));
            grid = gaussian_smooth_binarize(grid, cfg.smoothing_sigma);

            const VerificationReport report = verify_sample(grid, genus);
            const PointCloud cloud = sample_point_cloud(
                grid, cfg.point_count,
                stage_seed(cfg.master_seed, genus, index, Stage::Points, level));

            SampleManifestEntry entry;
            entry.sample_id = run_id + "_c" + std::to_string(level);
            entry.genus_label = genus;
            entry.complexity_level = level;
            entry.rng_subseed = hash_mix({cfg.master_seed, static_cast<std::uint64_t>(genus),
                                          static_cast<std::uint64_t>(index)});
            entry.area_ratio = snap.area_ratio;
            entry.mesh_chi = euler_characteristic(displaced);
            entry.growth_violations = grown.topology_violations;
            entry.verification = report;
            entry.split = split;

            const std::string stem = "c" + std::to_string(level);
            const fs::path rel = fs::path("samples") / run_id;
            entry.files.mesh = (rel / (stem + "_mesh.obj")).string();
            entry.files.voxel = (rel / (stem + ".tgv")).string();
            entry.files.point_cloud = (rel / (stem + ".xyz")).string();

            atomic_write(cfg.output_directory / entry.files.mesh,
                         [&](const fs::path& p) { save_obj(displaced, p); });
            atomic_write(cfg.output_directory / entry.files.voxel,
                         [&](const fs::path& p) { save_voxel_grid(grid, p); });
            atomic_write(cfg.output_directory / entry.files.point_cloud,
                         [&](const fs::path& p) { save_point_cloud_xyz(cloud, p); });
            for (int s = 0; s < 5; ++s) {
                const int z = (cfg.voxel_resolution * (2 * s + 1)) / 10;
                const std::string name = stem + "_z" + std::to_string(s) + ".pgm";
                entry.files.slices.push_back((rel / name).string());
                atomic_write(cfg.output_directory / rel / name, [&](const fs::path& p) {
                    save_slice_pgm(extract_slice(grid, 2, z), p);
                });
            }
            entries.push_back(std::move(entry));
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        for (auto& e : entries) e.wall_time_seconds = elapsed;
        out.entries = std::move(entries);
    } catch (const std::exception& e) {
        out.failure = FailedRun{run_id, genus, e.what()};
    }
    return out;
}

}  // namespace

GenerationResult generate_dataset(const DatasetConfig& config, int jobs, std::ostream* log) {
    config.validate();
    if (config.output_directory.empty())
        throw std::invalid_argument("output directory must be set");
    std::error_code ec;
    fs::create_directories(config.output_directory, ec);
    if (ec) throw IoError("cannot create output directory: " + config.output_directory.string());
    {  // fail early on an unwritable target
        const fs::path probe = config.output_directory / ".write_probe";
        std::ofstream test(probe);
        if (!test) throw IoError("output directory is not writable: " +
                                 config.output_directory.string());
        test.close();
        fs::remove(probe);
    }

    struct Task {
        int genus, index;
    };
    std::vector<Task> tasks;
    for (int g = config.genus_min; g <= config.genus_max; ++g)
        for (int i = 0; i < config.samples_per_genus; ++i) tasks.push_back({g, i});

    std::vector<RunOutput> outputs(tasks.size());
    std::atomic<std::size_t> cursor{0};
    std::mutex log_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t t = cursor.fetch_add(1);
            if (t >= tasks.size()) return;
            outputs[t] = execute_run(config, tasks[t].genus, tasks[t].index);
            if (log) {
                std::lock_guard<std::mutex> lock(log_mutex);
                const std::string run_id = run_id_string(tasks[t].genus, tasks[t].index);
                if (outputs[t].failure)
                    *log << run_id << ": FAILED: " << outputs[t].failure->reason << '\n';
                else
                    *log << run_id << ": " << outputs[t].entries.size() << " entries, "
                         << outputs[t].entries.front().wall_time_seconds << " s\n";
            }
        }
    };

    const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    GenerationResult result;
    std::vector<int> success_per_genus(static_cast<std::size_t>(config.genus_max) + 1, 0);
    for (auto& out : outputs) {
        if (out.failure)
            result.failures.push_back(*out.failure);
        else {
            ++success_per_genus[out.entries.front().genus_label];
            for (auto& e : out.entries) result.entries.push_back(std::move(e));
        }
    }
    for (int g = config.genus_min; g <= config.genus_max; ++g)
        if (success_per_genus[g] == 0) result.failed_classes.push_back(g);

    std::sort(result.entries.begin(), result.entries.end(),
              [](const SampleManifestEntry& a, const SampleManifestEntry& b) {
                  return std::tie(a.genus_label, a.sample_id, a.complexity_level) <
                         std::tie(b.genus_label, b.sample_id, b.complexity_level);
              });

    result.manifest_path = config.output_directory / "manifest.jsonl";
    atomic_write(result.manifest_path, [&](const fs::path& p) {
        std::ofstream manifest(p);
        for (const auto& e : result.entries) manifest << e.to_json().dump() << '\n';
        if (!manifest) throw IoError("write failed: " + p.string());
    });
    return result;
}

std::vector<SampleManifestEntry> load_manifest(const fs::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open manifest: " + manifest_path.string());
    std::vector<SampleManifestEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        entries.push_back(SampleManifestEntry::from_json(nlohmann::json::parse(line)));
    }
    return entries;
}

VerifySummary verify_dataset(const fs::path& manifest_path) {
    const fs::path base = manifest_path.parent_path();
    const auto entries = load_manifest(manifest_path);

    VerifySummary summary;
    summary.total_entries = static_cast<std::int64_t>(entries.size());
    std::int64_t label_passes = 0;
    for (const auto& entry : entries) {
        const fs::path voxel_path = base / entry.files.voxel;
        if (!fs::exists(voxel_path)) {
            ++summary.missing_files;
            summary.mismatches.push_back({entry.sample_id, "missing-file"});
            continue;
        }
        const VoxelGrid grid = load_voxel_grid(voxel_path);
        const BettiTriple measured = betti_voxel(grid);
        ++summary.verified;
        if (!(measured == entry.verification.actual)) {
            ++summary.consistency_mismatches;
            summary.mismatches.push_back({entry.sample_id, "betti-mismatch"});
        }
        if (measured == entry.verification.expected) ++label_passes;
    }
    summary.label_pass_fraction =
        summary.verified > 0 ? static_cast<double>(label_passes) / summary.verified : 0.0;
    return summary;
}

fs::path export_views(const fs::path& manifest_path, const std::string& sample_id,
                      std::optional<fs::path> out_dir) {
    const fs::path base = manifest_path.parent_path();
    const auto entries = load_manifest(manifest_path);
    const auto it = std::find_if(entries.begin(), entries.end(),
                                 [&](const auto& e) { return e.sample_id == sample_id; });
    if (it == entries.end())
        throw std::invalid_argument("unknown sample id '" + sample_id + "'");

    const fs::path dir = out_dir.value_or(base / "views" / sample_id);
    fs::create_directories(dir);

    const VoxelGrid grid = load_voxel_grid(base / it->files.voxel);
    for (int s = 0; s < 5; ++s) {
        const int z = (grid.resolution * (2 * s + 1)) / 10;
        save_slice_pgm(extract_slice(grid, 2, z),
                       dir / ("slice_z" + std::to_string(s) + ".pgm"));
    }
    fs::copy_file(base / it->files.mesh, dir / "mesh.obj", fs::copy_options::overwrite_existing);
    return dir;
}

}  // namespace topogrow
