#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "topogrow/mesh_io.hpp"
#include "topogrow/pipeline.hpp"

namespace {

// Exit codes: 0 ok, 2 invalid config, 3 generation failures, 4 verification mismatches.
constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitGenerationFailures = 3;
constexpr int kExitVerifyMismatch = 4;

int run_generate(const std::string& config_path, const std::string& out_dir, int jobs) {
    topogrow::DatasetConfig config;
    try {
        config = topogrow::DatasetConfig::load(config_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return kExitInvalidConfig;
    }
    config.output_directory = out_dir;

    const topogrow::GenerationResult result =
        topogrow::generate_dataset(config, jobs, &std::cerr);

    std::cout << "entries: " << result.entries.size() << '\n'
              << "failed runs: " << result.failures.size() << '\n'
              << "manifest: " << result.manifest_path.string() << '\n';
    for (const auto& f : result.failures)
        std::cout << "  failed " << f.run_id << ": " << f.reason << '\n';
    for (int g : result.failed_classes)
        std::cout << "  no successful runs for genus " << g << '\n';
    return result.failures.empty() ? kExitOk : kExitGenerationFailures;
}

int run_verify(const std::string& manifest_path) {
    const topogrow::VerifySummary summary = topogrow::verify_dataset(manifest_path);
    std::cout << "entries: " << summary.total_entries << '\n'
              << "verified: " << summary.verified << '\n'
              << "missing files: " << summary.missing_files << '\n'
              << "report mismatches: " << summary.consistency_mismatches << '\n'
              << "label pass fraction: " << summary.label_pass_fraction << '\n';
    for (const auto& m : summary.mismatches)
        std::cout << "  " << m.sample_id << ": " << m.kind << '\n';
    return summary.consistent() ? kExitOk : kExitVerifyMismatch;
}

int run_views(const std::string& manifest_path, const std::string& sample_id) {
    const auto dir = topogrow::export_views(manifest_path, sample_id);
    std::cout << "views written to " << dir.string() << '\n';
    return kExitOk;
}

int run_seed_mesh(int genus, const std::string& out_path, const topogrow::SeedParams& params) {
    const topogrow::TriangleMesh mesh = topogrow::make_genus_g_seed(genus, params);
    topogrow::save_obj(mesh, out_path);
    const auto summary = topogrow::topology_summary(mesh);
    std::cout << "genus " << summary.genus << ", chi " << summary.euler_characteristic << ", "
              << summary.vertex_count << " vertices, " << summary.face_count << " faces -> "
              << out_path << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generator and verifier for topology-labeled 3D datasets"};
    app.require_subcommand(1);

    std::string config_path, out_dir, manifest_path, sample_id, seed_out;
    int jobs = 1;
    int genus = 0;
    topogrow::SeedParams seed_params;

    auto* generate = app.add_subcommand("generate", "Generate a dataset from a JSON config");
    generate->add_option("--config", config_path, "JSON config file")->required();
    generate->add_option("--out", out_dir, "Output directory")->required();
    generate->add_option("--jobs", jobs, "Concurrent samples")->check(CLI::PositiveNumber);

    auto* verify = app.add_subcommand("verify", "Recompute Betti numbers for a dataset");
    verify->add_option("--manifest", manifest_path, "manifest.jsonl path")->required();

    auto* views = app.add_subcommand("views", "Export slice images and mesh for one sample");
    views->add_option("--manifest", manifest_path, "manifest.jsonl path")->required();
    views->add_option("--sample", sample_id, "Sample id, e.g. g03_s001_c4")->required();

    auto* seed_mesh = app.add_subcommand("seed-mesh", "Write a genus-g seed mesh as OBJ");
    seed_mesh->add_option("--genus", genus, "Genus")->required();
    seed_mesh->add_option("--out", seed_out, "Output OBJ path")->required();
    seed_mesh->add_option("--subdivision", seed_params.subdivision, "Quads per cell edge");
    seed_mesh->add_option("--cell-size", seed_params.cell_size, "Cell size in world units");
    seed_mesh->add_option("--max-genus", seed_params.max_genus, "Genus ceiling");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return run_generate(config_path, out_dir, jobs);
        if (verify->parsed()) return run_verify(manifest_path);
        if (views->parsed()) return run_views(manifest_path, sample_id);
        if (seed_mesh->parsed()) return run_seed_mesh(genus, seed_out, seed_params);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
