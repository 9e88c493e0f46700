#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "topogrow/envgen.hpp"
#include "topogrow/errors.hpp"
#include "topogrow/growth.hpp"
#include "topogrow/intersect.hpp"
#include "topogrow/mesh.hpp"
#include "topogrow/mesh_io.hpp"
#include "topogrow/pipeline.hpp"
#include "topogrow/rasterize.hpp"
#include "topogrow/topology.hpp"
#include "topogrow/wfc.hpp"

namespace py = pybind11;
using namespace topogrow;

namespace {

py::array_t<double> vertices_array(const TriangleMesh& mesh) {
    py::array_t<double> out({static_cast<py::ssize_t>(mesh.vertex_count()), py::ssize_t(3)});
    auto w = out.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < w.shape(0); ++i) {
        const Vec3& v = mesh.vertices()[i];
        w(i, 0) = v.x;
        w(i, 1) = v.y;
        w(i, 2) = v.z;
    }
    return out;
}

py::array_t<std::int32_t> faces_array(const TriangleMesh& mesh) {
    py::array_t<std::int32_t> out({static_cast<py::ssize_t>(mesh.face_count()), py::ssize_t(3)});
    auto w = out.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < w.shape(0); ++i)
        for (int k = 0; k < 3; ++k) w(i, k) = mesh.faces()[i][k];
    return out;
}

TriangleMesh mesh_from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> v,
                              py::array_t<std::int32_t, py::array::c_style | py::array::forcecast> f) {
    if (v.ndim() != 2 || v.shape(1) != 3) throw py::value_error("vertices must be (N, 3)");
    if (f.ndim() != 2 || f.shape(1) != 3) throw py::value_error("faces must be (M, 3)");
    std::vector<Vec3> vertices(v.shape(0));
    auto rv = v.unchecked<2>();
    for (py::ssize_t i = 0; i < v.shape(0); ++i) vertices[i] = {rv(i, 0), rv(i, 1), rv(i, 2)};
    std::vector<TriangleMesh::Face> faces(f.shape(0));
    auto rf = f.unchecked<2>();
    for (py::ssize_t i = 0; i < f.shape(0); ++i) faces[i] = {rf(i, 0), rf(i, 1), rf(i, 2)};
    return TriangleMesh::create(std::move(vertices), std::move(faces));
}

Vec3 to_vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

/// Occupancy as a (z, y, x)-indexed bool array, matching the x-fastest layout.
py::array_t<bool> occupancy_array(const VoxelGrid& grid) {
    const py::ssize_t r = grid.resolution;
    py::array_t<bool> out({r, r, r});
    auto w = out.mutable_unchecked<3>();
    std::size_t i = 0;
    for (py::ssize_t z = 0; z < r; ++z)
        for (py::ssize_t y = 0; y < r; ++y)
            for (py::ssize_t x = 0; x < r; ++x, ++i) w(z, y, x) = grid.occupancy[i] != 0;
    return out;
}

py::dict betti_dict(const BettiTriple& b) {
    py::dict d;
    d["beta0"] = b.beta0;
    d["beta1"] = b.beta1;
    d["beta2"] = b.beta2;
    d["chi"] = b.chi;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Topology-labeled 3D dataset generation and verification";

    py::register_exception<StructuralError>(m, "StructuralError");
    py::register_exception<UnsatisfiableError>(m, "UnsatisfiableError");
    py::register_exception<PlacementError>(m, "PlacementError");
    py::register_exception<GrowthStalledError>(m, "GrowthStalledError");
    py::register_exception<DisplacementError>(m, "DisplacementError");
    py::register_exception<SingularConfigurationError>(m, "SingularConfigurationError");

    py::class_<TriangleMesh>(m, "TriangleMesh")
        .def_static("from_arrays", &mesh_from_arrays, py::arg("vertices"), py::arg("faces"))
        .def_property_readonly("vertices", &vertices_array)
        .def_property_readonly("faces", &faces_array)
        .def_property_readonly("vertex_count", &TriangleMesh::vertex_count)
        .def_property_readonly("edge_count", &TriangleMesh::edge_count)
        .def_property_readonly("face_count", &TriangleMesh::face_count)
        .def("__repr__", [](const TriangleMesh& mesh) {
            std::ostringstream ss;
            ss << "TriangleMesh(V=" << mesh.vertex_count() << ", F=" << mesh.face_count()
               << ", chi=" << euler_characteristic(mesh) << ")";
            return ss.str();
        });

    m.def("make_genus_g_seed",
          [](int g, double cell_size, int hole_cells, int wall_cells, int thickness_cells,
             int subdivision, int max_genus) {
              return make_genus_g_seed(
                  g, {cell_size, hole_cells, wall_cells, thickness_cells, subdivision, max_genus});
          },
          py::arg("genus"), py::arg("cell_size") = 1.0, py::arg("hole_cells") = 2,
          py::arg("wall_cells") = 1, py::arg("thickness_cells") = 2, py::arg("subdivision") = 2,
          py::arg("max_genus") = 20);
    m.def("euler_characteristic", &euler_characteristic);
    m.def("genus", &genus);
    m.def("surface_area", &surface_area);
    m.def("surface_betti_numbers", [](const TriangleMesh& mesh) {
        const SurfaceBetti b = surface_betti_numbers(mesh);
        return py::make_tuple(b.beta0, b.beta1, b.beta2, b.chi);
    });
    m.def("topology_summary", [](const TriangleMesh& mesh) {
        const TopologySummary s = topology_summary(mesh);
        py::dict d;
        d["vertex_count"] = s.vertex_count;
        d["edge_count"] = s.edge_count;
        d["face_count"] = s.face_count;
        d["euler_characteristic"] = s.euler_characteristic;
        d["genus"] = s.genus;
        d["component_count"] = s.component_count;
        return d;
    });
    m.def("transform",
          [](const TriangleMesh& mesh, const std::array<double, 3>& rotation,
             const std::array<double, 3>& scale, const std::array<double, 3>& translation) {
              return transform(mesh, to_vec3(rotation), to_vec3(scale), to_vec3(translation));
          },
          py::arg("mesh"), py::arg("rotation") = std::array<double, 3>{0, 0, 0},
          py::arg("scale") = std::array<double, 3>{1, 1, 1},
          py::arg("translation") = std::array<double, 3>{0, 0, 0});
    m.def("has_self_intersection", &has_self_intersection);
    m.def("save_obj", &save_obj);
    m.def("load_obj", &load_obj);
    m.def("save_ply", &save_ply);
    m.def("load_ply", &load_ply);

    py::class_<Environment>(m, "Environment")
        .def_property_readonly("cube_side", [](const Environment& e) { return e.cube_side; })
        .def_property_readonly("box_count", [](const Environment& e) { return e.boxes.size(); })
        .def_property_readonly("boxes",
                               [](const Environment& e) {
                                   py::array_t<double> out(
                                       {static_cast<py::ssize_t>(e.boxes.size()), py::ssize_t(2),
                                        py::ssize_t(3)});
                                   auto w = out.mutable_unchecked<3>();
                                   for (py::ssize_t i = 0;
                                        i < static_cast<py::ssize_t>(e.boxes.size()); ++i)
                                       for (int k = 0; k < 3; ++k) {
                                           w(i, 0, k) = e.boxes[i].min[k];
                                           w(i, 1, k) = e.boxes[i].max[k];
                                       }
                                   return out;
                               })
        .def("distance",
             [](const Environment& e, const std::array<double, 3>& p) {
                 return e.distance(to_vec3(p));
             })
        .def("save_obj", &save_environment_obj);

    m.def("random_grid_environment",
          [](std::uint64_t rng_seed, double cube_side, int chunks_per_axis,
             const std::array<int, 2>& axis_resolution_range,
             const std::array<double, 2>& connection_probability_range,
             const std::array<double, 2>& edge_thickness_range) {
              RandomGridSpec spec;
              spec.cube_side = cube_side;
              spec.chunks_per_axis = chunks_per_axis;
              spec.subchunk_side = cube_side / chunks_per_axis;
              spec.axis_resolution_min = axis_resolution_range[0];
              spec.axis_resolution_max = axis_resolution_range[1];
              spec.connection_probability_min = connection_probability_range[0];
              spec.connection_probability_max = connection_probability_range[1];
              spec.edge_thickness_min = edge_thickness_range[0];
              spec.edge_thickness_max = edge_thickness_range[1];
              return random_grid_environment(spec, rng_seed);
          },
          py::arg("rng_seed"), py::arg("cube_side") = 20.0, py::arg("chunks_per_axis") = 5,
          py::arg("axis_resolution_range") = std::array<int, 2>{2, 4},
          py::arg("connection_probability_range") = std::array<double, 2>{0.15, 0.25},
          py::arg("edge_thickness_range") = std::array<double, 2>{0.4, 0.6});

    m.def("wfc_collapse",
          [](const std::array<int, 3>& dims, const std::string& tileset_json,
             std::uint64_t rng_seed, int max_restarts) {
              const TileSet ts = TileSet::from_json(nlohmann::json::parse(tileset_json));
              const GridDims gd{dims[0], dims[1], dims[2]};
              const auto cells = wfc_collapse(gd, ts, rng_seed, max_restarts);
              py::array_t<int> out({dims[2], dims[1], dims[0]});
              auto w = out.mutable_unchecked<3>();
              std::size_t i = 0;
              for (int z = 0; z < dims[2]; ++z)
                  for (int y = 0; y < dims[1]; ++y)
                      for (int x = 0; x < dims[0]; ++x, ++i) w(z, y, x) = cells[i];
              return out;
          },
          py::arg("dims"), py::arg("tileset_json"), py::arg("rng_seed"),
          py::arg("max_restarts") = 32);

    m.def("place_seed",
          [](const TriangleMesh& seed, const Environment& env, std::uint64_t rng_seed,
             int max_retries) {
              Rng rng(rng_seed);
              return place_seed(seed, env, rng, max_retries);
          },
          py::arg("seed"), py::arg("environment"), py::arg("rng_seed"),
          py::arg("max_retries") = 64);
    m.def("tangent_point_energy", &tangent_point_energy, py::arg("mesh"), py::arg("alpha") = 2.0,
          py::arg("beta") = 8.0,
          py::arg("cutoff") = std::numeric_limits<double>::infinity());
    m.def("tangent_point_gradient",
          [](const TriangleMesh& mesh, double alpha, double beta, double cutoff) {
              const auto grad = tangent_point_gradient(mesh, alpha, beta, cutoff);
              py::array_t<double> out({static_cast<py::ssize_t>(grad.size()), py::ssize_t(3)});
              auto w = out.mutable_unchecked<2>();
              for (py::ssize_t i = 0; i < w.shape(0); ++i)
                  for (int k = 0; k < 3; ++k) w(i, k) = grad[i][k];
              return out;
          },
          py::arg("mesh"), py::arg("alpha") = 2.0, py::arg("beta") = 8.0,
          py::arg("cutoff") = std::numeric_limits<double>::infinity());

    py::class_<GrowthSnapshot>(m, "GrowthSnapshot")
        .def_readonly("mesh", &GrowthSnapshot::mesh)
        .def_readonly("complexity_level", &GrowthSnapshot::complexity_level)
        .def_readonly("area_ratio", &GrowthSnapshot::area_ratio)
        .def_readonly("iteration_index", &GrowthSnapshot::iteration_index)
        .def_readonly("chi", &GrowthSnapshot::chi);

    m.def("grow",
          [](const TriangleMesh& placed_seed, const Environment& env, double target,
             double inflation_step_length, double descent_step_length, double alpha, double beta,
             int max_iterations, std::uint64_t rng_seed) {
              GrowthConfig cfg;
              cfg.target_area_multiplier = target;
              cfg.inflation_step_length = inflation_step_length;
              cfg.descent_step_length = descent_step_length;
              cfg.alpha = alpha;
              cfg.beta = beta;
              cfg.max_iterations = max_iterations;
              return grow(placed_seed, env, cfg, rng_seed).snapshots;
          },
          py::arg("placed_seed"), py::arg("environment"), py::arg("target_area_multiplier") = 3.0,
          py::arg("inflation_step_length") = 0.05, py::arg("descent_step_length") = 0.05,
          py::arg("alpha") = 2.0, py::arg("beta") = 8.0, py::arg("max_iterations") = 1500,
          py::arg("rng_seed") = 0);
    m.def("cellular_displacement", &cellular_displacement, py::arg("mesh"),
          py::arg("intensity") = 0.5, py::arg("feature_size") = 0.1, py::arg("rng_seed") = 0);

    py::class_<VoxelGrid>(m, "VoxelGrid")
        .def_property_readonly("resolution", [](const VoxelGrid& g) { return g.resolution; })
        .def_property_readonly("occupancy", &occupancy_array)
        .def_property_readonly("occupied_count", &VoxelGrid::occupied_count)
        .def_property_readonly("voxel_size", [](const VoxelGrid& g) { return g.voxel_size; });

    m.def("voxelize_solid", &voxelize_solid, py::arg("mesh"), py::arg("resolution") = 64);
    m.def("apply_noise_octaves",
          [](const VoxelGrid& grid,
             const std::vector<std::tuple<double, double, std::string>>& octaves,
             std::uint64_t rng_seed) {
              std::vector<NoiseOctaveSpec> specs;
              for (const auto& [scale, threshold, mode] : octaves) {
                  if (mode != "add" && mode != "subtract")
                      throw py::value_error("octave mode must be 'add' or 'subtract'");
                  specs.push_back({scale, threshold,
                                   mode == "add" ? NoiseOctaveSpec::Mode::Add
                                                 : NoiseOctaveSpec::Mode::Subtract});
              }
              return apply_noise_octaves(grid, specs, rng_seed);
          },
          py::arg("grid"), py::arg("octaves"), py::arg("rng_seed"));
    m.def("default_noise_octaves", [] {
        std::vector<std::tuple<double, double, std::string>> out;
        for (const auto& o : default_noise_octaves())
            out.emplace_back(o.scale, o.threshold,
                             o.mode == NoiseOctaveSpec::Mode::Add ? "add" : "subtract");
        return out;
    });
    m.def("gaussian_smooth_binarize", &gaussian_smooth_binarize, py::arg("grid"),
          py::arg("sigma") = 0.25);
    m.def("sample_point_cloud",
          [](const VoxelGrid& grid, int count, std::uint64_t rng_seed) {
              const PointCloud cloud = sample_point_cloud(grid, count, rng_seed);
              py::array_t<double> out(
                  {static_cast<py::ssize_t>(cloud.points.size()), py::ssize_t(3)});
              auto w = out.mutable_unchecked<2>();
              for (py::ssize_t i = 0; i < w.shape(0); ++i)
                  for (int k = 0; k < 3; ++k) w(i, k) = cloud.points[i][k];
              return out;
          },
          py::arg("grid"), py::arg("count") = 8192, py::arg("rng_seed") = 0);
    m.def("extract_slice",
          [](const VoxelGrid& grid, int axis, int index) {
              const SliceImage img = extract_slice(grid, axis, index);
              py::array_t<bool> out({static_cast<py::ssize_t>(img.height),
                                     static_cast<py::ssize_t>(img.width)});
              auto w = out.mutable_unchecked<2>();
              for (int v = 0; v < img.height; ++v)
                  for (int u = 0; u < img.width; ++u) w(v, u) = img.at(u, v);
              return out;
          },
          py::arg("grid"), py::arg("axis"), py::arg("index"));
    m.def("save_voxel_grid", &save_voxel_grid);
    m.def("load_voxel_grid", &load_voxel_grid);

    m.def("cubical_counts", [](const VoxelGrid& grid) {
        const CubicalComplexCounts c = cubical_counts(grid);
        return py::make_tuple(c.vertices, c.edges, c.squares, c.cubes);
    });
    m.def("betti_voxel", [](const VoxelGrid& grid) { return betti_dict(betti_voxel(grid)); });
    m.def("homology_oracle",
          [](const VoxelGrid& grid) { return betti_dict(homology_oracle(grid)); });
    m.def("verify_sample", [](const VoxelGrid& grid, int expected_genus) {
        const VerificationReport r = verify_sample(grid, expected_genus);
        return py::dict(py::arg("expected") = betti_dict(r.expected),
                        py::arg("actual") = betti_dict(r.actual), py::arg("passed") = r.pass());
    });

    m.def("generate_dataset",
          [](const std::string& config_json, const std::filesystem::path& out_dir, int jobs) {
              DatasetConfig cfg = DatasetConfig::from_json(nlohmann::json::parse(config_json));
              cfg.output_directory = out_dir;
              const GenerationResult result = generate_dataset(cfg, jobs);
              py::dict d;
              d["entries"] = result.entries.size();
              d["failures"] = result.failures.size();
              d["manifest"] = result.manifest_path;
              return d;
          },
          py::arg("config_json"), py::arg("out_dir"), py::arg("jobs") = 1);
    m.def("verify_dataset", [](const std::filesystem::path& manifest) {
        const VerifySummary s = verify_dataset(manifest);
        py::dict d;
        d["total_entries"] = s.total_entries;
        d["verified"] = s.verified;
        d["missing_files"] = s.missing_files;
        d["consistency_mismatches"] = s.consistency_mismatches;
        d["label_pass_fraction"] = s.label_pass_fraction;
        return d;
    });
    m.def("export_views",
          [](const std::filesystem::path& manifest, const std::string& sample_id) {
              return export_views(manifest, sample_id);
          },
          py::arg("manifest"), py::arg("sample_id"));
}
