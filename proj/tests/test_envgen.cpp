#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "testutil.hpp"
#include "topogrow/envgen.hpp"

using namespace topogrow;
namespace tu = topogrow::testutil;

TEST_CASE("spec validation") {
    RandomGridSpec spec;
    CHECK_NOTHROW(spec.validate());
    SUBCASE("chunk layout must tile the cube") {
        spec.subchunk_side = 3.0;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("probability range") {
        spec.connection_probability_max = 1.5;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("resolution range") {
        spec.axis_resolution_min = 1;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
}

TEST_CASE("degenerate connection probabilities give exact box counts") {
    RandomGridSpec spec;
    SUBCASE("p = 0 produces an empty environment") {
        spec.connection_probability_min = spec.connection_probability_max = 0.0;
        const Environment env = random_grid_environment(spec, 7);
        CHECK(env.boxes.empty());
        CHECK(env.distance({0, 0, 0}) == std::numeric_limits<double>::infinity());
    }
    SUBCASE("p = 1 with resolution 2 gives 12 edges per subchunk") {
        spec.connection_probability_min = spec.connection_probability_max = 1.0;
        spec.axis_resolution_min = spec.axis_resolution_max = 2;
        const Environment env = random_grid_environment(spec, 7);
        // 2x2x2 lattice: 4 edges per axis, 125 subchunks in the default cube
        CHECK(env.boxes.size() == 12u * 125u);
    }
}

TEST_CASE("default spec dissects the cube into 125 subchunks") {
    const RandomGridSpec spec;
    CHECK(spec.chunks_per_axis * spec.chunks_per_axis * spec.chunks_per_axis == 125);
    CHECK(spec.chunks_per_axis * spec.subchunk_side == doctest::Approx(spec.cube_side));
}

TEST_CASE("generation is a pure function of spec and seed") {
    const RandomGridSpec spec;
    const Environment a = random_grid_environment(spec, 42);
    const Environment b = random_grid_environment(spec, 42);
    REQUIRE(a.boxes.size() == b.boxes.size());
    for (std::size_t i = 0; i < a.boxes.size(); ++i) {
        CHECK(a.boxes[i].min == b.boxes[i].min);
        CHECK(a.boxes[i].max == b.boxes[i].max);
    }
    const Environment c = random_grid_environment(spec, 43);
    CHECK(a.boxes.size() != c.boxes.size());
}

TEST_CASE("emitted boxes stay in the cube with a square strut cross-section") {
    const RandomGridSpec spec;
    const Environment env = random_grid_environment(spec, 12345);
    REQUIRE_FALSE(env.boxes.empty());
    const Box cube = env.bounding_cube();
    for (const Box& b : env.boxes) {
        for (int k = 0; k < 3; ++k) {
            CHECK(b.min[k] >= cube.min[k] - 1e-12);
            CHECK(b.max[k] <= cube.max[k] + 1e-12);
            CHECK(b.min[k] < b.max[k]);
        }
        // Orientation = the axis with the longest extent; the two lateral
        // extents are the thickness T in [0.4, 0.6] unless clipped by the cube.
        const Vec3 ext = b.max - b.min;
        int axis = 0;
        if (ext.y > ext[axis]) axis = 1;
        if (ext.z > ext[axis]) axis = 2;
        for (int k = 0; k < 3; ++k) {
            if (k == axis) continue;
            const bool clipped = b.min[k] == cube.min[k] || b.max[k] == cube.max[k];
            if (!clipped) {
                CHECK(ext[k] >= 0.4 - 1e-12);
                CHECK(ext[k] <= 0.6 + 1e-12);
            }
        }
        const int lateral[2] = {(axis + 1) % 3, (axis + 2) % 3};
        const bool clipped = b.min[lateral[0]] == cube.min[lateral[0]] ||
                             b.max[lateral[0]] == cube.max[lateral[0]] ||
                             b.min[lateral[1]] == cube.min[lateral[1]] ||
                             b.max[lateral[1]] == cube.max[lateral[1]];
        if (!clipped)
            CHECK(ext[lateral[0]] == doctest::Approx(ext[lateral[1]]).epsilon(1e-12));
    }
}

TEST_CASE("signed distance to boxes") {
    Environment env;
    env.cube_side = 20.0;
    env.boxes.push_back({{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}});

    SUBCASE("center of a box is at minus half the smallest extent") {
        CHECK(env.distance({0, 0, 0}) == doctest::Approx(-0.5).epsilon(1e-12));
    }
    SUBCASE("outside along a face normal") {
        CHECK(env.distance({3.5, 0, 0}) == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("matches the closest-point oracle on random points") {
        const Environment grid_env = random_grid_environment(RandomGridSpec{}, 5);
        Rng rng(17);
        for (int i = 0; i < 500; ++i) {
            const Vec3 p{rng.uniform(-12, 12), rng.uniform(-12, 12), rng.uniform(-12, 12)};
            double oracle = std::numeric_limits<double>::infinity();
            for (const Box& b : grid_env.boxes)
                oracle = std::min(oracle, tu::oracle_box_distance(b, p));
            CHECK(grid_env.distance(p) == doctest::Approx(oracle).epsilon(1e-12));
        }
    }
    SUBCASE("1-Lipschitz in the query point") {
        const Environment grid_env = random_grid_environment(RandomGridSpec{}, 6);
        Rng rng(18);
        for (int i = 0; i < 500; ++i) {
            const Vec3 p{rng.uniform(-11, 11), rng.uniform(-11, 11), rng.uniform(-11, 11)};
            const Vec3 q = p + Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            CHECK(std::abs(grid_env.distance(p) - grid_env.distance(q)) <=
                  norm(p - q) * (1 + 1e-12) + 1e-12);
        }
    }
    SUBCASE("gradient points along increasing distance") {
        Rng rng(19);
        for (int i = 0; i < 200; ++i) {
            const Vec3 p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
            const Vec3 g = env.distance_gradient(p);
            const double step = 1e-6;
            const double forward = env.distance(p + step * g);
            CHECK(forward >= env.distance(p) - 1e-9);
        }
    }
}

TEST_CASE("environment obj export writes a triangle block per box") {
    Environment env;
    env.boxes.push_back({{0, 0, 0}, {1, 2, 3}});
    env.boxes.push_back({{4, 4, 4}, {5, 5, 5}});
    const auto path = std::filesystem::temp_directory_path() / "topogrow_env.obj";
    save_environment_obj(env, path);
    std::ifstream in(path);
    int n_vertices = 0, n_faces = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) == 0) ++n_vertices;
        if (line.rfind("f ", 0) == 0) ++n_faces;
    }
    CHECK(n_vertices == 16);
    CHECK(n_faces == 24);
    std::filesystem::remove(path);
}
