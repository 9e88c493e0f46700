#include <doctest.h>

#include <json.hpp>

#include "topogrow/errors.hpp"
#include "topogrow/wfc.hpp"

using namespace topogrow;

namespace {

TileSet single_tile(bool self_compatible) {
    TileSet ts;
    ts.tiles = {"only"};
    ts.resize_rules();
    if (self_compatible)
        for (int axis = 0; axis < 3; ++axis) ts.add_symmetric_rule(0, 0, axis);
    return ts;
}

TileSet checkerboard() {
    TileSet ts;
    ts.tiles = {"black", "white"};
    ts.resize_rules();
    for (int axis = 0; axis < 3; ++axis) {
        ts.add_symmetric_rule(0, 1, axis);
        ts.add_symmetric_rule(1, 0, axis);
    }
    return ts;
}

}  // namespace

TEST_CASE("single self-compatible tile fills the grid") {
    const GridDims dims{3, 4, 2};
    const auto cells = wfc_collapse(dims, single_tile(true), 1);
    REQUIRE(cells.size() == 24u);
    for (int c : cells) CHECK(c == 0);
    CHECK(count_adjacency_violations(dims, cells, single_tile(true)) == 0);
}

TEST_CASE("single self-incompatible tile is unsatisfiable beyond one cell") {
    CHECK_THROWS_AS(wfc_collapse({2, 1, 1}, single_tile(false), 1, 4), UnsatisfiableError);
    // a single cell has no adjacency to violate
    CHECK_NOTHROW(wfc_collapse({1, 1, 1}, single_tile(false), 1, 0));
}

TEST_CASE("checkerboard tileset collapses to one of the two phases") {
    const TileSet ts = checkerboard();
    for (const GridDims dims : {GridDims{4, 4, 4}, GridDims{3, 5, 2}}) {
        const auto cells = wfc_collapse(dims, ts, 99);
        CHECK(count_adjacency_violations(dims, cells, ts) == 0);
        const int phase = cells[0];
        std::int64_t i = 0;
        for (int z = 0; z < dims.nz; ++z)
            for (int y = 0; y < dims.ny; ++y)
                for (int x = 0; x < dims.nx; ++x, ++i)
                    CHECK(cells[i] == ((x + y + z) % 2 == 0 ? phase : 1 - phase));
    }
}

TEST_CASE("collapse is deterministic in the seed") {
    const TileSet ts = checkerboard();
    const GridDims dims{5, 5, 5};
    CHECK(wfc_collapse(dims, ts, 7) == wfc_collapse(dims, ts, 7));
}

TEST_CASE("inconsistent rules are rejected") {
    TileSet ts;
    ts.tiles = {"a", "b"};
    ts.resize_rules();
    ts.set_rule(0, 1, PosX);  // no mirror rule(b, a, -x)
    CHECK_THROWS_AS(ts.validate(), std::invalid_argument);
    CHECK_THROWS_AS(wfc_collapse({2, 2, 2}, ts, 1), std::invalid_argument);
}

TEST_CASE("tile set json: directional and axis rules, per-tile boxes") {
    const auto doc = nlohmann::json::parse(R"({
        "tiles": [
            {"name": "empty", "boxes": []},
            {"name": "pillar", "boxes": [[[0.4, 0.4, 0.0], [0.6, 0.6, 1.0]]]}
        ],
        "rules": [
            {"from": "empty", "to": "empty", "axis": "x"},
            {"from": "empty", "to": "empty", "axis": "y"},
            {"from": "empty", "to": "empty", "axis": "z"},
            {"from": "empty", "to": "pillar", "dir": "+x"},
            {"from": "pillar", "to": "empty", "dir": "-x"}
        ]
    })");
    const TileSet ts = TileSet::from_json(doc);
    CHECK(ts.tiles.size() == 2);
    CHECK(ts.rule(0, 0, PosX));
    CHECK(ts.rule(0, 1, PosX));
    CHECK(ts.rule(1, 0, NegX));
    CHECK_FALSE(ts.rule(1, 0, PosX));
    CHECK(ts.tile_boxes[1].size() == 1);

    SUBCASE("unknown tile in a rule") {
        auto bad = doc;
        bad["rules"][0]["from"] = "mystery";
        CHECK_THROWS_AS(TileSet::from_json(bad), std::invalid_argument);
    }
    SUBCASE("json missing the mirror rule fails validation") {
        auto bad = doc;
        bad["rules"].erase(4);
        CHECK_THROWS_AS(TileSet::from_json(bad), std::invalid_argument);
    }
}

TEST_CASE("wfc environment instantiates tile boxes inside their cells") {
    TileSet ts;
    ts.tiles = {"empty", "pillar"};
    ts.resize_rules();
    for (int axis = 0; axis < 3; ++axis)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) ts.add_symmetric_rule(a, b, axis);
    ts.tile_boxes[1] = {Box{{0.25, 0.25, 0.25}, {0.75, 0.75, 0.75}}};

    const GridDims dims{3, 3, 3};
    const Environment env = wfc_environment(dims, ts, 2.0, 31);
    CHECK(env.cube_side == doctest::Approx(6.0));
    const Box cube = env.bounding_cube();
    for (const Box& b : env.boxes) {
        const Vec3 ext = b.max - b.min;
        CHECK(ext.x == doctest::Approx(1.0));
        CHECK(ext.y == doctest::Approx(1.0));
        CHECK(ext.z == doctest::Approx(1.0));
        for (int k = 0; k < 3; ++k) {
            CHECK(b.min[k] >= cube.min[k] - 1e-12);
            CHECK(b.max[k] <= cube.max[k] + 1e-12);
        }
    }
}
