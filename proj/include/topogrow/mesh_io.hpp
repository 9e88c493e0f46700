#pragma once

#include <filesystem>

#include "topogrow/mesh.hpp"

namespace topogrow {

/// ASCII OBJ with v/f records, 1-based indices.
void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);
TriangleMesh load_obj(const std::filesystem::path& path);

/// Binary little-endian PLY, float32 positions, int32 face indices.
void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path);
TriangleMesh load_ply(const std::filesystem::path& path);

}  // namespace topogrow
