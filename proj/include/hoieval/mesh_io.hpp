#pragma once

#include <filesystem>

#include "hoieval/geom.hpp"

namespace hoieval {

// OBJ or ASCII PLY, chosen by extension. Polygons are fan-triangulated.
// Malformed input throws kParseError naming the offending line.
TriMesh load_mesh(const std::filesystem::path &path);

// Shortest round-trip decimal form, so load(save(m)) == m exactly.
void save_obj(const TriMesh &mesh, const std::filesystem::path &path);
void save_ply(const TriMesh &mesh, const std::filesystem::path &path);

}  // namespace hoieval
