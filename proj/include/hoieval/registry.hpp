#pragma once

#include <filesystem>
#include <json.hpp>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hoieval/geom.hpp"
#include "hoieval/object_metrics.hpp"

namespace hoieval {

struct RegistryEntry {
  TriMesh mesh;
  SymmetrySet symmetries;  // expanded: discrete only
  double diameter = 0.0;   // cached mesh_diameter, meters
};

// Object templates with symmetry sets. Immutable once loaded and safe to
// share across scoring workers.
class Registry {
 public:
  // Validates the mesh, expands the symmetry set and caches the diameter.
  void add(const std::string &object_id, TriMesh mesh, SymmetrySet symmetries);

  const RegistryEntry &at(std::string_view object_id) const;
  bool contains(std::string_view object_id) const;
  const std::map<std::string, RegistryEntry, std::less<>> &entries() const { return entries_; }

  std::vector<std::string> warnings;

 private:
  std::map<std::string, RegistryEntry, std::less<>> entries_;
};

// Symmetry descriptor: {object_id, discrete: [[9 numbers row-major]...],
// continuous: [{axis: [3], count}]}. Rotations are checked, not repaired.
SymmetrySet symmetry_from_json(const nlohmann::json &doc);
nlohmann::json symmetry_to_json(const SymmetrySet &s);

// Every <id>.obj / <id>.ply in `dir`, with optional <id>.sym.json next to it.
// Objects without a descriptor get the identity-only set and a warning.
Registry load_registry(const std::filesystem::path &dir);

inline constexpr int kDefaultAxisCount = 64;

}  // namespace hoieval
