#include "hoieval/registry.hpp"

#include <algorithm>

#include "hoieval/dataset.hpp"
#include "hoieval/errors.hpp"
#include "hoieval/mesh_io.hpp"

namespace hoieval {

using nlohmann::json;

void Registry::add(const std::string &object_id, TriMesh mesh, SymmetrySet symmetries) {
  ensure_mesh(mesh);
  if (mesh.faces.empty()) {
    throw Error(ErrorKind::kEmptyMesh, "template '" + object_id + "' has no faces");
  }
  RegistryEntry entry;
  entry.diameter = mesh_diameter(mesh);
  if (!(entry.diameter > 0.0)) {
    throw Error(ErrorKind::kEmptyMesh, "template '" + object_id + "' has zero diameter");
  }
  symmetries.object_id = object_id;
  entry.symmetries = expand_symmetries(symmetries);
  entry.mesh = std::move(mesh);
  entries_.insert_or_assign(object_id, std::move(entry));
}

const RegistryEntry &Registry::at(std::string_view object_id) const {
  const auto it = entries_.find(object_id);
  if (it == entries_.end()) {
    throw Error(ErrorKind::kInvalidArgument,
                "object '" + std::string(object_id) + "' not in registry");
  }
  return it->second;
}

bool Registry::contains(std::string_view object_id) const {
  return entries_.find(object_id) != entries_.end();
}

SymmetrySet symmetry_from_json(const json &doc) {
  SymmetrySet s;
  try {
    s.object_id = doc.value("object_id", std::string());
    s.transforms.clear();
    if (doc.contains("discrete")) {
      for (const auto &m : doc.at("discrete")) s.transforms.push_back(mat3_from_json(m));
    }
    const bool has_identity = std::any_of(s.transforms.begin(), s.transforms.end(), [](const Mat3 &t) {
      return (t - Mat3::Identity()).cwiseAbs().maxCoeff() <= kRotationTolerance;
    });
    if (!has_identity) s.transforms.insert(s.transforms.begin(), Mat3::Identity());
    if (doc.contains("continuous")) {
      for (const auto &c : doc.at("continuous")) {
        ContinuousAxis axis;
        axis.axis = vec3_from_json(c.at("axis"));
        axis.count = c.contains("count") ? c.at("count").get<int>() : kDefaultAxisCount;
        s.continuous.push_back(axis);
      }
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParseError, std::string("symmetry descriptor: ") + e.what());
  }
  try {
    ensure_symmetry_set(s);
  } catch (const Error &e) {
    throw Error(ErrorKind::kParseError, std::string("symmetry descriptor: ") + e.what());
  }
  return s;
}

json symmetry_to_json(const SymmetrySet &s) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["object_id"] = s.object_id;
  doc["discrete"] = json::array();
  for (const Mat3 &m : s.transforms) doc["discrete"].push_back(to_json(m));
  doc["continuous"] = json::array();
  for (const auto &c : s.continuous) {
    doc["continuous"].push_back({{"axis", to_json(c.axis)}, {"count", c.count}});
  }
  return doc;
}

Registry load_registry(const std::filesystem::path &dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::kIoError, "registry directory not found: " + dir.string());
  }
  std::vector<fs::path> meshes;
  for (const auto &entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".obj" || ext == ".ply")) meshes.push_back(entry.path());
  }
  std::sort(meshes.begin(), meshes.end());
  Registry registry;
  for (const auto &path : meshes) {
    const std::string id = path.stem().string();
    if (registry.contains(id)) {
      throw Error(ErrorKind::kParseError, "object '" + id + "' has more than one mesh file");
    }
    TriMesh mesh = load_mesh(path);
    const fs::path sym_path = dir / (id + ".sym.json");
    SymmetrySet sym;
    if (fs::exists(sym_path)) {
      sym = symmetry_from_json(read_json_file(sym_path));
    } else {
      registry.warnings.push_back("object '" + id +
                                  "': no symmetry descriptor, using identity only");
    }
    registry.add(id, std::move(mesh), std::move(sym));
  }
  if (registry.entries().empty()) {
    throw Error(ErrorKind::kParseError, "registry " + dir.string() + " has no meshes");
  }
  return registry;
}

}  // namespace hoieval
