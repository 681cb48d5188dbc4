#include "hoieval/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "hoieval/errors.hpp"
#include "hoieval/mesh_io.hpp"
#include "hoieval/parallel.hpp"

namespace hoieval {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool is_delim(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ',' || c == ':' ||
         c == '[' || c == ']' || c == '{' || c == '}';
}

// Maps bare NaN / Infinity / -Infinity tokens outside strings to null.
std::string sanitize_non_finite_tokens(const std::string &text) {
  static const char *const kTokens[] = {"-Infinity", "Infinity", "NaN"};
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < text.size()) {
        out += text[++i];
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out += c;
      continue;
    }
    bool replaced = false;
    if (i == 0 || is_delim(text[i - 1])) {
      for (const char *tok : kTokens) {
        const std::size_t len = std::char_traits<char>::length(tok);
        if (text.compare(i, len, tok) == 0 &&
            (i + len == text.size() || is_delim(text[i + len]))) {
          out += "null";
          i += len - 1;
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += c;
  }
  return out;
}

void require(bool ok, const std::string &what) {
  if (!ok) throw Error(ErrorKind::kParseError, what);
}

}  // namespace

json read_json_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    doc = json::parse(sanitize_non_finite_tokens(text), nullptr, false);
  }
  if (doc.is_discarded()) throw Error(ErrorKind::kParseError, path.string() + ": invalid JSON");
  return doc;
}

void write_json_file(const json &doc, const fs::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::kIoError, "write failed: " + path.string());
}

double number_from_json(const json &v) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  require(v.is_number(), "expected a number, got " + std::string(v.type_name()));
  return v.get<double>();
}

Vec3 vec3_from_json(const json &v) {
  require(v.is_array() && v.size() == 3, "expected an array of 3 numbers");
  return {number_from_json(v[0]), number_from_json(v[1]), number_from_json(v[2])};
}

Mat3 mat3_from_json(const json &v) {
  require(v.is_array() && v.size() == 9, "expected an array of 9 numbers (row-major 3x3)");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = number_from_json(v[3 * r + c]);
  }
  return m;
}

PointCloud points_from_json(const json &v) {
  require(v.is_array(), "expected an array of points");
  PointCloud pts;
  pts.reserve(v.size());
  for (const auto &p : v) pts.push_back(vec3_from_json(p));
  return pts;
}

RigidPose pose_from_json(const json &v) {
  require(v.is_object() && v.contains("R") && v.contains("t"), "pose needs 'R' and 't'");
  return {mat3_from_json(v.at("R")), vec3_from_json(v.at("t"))};
}

CameraIntrinsics intrinsics_from_json(const json &v) {
  require(v.is_object(), "intrinsics must be an object");
  for (const char *k : {"fx", "fy", "cx", "cy"}) require(v.contains(k), std::string("intrinsics need '") + k + "'");
  return {number_from_json(v.at("fx")), number_from_json(v.at("fy")),
          number_from_json(v.at("cx")), number_from_json(v.at("cy"))};
}

json to_json(const Vec3 &v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Mat3 &m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  }
  return a;
}

json to_json(const RigidPose &p) { return {{"R", to_json(p.rotation)}, {"t", to_json(p.translation)}}; }

json to_json(const CameraIntrinsics &k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}};
}

json points_to_json(const PointCloud &pts) {
  json a = json::array();
  for (const auto &p : pts) a.push_back(to_json(p));
  return a;
}

std::vector<RigidPose> load_pose_document(const fs::path &path) {
  const json doc = read_json_file(path);
  std::vector<RigidPose> poses;
  try {
    if (doc.contains("poses")) {
      for (const auto &p : doc.at("poses")) poses.push_back(pose_from_json(p));
    } else {
      poses.push_back(pose_from_json(doc));
    }
  } catch (const Error &e) {
    throw Error(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
  for (const auto &p : poses) {
    ensure_rotation(p.rotation, "pose rotation");
    ensure_finite(p.translation, "pose translation");
  }
  return poses;
}

void save_pose_document(const std::vector<RigidPose> &poses, const fs::path &path) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["poses"] = json::array();
  for (const auto &p : poses) doc["poses"].push_back(to_json(p));
  write_json_file(doc, path);
}

double meters_per_unit(const std::string &units) {
  if (units == "m") return 1.0;
  if (units == "mm") return 0.001;
  throw Error(ErrorKind::kParseError, "unsupported units '" + units + "' (use m or mm)");
}

namespace {

// Lengths are divided rather than multiplied so "mm" input converts with a
// single correctly rounded operation.
double units_per_meter(double mpu) { return mpu == 1.0 ? 1.0 : 1.0 / mpu; }

Vec3 to_meters(const Vec3 &v, double upm) { return upm == 1.0 ? v : Vec3(v / upm); }

PointCloud to_meters(PointCloud pts, double upm) {
  if (upm != 1.0) {
    for (auto &p : pts) p /= upm;
  }
  return pts;
}

RigidPose to_meters(RigidPose p, double upm) {
  p.translation = to_meters(p.translation, upm);
  return p;
}

PartRotations parts_from_json(const json &v) {
  require(v.is_array() && v.size() == kPartCount, "expected 9 part rotations");
  PartRotations parts;
  for (std::size_t k = 0; k < kPartCount; ++k) parts[k] = mat3_from_json(v[k]);
  return parts;
}

ObjectPlacement placement_from_json(const json &doc, double upm) {
  ObjectPlacement p;
  if (doc.contains("object_pose")) p.pose = to_meters(pose_from_json(doc.at("object_pose")), upm);
  if (doc.contains("object_vertices")) {
    p.vertices = to_meters(points_from_json(doc.at("object_vertices")), upm);
  }
  require(p.pose.has_value() != p.vertices.has_value(),
          "give exactly one of 'object_pose' or 'object_vertices'");
  return p;
}

bool all_finite(const PointCloud &pts) {
  return std::all_of(pts.begin(), pts.end(), [](const Vec3 &p) { return p.allFinite(); });
}

bool finite_pose(const RigidPose &p) { return p.rotation.allFinite() && p.translation.allFinite(); }

bool finite_placement(const ObjectPlacement &p) {
  return (!p.pose || finite_pose(*p.pose)) && (!p.vertices || all_finite(*p.vertices));
}

// Throws kParseError when GT violates an invariant; GT must be clean.
void check_gt(bool ok, const std::string &frame_id, const std::string &what) {
  if (!ok) throw Error(ErrorKind::kParseError, "ground truth frame '" + frame_id + "': " + what);
}

}  // namespace

Manifest load_manifest(const fs::path &path) {
  const json doc = read_json_file(path);
  Manifest m;
  m.base_dir = path.parent_path();
  try {
    require(doc.contains("schema_version") && doc.at("schema_version").get<int>() == kSchemaVersion,
            "manifest schema_version must be " + std::to_string(kSchemaVersion));
    m.track = parse_track(doc.at("track").get<std::string>());
    require(doc.contains("units"), "manifest needs a 'units' field");
    m.units = doc.at("units").get<std::string>();
    m.meters_per_unit = meters_per_unit(m.units);
    if (doc.contains("intrinsics")) m.intrinsics = intrinsics_from_json(doc.at("intrinsics"));
    if (doc.contains("registry")) m.registry_dir = m.base_dir / doc.at("registry").get<std::string>();
    if (doc.contains("human_template")) {
      m.human_template = m.base_dir / doc.at("human_template").get<std::string>();
    }
    if (doc.contains("joint_count")) m.joint_count = doc.at("joint_count").get<std::size_t>();
    if (doc.contains("sample_n")) m.sample_n = doc.at("sample_n").get<std::size_t>();
    require(m.sample_n >= 1, "sample_n must be >= 1");
    std::set<std::string> seen;
    for (const auto &f : doc.at("frames")) {
      FrameRef ref;
      ref.frame_id = f.at("frame_id").get<std::string>();
      require(!ref.frame_id.empty(), "empty frame_id");
      require(seen.insert(ref.frame_id).second, "duplicate frame_id '" + ref.frame_id + "'");
      const json &gt = f.at("gt");
      if (gt.is_string()) {
        ref.gt_path = m.base_dir / gt.get<std::string>();
        if (!fs::exists(ref.gt_path)) {
          throw Error(ErrorKind::kIoError, "frame '" + ref.frame_id + "': missing GT file " +
                                               ref.gt_path.string());
        }
      } else {
        require(gt.is_object(), "frame '" + ref.frame_id + "': gt must be a path or an object");
        ref.inline_gt = gt;
      }
      if (f.contains("intrinsics")) ref.intrinsics = intrinsics_from_json(f.at("intrinsics"));
      m.frames.push_back(std::move(ref));
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
  require(!m.frames.empty(), path.string() + ": manifest lists no frames");
  if (m.track != Track::kHuman) {
    require(!m.registry_dir.empty(), "object and joint manifests need a 'registry' directory");
  }
  if (m.track == Track::kJoint) {
    require(!m.human_template.empty(), "joint manifests need a 'human_template' mesh");
  }
  if (m.track == Track::kObject) {
    for (const auto &f : m.frames) {
      require(f.intrinsics || m.intrinsics,
              "frame '" + f.frame_id + "' has no intrinsics (set them globally or per frame)");
    }
  }
  return m;
}

std::vector<std::string> Dataset::frame_ids() const {
  std::vector<std::string> ids;
  for (const auto &f : manifest.frames) ids.push_back(f.frame_id);
  return ids;
}

Dataset load_dataset(const fs::path &manifest_path) {
  Dataset ds;
  ds.manifest = load_manifest(manifest_path);
  const Manifest &m = ds.manifest;
  if (m.track != Track::kHuman) ds.registry = load_registry(m.registry_dir);
  if (m.track == Track::kJoint) {
    ds.human_template = load_mesh(m.human_template);
    ensure_mesh(ds.human_template);
  }
  const double upm = units_per_meter(m.meters_per_unit);
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());

  auto docs = parallel_map(m.frames.size(), workers, [&](std::size_t i) {
    const FrameRef &ref = m.frames[i];
    json gt = ref.gt_path.empty() ? ref.inline_gt : read_json_file(ref.gt_path);
    if (gt.contains("frame_id") && gt.at("frame_id") != ref.frame_id) {
      throw Error(ErrorKind::kParseError, "GT file for '" + ref.frame_id + "' names frame " +
                                              gt.at("frame_id").dump());
    }
    return gt;
  });

  for (std::size_t i = 0; i < m.frames.size(); ++i) {
    const FrameRef &ref = m.frames[i];
    const json &gt = docs[i];
    const std::string &id = ref.frame_id;
    try {
      switch (m.track) {
        case Track::kObject: {
          ObjectFrame f;
          f.frame_id = id;
          f.object_id = gt.at("object_id").get<std::string>();
          check_gt(ds.registry.contains(f.object_id), id, "object '" + f.object_id + "' not in registry");
          f.gt_pose = to_meters(pose_from_json(gt.at("pose")), upm);
          check_gt(finite_pose(f.gt_pose) && is_rotation(f.gt_pose.rotation), id,
                   "pose must be finite with a valid rotation");
          f.intrinsics = ref.intrinsics ? *ref.intrinsics : *m.intrinsics;
          ensure_intrinsics(f.intrinsics);
          ds.object_frames.push_back(std::move(f));
          break;
        }
        case Track::kHuman: {
          HumanFrame f;
          f.frame_id = id;
          f.gt_joints = to_meters(points_from_json(gt.at("joints")), upm);
          check_gt(f.gt_joints.size() == m.joint_count, id,
                   "expected " + std::to_string(m.joint_count) + " joints, got " +
                       std::to_string(f.gt_joints.size()));
          check_gt(all_finite(f.gt_joints), id, "non-finite joint");
          if (gt.contains("parts")) {
            f.gt_parts = parts_from_json(gt.at("parts"));
            for (const auto &r : *f.gt_parts) check_gt(is_rotation(r), id, "invalid part rotation");
          }
          ds.human_frames.push_back(std::move(f));
          break;
        }
        case Track::kJoint: {
          JointFrame f;
          f.frame_id = id;
          f.object_id = gt.at("object_id").get<std::string>();
          check_gt(ds.registry.contains(f.object_id), id, "object '" + f.object_id + "' not in registry");
          f.gt_smpl_vertices = to_meters(points_from_json(gt.at("smpl_vertices")), upm);
          check_gt(f.gt_smpl_vertices.size() == ds.human_template.vertices.size(), id,
                   "human vertex count does not match the human template");
          check_gt(all_finite(f.gt_smpl_vertices), id, "non-finite human vertex");
          f.gt_object = placement_from_json(gt, upm);
          check_gt(finite_placement(f.gt_object), id, "non-finite object placement");
          if (f.gt_object.pose) check_gt(is_rotation(f.gt_object.pose->rotation), id, "invalid object rotation");
          if (f.gt_object.vertices) {
            check_gt(f.gt_object.vertices->size() == ds.registry.at(f.object_id).mesh.vertices.size(),
                     id, "object vertex count does not match the template");
          }
          ds.joint_frames.push_back(std::move(f));
          break;
        }
      }
    } catch (const json::exception &e) {
      throw Error(ErrorKind::kParseError, "ground truth frame '" + id + "': " + e.what());
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::kParseError) throw;
      throw Error(ErrorKind::kParseError, "ground truth frame '" + id + "': " + e.what());
    }
  }
  return ds;
}

Submission submission_from_json(const json &doc, const std::string &fallback_name) {
  Submission s;
  try {
    require(doc.is_object(), "submission must be a JSON object");
    require(doc.contains("schema_version") && doc.at("schema_version").get<int>() == kSchemaVersion,
            "submission schema_version must be " + std::to_string(kSchemaVersion));
    s.name = doc.value("name", fallback_name);
    if (doc.contains("track")) s.track = parse_track(doc.at("track").get<std::string>());
    s.units = doc.value("units", std::string());
    if (!s.units.empty()) meters_per_unit(s.units);
    for (const auto &f : doc.at("frames")) {
      require(f.is_object() && f.contains("frame_id") && f.at("frame_id").is_string(),
              "every submission frame needs a string frame_id");
      s.frames.emplace_back(f.at("frame_id").get<std::string>(), f);
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParseError, std::string("submission: ") + e.what());
  }
  return s;
}

Submission load_submission(const fs::path &path) {
  return submission_from_json(read_json_file(path), path.stem().string());
}

json ValidationReport::to_json() const {
  json doc;
  doc["scoring_permitted"] = scoring_permitted();
  doc["missing"] = missing;
  doc["extra"] = extra;
  doc["issues"] = json::array();
  for (const auto &i : issues) {
    doc["issues"].push_back({{"frame_id", i.frame_id}, {"category", i.category}, {"detail", i.detail}});
  }
  return doc;
}

namespace {

struct ParsedPrediction {
  std::optional<RigidPose> object_pose;
  std::optional<JointSet> joints;
  std::optional<PartRotations> parts;
  std::optional<PointCloud> smpl;
  ObjectPlacement placement;
};

ParsedPrediction parse_prediction(Track track, const json &payload, double upm) {
  ParsedPrediction p;
  switch (track) {
    case Track::kObject:
      require(payload.contains("pose"), "object prediction needs 'pose'");
      p.object_pose = to_meters(pose_from_json(payload.at("pose")), upm);
      break;
    case Track::kHuman:
      require(payload.contains("joints"), "human prediction needs 'joints'");
      p.joints = to_meters(points_from_json(payload.at("joints")), upm);
      if (payload.contains("parts")) p.parts = parts_from_json(payload.at("parts"));
      break;
    case Track::kJoint:
      require(payload.contains("smpl_vertices"), "joint prediction needs 'smpl_vertices'");
      p.smpl = to_meters(points_from_json(payload.at("smpl_vertices")), upm);
      p.placement = placement_from_json(payload, upm);
      break;
  }
  return p;
}

double submission_upm(const Dataset &ds, const Submission &s) {
  return units_per_meter(s.units.empty() ? ds.manifest.meters_per_unit : meters_per_unit(s.units));
}

void check_prediction(const Dataset &ds, std::size_t frame_index, const ParsedPrediction &p,
                      std::vector<ValidationIssue> &issues, const std::string &id) {
  auto flag = [&](const char *category, const std::string &detail) {
    issues.push_back({id, category, detail});
  };
  switch (ds.manifest.track) {
    case Track::kObject:
      if (!finite_pose(*p.object_pose)) return flag("non_finite", "pose has non-finite values");
      if (!is_rotation(p.object_pose->rotation)) {
        return flag("invariant", "pose rotation is not orthonormal with det +1 within 1e-6");
      }
      break;
    case Track::kHuman: {
      const auto &gt = ds.human_frames[frame_index];
      if (!all_finite(*p.joints)) return flag("non_finite", "joints have non-finite values");
      if (p.parts) {
        for (const auto &r : *p.parts) {
          if (!r.allFinite()) return flag("non_finite", "part rotation has non-finite values");
        }
      }
      if (p.joints->size() != gt.gt_joints.size()) {
        return flag("invariant", "expected " + std::to_string(gt.gt_joints.size()) + " joints, got " +
                                     std::to_string(p.joints->size()));
      }
      if (p.parts) {
        for (const auto &r : *p.parts) {
          if (!is_rotation(r)) return flag("invariant", "part rotation is not a valid rotation");
        }
      }
      break;
    }
    case Track::kJoint: {
      const auto &gt = ds.joint_frames[frame_index];
      if (!all_finite(*p.smpl) || !finite_placement(p.placement)) {
        return flag("non_finite", "vertices or object pose have non-finite values");
      }
      if (p.smpl->size() != gt.gt_smpl_vertices.size()) {
        return flag("invariant", "expected " + std::to_string(gt.gt_smpl_vertices.size()) +
                                     " human vertices, got " + std::to_string(p.smpl->size()));
      }
      if (p.placement.pose && !is_rotation(p.placement.pose->rotation)) {
        return flag("invariant", "object rotation is not a valid rotation");
      }
      const auto expected = ds.registry.at(gt.object_id).mesh.vertices.size();
      if (p.placement.vertices && p.placement.vertices->size() != expected) {
        return flag("invariant", "expected " + std::to_string(expected) + " object vertices, got " +
                                     std::to_string(p.placement.vertices->size()));
      }
      break;
    }
  }
}

}  // namespace

ValidationReport validate_submission(const Dataset &ds, const Submission &s) {
  ValidationReport report;
  if (s.track && *s.track != ds.manifest.track) {
    report.issues.push_back({"", "malformed", "submission track '" + std::string(to_string(*s.track)) +
                                                  "' does not match manifest track '" +
                                                  std::string(to_string(ds.manifest.track)) + "'"});
    return report;
  }
  std::map<std::string, std::size_t> index;
  const auto ids = ds.frame_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);

  const double upm = submission_upm(ds, s);
  std::map<std::string, int> seen;
  for (const auto &[id, payload] : s.frames) ++seen[id];
  for (const auto &[id, count] : seen) {
    if (count > 1) report.issues.push_back({id, "malformed", "frame appears " + std::to_string(count) + " times"});
    if (!index.count(id)) report.extra.push_back(id);
  }
  for (const auto &[id, payload] : s.frames) {
    const auto it = index.find(id);
    if (it == index.end() || seen[id] > 1) continue;
    try {
      const ParsedPrediction p = parse_prediction(ds.manifest.track, payload, upm);
      check_prediction(ds, it->second, p, report.issues, id);
    } catch (const Error &e) {
      report.issues.push_back({id, "malformed", e.what()});
    } catch (const json::exception &e) {
      report.issues.push_back({id, "malformed", e.what()});
    }
  }
  for (const auto &id : ids) {
    if (!seen.count(id)) report.missing.push_back(id);
  }
  std::sort(report.missing.begin(), report.missing.end());
  std::sort(report.issues.begin(), report.issues.end(), [](const auto &a, const auto &b) {
    return std::tie(a.frame_id, a.category, a.detail) < std::tie(b.frame_id, b.category, b.detail);
  });
  return report;
}

void attach_predictions(Dataset &ds, const Submission &s) {
  std::map<std::string, const json *> by_id;
  for (const auto &[id, payload] : s.frames) by_id[id] = &payload;
  const double upm = submission_upm(ds, s);
  const auto ids = ds.frame_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto it = by_id.find(ids[i]);
    if (it == by_id.end()) continue;
    ParsedPrediction p = parse_prediction(ds.manifest.track, *it->second, upm);
    switch (ds.manifest.track) {
      case Track::kObject: ds.object_frames[i].pred_pose = p.object_pose; break;
      case Track::kHuman:
        ds.human_frames[i].pred_joints = std::move(p.joints);
        ds.human_frames[i].pred_parts = p.parts;
        break;
      case Track::kJoint:
        ds.joint_frames[i].pred_smpl_vertices = std::move(p.smpl);
        ds.joint_frames[i].pred_object = std::move(p.placement);
        break;
    }
  }
}

}  // namespace hoieval
