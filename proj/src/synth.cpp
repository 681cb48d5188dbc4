#include "hoieval/synth.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hoieval/dataset.hpp"
#include "hoieval/errors.hpp"
#include "hoieval/joint_metrics.hpp"
#include "hoieval/mesh_io.hpp"
#include "hoieval/reference.hpp"
#include "hoieval/registry.hpp"
#include "hoieval/rng.hpp"

namespace hoieval {

using nlohmann::json;
namespace fs = std::filesystem;

void ensure_synth_spec(const SynthSpec &s) {
  const Perturbation &p = s.perturbation;
  auto bad = [](const std::string &what) { throw Error(ErrorKind::kInvalidArgument, "synth spec: " + what); };
  if (s.frames < 1) bad("frames must be >= 1");
  if (s.units != "m" && s.units != "mm") bad("units must be m or mm");
  if (!(s.missing_fraction >= 0.0 && s.missing_fraction <= 1.0)) bad("missing_fraction must lie in [0, 1]");
  if (s.sample_n < 1) bad("sample_n must be >= 1");
  if (!(p.rotation_deg_min >= 0.0 && p.rotation_deg_min <= p.rotation_deg_max && p.rotation_deg_max <= 180.0)) {
    bad("rotation range must satisfy 0 <= min <= max <= 180");
  }
  for (double v : {p.translation_sigma_m, p.joint_noise_sigma_mm, p.joint_offset_mm, p.part_rotation_deg,
                   p.vertex_noise_sigma_mm}) {
    if (!(v >= 0.0) || !std::isfinite(v)) bad("sigmas, offsets and angles must be finite and >= 0");
  }
}

SynthSpec synth_spec_from_json(const json &doc) {
  SynthSpec s;
  try {
    s.track = parse_track(doc.at("track").get<std::string>());
    s.frames = doc.value("frames", s.frames);
    s.seed = doc.value("seed", s.seed);
    s.units = doc.value("units", s.units);
    s.symmetries = doc.value("symmetries", s.symmetries);
    s.missing_fraction = doc.value("missing_fraction", s.missing_fraction);
    s.score_seed = doc.value("score_seed", s.score_seed);
    s.sample_n = doc.value("sample_n", s.sample_n);
    if (doc.contains("perturbation")) {
      const json &p = doc.at("perturbation");
      Perturbation &q = s.perturbation;
      if (p.contains("rotation_deg")) {
        const json &r = p.at("rotation_deg");
        if (r.is_number()) {
          q.rotation_deg_min = q.rotation_deg_max = r.get<double>();
        } else {
          q.rotation_deg_min = r.at("uniform").at(0).get<double>();
          q.rotation_deg_max = r.at("uniform").at(1).get<double>();
        }
      }
      q.translation_sigma_m = p.value("translation_sigma_m", q.translation_sigma_m);
      q.joint_noise_sigma_mm = p.value("joint_noise_sigma_mm", q.joint_noise_sigma_mm);
      q.joint_offset_mm = p.value("joint_offset_mm", q.joint_offset_mm);
      q.part_rotation_deg = p.value("part_rotation_deg", q.part_rotation_deg);
      q.vertex_noise_sigma_mm = p.value("vertex_noise_sigma_mm", q.vertex_noise_sigma_mm);
      q.scene_similarity = p.value("scene_similarity", q.scene_similarity);
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParseError, std::string("synth spec: ") + e.what());
  }
  ensure_synth_spec(s);
  return s;
}

json to_json(const SynthSpec &s) {
  const Perturbation &p = s.perturbation;
  json rot = p.rotation_deg_min == p.rotation_deg_max
                 ? json(p.rotation_deg_min)
                 : json{{"uniform", {p.rotation_deg_min, p.rotation_deg_max}}};
  return {{"schema_version", kSchemaVersion},
          {"track", std::string(to_string(s.track))},
          {"frames", s.frames},
          {"seed", s.seed},
          {"units", s.units},
          {"symmetries", s.symmetries},
          {"missing_fraction", s.missing_fraction},
          {"score_seed", s.score_seed},
          {"sample_n", s.sample_n},
          {"perturbation",
           {{"rotation_deg", rot},
            {"translation_sigma_m", p.translation_sigma_m},
            {"joint_noise_sigma_mm", p.joint_noise_sigma_mm},
            {"joint_offset_mm", p.joint_offset_mm},
            {"part_rotation_deg", p.part_rotation_deg},
            {"vertex_noise_sigma_mm", p.vertex_noise_sigma_mm},
            {"scene_similarity", p.scene_similarity}}}};
}

// --- primitives ---------------------------------------------------------------

TriMesh make_box(const Vec3 &size) {
  const Vec3 h = 0.5 * size;
  TriMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z());
  }
  m.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
             {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

TriMesh make_cylinder(double radius, double height, int segments) {
  if (segments < 3) throw Error(ErrorKind::kInvalidArgument, "cylinder needs >= 3 segments");
  TriMesh m;
  const auto n = static_cast<std::uint32_t>(segments);
  for (int z = 0; z < 2; ++z) {
    for (std::uint32_t k = 0; k < n; ++k) {
      const double a = 2.0 * kPi * k / n;
      m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), (z ? 0.5 : -0.5) * height);
    }
  }
  const std::uint32_t bottom = 2 * n, top = 2 * n + 1;
  m.vertices.emplace_back(0.0, 0.0, -0.5 * height);
  m.vertices.emplace_back(0.0, 0.0, 0.5 * height);
  for (std::uint32_t k = 0; k < n; ++k) {
    const std::uint32_t k1 = (k + 1) % n;
    m.faces.push_back({k, k1, n + k});
    m.faces.push_back({k1, n + k1, n + k});
    m.faces.push_back({bottom, k1, k});
    m.faces.push_back({top, n + k, n + k1});
  }
  return m;
}

TriMesh make_icosphere(double radius, int subdivisions) {
  TriMesh m;
  // Poles on z, two staggered rings of five: the 5-fold axis is z.
  const double zr = 1.0 / std::sqrt(5.0);
  const double rr = 2.0 / std::sqrt(5.0);
  m.vertices.emplace_back(0.0, 0.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    const double a = 2.0 * kPi * k / 5.0;
    m.vertices.emplace_back(rr * std::cos(a), rr * std::sin(a), zr);
  }
  for (int k = 0; k < 5; ++k) {
    const double a = 2.0 * kPi * k / 5.0 + kPi / 5.0;
    m.vertices.emplace_back(rr * std::cos(a), rr * std::sin(a), -zr);
  }
  m.vertices.emplace_back(0.0, 0.0, -1.0);
  for (std::uint32_t k = 0; k < 5; ++k) {
    const std::uint32_t u0 = 1 + k, u1 = 1 + (k + 1) % 5;
    const std::uint32_t l0 = 6 + k, l1 = 6 + (k + 1) % 5;
    m.faces.push_back({0, u0, u1});
    m.faces.push_back({u0, l0, u1});
    m.faces.push_back({u1, l0, l1});
    m.faces.push_back({11, l1, l0});
  }
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      const auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const auto id = static_cast<std::uint32_t>(m.vertices.size());
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      mid.emplace(key, id);
      return id;
    };
    std::vector<Face> faces;
    for (const Face &f : m.faces) {
      const std::uint32_t ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      faces.push_back({f[0], ab, ca});
      faces.push_back({f[1], bc, ab});
      faces.push_back({f[2], ca, bc});
      faces.push_back({ab, bc, ca});
    }
    m.faces = std::move(faces);
  }
  for (auto &v : m.vertices) v *= radius;
  return m;
}

namespace {

constexpr int kCylinderSegments = 24;

Mat3 rot_z(double a) {
  Mat3 r;
  r << std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a), 0.0, 0.0, 0.0, 1.0;
  return r;
}

Mat3 half_turn(int axis) {
  Mat3 r = -Mat3::Identity();
  r(axis, axis) = 1.0;
  return r;
}

}  // namespace

std::vector<Primitive> synth_primitives(bool with_symmetries) {
  std::vector<Primitive> out;

  Primitive box{"box", make_box(Vec3(0.16, 0.10, 0.06)), {}, {Mat3::Identity()}};
  Primitive cyl{"cylinder", make_cylinder(0.04, 0.14, kCylinderSegments), {}, {Mat3::Identity()}};
  Primitive ico{"icosphere", make_icosphere(0.06, 1), {}, {Mat3::Identity()}};
  if (with_symmetries) {
    box.declared.transforms = {Mat3::Identity(), half_turn(0), half_turn(1), half_turn(2)};
    box.group = box.declared.transforms;

    cyl.declared.transforms = {Mat3::Identity(), half_turn(0)};
    cyl.declared.continuous = {ContinuousAxis{Vec3::UnitZ(), kCylinderSegments}};
    cyl.group.clear();
    for (int k = 0; k < kCylinderSegments; ++k) {
      const Mat3 r = rot_z(2.0 * kPi * k / kCylinderSegments);
      cyl.group.push_back(r);
      cyl.group.push_back(half_turn(0) * r);
    }

    for (int k = 1; k < 5; ++k) ico.declared.transforms.push_back(rot_z(2.0 * kPi * k / 5.0));
    ico.group = ico.declared.transforms;
  }
  for (Primitive *p : {&box, &cyl, &ico}) p->declared.object_id = p->id;
  out.push_back(std::move(box));
  out.push_back(std::move(cyl));
  out.push_back(std::move(ico));
  return out;
}

TriMesh synth_human_template() {
  TriMesh m = make_icosphere(1.0, 3);
  for (auto &v : m.vertices) v = v.cwiseProduct(Vec3(0.18, 0.12, 0.5));
  return m;
}

// --- generation -----------------------------------------------------------------

namespace {

constexpr std::uint64_t kSynthRole = 100;

Mat3 random_rotation(Rng &rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  return q.normalized().toRotationMatrix();
}

Vec3 random_unit(Rng &rng) {
  Vec3 v;
  do {
    v = Vec3(rng.normal(), rng.normal(), rng.normal());
  } while (v.norm() < 1e-9);
  return v.normalized();
}

Vec3 gaussian3(Rng &rng, double sigma) {
  const double x = rng.normal(0.0, sigma);
  const double y = rng.normal(0.0, sigma);
  const double z = rng.normal(0.0, sigma);
  return {x, y, z};
}

Mat3 perturb_rotation(Rng &rng, const Mat3 &r, const Perturbation &p) {
  const double deg = p.rotation_deg_min == p.rotation_deg_max
                         ? p.rotation_deg_min
                         : rng.uniform(p.rotation_deg_min, p.rotation_deg_max);
  const Vec3 axis = random_unit(rng);
  return r * axis_angle(axis, deg_to_rad(deg));
}

SimilarityTransform random_similarity(Rng &rng) {
  SimilarityTransform t;
  t.scale = rng.uniform(0.5, 2.0);
  t.rotation = random_rotation(rng);
  t.translation = gaussian3(rng, 1.0);
  return t;
}

std::string frame_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "f%06zu", i);
  return buf;
}

double reference_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double reference_mean(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Recall fractions for one threshold list; errors absent from `errors` fail.
double recall_at(const std::vector<double> &errors, std::size_t total, double threshold) {
  std::size_t pass = 0;
  for (double e : errors) pass += e <= threshold ? 1 : 0;
  return static_cast<double>(pass) / static_cast<double>(total);
}

struct Writer {
  double scale;  // file units per meter

  json vec(const Vec3 &v) const { return to_json(Vec3(v * scale)); }
  json pose(const RigidPose &p) const { return {{"R", to_json(p.rotation)}, {"t", vec(p.translation)}}; }
  json points(const PointCloud &pts) const {
    json a = json::array();
    for (const auto &p : pts) a.push_back(vec(p));
    return a;
  }
};

json parts_json(const PartRotations &parts) {
  json a = json::array();
  for (const auto &r : parts) a.push_back(to_json(r));
  return a;
}

struct Context {
  const SynthSpec &spec;
  fs::path dir;
  Writer w;
  json manifest_frames = json::array();
  json submission_frames = json::array();
  AnswerSheet sheet;

  void add_frame(const std::string &id, json gt, json pred, bool missing) {
    gt["schema_version"] = kSchemaVersion;
    gt["frame_id"] = id;
    write_json_file(gt, dir / "gt" / (id + ".json"));
    manifest_frames.push_back({{"frame_id", id}, {"gt", "gt/" + id + ".json"}});
    if (missing) {
      sheet.missing.push_back(id);
    } else {
      pred["frame_id"] = id;
      submission_frames.push_back(std::move(pred));
    }
  }
};

void write_registry(const std::vector<Primitive> &prims, const fs::path &dir) {
  fs::create_directories(dir);
  for (const auto &p : prims) {
    save_obj(p.mesh, dir / (p.id + ".obj"));
    write_json_file(symmetry_to_json(p.declared), dir / (p.id + ".sym.json"));
  }
}

void generate_object(Context &ctx, const std::vector<Primitive> &prims, json &manifest) {
  const CameraIntrinsics k{600.0, 600.0, 320.0, 240.0};
  manifest["intrinsics"] = to_json(k);
  const Perturbation &p = ctx.spec.perturbation;
  const std::size_t n = ctx.spec.frames;
  std::vector<double> mssd_ok, mspd_ok, re_ok;  // present frames only
  std::vector<std::pair<double, double>> mssd_and_diameter;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = frame_name(i);
    Rng rng(derive_seed(ctx.spec.seed, id, kSynthRole));
    const Primitive &prim = prims[rng.below(prims.size())];
    RigidPose gt{random_rotation(rng), Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2), rng.uniform(1.0, 2.0))};
    RigidPose pred{perturb_rotation(rng, gt.rotation, p), gt.translation + gaussian3(rng, p.translation_sigma_m)};
    const bool missing = rng.uniform() < ctx.spec.missing_fraction;

    const double diameter = reference::diameter_bruteforce(prim.mesh.vertices);
    auto &row = ctx.sheet.frames[id];
    row["diameter"] = diameter;
    if (!missing) {
      const double e_mssd = reference::mssd_exhaustive(pred, gt, prim.mesh.vertices, prim.group);
      const double e_mspd = reference::mspd_exhaustive(pred, gt, prim.mesh.vertices, prim.group, k);
      const double e_re = reference::re_exhaustive_deg(pred.rotation, gt.rotation, prim.group);
      row["MSSD"] = e_mssd;
      row["MSPD"] = e_mspd;
      row["RE"] = e_re;
      mssd_ok.push_back(e_mssd);
      mspd_ok.push_back(e_mspd);
      re_ok.push_back(e_re);
      mssd_and_diameter.emplace_back(e_mssd, diameter);
    }
    ctx.add_frame(id, {{"object_id", prim.id}, {"pose", ctx.w.pose(gt)}}, {{"pose", ctx.w.pose(pred)}},
                  missing);
  }

  auto ar = [](const std::vector<double> &recalls) { return reference_mean(recalls); };
  std::vector<double> mssd_r, mspd_r, re_r;
  for (int s = 1; s <= 10; ++s) {
    const double frac = 5.0 * s / 100.0;
    std::size_t pass = 0;
    for (const auto &[e, d] : mssd_and_diameter) pass += e <= d * frac ? 1 : 0;
    mssd_r.push_back(static_cast<double>(pass) / static_cast<double>(n));
  }
  for (int s = 1; s <= 20; ++s) mspd_r.push_back(recall_at(mspd_ok, n, 5.0 * s));
  for (int s = 1; s <= 10; ++s) re_r.push_back(recall_at(re_ok, n, 2.0 * s));
  auto &agg = ctx.sheet.aggregates;
  agg["MSSD-AR"] = ar(mssd_r);
  agg["MSPD-AR"] = ar(mspd_r);
  agg["RE-AR"] = ar(re_r);
  agg["AR-all"] = (agg["MSSD-AR"] + agg["MSPD-AR"] + agg["RE-AR"]) / 3.0;
  if (!mssd_ok.empty()) {
    agg["MSSD"] = reference_median(mssd_ok);
    agg["MSPD"] = reference_median(mspd_ok);
    agg["RE"] = reference_median(re_ok);
  }
}

void generate_human(Context &ctx) {
  const Perturbation &p = ctx.spec.perturbation;
  const std::size_t n = ctx.spec.frames;
  std::map<std::string, std::vector<double>> present;
  std::vector<double> pck_all, auc_all;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = frame_name(i);
    Rng rng(derive_seed(ctx.spec.seed, id, kSynthRole));
    const Vec3 root(rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3), rng.uniform(2.5, 4.0));
    JointSet gt(kDefaultJointCount);
    for (auto &j : gt) j = root + gaussian3(rng, 0.25);
    PartRotations gt_parts, pred_parts;
    for (auto &r : gt_parts) r = random_rotation(rng);
    JointSet pred(gt.size());
    for (std::size_t j = 0; j < gt.size(); ++j) {
      pred[j] = gt[j] + random_unit(rng) * (p.joint_offset_mm / 1000.0) +
                gaussian3(rng, p.joint_noise_sigma_mm / 1000.0);
    }
    for (std::size_t k = 0; k < kPartCount; ++k) {
      pred_parts[k] = gt_parts[k] * axis_angle(random_unit(rng), deg_to_rad(p.part_rotation_deg));
    }
    if (p.scene_similarity) {
      const SimilarityTransform t = random_similarity(rng);
      for (auto &j : pred) j = t.scale * (t.rotation * j) + t.translation;
      for (auto &r : pred_parts) r = t.rotation * r;
    }
    const bool missing = rng.uniform() < ctx.spec.missing_fraction;

    if (!missing) {
      auto &row = ctx.sheet.frames[id];
      const auto err = reference::joint_errors_mm(pred, gt);
      const SimilarityTransform align = reference::horn_similarity(pred, gt);
      PointCloud aligned;
      for (const auto &j : pred) aligned.push_back(align.scale * (align.rotation * j) + align.translation);
      const double jn = static_cast<double>(gt.size());
      row["MPJPE"] = reference_mean(err);
      row["MPJPE-PA"] = reference_mean(reference::joint_errors_mm(aligned, gt));
      row["PCK"] = 100.0 * static_cast<double>(reference::pck_count(err, 50.0)) / jn;
      double auc = 0.0;
      for (int t = 0; t <= 200; ++t) auc += static_cast<double>(reference::pck_count(err, t)) / jn;
      row["AUC"] = auc / 201.0;
      double ang = 0.0, ang_pa = 0.0;
      for (std::size_t k = 0; k < kPartCount; ++k) {
        ang += reference::quaternion_angle(gt_parts[k], pred_parts[k]);
        ang_pa += reference::quaternion_angle(gt_parts[k], align.rotation * pred_parts[k]);
      }
      row["MPJAE"] = ang / kPartCount * 180.0 / kPi;
      row["MPJAE-PA"] = ang_pa / kPartCount * 180.0 / kPi;
      for (const auto &[key, v] : row) present[key].push_back(v);
      pck_all.push_back(row["PCK"]);
      auc_all.push_back(row["AUC"]);
    } else {
      pck_all.push_back(0.0);
      auc_all.push_back(0.0);
    }
    ctx.add_frame(id, {{"joints", ctx.w.points(gt)}, {"parts", parts_json(gt_parts)}},
                  {{"joints", ctx.w.points(pred)}, {"parts", parts_json(pred_parts)}}, missing);
  }
  auto &agg = ctx.sheet.aggregates;
  for (const char *key : {"MPJPE", "MPJPE-PA", "MPJAE", "MPJAE-PA"}) {
    if (present.count(key)) agg[key] = reference_mean(present[key]);
  }
  agg["PCK"] = reference_mean(pck_all);
  agg["AUC"] = reference_mean(auc_all);
}

void generate_joint(Context &ctx, const std::vector<Primitive> &prims, const TriMesh &human,
                    json &manifest) {
  save_obj(human, ctx.dir / "human_template.obj");
  manifest["human_template"] = "human_template.obj";
  manifest["sample_n"] = ctx.spec.sample_n;
  const Perturbation &p = ctx.spec.perturbation;
  const std::size_t n = ctx.spec.frames;
  std::vector<double> smpl_ok, object_ok;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = frame_name(i);
    Rng rng(derive_seed(ctx.spec.seed, id, kSynthRole));
    const Primitive &prim = prims[rng.below(prims.size())];
    const RigidPose body{random_rotation(rng),
                         Vec3(rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3), rng.uniform(2.5, 3.5))};
    const RigidPose gt_obj{random_rotation(rng),
                           body.translation + Vec3(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4),
                                                   rng.uniform(-0.2, 0.2))};
    PointCloud gt_smpl;
    for (const auto &v : human.vertices) gt_smpl.push_back(body.rotation * v + body.translation);
    PointCloud pred_smpl;
    for (const auto &v : gt_smpl) pred_smpl.push_back(v + gaussian3(rng, p.vertex_noise_sigma_mm / 1000.0));
    const RigidPose pred_obj{perturb_rotation(rng, gt_obj.rotation, p),
                             gt_obj.translation + gaussian3(rng, p.translation_sigma_m)};
    PointCloud pred_obj_v, gt_obj_v;
    for (const auto &v : prim.mesh.vertices) {
      pred_obj_v.push_back(pred_obj.rotation * v + pred_obj.translation);
      gt_obj_v.push_back(gt_obj.rotation * v + gt_obj.translation);
    }
    json pred = {{"smpl_vertices", nullptr}};
    if (p.scene_similarity) {
      const SimilarityTransform t = random_similarity(rng);
      for (auto &v : pred_smpl) v = t.scale * (t.rotation * v) + t.translation;
      for (auto &v : pred_obj_v) v = t.scale * (t.rotation * v) + t.translation;
      pred["object_vertices"] = ctx.w.points(pred_obj_v);
    } else {
      pred["object_pose"] = ctx.w.pose(pred_obj);
    }
    pred["smpl_vertices"] = ctx.w.points(pred_smpl);
    const bool missing = rng.uniform() < ctx.spec.missing_fraction;

    if (!missing) {
      PointCloud src = pred_smpl, dst = gt_smpl;
      src.insert(src.end(), pred_obj_v.begin(), pred_obj_v.end());
      dst.insert(dst.end(), gt_obj_v.begin(), gt_obj_v.end());
      const SimilarityTransform align = reference::horn_similarity(src, dst);
      const SamplingSeeds seeds = SamplingSeeds::derive(ctx.spec.score_seed, id);
      auto sampled = [&](const PointCloud &verts, const TriMesh &topo, std::uint64_t seed, bool move) {
        PointCloud s = sample_surface(TriMesh{verts, topo.faces}, ctx.spec.sample_n, seed);
        if (move) {
          for (auto &q : s) q = align.scale * (align.rotation * q) + align.translation;
        }
        return s;
      };
      const double smpl = 1000.0 * reference::chamfer_sweep(sampled(pred_smpl, human, seeds.pred_smpl, true),
                                                             sampled(gt_smpl, human, seeds.gt_smpl, false));
      const double obj =
          1000.0 * reference::chamfer_sweep(sampled(pred_obj_v, prim.mesh, seeds.pred_object, true),
                                            sampled(gt_obj_v, prim.mesh, seeds.gt_object, false));
      auto &row = ctx.sheet.frames[id];
      row["SMPL"] = smpl;
      row["Object"] = obj;
      row["alignment_scale"] = align.scale;
      smpl_ok.push_back(smpl);
      object_ok.push_back(obj);
    }
    ctx.add_frame(id,
                  {{"object_id", prim.id}, {"smpl_vertices", ctx.w.points(gt_smpl)},
                   {"object_pose", ctx.w.pose(gt_obj)}},
                  std::move(pred), missing);
  }
  if (!smpl_ok.empty()) {
    ctx.sheet.aggregates["SMPL"] = reference_mean(smpl_ok);
    ctx.sheet.aggregates["Object"] = reference_mean(object_ok);
  }
}

}  // namespace

SynthPaths synth_generate(const SynthSpec &spec, const fs::path &out_dir) {
  ensure_synth_spec(spec);
  fs::create_directories(out_dir / "gt");
  Context ctx{spec, out_dir, Writer{spec.units == "mm" ? 1000.0 : 1.0}, json::array(), json::array(), {}};
  ctx.sheet.track = spec.track;

  json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["track"] = std::string(to_string(spec.track));
  manifest["units"] = spec.units;

  const auto prims = synth_primitives(spec.symmetries);
  if (spec.track != Track::kHuman) {
    write_registry(prims, out_dir / "registry");
    manifest["registry"] = "registry";
  }
  switch (spec.track) {
    case Track::kObject: generate_object(ctx, prims, manifest); break;
    case Track::kHuman: generate_human(ctx); break;
    case Track::kJoint: generate_joint(ctx, prims, synth_human_template(), manifest); break;
  }
  manifest["frames"] = std::move(ctx.manifest_frames);

  const auto n = static_cast<std::int64_t>(spec.frames);
  const auto missing = static_cast<std::int64_t>(ctx.sheet.missing.size());
  ctx.sheet.counts = {{"frames", n}, {"scored", n - missing}, {"missing", missing}};

  SynthPaths paths{out_dir / "manifest.json", out_dir / "submission.json", out_dir / "answer.json"};
  write_json_file(manifest, paths.manifest);
  write_json_file({{"schema_version", kSchemaVersion},
                   {"name", "synthetic"},
                   {"track", std::string(to_string(spec.track))},
                   {"units", spec.units},
                   {"frames", std::move(ctx.submission_frames)}},
                  paths.submission);
  json answer = to_json(ctx.sheet);
  answer["spec"] = to_json(spec);
  write_json_file(answer, paths.answer);
  return paths;
}

// --- answer sheets ------------------------------------------------------------

json to_json(const AnswerSheet &s) {
  return {{"schema_version", kSchemaVersion},
          {"track", std::string(to_string(s.track))},
          {"frames", s.frames},
          {"missing", s.missing},
          {"aggregates", s.aggregates},
          {"counts", s.counts}};
}

AnswerSheet answer_sheet_from_json(const json &doc) {
  try {
    AnswerSheet s;
    s.track = parse_track(doc.at("track").get<std::string>());
    s.frames = doc.at("frames").get<std::map<std::string, std::map<std::string, double>>>();
    s.missing = doc.at("missing").get<std::vector<std::string>>();
    s.aggregates = doc.at("aggregates").get<std::map<std::string, double>>();
    s.counts = doc.at("counts").get<std::map<std::string, std::int64_t>>();
    return s;
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParseError, std::string("answer sheet: ") + e.what());
  }
}

namespace {

bool counting_metric(const std::string &key) {
  return key == "PCK" || key == "AR-all" || key.ends_with("-AR");
}

void compare_value(std::vector<std::string> &out, const std::string &where, const std::string &key,
                   double expected, double actual, double tol) {
  const bool ok = counting_metric(key) ? expected == actual : std::abs(expected - actual) <= tol;
  if (!ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %s: expected %.17g, got %.17g", where.c_str(), key.c_str(),
                  expected, actual);
    out.emplace_back(buf);
  }
}

}  // namespace

std::vector<std::string> compare_to_answer(const ScoreReport &report, const AnswerSheet &sheet,
                                           double tol) {
  std::vector<std::string> out;
  if (report.track != sheet.track) out.push_back("track differs");
  std::map<std::string, const FrameRow *> rows;
  for (const auto &r : report.frames) rows[r.frame_id] = &r;
  for (const auto &id : sheet.missing) {
    const auto it = rows.find(id);
    if (it == rows.end() || !it->second->missing) out.push_back("frame " + id + ": expected missing");
  }
  for (const auto &[id, metrics] : sheet.frames) {
    const auto it = rows.find(id);
    if (it == rows.end()) {
      out.push_back("frame " + id + ": absent from report");
      continue;
    }
    for (const auto &[key, expected] : metrics) {
      const auto m = it->second->metrics.find(key);
      if (m == it->second->metrics.end()) {
        out.push_back("frame " + id + ": metric " + key + " absent");
      } else {
        compare_value(out, "frame " + id, key, expected, m->second, tol);
      }
    }
  }
  for (const auto &[key, expected] : sheet.aggregates) {
    const auto it = report.aggregates.find(key);
    if (it == report.aggregates.end()) {
      out.push_back("aggregate " + key + " absent");
    } else {
      compare_value(out, "aggregate", key, expected, it->second, tol);
    }
  }
  for (const auto &[key, expected] : sheet.counts) {
    const auto it = report.counts.find(key);
    if (it == report.counts.end() || it->second != expected) out.push_back("count " + key + " differs");
  }
  return out;
}

}  // namespace hoieval
