#include "hoieval/object_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hoieval/errors.hpp"
#include "hoieval/parallel.hpp"
#include "hoieval/registry.hpp"

namespace hoieval {

void ensure_symmetry_set(const SymmetrySet &s) {
  if (s.transforms.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "symmetry set for '" + s.object_id + "' is empty");
  }
  bool has_identity = false;
  for (const Mat3 &t : s.transforms) {
    ensure_rotation(t, "symmetry transform");
    if ((t - Mat3::Identity()).cwiseAbs().maxCoeff() <= kRotationTolerance) has_identity = true;
  }
  if (!has_identity) {
    throw Error(ErrorKind::kInvalidArgument,
                "symmetry set for '" + s.object_id + "' lacks the identity");
  }
  for (const auto &axis : s.continuous) {
    if (axis.count < 2 || !axis.axis.allFinite() || axis.axis.norm() < 1e-12) {
      throw Error(ErrorKind::kInvalidArgument,
                  "continuous symmetry axis needs a non-zero axis and count >= 2");
    }
  }
}

SymmetrySet expand_symmetries(const SymmetrySet &s) {
  ensure_symmetry_set(s);
  std::vector<Mat3> current = s.transforms;
  for (const auto &axis : s.continuous) {
    std::vector<Mat3> next;
    next.reserve(current.size() * static_cast<std::size_t>(axis.count));
    for (const Mat3 &d : current) {
      for (int i = 0; i < axis.count; ++i) {
        next.push_back(d * axis_angle(axis.axis, 2.0 * kPi * i / axis.count));
      }
    }
    current = std::move(next);
  }
  SymmetrySet out;
  out.object_id = s.object_id;
  out.transforms.clear();
  for (const Mat3 &t : current) {
    const bool dup = std::any_of(out.transforms.begin(), out.transforms.end(), [&](const Mat3 &u) {
      return (u - t).cwiseAbs().maxCoeff() <= 1e-12;
    });
    if (!dup) out.transforms.push_back(t);
  }
  return out;
}

namespace {

void require_expanded(const SymmetrySet &sym) {
  if (!sym.continuous.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "symmetry set must be expanded first");
  }
  if (sym.transforms.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "symmetry set is empty");
  }
}

}  // namespace

double mssd(const RigidPose &pred, const RigidPose &gt, const TriMesh &mesh,
            const SymmetrySet &sym) {
  require_expanded(sym);
  if (mesh.vertices.empty()) throw Error(ErrorKind::kEmptyMesh, "mssd over a mesh without vertices");
  // pred·x - gt·S·x = (R̂ - R·S)·x + (t̂ - t)
  const Vec3 dt = pred.translation - gt.translation;
  double best = std::numeric_limits<double>::infinity();
  for (const Mat3 &s : sym.transforms) {
    const Mat3 dr = pred.rotation - gt.rotation * s;
    double worst = 0.0;
    for (const Vec3 &x : mesh.vertices) {
      worst = std::max(worst, (dr * x + dt).squaredNorm());
      if (worst >= best) break;
    }
    best = std::min(best, worst);
  }
  return std::sqrt(best);
}

double mspd(const RigidPose &pred, const RigidPose &gt, const TriMesh &mesh,
            const SymmetrySet &sym, const CameraIntrinsics &k) {
  require_expanded(sym);
  if (mesh.vertices.empty()) throw Error(ErrorKind::kEmptyMesh, "mspd over a mesh without vertices");
  std::vector<Vec2> pred_px;
  pred_px.reserve(mesh.vertices.size());
  for (const Vec3 &x : mesh.vertices) pred_px.push_back(project(k, pred.apply(x)));

  double best = std::numeric_limits<double>::infinity();
  for (const Mat3 &s : sym.transforms) {
    const Mat3 rs = gt.rotation * s;
    double worst = 0.0;
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      const Vec2 gt_px = project(k, rs * mesh.vertices[i] + gt.translation);
      worst = std::max(worst, (pred_px[i] - gt_px).squaredNorm());
    }
    best = std::min(best, worst);
  }
  return std::sqrt(best);
}

double rotation_error(const Mat3 &pred_r, const Mat3 &gt_r, const SymmetrySet &sym) {
  require_expanded(sym);
  double best = std::numeric_limits<double>::infinity();
  for (const Mat3 &s : sym.transforms) {
    best = std::min(best, geodesic_so3(pred_r, gt_r * s));
  }
  return rad_to_deg(best);
}

void ensure_schedule(const RecallSchedule &s) {
  if (s.thresholds.empty()) throw Error(ErrorKind::kInvalidArgument, "empty recall schedule");
  for (std::size_t i = 0; i < s.thresholds.size(); ++i) {
    const double t = s.thresholds[i];
    if (!(t > 0.0) || !std::isfinite(t) || (i > 0 && !(t > s.thresholds[i - 1]))) {
      throw Error(ErrorKind::kInvalidArgument,
                  "recall thresholds must be positive, finite and strictly increasing");
    }
  }
}

std::vector<double> recall_curve(std::span<const double> errors,
                                 const RecallSchedule &schedule) {
  if (errors.empty()) throw Error(ErrorKind::kEmptyInput, "recall over no errors");
  ensure_schedule(schedule);
  std::vector<double> out;
  out.reserve(schedule.thresholds.size());
  for (double tau : schedule.thresholds) {
    const auto pass = std::count_if(errors.begin(), errors.end(),
                                    [tau](double e) { return e <= tau; });
    out.push_back(static_cast<double>(pass) / static_cast<double>(errors.size()));
  }
  return out;
}

double average_recall(std::span<const double> errors, const RecallSchedule &schedule) {
  const auto curve = recall_curve(errors, schedule);
  return mean_of(curve);
}

RecallSchedule mssd_fraction_schedule() {
  RecallSchedule s{{}, "fraction_of_diameter"};
  for (int k = 1; k <= kMssdSteps; ++k) s.thresholds.push_back(5.0 * k / 100.0);
  return s;
}

RecallSchedule mssd_schedule(double diameter_m) {
  RecallSchedule s = mssd_fraction_schedule();
  for (double &t : s.thresholds) t *= diameter_m;
  s.unit = "m";
  return s;
}

RecallSchedule mspd_schedule() {
  RecallSchedule s{{}, "px"};
  for (int k = 1; k <= kMspdSteps; ++k) s.thresholds.push_back(5.0 * k);
  return s;
}

RecallSchedule re_schedule() {
  RecallSchedule s{{}, "deg"};
  for (int k = 1; k <= kReSteps; ++k) s.thresholds.push_back(kReReferenceDeg * 5.0 * k / 100.0);
  return s;
}

ObjectFrameErrors score_object_frame(const ObjectFrame &frame, const Registry &registry) {
  if (!frame.pred_pose) {
    throw Error(ErrorKind::kInvalidArgument, "frame has no prediction");
  }
  const RegistryEntry &entry = registry.at(frame.object_id);
  ObjectFrameErrors e;
  e.mssd_m = mssd(*frame.pred_pose, frame.gt_pose, entry.mesh, entry.symmetries);
  e.mspd_px = mspd(*frame.pred_pose, frame.gt_pose, entry.mesh, entry.symmetries,
                   frame.intrinsics);
  e.re_deg = rotation_error(frame.pred_pose->rotation, frame.gt_pose.rotation,
                            entry.symmetries);
  return e;
}

namespace {

std::vector<std::size_t> order_by_frame_id(std::size_t n, auto id_of) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return id_of(a) < id_of(b); });
  for (std::size_t i = 1; i < n; ++i) {
    if (id_of(order[i]) == id_of(order[i - 1])) {
      throw Error(ErrorKind::kInvalidArgument, "duplicate frame_id '" + id_of(order[i]) + "'");
    }
  }
  return order;
}

}  // namespace

ScoreReport score_object_track(std::span<const ObjectFrame> frames,
                               const Registry &registry,
                               const ObjectTrackOptions &options) {
  if (frames.empty()) throw Error(ErrorKind::kEmptyInput, "object track without frames");
  const auto order = order_by_frame_id(
      frames.size(), [&](std::size_t i) -> const std::string & { return frames[i].frame_id; });

  auto per_frame = parallel_map(frames.size(), options.threads,
                                [&](std::size_t i) -> std::optional<ObjectFrameErrors> {
    const ObjectFrame &f = frames[order[i]];
    if (!f.pred_pose) return std::nullopt;
    try {
      return score_object_frame(f, registry);
    } catch (const Error &e) {
      throw FrameError(f.frame_id, e);
    }
  });

  ScoreReport report;
  report.track = Track::kObject;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> mssd_present, mspd_present, re_present;
  std::vector<double> mspd_all, re_all, diameters;
  std::int64_t missing = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const ObjectFrame &f = frames[order[i]];
    FrameRow row;
    row.frame_id = f.frame_id;
    const double diameter = registry.at(f.object_id).diameter;
    diameters.push_back(diameter);
    row.metrics["diameter"] = diameter;
    if (per_frame[i]) {
      const auto &e = *per_frame[i];
      row.metrics["MSSD"] = e.mssd_m;
      row.metrics["MSPD"] = e.mspd_px;
      row.metrics["RE"] = e.re_deg;
      mssd_present.push_back(e.mssd_m);
      mspd_present.push_back(e.mspd_px);
      re_present.push_back(e.re_deg);
      mspd_all.push_back(e.mspd_px);
      re_all.push_back(e.re_deg);
    } else {
      row.missing = true;
      ++missing;
      mspd_all.push_back(inf);
      re_all.push_back(inf);
    }
    report.frames.push_back(std::move(row));
  }

  // MSSD thresholds scale with each frame's own object diameter.
  const RecallSchedule fractions = mssd_fraction_schedule();
  Curve mssd_curve{"fraction_of_diameter", "recall", fractions.thresholds, {}};
  for (double frac : fractions.thresholds) {
    std::size_t pass = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (per_frame[i] && per_frame[i]->mssd_m <= diameters[i] * frac) ++pass;
    }
    mssd_curve.values.push_back(static_cast<double>(pass) / static_cast<double>(frames.size()));
  }
  const RecallSchedule mspd_s = mspd_schedule();
  const RecallSchedule re_s = re_schedule();
  Curve mspd_curve{"px", "recall", mspd_s.thresholds, recall_curve(mspd_all, mspd_s)};
  Curve re_curve{"deg", "recall", re_s.thresholds, recall_curve(re_all, re_s)};

  const double mssd_ar = mean_of(mssd_curve.values);
  const double mspd_ar = mean_of(mspd_curve.values);
  const double re_ar = mean_of(re_curve.values);
  report.aggregates["MSSD-AR"] = mssd_ar;
  report.aggregates["MSPD-AR"] = mspd_ar;
  report.aggregates["RE-AR"] = re_ar;
  report.aggregates["AR-all"] = (mssd_ar + mspd_ar + re_ar) / 3.0;
  if (!mssd_present.empty()) {
    report.aggregates["MSSD"] = aggregate(std::move(mssd_present), options.aggregation);
    report.aggregates["MSPD"] = aggregate(std::move(mspd_present), options.aggregation);
    report.aggregates["RE"] = aggregate(std::move(re_present), options.aggregation);
  }
  report.curves["MSSD-AR"] = std::move(mssd_curve);
  report.curves["MSPD-AR"] = std::move(mspd_curve);
  report.curves["RE-AR"] = std::move(re_curve);
  report.units = {{"MSSD", "m"},       {"MSPD", "px"},      {"RE", "deg"},
                  {"diameter", "m"},   {"MSSD-AR", "fraction"}, {"MSPD-AR", "fraction"},
                  {"RE-AR", "fraction"}, {"AR-all", "fraction"}};
  report.settings["aggregation"] = std::string(to_string(options.aggregation));
  report.counts = {{"frames", static_cast<std::int64_t>(frames.size())},
                   {"scored", static_cast<std::int64_t>(frames.size()) - missing},
                   {"missing", missing}};
  return report;
}

}  // namespace hoieval
