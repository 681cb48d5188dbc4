#include "hoieval/human_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hoieval/errors.hpp"
#include "hoieval/parallel.hpp"

namespace hoieval {

namespace {

constexpr double kMmPerM = 1000.0;

std::vector<double> joint_errors_mm(std::span<const Vec3> pred, std::span<const Vec3> gt) {
  ensure_joint_pair(pred, gt);
  std::vector<double> out(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) out[i] = (gt[i] - pred[i]).norm() * kMmPerM;
  return out;
}

double pck_from_errors(std::span<const double> errors_mm, double threshold_mm) {
  const auto correct = std::count_if(errors_mm.begin(), errors_mm.end(),
                                     [&](double e) { return e < threshold_mm; });
  return 100.0 * static_cast<double>(correct) / static_cast<double>(errors_mm.size());
}

}  // namespace

void ensure_joint_pair(std::span<const Vec3> pred, std::span<const Vec3> gt) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorKind::kCountMismatch, "joint counts differ (" + std::to_string(pred.size()) +
                                               " vs " + std::to_string(gt.size()) + ")");
  }
  if (gt.size() < 3) throw Error(ErrorKind::kInvalidArgument, "joint sets need >= 3 joints");
  for (std::size_t i = 0; i < gt.size(); ++i) {
    ensure_finite(pred[i], "predicted joint");
    ensure_finite(gt[i], "ground-truth joint");
  }
}

double mpjpe(std::span<const Vec3> pred, std::span<const Vec3> gt) {
  const auto errors = joint_errors_mm(pred, gt);
  return mean_of(errors);
}

AlignedError mpjpe_pa(std::span<const Vec3> pred, std::span<const Vec3> gt) {
  ensure_joint_pair(pred, gt);
  AlignedError out;
  out.alignment = procrustes_similarity(pred, gt);
  const PointCloud aligned = transform_points(out.alignment, pred);
  out.mpjpe_mm = mpjpe(aligned, gt);
  return out;
}

double pck(std::span<const Vec3> pred, std::span<const Vec3> gt, double threshold_mm) {
  return pck_from_errors(joint_errors_mm(pred, gt), threshold_mm);
}

std::vector<double> AucSchedule::thresholds() const {
  if (!(step_mm > 0.0) || !(max_mm >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "AUC schedule needs step > 0 and max >= 0");
  }
  std::vector<double> out;
  const auto steps = static_cast<long>(std::floor(max_mm / step_mm + 1e-9));
  for (long k = 0; k <= steps; ++k) out.push_back(static_cast<double>(k) * step_mm);
  return out;
}

double auc(std::span<const Vec3> pred, std::span<const Vec3> gt, const AucSchedule &schedule) {
  const auto errors = joint_errors_mm(pred, gt);
  const auto taus = schedule.thresholds();
  double sum = 0.0;
  for (double tau : taus) sum += pck_from_errors(errors, tau) / 100.0;
  return sum / static_cast<double>(taus.size());
}

double mpjae(const PartRotations &pred, const PartRotations &gt) {
  double sum = 0.0;
  for (std::size_t k = 0; k < kPartCount; ++k) sum += rad_to_deg(geodesic_so3(gt[k], pred[k]));
  return sum / static_cast<double>(kPartCount);
}

double mpjae_pa(const PartRotations &pred, const PartRotations &gt, const Mat3 &global_r) {
  PartRotations rotated;
  for (std::size_t k = 0; k < kPartCount; ++k) rotated[k] = global_r * pred[k];
  return mpjae(rotated, gt);
}

namespace {

struct HumanFrameResult {
  std::map<std::string, double> metrics;
  std::vector<double> pck_curve;
  bool angles_skipped = false;
};

HumanFrameResult score_frame(const HumanFrame &f, const HumanTrackOptions &opt,
                             const std::vector<double> &taus) {
  HumanFrameResult r;
  const JointSet &pred = *f.pred_joints;
  const auto errors = joint_errors_mm(pred, f.gt_joints);
  const AlignedError pa = mpjpe_pa(pred, f.gt_joints);
  r.metrics["MPJPE"] = mean_of(errors);
  r.metrics["MPJPE-PA"] = pa.mpjpe_mm;
  r.metrics["PCK"] = pck_from_errors(errors, opt.pck_threshold_mm);
  double auc_sum = 0.0;
  r.pck_curve.reserve(taus.size());
  for (double tau : taus) {
    const double p = pck_from_errors(errors, tau);
    r.pck_curve.push_back(p);
    auc_sum += p / 100.0;
  }
  r.metrics["AUC"] = auc_sum / static_cast<double>(taus.size());
  if (f.gt_parts && f.pred_parts) {
    for (std::size_t k = 0; k < kPartCount; ++k) {
      ensure_rotation((*f.gt_parts)[k], "ground-truth part rotation");
      ensure_rotation((*f.pred_parts)[k], "predicted part rotation");
    }
    r.metrics["MPJAE"] = mpjae(*f.pred_parts, *f.gt_parts);
    r.metrics["MPJAE-PA"] = mpjae_pa(*f.pred_parts, *f.gt_parts, pa.alignment.rotation);
  } else {
    r.angles_skipped = true;
  }
  return r;
}

}  // namespace

ScoreReport score_human_track(std::span<const HumanFrame> frames,
                              const HumanTrackOptions &options) {
  if (frames.empty()) throw Error(ErrorKind::kEmptyInput, "human track without frames");
  std::vector<std::size_t> order(frames.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return frames[a].frame_id < frames[b].frame_id;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (frames[order[i]].frame_id == frames[order[i - 1]].frame_id) {
      throw Error(ErrorKind::kInvalidArgument,
                  "duplicate frame_id '" + frames[order[i]].frame_id + "'");
    }
  }
  const auto taus = options.auc_schedule.thresholds();

  auto results = parallel_map(frames.size(), options.threads,
                              [&](std::size_t i) -> std::optional<HumanFrameResult> {
    const HumanFrame &f = frames[order[i]];
    if (!f.pred_joints) return std::nullopt;
    try {
      return score_frame(f, options, taus);
    } catch (const Error &e) {
      throw FrameError(f.frame_id, e);
    }
  });

  ScoreReport report;
  report.track = Track::kHuman;
  std::map<std::string, std::vector<double>> present;
  std::vector<double> pck_all, auc_all;
  std::vector<double> curve(taus.size(), 0.0);
  std::int64_t missing = 0;
  std::int64_t skipped_angles = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    FrameRow row;
    row.frame_id = frames[order[i]].frame_id;
    if (results[i]) {
      row.metrics = results[i]->metrics;
      for (const auto &[k, v] : row.metrics) present[k].push_back(v);
      pck_all.push_back(row.metrics.at("PCK"));
      auc_all.push_back(row.metrics.at("AUC"));
      for (std::size_t t = 0; t < taus.size(); ++t) curve[t] += results[i]->pck_curve[t];
      if (results[i]->angles_skipped) ++skipped_angles;
    } else {
      row.missing = true;
      ++missing;
      pck_all.push_back(0.0);
      auc_all.push_back(0.0);
    }
    report.frames.push_back(std::move(row));
  }
  for (double &c : curve) c /= static_cast<double>(frames.size());

  for (const char *key : {"MPJPE", "MPJPE-PA", "MPJAE", "MPJAE-PA"}) {
    const auto it = present.find(key);
    if (it != present.end()) report.aggregates[key] = mean_of(it->second);
  }
  report.aggregates["PCK"] = mean_of(pck_all);
  report.aggregates["AUC"] = mean_of(auc_all);
  report.curves["PCK"] = Curve{"mm", "percent", taus, std::move(curve)};
  if (skipped_angles > 0) {
    report.warnings.push_back(std::to_string(skipped_angles) +
                              " frame(s) without part rotations; MPJAE and MPJAE-PA skipped for them");
  }
  report.units = {{"MPJPE", "mm"},    {"MPJPE-PA", "mm"}, {"PCK", "percent"},
                  {"AUC", "fraction"}, {"MPJAE", "deg"},  {"MPJAE-PA", "deg"}};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", options.pck_threshold_mm);
  report.settings["pck_threshold_mm"] = buf;
  std::snprintf(buf, sizeof buf, "0:%.17g:%.17g", options.auc_schedule.step_mm,
                options.auc_schedule.max_mm);
  report.settings["auc_thresholds_mm"] = buf;
  report.counts = {{"frames", static_cast<std::int64_t>(frames.size())},
                   {"scored", static_cast<std::int64_t>(frames.size()) - missing},
                   {"missing", missing},
                   {"angles_skipped", skipped_angles}};
  return report;
}

}  // namespace hoieval
