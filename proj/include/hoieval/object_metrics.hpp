#pragma once

// Object 6DoF pose errors (MSSD, MSPD, RE) and their average-recall
// aggregation.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hoieval/geom.hpp"
#include "hoieval/report.hpp"

namespace hoieval {

class Registry;

struct ContinuousAxis {
  Vec3 axis = Vec3::UnitZ();
  int count = 64;
};

// Global symmetry transformations of an object model. Always contains the
// identity. Continuous axes are discretised by expand_symmetries.
struct SymmetrySet {
  std::string object_id;
  std::vector<Mat3> transforms{Mat3::Identity()};
  std::vector<ContinuousAxis> continuous;
};

void ensure_symmetry_set(const SymmetrySet &s);

// Replaces every continuous axis by `count` evenly spaced rotations, composed
// (discrete · axis1 · axis2 ...) into the transform list. Near-duplicates
// (max abs difference 1e-12) are dropped.
SymmetrySet expand_symmetries(const SymmetrySet &s);

// min_S max_x |pred·x - gt·S·x|, meters.
double mssd(const RigidPose &pred, const RigidPose &gt, const TriMesh &mesh,
            const SymmetrySet &sym);

// min_S max_x |π(pred·x) - π(gt·S·x)|, pixels.
double mspd(const RigidPose &pred, const RigidPose &gt, const TriMesh &mesh,
            const SymmetrySet &sym, const CameraIntrinsics &k);

// min_S geodesic(pred_R, gt_R·S), degrees.
double rotation_error(const Mat3 &pred_r, const Mat3 &gt_r, const SymmetrySet &sym);

struct RecallSchedule {
  std::vector<double> thresholds;  // strictly increasing, positive
  std::string unit;
};

void ensure_schedule(const RecallSchedule &s);

// Fraction of errors <= threshold, per threshold.
std::vector<double> recall_curve(std::span<const double> errors,
                                 const RecallSchedule &schedule);
double average_recall(std::span<const double> errors,
                      const RecallSchedule &schedule);

// Fixed schedules of the object track.
inline constexpr int kMssdSteps = 10;   // 5%..50% of the diameter
inline constexpr int kMspdSteps = 20;   // 5..100 px
inline constexpr int kReSteps = 10;     // 0.05r..0.5r, r = 40 deg
inline constexpr double kReReferenceDeg = 40.0;

RecallSchedule mssd_fraction_schedule();          // 0.05, 0.10, ... 0.50
RecallSchedule mssd_schedule(double diameter_m);  // fractions · diameter
RecallSchedule mspd_schedule();
RecallSchedule re_schedule();

struct ObjectFrame {
  std::string frame_id;
  std::string object_id;
  RigidPose gt_pose;
  std::optional<RigidPose> pred_pose;  // absent: missing from the submission
  CameraIntrinsics intrinsics;
};

struct ObjectFrameErrors {
  double mssd_m = 0.0;
  double mspd_px = 0.0;
  double re_deg = 0.0;
};

ObjectFrameErrors score_object_frame(const ObjectFrame &frame, const Registry &registry);

struct ObjectTrackOptions {
  Aggregation aggregation = Aggregation::kMedian;
  std::size_t threads = 1;
};

ScoreReport score_object_track(std::span<const ObjectFrame> frames,
                               const Registry &registry,
                               const ObjectTrackOptions &options = {});

}  // namespace hoieval
