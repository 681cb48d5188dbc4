#pragma once

// Human reconstruction metrics over 3D joints and body-part orientations.
// Joint positions are meters on input; position errors are reported in mm.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hoieval/geom.hpp"
#include "hoieval/report.hpp"

namespace hoieval {

inline constexpr std::size_t kDefaultJointCount = 24;
inline constexpr std::size_t kPartCount = 9;

// Order of PartRotations entries.
enum class BodyPart : std::size_t {
  kLeftUpperArm,
  kRightUpperArm,
  kLeftLowerArm,
  kRightLowerArm,
  kLeftUpperLeg,
  kRightUpperLeg,
  kLeftLowerLeg,
  kRightLowerLeg,
  kRoot,
};

using JointSet = std::vector<Vec3>;
using PartRotations = std::array<Mat3, kPartCount>;

void ensure_joint_pair(std::span<const Vec3> pred, std::span<const Vec3> gt);

double mpjpe(std::span<const Vec3> pred, std::span<const Vec3> gt);

struct AlignedError {
  double mpjpe_mm = 0.0;
  SimilarityTransform alignment;  // maps pred onto gt
};

AlignedError mpjpe_pa(std::span<const Vec3> pred, std::span<const Vec3> gt);

inline constexpr double kPckThresholdMm = 50.0;

// Percentage of joints strictly closer than threshold_mm.
double pck(std::span<const Vec3> pred, std::span<const Vec3> gt,
           double threshold_mm = kPckThresholdMm);

struct AucSchedule {
  double max_mm = 200.0;
  double step_mm = 1.0;
  std::vector<double> thresholds() const;  // 0, step, ..., max
};

// Mean of PCK/100 over the schedule, in [0, 1].
double auc(std::span<const Vec3> pred, std::span<const Vec3> gt,
           const AucSchedule &schedule = {});

// Mean geodesic angle over the nine parts, degrees.
double mpjae(const PartRotations &pred, const PartRotations &gt);

// mpjae after left-multiplying every predicted part by global_r.
double mpjae_pa(const PartRotations &pred, const PartRotations &gt, const Mat3 &global_r);

struct HumanFrame {
  std::string frame_id;
  JointSet gt_joints;
  std::optional<JointSet> pred_joints;  // absent: missing from the submission
  std::optional<PartRotations> gt_parts;
  std::optional<PartRotations> pred_parts;
};

struct HumanTrackOptions {
  std::size_t threads = 1;
  double pck_threshold_mm = kPckThresholdMm;
  AucSchedule auc_schedule;
};

ScoreReport score_human_track(std::span<const HumanFrame> frames,
                              const HumanTrackOptions &options = {});

}  // namespace hoieval
