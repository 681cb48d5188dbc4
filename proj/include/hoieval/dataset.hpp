#pragma once

// Manifests, ground truth, submissions and their validation. This is the one
// place that knows the on-disk document formats.

#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hoieval/geom.hpp"
#include "hoieval/human_metrics.hpp"
#include "hoieval/joint_metrics.hpp"
#include "hoieval/object_metrics.hpp"
#include "hoieval/registry.hpp"
#include "hoieval/report.hpp"

namespace hoieval {

// --- small document helpers -------------------------------------------------

// Reads a JSON document. Bare NaN / Infinity tokens (as written by some
// producers) are read as null, which the field readers turn into NaN so
// validation can report them as non-finite instead of failing the whole file.
nlohmann::json read_json_file(const std::filesystem::path &path);
void write_json_file(const nlohmann::json &doc, const std::filesystem::path &path);

// Field readers throw kParseError on shape/type problems. They never reject
// non-finite numbers; callers decide.
double number_from_json(const nlohmann::json &v);
Vec3 vec3_from_json(const nlohmann::json &v);
Mat3 mat3_from_json(const nlohmann::json &v);  // 9 numbers, row-major
PointCloud points_from_json(const nlohmann::json &v);
RigidPose pose_from_json(const nlohmann::json &v);  // {"R": [9], "t": [3]}
CameraIntrinsics intrinsics_from_json(const nlohmann::json &v);

nlohmann::json to_json(const Vec3 &v);
nlohmann::json to_json(const Mat3 &m);
nlohmann::json to_json(const RigidPose &p);
nlohmann::json to_json(const CameraIntrinsics &k);
nlohmann::json points_to_json(const PointCloud &pts);

// Pose list document: {"schema_version", "poses": [{R, t}, ...]}. A bare
// {R, t} object is accepted as a one-element list.
std::vector<RigidPose> load_pose_document(const std::filesystem::path &path);
void save_pose_document(const std::vector<RigidPose> &poses, const std::filesystem::path &path);

// --- manifest ---------------------------------------------------------------

struct FrameRef {
  std::string frame_id;
  std::filesystem::path gt_path;  // empty when the GT is inline
  nlohmann::json inline_gt;
  std::optional<CameraIntrinsics> intrinsics;
};

struct Manifest {
  Track track = Track::kObject;
  std::string units = "m";
  double meters_per_unit = 1.0;
  std::optional<CameraIntrinsics> intrinsics;
  std::filesystem::path base_dir;
  std::filesystem::path registry_dir;    // object and joint tracks
  std::filesystem::path human_template;  // joint track: shared human topology
  std::size_t joint_count = kDefaultJointCount;
  std::size_t sample_n = kDefaultSurfaceSamples;  // joint track surface samples
  std::vector<FrameRef> frames;
};

double meters_per_unit(const std::string &units);

Manifest load_manifest(const std::filesystem::path &path);

// Ground truth plus registry, with every prediction slot empty.
struct Dataset {
  Manifest manifest;
  Registry registry;
  TriMesh human_template;
  std::vector<ObjectFrame> object_frames;
  std::vector<HumanFrame> human_frames;
  std::vector<JointFrame> joint_frames;

  std::vector<std::string> frame_ids() const;
};

Dataset load_dataset(const std::filesystem::path &manifest_path);

// --- submission -------------------------------------------------------------

struct Submission {
  std::string name;
  std::optional<Track> track;
  std::string units;  // empty: inherit from the manifest
  std::vector<std::pair<std::string, nlohmann::json>> frames;  // file order
};

Submission submission_from_json(const nlohmann::json &doc, const std::string &fallback_name);
Submission load_submission(const std::filesystem::path &path);

struct ValidationIssue {
  std::string frame_id;  // empty for document-level issues
  std::string category;  // "malformed" | "non_finite" | "invariant"
  std::string detail;
};

struct ValidationReport {
  std::vector<std::string> missing;  // scored as worst case
  std::vector<std::string> extra;    // ignored
  std::vector<ValidationIssue> issues;  // any issue blocks scoring

  bool scoring_permitted() const { return issues.empty(); }
  nlohmann::json to_json() const;
};

ValidationReport validate_submission(const Dataset &dataset, const Submission &submission);

// Copies the predictions into the dataset frames. Requires a clean validation.
void attach_predictions(Dataset &dataset, const Submission &submission);

}  // namespace hoieval
