#pragma once

// Joint human-object evaluation: one similarity alignment over the combined
// human and object vertices, then per-mesh Chamfer distances on freshly
// sampled surfaces.

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "hoieval/geom.hpp"
#include "hoieval/report.hpp"

namespace hoieval {

class Registry;

inline constexpr std::size_t kDefaultSurfaceSamples = 6000;

// The object side of a scene is either a registry template under a rigid pose
// or explicit vertices (template topology, deformed or scaled upstream).
struct ObjectPlacement {
  std::optional<RigidPose> pose;
  std::optional<PointCloud> vertices;
};

struct JointFrame {
  std::string frame_id;
  std::string object_id;
  PointCloud gt_smpl_vertices;
  ObjectPlacement gt_object;
  std::optional<PointCloud> pred_smpl_vertices;  // absent: missing frame
  ObjectPlacement pred_object;
};

struct JointFrameError {
  double smpl_chamfer_mm = 0.0;
  double object_chamfer_mm = 0.0;
  SimilarityTransform alignment;  // maps the predicted scene onto GT
};

enum class MeshRole : std::uint64_t { kPredSmpl = 0, kGtSmpl = 1, kPredObject = 2, kGtObject = 3 };

struct SamplingSeeds {
  std::uint64_t pred_smpl = 0;
  std::uint64_t gt_smpl = 0;
  std::uint64_t pred_object = 0;
  std::uint64_t gt_object = 0;

  static SamplingSeeds derive(std::uint64_t global_seed, std::string_view frame_id);
};

// Object vertices for one side of the frame; explicit vertices must match the
// template's vertex count.
PointCloud object_vertices(const ObjectPlacement &placement, const TriMesh &tmpl);

SimilarityTransform combined_alignment(const JointFrame &frame, const Registry &registry);

JointFrameError joint_errors(const JointFrame &frame, const TriMesh &human_template,
                             const Registry &registry, std::size_t sample_n,
                             const SamplingSeeds &seeds);

JointFrameError joint_errors(const JointFrame &frame, const TriMesh &human_template,
                             const Registry &registry,
                             std::size_t sample_n = kDefaultSurfaceSamples,
                             std::uint64_t seed = 0);

struct JointTrackOptions {
  std::size_t threads = 1;
  std::size_t sample_n = kDefaultSurfaceSamples;
  std::uint64_t seed = 0;
};

ScoreReport score_joint_track(std::span<const JointFrame> frames, const TriMesh &human_template,
                              const Registry &registry, const JointTrackOptions &options = {});

}  // namespace hoieval
