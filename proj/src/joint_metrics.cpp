#include "hoieval/joint_metrics.hpp"

#include <algorithm>
#include <numeric>

#include "hoieval/errors.hpp"
#include "hoieval/parallel.hpp"
#include "hoieval/registry.hpp"
#include "hoieval/rng.hpp"

namespace hoieval {

SamplingSeeds SamplingSeeds::derive(std::uint64_t global_seed, std::string_view frame_id) {
  auto role = [&](MeshRole r) {
    return derive_seed(global_seed, frame_id, static_cast<std::uint64_t>(r));
  };
  return {role(MeshRole::kPredSmpl), role(MeshRole::kGtSmpl), role(MeshRole::kPredObject),
          role(MeshRole::kGtObject)};
}

PointCloud object_vertices(const ObjectPlacement &placement, const TriMesh &tmpl) {
  if (placement.vertices) {
    if (placement.vertices->size() != tmpl.vertices.size()) {
      throw Error(ErrorKind::kCountMismatch,
                  "object vertices (" + std::to_string(placement.vertices->size()) +
                      ") do not match the template (" + std::to_string(tmpl.vertices.size()) + ")");
    }
    return *placement.vertices;
  }
  if (placement.pose) return transform_points(*placement.pose, tmpl.vertices);
  throw Error(ErrorKind::kInvalidArgument, "object placement has neither pose nor vertices");
}

namespace {

struct SceneVertices {
  PointCloud pred_object;
  PointCloud gt_object;
};

SceneVertices resolve_objects(const JointFrame &frame, const Registry &registry) {
  const TriMesh &tmpl = registry.at(frame.object_id).mesh;
  return {object_vertices(frame.pred_object, tmpl), object_vertices(frame.gt_object, tmpl)};
}

SimilarityTransform align_scene(const JointFrame &frame, const SceneVertices &objects) {
  if (!frame.pred_smpl_vertices) {
    throw Error(ErrorKind::kInvalidArgument, "frame has no predicted human vertices");
  }
  const PointCloud &pred_smpl = *frame.pred_smpl_vertices;
  if (pred_smpl.size() != frame.gt_smpl_vertices.size()) {
    throw Error(ErrorKind::kCountMismatch, "predicted and GT human vertex counts differ");
  }
  PointCloud src = pred_smpl;
  src.insert(src.end(), objects.pred_object.begin(), objects.pred_object.end());
  PointCloud dst = frame.gt_smpl_vertices;
  dst.insert(dst.end(), objects.gt_object.begin(), objects.gt_object.end());
  return procrustes_similarity(src, dst);
}

}  // namespace

SimilarityTransform combined_alignment(const JointFrame &frame, const Registry &registry) {
  return align_scene(frame, resolve_objects(frame, registry));
}

JointFrameError joint_errors(const JointFrame &frame, const TriMesh &human_template,
                             const Registry &registry, std::size_t sample_n,
                             const SamplingSeeds &seeds) {
  const TriMesh &object_tmpl = registry.at(frame.object_id).mesh;
  const SceneVertices objects = resolve_objects(frame, registry);
  if (frame.gt_smpl_vertices.size() != human_template.vertices.size()) {
    throw Error(ErrorKind::kCountMismatch, "human vertices do not match the human template");
  }
  JointFrameError out;
  out.alignment = align_scene(frame, objects);

  // Sampling the predicted mesh in its own frame and moving the samples equals
  // sampling the aligned mesh: a similarity keeps area ratios.
  const TriMesh pred_human{*frame.pred_smpl_vertices, human_template.faces};
  const TriMesh gt_human{frame.gt_smpl_vertices, human_template.faces};
  const TriMesh pred_object{objects.pred_object, object_tmpl.faces};
  const TriMesh gt_object{objects.gt_object, object_tmpl.faces};

  const PointCloud pred_h =
      transform_points(out.alignment, sample_surface(pred_human, sample_n, seeds.pred_smpl));
  const PointCloud gt_h = sample_surface(gt_human, sample_n, seeds.gt_smpl);
  const PointCloud pred_o =
      transform_points(out.alignment, sample_surface(pred_object, sample_n, seeds.pred_object));
  const PointCloud gt_o = sample_surface(gt_object, sample_n, seeds.gt_object);

  out.smpl_chamfer_mm = chamfer(pred_h, gt_h) * 1000.0;
  out.object_chamfer_mm = chamfer(pred_o, gt_o) * 1000.0;
  return out;
}

JointFrameError joint_errors(const JointFrame &frame, const TriMesh &human_template,
                             const Registry &registry, std::size_t sample_n,
                             std::uint64_t seed) {
  return joint_errors(frame, human_template, registry, sample_n,
                      SamplingSeeds::derive(seed, frame.frame_id));
}

ScoreReport score_joint_track(std::span<const JointFrame> frames, const TriMesh &human_template,
                              const Registry &registry, const JointTrackOptions &options) {
  if (frames.empty()) throw Error(ErrorKind::kEmptyInput, "joint track without frames");
  ensure_mesh(human_template);
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

  auto results = parallel_map(frames.size(), options.threads,
                              [&](std::size_t i) -> std::optional<JointFrameError> {
    const JointFrame &f = frames[order[i]];
    if (!f.pred_smpl_vertices) return std::nullopt;
    try {
      return joint_errors(f, human_template, registry, options.sample_n, options.seed);
    } catch (const Error &e) {
      throw FrameError(f.frame_id, e);
    }
  });

  ScoreReport report;
  report.track = Track::kJoint;
  std::vector<double> smpl, object;
  std::int64_t missing = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    FrameRow row;
    row.frame_id = frames[order[i]].frame_id;
    if (results[i]) {
      row.metrics["SMPL"] = results[i]->smpl_chamfer_mm;
      row.metrics["Object"] = results[i]->object_chamfer_mm;
      row.metrics["alignment_scale"] = results[i]->alignment.scale;
      smpl.push_back(results[i]->smpl_chamfer_mm);
      object.push_back(results[i]->object_chamfer_mm);
    } else {
      row.missing = true;
      ++missing;
    }
    report.frames.push_back(std::move(row));
  }
  if (!smpl.empty()) {
    report.aggregates["SMPL"] = mean_of(smpl);
    report.aggregates["Object"] = mean_of(object);
  }
  report.units = {{"SMPL", "mm"}, {"Object", "mm"}, {"alignment_scale", "ratio"}};
  report.settings["sample_n"] = std::to_string(options.sample_n);
  report.counts = {{"frames", static_cast<std::int64_t>(frames.size())},
                   {"scored", static_cast<std::int64_t>(frames.size()) - missing},
                   {"missing", missing}};
  return report;
}

}  // namespace hoieval
