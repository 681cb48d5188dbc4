#pragma once

// Synthetic benchmarks with known answers. A spec produces a manifest, GT,
// an object registry, a perturbed submission and an answer sheet whose values
// come from the reference evaluators rather than the scoring code.

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "hoieval/geom.hpp"
#include "hoieval/object_metrics.hpp"
#include "hoieval/report.hpp"

namespace hoieval {

struct Perturbation {
  // Predicted rotation = GT rotation about a random axis by an angle drawn
  // uniformly from [min, max] degrees.
  double rotation_deg_min = 0.0;
  double rotation_deg_max = 0.0;
  double translation_sigma_m = 0.0;
  double joint_noise_sigma_mm = 0.0;
  double joint_offset_mm = 0.0;       // every joint moved this far, random direction
  double part_rotation_deg = 0.0;     // every predicted part rotated this much
  double vertex_noise_sigma_mm = 0.0;
  bool scene_similarity = false;      // random similarity on the whole predicted scene
};

struct SynthSpec {
  Track track = Track::kObject;
  std::size_t frames = 100;
  std::uint64_t seed = 0;
  std::string units = "m";
  bool symmetries = true;          // declare the primitives' symmetry groups
  double missing_fraction = 0.0;   // frames left out of the submission
  std::uint64_t score_seed = 0;    // sampling seed the answer sheet assumes
  std::size_t sample_n = 6000;
  Perturbation perturbation;
};

void ensure_synth_spec(const SynthSpec &spec);
SynthSpec synth_spec_from_json(const nlohmann::json &doc);
nlohmann::json to_json(const SynthSpec &spec);

// Closed primitive meshes, meters.
TriMesh make_box(const Vec3 &size);
TriMesh make_cylinder(double radius, double height, int segments);
// Unit icosahedron with a vertex on +z, subdivided and pushed to the sphere.
TriMesh make_icosphere(double radius, int subdivisions);

struct Primitive {
  std::string id;
  TriMesh mesh;
  SymmetrySet declared;     // what goes into the registry descriptor
  std::vector<Mat3> group;  // the same group, listed element by element
};

std::vector<Primitive> synth_primitives(bool with_symmetries);
TriMesh synth_human_template();

struct SynthPaths {
  std::filesystem::path manifest;
  std::filesystem::path submission;
  std::filesystem::path answer;
};

SynthPaths synth_generate(const SynthSpec &spec, const std::filesystem::path &out_dir);

struct AnswerSheet {
  Track track = Track::kObject;
  std::map<std::string, std::map<std::string, double>> frames;
  std::vector<std::string> missing;
  std::map<std::string, double> aggregates;
  std::map<std::string, std::int64_t> counts;
};

nlohmann::json to_json(const AnswerSheet &sheet);
AnswerSheet answer_sheet_from_json(const nlohmann::json &doc);

// Human-readable disagreements between a report and an answer sheet. Counting
// metrics (recalls, AR, PCK) must match exactly, everything else within `tol`.
std::vector<std::string> compare_to_answer(const ScoreReport &report, const AnswerSheet &sheet,
                                           double tol = 1e-6);

}  // namespace hoieval
