#include <doctest.h>

#include <cmath>
#include <sstream>

#include "check_kind.hpp"
#include "hoieval/scoring.hpp"
#include "hoieval/synth.hpp"
#include "support.hpp"

using namespace hoieval;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Scored {
  ScoreReport report;
  AnswerSheet answer;
};

Scored generate_and_score(const SynthSpec &spec, const fs::path &dir, std::size_t threads = 1) {
  const SynthPaths p = synth_generate(spec, dir);
  ScoreOptions opt;
  opt.seed = spec.score_seed;
  opt.threads = threads;
  std::ostringstream diag;
  const int code = run_score(p.manifest, p.submission, dir / "report.json", opt, diag);
  if (code != kExitOk) throw std::runtime_error("run_score failed: " + diag.str());
  return {load_report(dir / "report.json"), answer_sheet_from_json(read_json_file(p.answer))};
}

std::string joined(const std::vector<std::string> &v) {
  std::string s;
  for (const auto &x : v) s += x + "\n";
  return s;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("zero-noise specs predict perfect scores") {
  testing::TempDir dir("synth_zero");
  for (Track t : {Track::kObject, Track::kHuman, Track::kJoint}) {
    SynthSpec spec;
    spec.track = t;
    spec.frames = 12;
    spec.seed = 81;
    spec.sample_n = 400;
    const Scored s = generate_and_score(spec, dir / std::string(to_string(t)));
    INFO(joined(compare_to_answer(s.report, s.answer)));
    CHECK(compare_to_answer(s.report, s.answer).empty());
    switch (t) {
      case Track::kObject:
        CHECK(s.answer.aggregates.at("AR-all") == 1.0);
        CHECK(s.answer.aggregates.at("RE") == 0.0);
        break;
      case Track::kHuman:
        CHECK(s.answer.aggregates.at("PCK") == 100.0);
        CHECK(s.answer.aggregates.at("MPJPE") == 0.0);
        CHECK(s.answer.aggregates.at("MPJAE") == 0.0);
        break;
      case Track::kJoint:
        // independent sampling seeds leave only sampling noise; the alignment is exact
        for (const auto &row : s.report.frames) CHECK(std::abs(row.metrics.at("alignment_scale") - 1.0) < 1e-12);
        break;
    }
  }
}

TEST_CASE("three degrees of rotation error passes nine of ten thresholds") {
  testing::TempDir dir("synth_3deg");
  SynthSpec spec;
  spec.track = Track::kObject;
  spec.frames = 40;
  spec.seed = 82;
  spec.symmetries = false;
  spec.perturbation.rotation_deg_min = spec.perturbation.rotation_deg_max = 3.0;
  const Scored s = generate_and_score(spec, dir.path());
  CHECK(s.answer.aggregates.at("RE-AR") == 0.9);
  CHECK(s.report.aggregates.at("RE-AR") == 0.9);
  CHECK(compare_to_answer(s.report, s.answer).empty());
}

TEST_CASE("a uniform 49 mm joint offset") {
  testing::TempDir dir("synth_49");
  SynthSpec spec;
  spec.track = Track::kHuman;
  spec.frames = 30;
  spec.seed = 83;
  spec.perturbation.joint_offset_mm = 49.0;
  const Scored s = generate_and_score(spec, dir / "49");
  CHECK(s.answer.aggregates.at("PCK") == 100.0);
  CHECK(s.report.aggregates.at("PCK") == 100.0);
  CHECK(s.answer.aggregates.at("MPJPE") == doctest::Approx(49.0).epsilon(1e-12));
  CHECK(s.report.aggregates.at("MPJPE") == doctest::Approx(49.0).epsilon(1e-12));

  spec.perturbation.joint_offset_mm = 51.0;
  const Scored f = generate_and_score(spec, dir / "51");
  CHECK(f.report.aggregates.at("PCK") == 0.0);
  CHECK(f.answer.aggregates.at("PCK") == 0.0);
}

TEST_CASE("noisy specs agree with their answer sheets") {
  testing::TempDir dir("synth_noisy");
  for (Track t : {Track::kObject, Track::kHuman, Track::kJoint}) {
    for (const std::string units : {"m", "mm"}) {
      SynthSpec spec;
      spec.track = t;
      spec.frames = 25;
      spec.seed = 84;
      spec.units = units;
      spec.sample_n = 500;
      spec.score_seed = 9;
      spec.missing_fraction = 0.2;
      spec.perturbation.rotation_deg_min = 0.0;
      spec.perturbation.rotation_deg_max = 25.0;
      spec.perturbation.translation_sigma_m = 0.03;
      spec.perturbation.joint_noise_sigma_mm = 40.0;
      spec.perturbation.part_rotation_deg = 12.0;
      spec.perturbation.vertex_noise_sigma_mm = 8.0;
      spec.perturbation.scene_similarity = true;
      const Scored s = generate_and_score(spec, dir / (std::string(to_string(t)) + units), 3);
      const auto diffs = compare_to_answer(s.report, s.answer);
      INFO(joined(diffs));
      CHECK(diffs.empty());
      CHECK_FALSE(s.answer.missing.empty());
      CHECK(s.report.counts.at("missing") == static_cast<std::int64_t>(s.answer.missing.size()));
    }
  }
}

TEST_CASE("compare_to_answer reports disagreements") {
  testing::TempDir dir("synth_cmp");
  SynthSpec spec;
  spec.track = Track::kHuman;
  spec.frames = 6;
  spec.seed = 85;
  spec.perturbation.joint_noise_sigma_mm = 20.0;
  Scored s = generate_and_score(spec, dir.path());
  REQUIRE(compare_to_answer(s.report, s.answer).empty());
  s.report.aggregates["MPJPE"] += 1e-3;
  s.report.frames[2].metrics["PCK"] += 1e-12;
  CHECK(compare_to_answer(s.report, s.answer).size() == 2);
}

TEST_CASE("generation is deterministic and the spec round-trips") {
  testing::TempDir dir("synth_det");
  SynthSpec spec;
  spec.track = Track::kJoint;
  spec.frames = 5;
  spec.seed = 86;
  spec.sample_n = 200;
  spec.perturbation.rotation_deg_min = 1.0;
  spec.perturbation.rotation_deg_max = 7.0;
  spec.perturbation.vertex_noise_sigma_mm = 3.0;
  const SynthPaths a = synth_generate(spec, dir / "a");
  const SynthPaths b = synth_generate(spec, dir / "b");
  for (const auto &entry : fs::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir / "a");
    CHECK(testing::read_bytes(entry.path()) == testing::read_bytes(dir / "b" / rel));
  }
  CHECK(testing::read_bytes(a.answer) == testing::read_bytes(b.answer));

  const json doc = to_json(spec);
  CHECK(to_json(synth_spec_from_json(doc)) == doc);
  const SynthSpec parsed = synth_spec_from_json(json::parse(R"({"track": "human", "frames": 3,
      "perturbation": {"rotation_deg": {"uniform": [2, 4]}, "joint_offset_mm": 10}})"));
  CHECK(parsed.track == Track::kHuman);
  CHECK(parsed.perturbation.rotation_deg_min == 2.0);
  CHECK(parsed.perturbation.rotation_deg_max == 4.0);
  CHECK(parsed.perturbation.joint_offset_mm == 10.0);

  CHECK_KIND(synth_spec_from_json(json{{"track", "object"}, {"frames", 0}}), ErrorKind::kInvalidArgument);
  CHECK_KIND(synth_spec_from_json(json{{"frames", 3}}), ErrorKind::kParseError);
  CHECK_KIND(synth_spec_from_json(json{{"track", "object"}, {"perturbation", {{"translation_sigma_m", -1}}}}),
             ErrorKind::kInvalidArgument);
}

TEST_CASE("primitives carry their symmetry groups") {
  for (const Primitive &p : synth_primitives(true)) {
    CHECK_FALSE(p.group.empty());
    for (const Mat3 &g : p.group) {
      const PointCloud moved = transform_points(RigidPose{g, Vec3::Zero()}, p.mesh.vertices);
      // every symmetry maps the vertex set onto itself
      double worst = 0.0;
      for (const auto &v : moved) {
        double best = 1e300;
        for (const auto &w : p.mesh.vertices) best = std::min(best, (v - w).norm());
        worst = std::max(worst, best);
      }
      CHECK(worst < 1e-9);
    }
  }
  for (const Primitive &p : synth_primitives(false)) CHECK(p.group.size() == 1);
}

}  // TEST_SUITE
