#include <doctest.h>

#include <fstream>
#include <sstream>

#include "check_kind.hpp"
#include "hoieval/scoring.hpp"
#include "hoieval/synth.hpp"
#include "support.hpp"

using namespace hoieval;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ScoreReport named(Track track, const std::string &name, std::map<std::string, double> aggregates) {
  ScoreReport r;
  r.track = track;
  r.submission = name;
  r.aggregates = std::move(aggregates);
  return r;
}

std::vector<std::string> order(const std::vector<LeaderboardRow> &rows) {
  std::vector<std::string> names;
  for (const auto &r : rows) names.push_back(r.submission);
  return names;
}

SynthPaths small_synth(const fs::path &dir, Track track, std::size_t frames = 10) {
  SynthSpec spec;
  spec.track = track;
  spec.frames = frames;
  spec.seed = 71;
  spec.sample_n = 300;
  spec.perturbation.rotation_deg_max = 15.0;
  spec.perturbation.translation_sigma_m = 0.02;
  spec.perturbation.joint_noise_sigma_mm = 30.0;
  spec.perturbation.part_rotation_deg = 5.0;
  spec.perturbation.vertex_noise_sigma_mm = 5.0;
  return synth_generate(spec, dir);
}

int count_lines(const fs::path &p) {
  std::ifstream in(p);
  int n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST_SUITE("scoring") {

TEST_CASE("curve tables") {
  testing::TempDir dir("curves");
  for (Track t : {Track::kObject, Track::kHuman, Track::kJoint}) {
    const std::string name(to_string(t));
    const SynthPaths p = small_synth(dir / name, t);
    std::ostringstream diag;
    REQUIRE(run_score(p.manifest, p.submission, dir / (name + ".json"), {}, diag) == kExitOk);
    const ScoreReport r = load_report(dir / (name + ".json"));
    if (t == Track::kJoint) {
      CHECK_KIND(emit_curves(r, dir / "joint_curves"), ErrorKind::kNoCurveData);
      continue;
    }
    const auto files = emit_curves(r, dir / (name + "_curves"));
    std::map<std::string, int> rows;
    for (const auto &f : files) rows[f.stem().string()] = count_lines(f) - 1;
    if (t == Track::kObject) {
      CHECK(rows == std::map<std::string, int>{{"MSSD-AR", 10}, {"MSPD-AR", 20}, {"RE-AR", 10}});
    } else {
      CHECK(rows == std::map<std::string, int>{{"PCK", 201}});
    }
  }
}

TEST_CASE("leaderboards rank reference rows per track") {
  // object track, AR-all of the baseline and winner rows
  const auto obj = leaderboard({named(Track::kObject, "baseline", {{"AR-all", 0.3}}),
                                named(Track::kObject, "winner", {{"AR-all", 0.6}})});
  CHECK(order(obj) == std::vector<std::string>{"winner", "baseline"});
  CHECK(obj[0].rank == 1);
  CHECK(obj[0].value == 0.6);

  // human track, MPJPE-PA of a baseline, two variants and a winner
  const auto hum = leaderboard({named(Track::kHuman, "baseline", {{"MPJPE-PA", 55.6}}),
                                named(Track::kHuman, "variant_a", {{"MPJPE-PA", 24.33}}),
                                named(Track::kHuman, "variant_b", {{"MPJPE-PA", 22.01}}),
                                named(Track::kHuman, "winner", {{"MPJPE-PA", 18.4}})});
  CHECK(order(hum) == std::vector<std::string>{"winner", "variant_b", "variant_a", "baseline"});

  // joint track, SMPL and Object chamfer of three entries
  const auto jnt = leaderboard({named(Track::kJoint, "baseline", {{"SMPL", 55.8}, {"Object", 106.6}}),
                                named(Track::kJoint, "earlier", {{"SMPL", 121.7}, {"Object", 266.2}}),
                                named(Track::kJoint, "winner", {{"SMPL", 45.1}, {"Object", 87.2}})});
  CHECK(order(jnt) == std::vector<std::string>{"winner", "baseline", "earlier"});
  CHECK(jnt[0].value == doctest::Approx(66.15).epsilon(1e-12));
  const auto by_object = leaderboard({named(Track::kJoint, "baseline", {{"SMPL", 55.8}, {"Object", 106.6}}),
                                      named(Track::kJoint, "winner", {{"SMPL", 45.1}, {"Object", 87.2}})},
                                     RankingKey{"Object", false});
  CHECK(order(by_object) == std::vector<std::string>{"winner", "baseline"});
}

TEST_CASE("leaderboard edge cases") {
  const auto one = leaderboard({named(Track::kHuman, "only", {{"MPJPE-PA", 40.0}})});
  REQUIRE(one.size() == 1);
  CHECK(one[0].rank == 1);

  const auto tie = leaderboard({named(Track::kObject, "zeta", {{"AR-all", 0.5}}),
                                named(Track::kObject, "alpha", {{"AR-all", 0.5}}),
                                named(Track::kObject, "mid", {{"AR-all", 0.5}})});
  CHECK(order(tie) == std::vector<std::string>{"alpha", "mid", "zeta"});

  const auto gap = leaderboard({named(Track::kObject, "empty", {}), named(Track::kObject, "scored", {{"AR-all", 0.1}})});
  CHECK(order(gap) == std::vector<std::string>{"scored", "empty"});
  CHECK(leaderboard_tsv(gap, default_ranking_key(Track::kObject)) == "rank\tsubmission\tAR-all\n1\tscored\t0.1\n2\tempty\tn/a\n");

  CHECK_KIND(leaderboard({named(Track::kObject, "a", {{"AR-all", 0.1}}), named(Track::kHuman, "b", {{"MPJPE-PA", 1.0}})}),
             ErrorKind::kMixedTracks);
  CHECK_KIND(leaderboard({}), ErrorKind::kEmptyInput);
}

TEST_CASE("leaderboard order is a total order") {
  Rng rng(72);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ScoreReport> reports;
    const int n = 2 + static_cast<int>(rng.below(10));
    for (int i = 0; i < n; ++i) {
      // coarse values so ties are common
      reports.push_back(named(Track::kObject, "s" + std::to_string(rng.below(1000)),
                              {{"AR-all", static_cast<double>(rng.below(4)) / 4.0}}));
    }
    const auto rows = leaderboard(reports);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].rank == rows[i - 1].rank + 1);
      const bool ordered = rows[i - 1].value > rows[i].value ||
                           (rows[i - 1].value == rows[i].value && rows[i - 1].submission <= rows[i].submission);
      CHECK(ordered);
    }
    std::vector<ScoreReport> reversed(reports.rbegin(), reports.rend());
    CHECK(order(leaderboard(reversed)) == order(rows));
  }
}

TEST_CASE("run_score exit codes") {
  testing::TempDir dir("exit");
  const SynthPaths p = small_synth(dir / "obj", Track::kObject);
  std::ostringstream diag;
  CHECK(run_score(p.manifest, p.submission, dir / "ok.json", {}, diag) == kExitOk);
  CHECK(fs::exists(dir / "ok.json"));

  json sub = read_json_file(p.submission);
  sub["frames"][0]["pose"]["R"][0] = nullptr;
  write_json_file(sub, dir / "nan.json");
  std::ostringstream d2;
  CHECK(run_score(p.manifest, dir / "nan.json", dir / "nan_report.json", {}, d2) == kExitValidation);
  CHECK_FALSE(fs::exists(dir / "nan_report.json"));
  const json issues = json::parse(d2.str());
  CHECK(issues.at("scoring_permitted") == false);
  CHECK(issues.at("issues").at(0).at("category") == "non_finite");

  testing::write_text(dir / "garbage.json", "{\"frames\": [");
  std::ostringstream d3;
  CHECK(run_score(p.manifest, dir / "garbage.json", dir / "g.json", {}, d3) == kExitValidation);
  CHECK_FALSE(fs::exists(dir / "g.json"));

  ScoreOptions wrong;
  wrong.track = Track::kHuman;
  std::ostringstream d4;
  CHECK(run_score(p.manifest, p.submission, dir / "w.json", wrong, d4) == kExitValidation);
  CHECK_FALSE(fs::exists(dir / "w.json"));

  // a prediction behind the camera cannot be projected
  json behind = read_json_file(p.submission);
  behind["frames"][4]["pose"]["t"] = json::array({0.0, 0.0, -2.0});
  write_json_file(behind, dir / "behind.json");
  std::ostringstream d5;
  CHECK(run_score(p.manifest, dir / "behind.json", dir / "b.json", {}, d5) == kExitNumeric);
  CHECK_FALSE(fs::exists(dir / "b.json"));
  const json err = json::parse(d5.str());
  CHECK(err.at("frame_id") == behind["frames"][4]["frame_id"]);
  CHECK(err.at("error") == "BehindCamera");
}

TEST_CASE("reports are byte-identical across thread counts") {
  testing::TempDir dir("threads");
  for (Track t : {Track::kObject, Track::kHuman, Track::kJoint}) {
    const std::string name(to_string(t));
    const SynthPaths p = small_synth(dir / name, t, 24);
    std::string first;
    for (std::size_t threads : {1, 4, 8}) {
      ScoreOptions opt;
      opt.threads = threads;
      opt.seed = 5;
      std::ostringstream diag;
      const fs::path out = dir / (name + std::to_string(threads) + ".json");
      REQUIRE(run_score(p.manifest, p.submission, out, opt, diag) == kExitOk);
      const std::string bytes = testing::read_bytes(out);
      if (first.empty()) first = bytes;
      CHECK(bytes == first);
    }
  }
}

TEST_CASE("reports round-trip through json") {
  testing::TempDir dir("report_rt");
  const SynthPaths p = small_synth(dir.path(), Track::kHuman);
  std::ostringstream diag;
  REQUIRE(run_score(p.manifest, p.submission, dir / "r.json", {}, diag) == kExitOk);
  const std::string bytes = testing::read_bytes(dir / "r.json");
  const ScoreReport r = load_report(dir / "r.json");
  CHECK(serialize(r) == bytes);
  CHECK(r.provenance.tool_version == kToolVersion);
  CHECK_FALSE(r.provenance.config_hash.empty());
  CHECK_NOTHROW(verify_aggregates(r));
}

TEST_CASE("aggregation helpers") {
  CHECK(median_of({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median_of({4.0, 1.0, 2.0, 3.0}) == 2.5);
  const std::vector<double> v{1.0, 2.0, 6.0};
  CHECK(mean_of(v) == 3.0);
  CHECK(aggregate(v, Aggregation::kMedian) == 2.0);
  CHECK(aggregate(v, Aggregation::kMean) == 3.0);
  CHECK(parse_aggregation("mean") == Aggregation::kMean);
  CHECK_THROWS_AS(parse_track("hand"), Error);
  CHECK(config_hash({{"a", "1"}}) != config_hash({{"a", "2"}}));
}

}  // TEST_SUITE
