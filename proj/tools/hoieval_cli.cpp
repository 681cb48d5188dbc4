// hoieval: scoring, synthetic benchmarks and data-preparation utilities.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "hoieval/augment.hpp"
#include "hoieval/dataset.hpp"
#include "hoieval/errors.hpp"
#include "hoieval/image.hpp"
#include "hoieval/mesh_io.hpp"
#include "hoieval/nocs.hpp"
#include "hoieval/parallel.hpp"
#include "hoieval/scoring.hpp"
#include "hoieval/synth.hpp"

namespace fs = std::filesystem;
using namespace hoieval;

namespace {

std::pair<int, int> parse_size(const std::string &s) {
  int w = 0, h = 0;
  char x = 0;
  if (std::sscanf(s.c_str(), "%d%c%d", &w, &x, &h) != 3 || (x != 'x' && x != 'X') || w <= 0 || h <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "size must look like 640x480, got '" + s + "'");
  }
  return {w, h};
}

int cmd_render(const std::string &mesh_path, const std::string &pose_path, const std::string &k_path,
               const std::string &size, const std::string &out, std::size_t threads) {
  const auto [w, h] = parse_size(size);
  const NocsNormalization norm = normalize_to_nocs(load_mesh(mesh_path));
  const auto poses = load_pose_document(pose_path);
  const CameraIntrinsics k = intrinsics_from_json(read_json_file(k_path));
  fs::create_directories(out);
  write_json_file({{"schema_version", kSchemaVersion},
                   {"center", to_json(norm.center)},
                   {"half_extent", norm.half_extent},
                   {"images", poses.size()}},
                  fs::path(out) / "normalization.json");
  parallel_map(poses.size(), threads, [&](std::size_t i) {
    const NocsRender r = render_nocs(norm.mesh, poses[i], k, w, h);
    char name[32];
    std::snprintf(name, sizeof name, "%04zu", i);
    write_png(r.nocs, fs::path(out) / (std::string("nocs_") + name + ".png"));
    write_png(r.mask, fs::path(out) / (std::string("mask_") + name + ".png"));
    return 0;
  });
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Evaluation harness for human-object interaction reconstruction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  ScoreOptions score_opt;
  std::string track, gt, pred, out, agg = "median";
  std::size_t threads = 1;
  auto *score = app.add_subcommand("score", "Score a submission against a manifest");
  score->add_option("--track", track, "object | human | joint")->required();
  score->add_option("--gt", gt, "Manifest JSON")->required()->check(CLI::ExistingFile);
  score->add_option("--pred", pred, "Submission JSON")->required();
  score->add_option("--out", out, "Report JSON")->required();
  score->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 1024));
  score->add_option("--seed", score_opt.seed, "Sampling seed (joint track)");
  score->add_option("--agg", agg, "Summary aggregation: median | mean");

  auto *validate = app.add_subcommand("validate", "Check a submission without scoring it");
  validate->add_option("--gt", gt, "Manifest JSON")->required()->check(CLI::ExistingFile);
  validate->add_option("--pred", pred, "Submission JSON")->required();

  std::string spec;
  auto *synth = app.add_subcommand("synth", "Generate a synthetic benchmark with an answer sheet");
  synth->add_option("--spec", spec, "Synth spec JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", out, "Output directory")->required();

  std::string report_path;
  auto *curves = app.add_subcommand("curves", "Write threshold curves of a report as CSV");
  curves->add_option("--report", report_path, "Report JSON")->required()->check(CLI::ExistingFile);
  curves->add_option("--out", out, "Output directory")->required();

  std::vector<std::string> reports;
  std::string key_metric, key_order;
  auto *board = app.add_subcommand("leaderboard", "Rank reports of one track");
  board->add_option("--reports", reports, "Report JSON files")->required()->check(CLI::ExistingFile);
  board->add_option("--out", out, "Output TSV")->required();
  board->add_option("--key", key_metric, "Aggregate to rank by (default depends on the track)");
  board->add_option("--order", key_order, "asc | desc")->check(CLI::IsMember({"asc", "desc"}));

  std::string mesh, pose, intrinsics, size;
  auto *render = app.add_subcommand("render-nocs", "Render NOCS maps and masks of a mesh");
  render->add_option("--mesh", mesh, "OBJ or PLY mesh")->required()->check(CLI::ExistingFile);
  render->add_option("--pose", pose, "Pose document JSON")->required()->check(CLI::ExistingFile);
  render->add_option("--intrinsics", intrinsics, "Intrinsics JSON {fx, fy, cx, cy}")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("--size", size, "WxH")->required();
  render->add_option("--out", out, "Output directory")->required();
  render->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 1024));

  std::string image, pipeline;
  std::uint64_t seed = 0;
  auto *aug = app.add_subcommand("augment", "Apply a seeded augmentation pipeline to a PNG");
  aug->add_option("--image", image, "Input PNG")->required()->check(CLI::ExistingFile);
  aug->add_option("--pipeline", pipeline, "Pipeline JSON")->required()->check(CLI::ExistingFile);
  aug->add_option("--seed", seed, "Seed");
  aug->add_option("--out", out, "Output PNG")->required();

  int grid_n = 20;
  auto *grid = app.add_subcommand("euler-grid", "Write an n^3 Euler-angle pose grid");
  grid->add_option("--n", grid_n, "Samples per angle")->check(CLI::Range(1, 200));
  grid->add_option("--out", out, "Pose document JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*score) {
      score_opt.track = parse_track(track);
      score_opt.threads = threads;
      score_opt.aggregation = parse_aggregation(agg);
      return run_score(gt, pred, out, score_opt, std::cerr);
    }
    if (*validate) {
      Dataset ds = load_dataset(gt);
      const ValidationReport v = validate_submission(ds, load_submission(pred));
      std::cout << v.to_json().dump(2) << '\n';
      return v.scoring_permitted() ? kExitOk : kExitValidation;
    }
    if (*synth) {
      const SynthPaths p = synth_generate(synth_spec_from_json(read_json_file(spec)), out);
      std::cout << p.manifest.string() << '\n' << p.submission.string() << '\n' << p.answer.string() << '\n';
      return kExitOk;
    }
    if (*curves) {
      for (const auto &p : emit_curves(load_report(report_path), out)) std::cout << p.string() << '\n';
      return kExitOk;
    }
    if (*board) {
      std::vector<ScoreReport> loaded;
      for (const auto &r : reports) loaded.push_back(load_report(r));
      std::optional<RankingKey> key;
      if (!key_metric.empty() || !key_order.empty()) {
        RankingKey k = default_ranking_key(loaded.front().track);
        if (!key_metric.empty()) k.metric = key_metric;
        if (!key_order.empty()) k.descending = key_order == "desc";
        key = k;
      }
      const auto rows = leaderboard(loaded, key);
      std::ofstream f(out, std::ios::binary);
      if (!f) throw Error(ErrorKind::kIoError, "cannot write " + out);
      f << leaderboard_tsv(rows, key.value_or(default_ranking_key(loaded.front().track)));
      return kExitOk;
    }
    if (*render) return cmd_render(mesh, pose, intrinsics, size, out, threads);
    if (*aug) {
      write_png(augment(read_png(image), load_pipeline(pipeline), seed), out);
      return kExitOk;
    }
    if (*grid) {
      save_pose_document(euler_grid(grid_n), out);
      return kExitOk;
    }
  } catch (const Error &e) {
    std::cerr << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::kParseError:
      case ErrorKind::kMixedTracks:
        return kExitValidation;
      case ErrorKind::kIoError:
      case ErrorKind::kInvalidArgument:
        return kExitUsage;
      default:
        return kExitNumeric;
    }
  } catch (const std::exception &e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
