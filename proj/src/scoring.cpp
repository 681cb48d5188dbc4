#include "hoieval/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "hoieval/errors.hpp"
#include "hoieval/human_metrics.hpp"
#include "hoieval/joint_metrics.hpp"
#include "hoieval/object_metrics.hpp"

namespace hoieval {

using nlohmann::json;
namespace fs = std::filesystem;

ScoreReport score_dataset(const Dataset &ds, const std::string &submission_name,
                          const ScoreOptions &options) {
  ScoreReport report;
  switch (ds.manifest.track) {
    case Track::kObject:
      report = score_object_track(ds.object_frames, ds.registry,
                                  {options.aggregation, options.threads});
      break;
    case Track::kHuman: {
      HumanTrackOptions opt;
      opt.threads = options.threads;
      report = score_human_track(ds.human_frames, opt);
      break;
    }
    case Track::kJoint: {
      JointTrackOptions opt;
      opt.threads = options.threads;
      opt.seed = options.seed;
      opt.sample_n = ds.manifest.sample_n;
      report = score_joint_track(ds.joint_frames, ds.human_template, ds.registry, opt);
      break;
    }
  }
  report.submission = submission_name;
  report.settings["track"] = std::string(to_string(ds.manifest.track));
  report.settings["units"] = ds.manifest.units;
  report.settings["seed"] = std::to_string(options.seed);
  report.provenance.seed = options.seed;
  report.provenance.config_hash = config_hash(report.settings);
  for (const auto &w : ds.registry.warnings) report.warnings.push_back(w);
  return report;
}

namespace {

json issue_doc(const std::string &category, const std::string &detail,
               const std::string &frame_id = "") {
  return {{"frame_id", frame_id}, {"category", category}, {"detail", detail}};
}

void emit(std::ostream &diag, const json &doc) { diag << doc.dump(2) << '\n'; }

json failure(const char *stage, json issues) {
  return {{"scoring_permitted", false}, {"stage", stage}, {"issues", std::move(issues)}};
}

void write_atomically(const std::string &bytes, const fs::path &out) {
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  const fs::path tmp = out.string() + ".partial";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw Error(ErrorKind::kIoError, "cannot write " + tmp.string());
    f << bytes;
    if (!f) throw Error(ErrorKind::kIoError, "write failed: " + tmp.string());
  }
  fs::rename(tmp, out);
}

}  // namespace

int run_score(const fs::path &manifest, const fs::path &submission, const fs::path &out,
              const ScoreOptions &options, std::ostream &diag) {
  Dataset ds;
  Submission sub;
  try {
    ds = load_dataset(manifest);
  } catch (const Error &e) {
    emit(diag, failure("ground_truth", json::array({issue_doc("malformed", e.what())})));
    return kExitValidation;
  }
  try {
    sub = load_submission(submission);
  } catch (const Error &e) {
    emit(diag, failure("submission", json::array({issue_doc("malformed", e.what())})));
    return kExitValidation;
  }
  if (options.track && *options.track != ds.manifest.track) {
    emit(diag, failure("submission",
                       json::array({issue_doc("malformed", "requested track '" +
                                                               std::string(to_string(*options.track)) +
                                                               "' but the manifest is '" +
                                                               std::string(to_string(ds.manifest.track)) + "'")})));
    return kExitValidation;
  }
  const ValidationReport validation = validate_submission(ds, sub);
  if (!validation.scoring_permitted()) {
    json doc = validation.to_json();
    doc["stage"] = "submission";
    emit(diag, doc);
    return kExitValidation;
  }
  attach_predictions(ds, sub);

  ScoreReport report;
  try {
    report = score_dataset(ds, sub.name, options);
    if (!validation.missing.empty()) {
      report.warnings.push_back(std::to_string(validation.missing.size()) +
                                " frame(s) missing from the submission, scored as failures");
    }
    if (!validation.extra.empty()) {
      report.warnings.push_back(std::to_string(validation.extra.size()) +
                                " submission frame(s) not in the manifest were ignored");
    }
    const std::string bytes = serialize(report);
    verify_aggregates(report_from_json(json::parse(bytes)));
    write_atomically(bytes, out);
  } catch (const FrameError &e) {
    emit(diag, {{"scoring_permitted", true},
                {"stage", "scoring"},
                {"error", std::string(to_string(e.kind()))},
                {"frame_id", e.frame_id()},
                {"detail", e.what()}});
    return kExitNumeric;
  } catch (const Error &e) {
    emit(diag, {{"scoring_permitted", true},
                {"stage", "scoring"},
                {"error", std::string(to_string(e.kind()))},
                {"detail", e.what()}});
    return e.kind() == ErrorKind::kIoError ? kExitUsage : kExitNumeric;
  }
  return kExitOk;
}

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::vector<fs::path> emit_curves(const ScoreReport &report, const fs::path &out_dir) {
  if (report.curves.empty()) {
    throw Error(ErrorKind::kNoCurveData,
                std::string(to_string(report.track)) + " reports carry no threshold curves");
  }
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  for (const auto &[name, curve] : report.curves) {
    if (curve.thresholds.size() != curve.values.size()) {
      throw Error(ErrorKind::kInternal, "curve '" + name + "' has mismatched columns");
    }
    std::ostringstream text;
    text << "threshold,value\n";
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
      text << shortest(curve.thresholds[i]) << ',' << shortest(curve.values[i]) << '\n';
    }
    const fs::path path = out_dir / (name + ".csv");
    write_atomically(text.str(), path);
    written.push_back(path);
  }
  return written;
}

RankingKey default_ranking_key(Track track) {
  switch (track) {
    case Track::kObject: return {"AR-all", true};
    case Track::kHuman: return {"MPJPE-PA", false};
    case Track::kJoint: return {"SMPL+Object", false};
  }
  return {"AR-all", true};
}

namespace {

std::optional<double> key_value(const ScoreReport &r, const RankingKey &key) {
  if (key.metric == "SMPL+Object") {
    const auto s = r.aggregates.find("SMPL");
    const auto o = r.aggregates.find("Object");
    if (s == r.aggregates.end() || o == r.aggregates.end()) return std::nullopt;
    return 0.5 * (s->second + o->second);
  }
  const auto it = r.aggregates.find(key.metric);
  if (it == r.aggregates.end() || std::isnan(it->second)) return std::nullopt;
  return it->second;
}

}  // namespace

std::vector<LeaderboardRow> leaderboard(const std::vector<ScoreReport> &reports,
                                        const std::optional<RankingKey> &key_override) {
  if (reports.empty()) throw Error(ErrorKind::kEmptyInput, "leaderboard without reports");
  const Track track = reports.front().track;
  for (const auto &r : reports) {
    if (r.track != track) {
      throw Error(ErrorKind::kMixedTracks, "reports mix the " + std::string(to_string(track)) + " and " +
                                               std::string(to_string(r.track)) + " tracks");
    }
  }
  const RankingKey key = key_override.value_or(default_ranking_key(track));
  struct Entry {
    std::string name;
    std::optional<double> value;
  };
  std::vector<Entry> entries;
  for (const auto &r : reports) entries.push_back({r.submission, key_value(r, key)});
  std::stable_sort(entries.begin(), entries.end(), [&](const Entry &a, const Entry &b) {
    if (a.value.has_value() != b.value.has_value()) return a.value.has_value();
    if (a.value && *a.value != *b.value) return key.descending ? *a.value > *b.value : *a.value < *b.value;
    return a.name < b.name;
  });
  std::vector<LeaderboardRow> rows;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    rows.push_back({static_cast<int>(i + 1), entries[i].name,
                    entries[i].value.value_or(std::numeric_limits<double>::quiet_NaN())});
  }
  return rows;
}

std::string leaderboard_tsv(const std::vector<LeaderboardRow> &rows, const RankingKey &key) {
  std::ostringstream out;
  out << "rank\tsubmission\t" << key.metric << '\n';
  for (const auto &r : rows) {
    out << r.rank << '\t' << r.submission << '\t' << (std::isnan(r.value) ? "n/a" : shortest(r.value)) << '\n';
  }
  return out.str();
}

ScoreReport load_report(const fs::path &path) { return report_from_json(read_json_file(path)); }

}  // namespace hoieval
