#include "hoieval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hoieval/errors.hpp"
#include "hoieval/human_metrics.hpp"
#include "hoieval/object_metrics.hpp"
#include "hoieval/rng.hpp"

namespace hoieval {

using nlohmann::json;

std::string_view to_string(Track track) {
  switch (track) {
    case Track::kObject: return "object";
    case Track::kHuman: return "human";
    case Track::kJoint: return "joint";
  }
  return "object";
}

Track parse_track(std::string_view name) {
  if (name == "object") return Track::kObject;
  if (name == "human") return Track::kHuman;
  if (name == "joint") return Track::kJoint;
  throw Error(ErrorKind::kInvalidArgument, "unknown track '" + std::string(name) + "'");
}

std::string_view to_string(Aggregation agg) {
  return agg == Aggregation::kMedian ? "median" : "mean";
}

Aggregation parse_aggregation(std::string_view name) {
  if (name == "median") return Aggregation::kMedian;
  if (name == "mean") return Aggregation::kMean;
  throw Error(ErrorKind::kInvalidArgument,
              "unknown aggregation '" + std::string(name) + "'");
}

double mean_of(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::kEmptyInput, "mean of nothing");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::kEmptyInput, "median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double aggregate(std::vector<double> values, Aggregation agg) {
  return agg == Aggregation::kMedian ? median_of(std::move(values)) : mean_of(values);
}

std::string config_hash(const std::map<std::string, std::string> &settings) {
  std::string canonical;
  for (const auto &[k, v] : settings) {
    canonical += k;
    canonical += '=';
    canonical += v;
    canonical += ';';
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical)));
  return buf;
}

json to_json(const ScoreReport &report) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["track"] = std::string(to_string(report.track));
  doc["submission"] = report.submission;
  doc["aggregates"] = report.aggregates;
  doc["units"] = report.units;
  doc["settings"] = report.settings;
  doc["counts"] = report.counts;
  doc["warnings"] = report.warnings;
  json curves = json::object();
  for (const auto &[name, c] : report.curves) {
    curves[name] = {{"threshold_unit", c.threshold_unit},
                    {"value_unit", c.value_unit},
                    {"thresholds", c.thresholds},
                    {"values", c.values}};
  }
  doc["curves"] = std::move(curves);
  json frames = json::array();
  for (const auto &row : report.frames) {
    frames.push_back({{"frame_id", row.frame_id},
                      {"missing", row.missing},
                      {"metrics", row.metrics}});
  }
  doc["frames"] = std::move(frames);
  doc["provenance"] = {{"tool_version", report.provenance.tool_version},
                       {"seed", report.provenance.seed},
                       {"config_hash", report.provenance.config_hash}};
  return doc;
}

ScoreReport report_from_json(const json &doc) {
  try {
    if (doc.at("schema_version").get<int>() != kSchemaVersion) {
      throw Error(ErrorKind::kParseError, "unsupported report schema_version");
    }
    ScoreReport r;
    r.track = parse_track(doc.at("track").get<std::string>());
    r.submission = doc.at("submission").get<std::string>();
    r.aggregates = doc.at("aggregates").get<std::map<std::string, double>>();
    r.units = doc.at("units").get<std::map<std::string, std::string>>();
    r.settings = doc.at("settings").get<std::map<std::string, std::string>>();
    r.counts = doc.at("counts").get<std::map<std::string, std::int64_t>>();
    r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    for (const auto &[name, c] : doc.at("curves").items()) {
      Curve curve;
      curve.threshold_unit = c.at("threshold_unit").get<std::string>();
      curve.value_unit = c.at("value_unit").get<std::string>();
      curve.thresholds = c.at("thresholds").get<std::vector<double>>();
      curve.values = c.at("values").get<std::vector<double>>();
      r.curves.emplace(name, std::move(curve));
    }
    for (const auto &f : doc.at("frames")) {
      FrameRow row;
      row.frame_id = f.at("frame_id").get<std::string>();
      row.missing = f.at("missing").get<bool>();
      row.metrics = f.at("metrics").get<std::map<std::string, double>>();
      r.frames.push_back(std::move(row));
    }
    const auto &p = doc.at("provenance");
    r.provenance.tool_version = p.at("tool_version").get<std::string>();
    r.provenance.seed = p.at("seed").get<std::uint64_t>();
    r.provenance.config_hash = p.at("config_hash").get<std::string>();
    return r;
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParseError, std::string("report document: ") + e.what());
  }
}

std::string serialize(const ScoreReport &report) {
  return to_json(report).dump(2) + "\n";
}

namespace {

void check_close(const ScoreReport &r, const std::string &key, double expected) {
  const auto it = r.aggregates.find(key);
  if (it == r.aggregates.end()) {
    throw Error(ErrorKind::kInternal, "aggregate '" + key + "' missing from report");
  }
  const double tol = 1e-9 * std::max(1.0, std::abs(expected));
  if (!(std::abs(it->second - expected) <= tol)) {
    throw Error(ErrorKind::kInternal, "aggregate '" + key + "' = " +
                                          std::to_string(it->second) +
                                          " but rows give " + std::to_string(expected));
  }
}

std::vector<double> present_column(const ScoreReport &r, const std::string &key) {
  std::vector<double> out;
  for (const auto &row : r.frames) {
    if (row.missing) continue;
    const auto it = row.metrics.find(key);
    if (it != row.metrics.end()) out.push_back(it->second);
  }
  return out;
}

void verify_object(const ScoreReport &r) {
  const Aggregation agg = parse_aggregation(r.settings.at("aggregation"));
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> mspd_err, re_err;
  for (const auto &row : r.frames) {
    mspd_err.push_back(row.missing ? inf : row.metrics.at("MSPD"));
    re_err.push_back(row.missing ? inf : row.metrics.at("RE"));
  }
  const auto fractions = mssd_fraction_schedule().thresholds;
  double mssd_ar = 0.0;
  for (double frac : fractions) {
    std::size_t pass = 0;
    for (const auto &row : r.frames) {
      if (!row.missing &&
          row.metrics.at("MSSD") <= row.metrics.at("diameter") * frac) {
        ++pass;
      }
    }
    mssd_ar += static_cast<double>(pass) / static_cast<double>(r.frames.size());
  }
  mssd_ar /= static_cast<double>(fractions.size());
  const double mspd_ar = average_recall(mspd_err, mspd_schedule());
  const double re_ar = average_recall(re_err, re_schedule());
  check_close(r, "MSSD-AR", mssd_ar);
  check_close(r, "MSPD-AR", mspd_ar);
  check_close(r, "RE-AR", re_ar);
  check_close(r, "AR-all", (mssd_ar + mspd_ar + re_ar) / 3.0);
  for (const char *key : {"MSSD", "MSPD", "RE"}) {
    auto col = present_column(r, key);
    if (!col.empty()) check_close(r, key, aggregate(std::move(col), agg));
  }
}

void verify_human(const ScoreReport &r) {
  for (const char *key : {"MPJPE", "MPJPE-PA", "MPJAE", "MPJAE-PA"}) {
    const auto col = present_column(r, key);
    if (!col.empty()) check_close(r, key, mean_of(col));
  }
  for (const char *key : {"PCK", "AUC"}) {
    std::vector<double> col;
    for (const auto &row : r.frames) col.push_back(row.missing ? 0.0 : row.metrics.at(key));
    check_close(r, key, mean_of(col));
  }
}

void verify_joint(const ScoreReport &r) {
  for (const char *key : {"SMPL", "Object"}) {
    const auto col = present_column(r, key);
    if (!col.empty()) check_close(r, key, mean_of(col));
  }
}

}  // namespace

void verify_aggregates(const ScoreReport &report) {
  if (report.frames.empty()) throw Error(ErrorKind::kInternal, "report without frames");
  try {
    switch (report.track) {
      case Track::kObject: verify_object(report); break;
      case Track::kHuman: verify_human(report); break;
      case Track::kJoint: verify_joint(report); break;
    }
  } catch (const std::out_of_range &e) {
    throw Error(ErrorKind::kInternal, std::string("report row incomplete: ") + e.what());
  }
}

}  // namespace hoieval
