#pragma once

#include <cstdint>
#include <map>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

namespace hoieval {

inline constexpr const char *kToolVersion = "0.3.0";
inline constexpr int kSchemaVersion = 1;

enum class Track { kObject, kHuman, kJoint };

std::string_view to_string(Track track);
Track parse_track(std::string_view name);

enum class Aggregation { kMedian, kMean };

std::string_view to_string(Aggregation agg);
Aggregation parse_aggregation(std::string_view name);

// Threshold curve, e.g. recall vs. MSSD threshold or PCK vs. distance.
struct Curve {
  std::string threshold_unit;
  std::string value_unit;
  std::vector<double> thresholds;
  std::vector<double> values;
};

struct FrameRow {
  std::string frame_id;
  bool missing = false;
  std::map<std::string, double> metrics;
};

struct Provenance {
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct ScoreReport {
  Track track = Track::kObject;
  std::string submission;
  std::vector<FrameRow> frames;  // sorted by frame_id
  std::map<std::string, double> aggregates;
  std::map<std::string, std::string> units;
  std::map<std::string, Curve> curves;
  std::map<std::string, std::string> settings;
  std::map<std::string, std::int64_t> counts;
  std::vector<std::string> warnings;
  Provenance provenance;
};

nlohmann::json to_json(const ScoreReport &report);
ScoreReport report_from_json(const nlohmann::json &doc);

// Stable text form: sorted keys, shortest round-trip doubles, trailing newline.
std::string serialize(const ScoreReport &report);

// Recomputes every aggregate from the per-frame rows and throws kInternal on
// disagreement beyond 1e-9.
void verify_aggregates(const ScoreReport &report);

double mean_of(std::span<const double> values);
// Median with the two middle values averaged for even counts.
double median_of(std::vector<double> values);
double aggregate(std::vector<double> values, Aggregation agg);

// Hex FNV-1a digest of a canonical settings string.
std::string config_hash(const std::map<std::string, std::string> &settings);

}  // namespace hoieval
