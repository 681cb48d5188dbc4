#pragma once

// Track dispatch, report emission, curve tables and leaderboards.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hoieval/dataset.hpp"
#include "hoieval/report.hpp"

namespace hoieval {

struct ScoreOptions {
  std::optional<Track> track;  // must match the manifest when given
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  Aggregation aggregation = Aggregation::kMedian;
};

// Scores a dataset whose predictions are attached. Thread count never
// changes the result.
ScoreReport score_dataset(const Dataset &dataset, const std::string &submission_name,
                          const ScoreOptions &options);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

// Loads, validates, scores and writes the report. Problems go to `diag` as
// one JSON document; no report file is written unless the exit code is 0.
int run_score(const std::filesystem::path &manifest, const std::filesystem::path &submission,
              const std::filesystem::path &out, const ScoreOptions &options, std::ostream &diag);

// One CSV per curve ("threshold,value" header). Throws kNoCurveData when the
// report has none.
std::vector<std::filesystem::path> emit_curves(const ScoreReport &report,
                                               const std::filesystem::path &out_dir);

struct RankingKey {
  std::string metric;  // aggregate name, or "SMPL+Object" for the joint mean
  bool descending = false;
};

RankingKey default_ranking_key(Track track);

struct LeaderboardRow {
  int rank = 0;
  std::string submission;
  double value = 0.0;
};

// Ranked by key, ties by submission name. A report without the key ranks last.
std::vector<LeaderboardRow> leaderboard(const std::vector<ScoreReport> &reports,
                                        const std::optional<RankingKey> &key = std::nullopt);
std::string leaderboard_tsv(const std::vector<LeaderboardRow> &rows, const RankingKey &key);

ScoreReport load_report(const std::filesystem::path &path);

}  // namespace hoieval
