#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fdne/bounds.hpp"
#include "fdne/distributions.hpp"
#include "fdne/divergences.hpp"
#include "fdne/training.hpp"

namespace fdne {

/// Either an n-sweep (k from the schedule) or a k-sweep at fixed n.
struct SweepSpec {
  enum class Axis { Ns, Ks };
  Axis axis = Axis::Ns;
  std::vector<std::int64_t> ns;  // Ns sweeps
  std::vector<int> ks;           // Ks sweeps
  std::int64_t fixed_n = 0;      // Ks sweeps
};

struct ExperimentConfig {
  std::string name;
  DivergenceKind kind = DivergenceKind::KL;
  std::optional<DistributionPair> pair;
  SweepSpec sweep;
  ScheduleMode schedule_mode = ScheduleMode::Experiment;
  int replicas = 10;
  std::uint64_t master_seed = 0;

  // Training overrides.
  int epochs = 200;
  double lr_initial = 1e-2;
  double lr_late = 1e-3;
  int lr_switch_epoch = 100;
  double batch_rule = 1e-3;  // batch = max(1, round(n * batch_rule))

  StepHook train_hook;  // programmatic instrumentation; never serialized
};

/// One replica at one sweep point. A failed record carries error_msg and NaN
/// numeric fields instead of aborting the sweep.
struct RunRecord {
  std::string name;
  DivergenceKind kind = DivergenceKind::KL;
  std::int64_t n = 0;
  int k = 0;
  std::uint64_t seed = 0;  // replica stream within the master seed
  double estimate = 0.0;
  double ground_truth = 0.0;
  double abs_error = 0.0;
  double wall_time_s = 0.0;
  std::string error_msg;

  bool failed() const { return !error_msg.empty(); }
};

/// Runs every (sweep point x replica) record; replica r always uses stream
/// (master_seed, r), so the output is a pure function of the config and is
/// independent of worker count and execution order.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config, int workers = 0,
                                      const std::vector<RunRecord>& already_done = {});

/// Per-(n, k) summary over replicas (sample std; 0 for a single record).
struct SummaryRow {
  std::int64_t n = 0;
  int k = 0;
  int count = 0;
  double mean_estimate = 0.0;
  double std_estimate = 0.0;
  double mean_abs_error = 0.0;
  double ground_truth = 0.0;
};

std::vector<SummaryRow> aggregate(const std::vector<RunRecord>& records);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
};

/// Least-squares line through (log n, log mean_abs_error).
RateFit fit_rate(const std::vector<SummaryRow>& summaries);

/// Records CSV: name,kind,n,k,seed,estimate,ground_truth,abs_error,wall_time_s,error_msg
/// with shortest round-trip float formatting.
void emit_csv_records(const std::vector<RunRecord>& records, const std::filesystem::path& path);
std::string records_to_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_csv_records(const std::filesystem::path& path);

/// Summaries CSV plus a gnuplot script next to it (path + ".gp").
void emit_csv_summaries(const std::vector<SummaryRow>& summaries,
                        const std::filesystem::path& path);
std::vector<SummaryRow> parse_csv_summaries(const std::filesystem::path& path);

/// Strict JSON config parsing; unknown fields are rejected.
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// TrainResult JSON: estimate, wall_time_s, trajectory, checkpoint.
std::string train_result_to_json(const TrainResult& result);

}  // namespace fdne
