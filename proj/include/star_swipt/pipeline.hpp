#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "star_swipt/oracle.hpp"
#include "star_swipt/precoder_opt.hpp"
#include "star_swipt/ris_opt.hpp"
#include "star_swipt/scenario.hpp"

namespace star_swipt {

/// Scenario plus the settings of the outer loop and its two inner solvers.
struct PipelineConfig {
  ScenarioConfig scenario;
  int n_realizations = 100;
  int max_outer = 10;
  double delta_outer = 1e-2;  // outer stop threshold on |delta r_sec|
  PrecoderOptions precoder;
  RisOptions ris;

  /// Throws ConfigError on the first invalid value.
  void validate() const;
};

/// Assigns a pipeline or scenario key. Returns false for unknown keys.
bool apply_pipeline_key(PipelineConfig& cfg, const KeyValue& kv);

/// Every line must name a scenario or pipeline key.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// One outer iteration of one realization. After convergence the last
/// iteration is repeated so every realization has max_outer records.
struct OuterRecord {
  double sweep_value = 0.0;
  int realization = 0;
  int outer_iter = 0;  // 1-based
  double r_sec = 0.0;  // exact worst-case secrecy of the kept design
  double sum_rate = 0.0;
  double energy_worst = 0.0;
  bool feasible = false;
  double eps_ratio = 0.0;  // smallest rank ratio of the last RIS matrices
  double wall_ms = 0.0;
  int spca_iterations = 0;
  int ris_iterations = 0;
  bool ris_accepted = false;
  bool padded = false;  // repeat of a converged iteration
};

/// Result of the alternating loop on one channel draw.
struct AlternateResult {
  PrecoderSet pre;
  RISProfile ris;
  bool feasible = false;  // a design meeting every constraint was found
  bool failed = false;    // an exception ended the run
  std::string error;
  RateReport report;      // exact evaluation of the kept design
  std::vector<OuterRecord> records;
  int outer_iterations = 0;  // iterations actually run
  bool converged = false;

  // first precoder solve from the restoration point
  bool first_spca_converged = false;
  bool spca_monotone = true;  // every precoder run nondecreasing within 1e-6
  std::vector<double> first_spca_history;

  // every RIS run that produced a matrix solution
  int ris_runs = 0;
  int ris_rank_complete = 0;
  int ris_iterations = 0;       // subproblems solved in total
  double worst_extraction_loss = 0.0;  // relative sum-rate loss of the extracted profile

  std::vector<PrecoderTraceRow> restoration_trace;
  std::vector<int> restoration_trace_outer;      // outer index of each row
  std::vector<PrecoderTraceRow> precoder_trace;  // SPCA iterations
  std::vector<int> precoder_trace_outer;
  std::vector<RisTraceRow> ris_trace;
  std::vector<int> ris_trace_outer;
};

/// Restoration, precoder SPCA and RIS rank-one relaxation alternate until
/// the exact objective changes by less than delta_outer. A step is kept only
/// if its design certifies and does not lower the exact objective.
AlternateResult alternate(const ChannelSet& ch, const PipelineConfig& cfg, int realization = 0,
                          double sweep_value = 0.0);

struct SweepSpec {
  std::string key;  // empty for a single point
  std::vector<double> values;
};

struct PointSummary {
  double sweep_value = 0.0;
  int realizations = 0;
  int feasible = 0;
  int failed = 0;
  double mean_r_sec = 0.0, std_r_sec = 0.0;
  double mean_sum_rate = 0.0, std_sum_rate = 0.0;
  double mean_energy = 0.0;
  double mean_outer = 0.0;
  double mean_ris_iterations = 0.0;
};

struct ExperimentResult {
  std::vector<OuterRecord> records;  // sweep value major, then realization, then outer iteration
  std::vector<AlternateResult> runs;  // sweep value major, then realization
  std::vector<PointSummary> points;
  int failures = 0;
};

/// Worker count: OpenMP default capped by STAR_SWIPT_THREADS when set.
int worker_threads();

/// Realization i of every point uses seed cfg.scenario.seed + i. Failed
/// realizations count toward `failures` and report r_sec = 0.
ExperimentResult run_experiment(const PipelineConfig& cfg, const SweepSpec& sweep);

/// Copy of `cfg` with `key` set to `value`; throws ConfigError for an unknown key.
PipelineConfig with_value(const PipelineConfig& cfg, const std::string& key, double value);

/// Mean and sample standard deviation (0 for fewer than two values).
std::pair<double, double> mean_std(const std::vector<double>& v);

std::string records_header();
void write_records(std::ostream& os, const std::vector<OuterRecord>& records);
std::string summary_header();
void write_summary(std::ostream& os, const std::vector<PointSummary>& points);

/// Two-column plot data "x mean" in `stem`.dat and "x std" in `stem`_std.dat.
void write_plot(const std::filesystem::path& dir, const std::string& stem, const std::vector<double>& x,
                const std::vector<std::vector<double>>& samples);

/// Writes records.csv, summary.csv, reports.csv and the plot files of a sweep.
void write_experiment(const std::filesystem::path& dir, const ExperimentResult& res, const PipelineConfig& cfg);

/// Per-iteration traces and iteration-indexed plot files.
void write_convergence(const std::filesystem::path& dir, const ExperimentResult& res);

/// Command-line entry point; returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace star_swipt
