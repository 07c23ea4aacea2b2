#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "marc/engine.hpp"
#include "marc/patterns.hpp"

namespace marc {

enum class PatternKind : std::uint8_t { Attack, Combo, Normal, TraceFile };

std::string_view to_string(PatternKind kind);

struct ExperimentConfig {
  TimingConfig timing;
  RfmConfig rfm;
  DetectorConfig detector;
  MitigationParams mitigation;

  PatternKind pattern = PatternKind::Attack;
  AttackSpec attack;
  ComboSpec combo;
  NormalSpec normal;
  std::string trace_path;
  std::string pattern_id;

  bool marc_enabled = false;
  std::optional<ArfmLevel> forced_level;
  std::vector<std::uint64_t> seeds{1};
  bool drop_ref_collisions = true;
  Nanos rfm_blocking_ns = 0;

  std::string output;     // report CSV path, stdout when empty
  std::string event_log;  // optional per-window detector CSV
  bool seed_stats = false;
  unsigned threads = 0;  // 0 = hardware concurrency

  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;
  /// Whether different seeds can change the outcome.
  bool stochastic() const;
  SimulationOptions simulation_options(std::uint64_t seed) const;
};

/// The command trace the configured pattern source produces for a seed.
CommandTrace build_trace(const ExperimentConfig& config, std::uint64_t seed);

/// One run with the first configured seed.
SimulationResult run_once(const ExperimentConfig& config, std::uint64_t seed);
RunReport run_simulation(const ExperimentConfig& config);

/// One CSV row: a point averaged over the seed list.
struct ReportRow {
  std::string pattern_id;
  Side side = Side::DramSide;
  Scheme scheme = Scheme::Probabilistic;
  bool marc = false;
  Nanos trc_ns = 0;
  std::uint32_t n_aggressors = 0;
  double max_exposure = 0.0;  // mean over seeds
  double mer = 0.0;
  double recognition_rate = 0.0;
  double acts = 0.0;
  double refs = 0.0;
  double rfms = 0.0;
  double cures = 0.0;
  double max_exposure_min = 0.0;
  double max_exposure_max = 0.0;
  std::size_t runs = 0;
};

/// Runs every seed (a single one for deterministic schemes) and averages.
ReportRow run_point(const ExperimentConfig& config);

/// Runs `jobs` on up to `threads` worker threads (0 = hardware concurrency).
void parallel_for(std::size_t jobs, unsigned threads, const std::function<void(std::size_t)>& body);

/// tRC sweep at the configured aggressor count, MARC off and on for every point.
/// MER is normalized to the vanilla (60 ns, 50 aggressor) run of the same scheme.
std::vector<ReportRow> sweep_trc(const ExperimentConfig& config, const std::vector<Nanos>& trcs);
/// Aggressor sweep at tRC = 60 ns, MARC off and on, same normalization.
std::vector<ReportRow> sweep_aggressors(const ExperimentConfig& config,
                                        const std::vector<std::uint32_t>& counts);

/// Vanilla max exposure at the normalization point (60 ns, 50 aggressors).
double baseline_exposure(const ExperimentConfig& config);

struct BenchPlanEntry {
  Nanos trc;
  std::uint32_t n_aggressors;
};
/// tRC 60..150 ns at 50 aggressors, then 10..90 aggressors at 60 ns.
std::vector<BenchPlanEntry> benchmark_plan();

struct DetectionCase {
  std::uint32_t n_distinct = 0;
  std::size_t patterns = 0;
  double mean_rate = 0.0;
  double min_rate = 1.0;
  double max_rate = 0.0;
};

/// The 23 combination sizes: 1..20, 50, 70, 90.
std::vector<std::uint32_t> detection_case_sizes();
/// For each size, `patterns` seeded combo traces through the detector alone.
std::vector<DetectionCase> bench_detect(const ExperimentConfig& config,
                                        const std::vector<std::uint32_t>& sizes, std::size_t patterns,
                                        std::uint64_t seed);

std::string report_csv_header(bool seed_stats = false);
std::string report_csv(const std::vector<ReportRow>& rows, bool seed_stats = false);
std::string timeline_csv(const DetectionTimeline& timeline);
std::string detection_csv(const std::vector<DetectionCase>& cases);

}  // namespace marc
