#include "marc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "marc/errors.hpp"

namespace marc {

std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::Attack: return "attack";
    case PatternKind::Combo: return "combo";
    case PatternKind::Normal: return "normal";
    case PatternKind::TraceFile: return "trace";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  timing.validate();
  rfm.validate();
  detector.validate(timing);
  if (seeds.empty()) throw ConfigError("experiment.seeds must not be empty");
  if (pattern == PatternKind::TraceFile && trace_path.empty())
    throw ConfigError("pattern.path is required for trace patterns");
  if (mitigation.para.probability <= 0.0 || mitigation.para.probability > 1.0)
    throw ConfigError("mitigation.para_p must lie in (0, 1]");
  if (mitigation.counter.table_size == 0) throw ConfigError("mitigation.table_size must be >= 1");
  if (mitigation.counter.logic_threshold == 0) throw ConfigError("mitigation.threshold must be >= 1");
  if (mitigation.probabilistic.sample_window_multiple == 0)
    throw ConfigError("mitigation.sample_window_multiple must be >= 1");
}

bool ExperimentConfig::stochastic() const {
  if (mitigation.scheme == Scheme::Probabilistic) return true;
  if (pattern == PatternKind::Normal) return true;
  return pattern == PatternKind::Combo && combo.values.empty();
}

SimulationOptions ExperimentConfig::simulation_options(std::uint64_t seed) const {
  SimulationOptions o;
  o.timing = timing;
  o.rfm = rfm;
  o.detector = detector;
  o.mitigation = mitigation;
  o.mitigation.seed = seed;
  o.marc_enabled = marc_enabled;
  o.forced_level = forced_level;
  o.drop_ref_collisions = drop_ref_collisions;
  o.rfm_blocking_ns = rfm_blocking_ns;
  return o;
}

CommandTrace build_trace(const ExperimentConfig& config, std::uint64_t seed) {
  switch (config.pattern) {
    case PatternKind::Attack:
      return gen_attack(config.attack, config.timing);
    case PatternKind::Combo: {
      ComboSpec spec = config.combo;
      spec.seed = seed;
      return gen_trc_combo(spec);
    }
    case PatternKind::Normal: {
      NormalSpec spec = config.normal;
      spec.seed = seed;
      return gen_normal(spec, config.timing);
    }
    case PatternKind::TraceFile:
      return read_trace_file(config.trace_path);
  }
  throw ConfigError("unknown pattern kind");
}

SimulationResult run_once(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  const CommandTrace trace = build_trace(config, seed);
  return simulate(trace, config.simulation_options(seed));
}

RunReport run_simulation(const ExperimentConfig& config) {
  config.validate();
  return run_once(config, config.seeds.front()).report;
}

void parallel_for(std::size_t jobs, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::vector<std::uint64_t> effective_seeds(const ExperimentConfig& c) {
  if (c.stochastic()) return c.seeds;
  return {c.seeds.front()};
}

std::string default_pattern_id(const ExperimentConfig& c) {
  if (!c.pattern_id.empty()) return c.pattern_id;
  switch (c.pattern) {
    case PatternKind::Attack:
      return "attack_t" + std::to_string(c.attack.trc) + "_a" + std::to_string(c.attack.n_aggressors);
    case PatternKind::Combo:
      return "combo_n" + std::to_string(c.combo.n_distinct);
    case PatternKind::Normal:
      return "normal";
    case PatternKind::TraceFile:
      return c.trace_path;
  }
  return "pattern";
}

/// Runs every (point, seed) pair as one flat job list, then averages per point.
std::vector<ReportRow> run_points(const std::vector<ExperimentConfig>& points, unsigned threads) {
  struct Job {
    std::size_t point;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < points.size(); ++p) {
    points[p].validate();
    for (auto s : effective_seeds(points[p])) jobs.push_back({p, s});
  }

  std::vector<RunReport> reports(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    reports[i] = run_once(points[jobs[i].point], jobs[i].seed).report;
  });

  std::vector<ReportRow> rows(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    const ExperimentConfig& c = points[p];
    ReportRow& r = rows[p];
    r.pattern_id = default_pattern_id(c);
    r.side = c.mitigation.side;
    r.scheme = c.mitigation.scheme;
    r.marc = c.marc_enabled;
    if (c.pattern == PatternKind::Attack) {
      r.trc_ns = c.attack.trc;
      r.n_aggressors = c.attack.n_aggressors;
    }
    r.max_exposure_min = INFINITY;
    r.max_exposure_max = 0.0;
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    ReportRow& r = rows[jobs[i].point];
    const RunReport& rep = reports[i];
    const auto me = static_cast<double>(rep.max_exposure);
    r.max_exposure += me;
    r.recognition_rate += rep.recognition_rate;
    r.acts += static_cast<double>(rep.cmd_counts.act);
    r.refs += static_cast<double>(rep.cmd_counts.ref);
    r.rfms += static_cast<double>(rep.cmd_counts.rfm);
    r.cures += static_cast<double>(rep.cmd_counts.cures);
    r.max_exposure_min = std::min(r.max_exposure_min, me);
    r.max_exposure_max = std::max(r.max_exposure_max, me);
    ++r.runs;
  }
  for (ReportRow& r : rows) {
    const auto n = static_cast<double>(std::max<std::size_t>(r.runs, 1));
    r.max_exposure /= n;
    r.recognition_rate /= n;
    r.acts /= n;
    r.refs /= n;
    r.rfms /= n;
    r.cures /= n;
    r.mer = 1.0;
  }
  return rows;
}

ExperimentConfig attack_point(const ExperimentConfig& base, Nanos trc, std::uint32_t aggressors, bool marc) {
  ExperimentConfig c = base;
  c.pattern = PatternKind::Attack;
  c.attack.trc = trc;
  c.attack.n_aggressors = aggressors;
  c.attack.mode = AttackMode::MultiSided;
  c.marc_enabled = marc;
  c.forced_level.reset();
  c.pattern_id.clear();
  return c;
}

std::vector<ReportRow> sweep(const ExperimentConfig& config, const std::vector<BenchPlanEntry>& plan) {
  std::vector<ExperimentConfig> points;
  points.push_back(attack_point(config, 60, 50, false));  // normalization baseline
  for (const auto& e : plan) {
    points.push_back(attack_point(config, e.trc, e.n_aggressors, false));
    points.push_back(attack_point(config, e.trc, e.n_aggressors, true));
  }
  auto rows = run_points(points, config.threads);
  const double baseline = rows.front().max_exposure;
  rows.erase(rows.begin());
  for (ReportRow& r : rows) r.mer = mer(r.max_exposure, baseline);
  return rows;
}

std::string num(double v) {
  char buf[64];
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.6g", v);
  }
  return buf;
}

}  // namespace

ReportRow run_point(const ExperimentConfig& config) {
  return run_points({config}, config.threads).front();
}

double baseline_exposure(const ExperimentConfig& config) {
  return run_point(attack_point(config, 60, 50, false)).max_exposure;
}

std::vector<ReportRow> sweep_trc(const ExperimentConfig& config, const std::vector<Nanos>& trcs) {
  std::vector<BenchPlanEntry> plan;
  for (Nanos t : trcs) plan.push_back({t, config.attack.n_aggressors});
  return sweep(config, plan);
}

std::vector<ReportRow> sweep_aggressors(const ExperimentConfig& config,
                                        const std::vector<std::uint32_t>& counts) {
  std::vector<BenchPlanEntry> plan;
  for (auto n : counts) plan.push_back({60, n});
  return sweep(config, plan);
}

std::vector<BenchPlanEntry> benchmark_plan() {
  std::vector<BenchPlanEntry> plan;
  for (Nanos t = 60; t <= 150; t += 10) plan.push_back({t, 50});
  for (std::uint32_t n = 10; n <= 90; n += 10) plan.push_back({60, n});
  return plan;
}

std::vector<std::uint32_t> detection_case_sizes() {
  std::vector<std::uint32_t> sizes;
  for (std::uint32_t n = 1; n <= 20; ++n) sizes.push_back(n);
  sizes.insert(sizes.end(), {50, 70, 90});
  return sizes;
}

std::vector<DetectionCase> bench_detect(const ExperimentConfig& config,
                                        const std::vector<std::uint32_t>& sizes, std::size_t patterns,
                                        std::uint64_t seed) {
  config.timing.validate();
  config.detector.validate(config.timing);
  std::vector<double> rates(sizes.size() * patterns);
  parallel_for(rates.size(), config.threads, [&](std::size_t job) {
    const std::size_t c = job / patterns;
    const std::size_t i = job % patterns;
    ComboSpec spec = config.combo;
    spec.values.clear();
    spec.n_distinct = sizes[c];
    spec.seed = seed * 1'000'003ULL + sizes[c] * 10'007ULL + i;
    const CommandTrace trace = gen_trc_combo(spec);
    rates[job] = recognition_rate(detect_only(trace, config.detector, config.timing));
  });

  std::vector<DetectionCase> cases;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    DetectionCase d;
    d.n_distinct = sizes[c];
    d.patterns = patterns;
    for (std::size_t i = 0; i < patterns; ++i) {
      const double r = rates[c * patterns + i];
      d.mean_rate += r;
      d.min_rate = std::min(d.min_rate, r);
      d.max_rate = std::max(d.max_rate, r);
    }
    if (patterns) d.mean_rate /= static_cast<double>(patterns);
    cases.push_back(d);
  }
  return cases;
}

std::string report_csv_header(bool seed_stats) {
  std::string h =
      "pattern_id,side,scheme,marc,trc_ns,n_aggressors,max_exposure,mer,recognition_rate,acts,refs,"
      "rfms,cures";
  if (seed_stats) h += ",max_exposure_min,max_exposure_max,runs";
  return h;
}

std::string report_csv(const std::vector<ReportRow>& rows, bool seed_stats) {
  std::string out = report_csv_header(seed_stats) + "\n";
  for (const ReportRow& r : rows) {
    out += r.pattern_id + "," + std::string(to_string(r.side)) + "," + std::string(to_string(r.scheme)) +
           "," + (r.marc ? "1" : "0") + "," + std::to_string(r.trc_ns) + "," +
           std::to_string(r.n_aggressors) + "," + num(r.max_exposure) + "," + num(r.mer) + "," +
           num(r.recognition_rate) + "," + num(r.acts) + "," + num(r.refs) + "," + num(r.rfms) + "," +
           num(r.cures);
    if (seed_stats)
      out += "," + num(r.max_exposure_min) + "," + num(r.max_exposure_max) + "," + std::to_string(r.runs);
    out += "\n";
  }
  return out;
}

std::string timeline_csv(const DetectionTimeline& timeline) {
  std::string out = "window_index,short_count,dup,loop,verdict\n";
  for (const WindowRecord& w : timeline.windows) {
    out += std::to_string(w.index) + "," + std::to_string(w.summary.short_count) + "," +
           (w.summary.dup ? "1" : "0") + "," + (w.summary.loop ? "1" : "0") + "," +
           std::string(to_string(w.verdict)) + "\n";
  }
  return out;
}

std::string detection_csv(const std::vector<DetectionCase>& cases) {
  std::string out = "n_distinct,patterns,mean_recognition_rate,min_recognition_rate,max_recognition_rate\n";
  for (const DetectionCase& d : cases) {
    out += std::to_string(d.n_distinct) + "," + std::to_string(d.patterns) + "," + num(d.mean_rate) + "," +
           num(d.min_rate) + "," + num(d.max_rate) + "\n";
  }
  return out;
}

}  // namespace marc
