// Command line front end: trace generation, single runs, sweeps and detector benchmarks.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "marc/config.hpp"
#include "marc/errors.hpp"
#include "marc/experiment.hpp"

namespace {

using marc::ExperimentConfig;

struct CommonArgs {
  std::string config_file;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> flags;  // key, value in flag order
  std::string out;
};

/// Flags that map straight onto config keys.
void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_file, "key = value config file");
  cmd->add_option("--set", args.sets, "override a config key (section.key=value)");
  cmd->add_option("-o,--out", args.out, "output file (stdout when omitted)");

  const std::vector<std::pair<std::string, std::string>> direct = {
      {"--seed", "experiment.seeds"},
      {"--seeds", "experiment.seeds"},
      {"--side", "mitigation.side"},
      {"--scheme", "mitigation.scheme"},
      {"--para-p", "mitigation.para_p"},
      {"--table-size", "mitigation.table_size"},
      {"--threshold", "mitigation.threshold"},
      {"--blast-radius", "mitigation.blast_radius"},
      {"--immediate-cure", "mitigation.immediate_cure"},
      {"--marc", "experiment.marc"},
      {"--arfm-level", "experiment.arfm_level"},
      {"--rfm-blocking-ns", "experiment.rfm_blocking_ns"},
      {"--threads", "experiment.threads"},
      {"--pattern", "pattern.kind"},
      {"--trace", "pattern.path"},
      {"--trc", "pattern.trc"},
      {"--aggressors", "pattern.aggressors"},
      {"--mode", "pattern.mode"},
      {"--duration", "pattern.duration"},
      {"--n-distinct", "pattern.n_distinct"},
      {"--values", "pattern.values"},
      {"--event-log", "experiment.event_log"},
      {"--seed-stats", "experiment.seed_stats"},
  };
  for (const auto& [flag, key] : direct) {
    cmd->add_option_function<std::string>(
        flag, [&args, key = key](const std::string& v) { args.flags.emplace_back(key, v); },
        "sets " + key);
  }
}

ExperimentConfig resolve(const CommonArgs& args) {
  ExperimentConfig config;
  if (const char* env = std::getenv("MARC_SEED"); env && *env)
    marc::apply_setting(config, "experiment.seeds", env);
  if (!args.config_file.empty()) marc::load_config_file(config, args.config_file);
  for (const auto& s : args.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw marc::ConfigError("--set expects key=value, got '" + s + "'");
    marc::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& [key, value] : args.flags) marc::apply_setting(config, key, value);
  // A trace path alone implies the trace pattern.
  for (const auto& [key, value] : args.flags)
    if (key == "pattern.path") config.pattern = marc::PatternKind::TraceFile;
  if (!args.out.empty()) config.output = args.out;
  config.validate();
  return config;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw marc::ConfigError("cannot write " + path);
  out << text;
}

std::vector<marc::Nanos> nanos_list(const std::string& text) {
  std::vector<marc::Nanos> out;
  for (auto v : marc::parse_u64_list(text)) out.push_back(static_cast<marc::Nanos>(v));
  return out;
}

int fail(const std::string& kind, const std::string& message, int code) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MARC DRAM command simulator"};
  app.require_subcommand(1);

  CommonArgs gen_args, run_args, trc_args, aggr_args, detect_args, bench_args;

  auto* gen = app.add_subcommand("gen", "write a generated command trace");
  add_common(gen, gen_args);

  auto* run = app.add_subcommand("run", "simulate one configuration and print a report row");
  add_common(run, run_args);

  std::string trc_list = "60,70,80,90,100,110,120,130,140,150";
  auto* sweep_trc = app.add_subcommand("sweep-trc", "max exposure and MER over attack tRC");
  add_common(sweep_trc, trc_args);
  sweep_trc->add_option("--trcs", trc_list, "tRC values in ns (list or lo..hi)");

  std::string aggr_list = "10,20,30,40,50,60,70,80,90";
  auto* sweep_aggr = app.add_subcommand("sweep-aggr", "max exposure and MER over aggressor count");
  add_common(sweep_aggr, aggr_args);
  sweep_aggr->add_option("--counts", aggr_list, "aggressor counts (list or lo..hi)");

  auto* detect = app.add_subcommand("detect", "run the detector alone and print per-window verdicts");
  add_common(detect, detect_args);

  std::size_t bench_patterns = 100;
  std::string bench_sizes;
  auto* bench = app.add_subcommand("bench-detect", "recognition rate over tRC combination sizes");
  add_common(bench, bench_args);
  bench->add_option("--patterns", bench_patterns, "patterns per combination size");
  bench->add_option("--sizes", bench_sizes, "combination sizes (default 1..20,50,70,90)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what(), 2);
  }

  try {
    if (*gen) {
      const ExperimentConfig c = resolve(gen_args);
      emit(c.output, marc::write_trace(marc::build_trace(c, c.seeds.front())));
    } else if (*run) {
      const ExperimentConfig c = resolve(run_args);
      if (!c.event_log.empty()) {
        const auto result = marc::run_once(c, c.seeds.front());
        emit(c.event_log, marc::timeline_csv(result.timeline));
      }
      emit(c.output, marc::report_csv({marc::run_point(c)}, c.seed_stats));
    } else if (*sweep_trc) {
      const ExperimentConfig c = resolve(trc_args);
      emit(c.output, marc::report_csv(marc::sweep_trc(c, nanos_list(trc_list)), c.seed_stats));
    } else if (*sweep_aggr) {
      const ExperimentConfig c = resolve(aggr_args);
      std::vector<std::uint32_t> counts;
      for (auto v : marc::parse_u64_list(aggr_list)) counts.push_back(static_cast<std::uint32_t>(v));
      emit(c.output, marc::report_csv(marc::sweep_aggressors(c, counts), c.seed_stats));
    } else if (*detect) {
      const ExperimentConfig c = resolve(detect_args);
      const auto trace = marc::build_trace(c, c.seeds.front());
      emit(c.output, marc::timeline_csv(marc::detect_only(trace, c.detector, c.timing)));
    } else if (*bench) {
      const ExperimentConfig c = resolve(bench_args);
      std::vector<std::uint32_t> sizes = marc::detection_case_sizes();
      if (!bench_sizes.empty()) {
        sizes.clear();
        for (auto v : marc::parse_u64_list(bench_sizes)) sizes.push_back(static_cast<std::uint32_t>(v));
      }
      emit(c.output, marc::detection_csv(marc::bench_detect(c, sizes, bench_patterns, c.seeds.front())));
    }
  } catch (const marc::ConfigError& e) {
    return fail("ConfigError", e.what(), 2);
  } catch (const marc::ParseError& e) {
    return fail("ParseError", e.what(), 1);
  } catch (const marc::Error& e) {
    return fail("SimulationError", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), 1);
  }
  return 0;
}
