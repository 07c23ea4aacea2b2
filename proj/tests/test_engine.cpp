#include <map>
#include <random>

#include "doctest.h"
#include "marc/engine.hpp"
#include "marc/errors.hpp"
#include "marc/experiment.hpp"
#include "marc/patterns.hpp"
#include "oracles.hpp"

using namespace marc;

namespace {

ExperimentConfig short_attack(Nanos duration = 16'000'000) {
  ExperimentConfig c;
  c.attack.duration = duration;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("vanilla without mitigation counts every ACT of a row") {
  ExperimentConfig c = short_attack(8'000'000);
  c.mitigation.scheme = Scheme::None;
  const auto r = run_once(c, 1);
  std::map<RowId, std::uint32_t> per_row;
  for (const auto& cmd : build_trace(c, 1).commands) ++per_row[*cmd.row];
  std::uint32_t best = 0;
  for (auto [row, n] : per_row) best = std::max(best, n);
  // REF collisions drop a few ACTs; the count can only fall.
  CHECK(r.report.max_exposure <= best);
  CHECK(r.report.max_exposure + 200 >= best);
  CHECK(r.report.cmd_counts.rfm == 0);
  CHECK(r.report.cmd_counts.cures == 0);
}

TEST_CASE("benign streams stay inactive") {
  ExperimentConfig c;
  c.pattern = PatternKind::Normal;
  c.normal.short_fraction = 0.0;
  c.normal.duration = 16'000'000;
  c.marc_enabled = true;
  const auto r = run_once(c, 3);
  CHECK(r.report.cmd_counts.rfm == 0);
  CHECK(r.report.recognition_rate == 0.0);
  for (const auto& w : r.timeline.windows) CHECK(w.verdict == Verdict::Inactive);

  c.normal.short_fraction = 0.005;
  const auto n = run_once(c, 4);
  CHECK(n.report.cmd_counts.rfm == 0);
  CHECK(n.report.recognition_rate == 0.0);
}

TEST_CASE("repeat runs produce identical reports") {
  ExperimentConfig c = short_attack();
  c.marc_enabled = true;
  const auto a = run_once(c, 9);
  const auto b = run_once(c, 9);
  CHECK(a.report.max_exposure == b.report.max_exposure);
  CHECK(a.report.cmd_counts == b.report.cmd_counts);
  CHECK(a.timeline.windows.size() == b.timeline.windows.size());
}

TEST_CASE("forced level C bounds RFM issuance") {
  ExperimentConfig c = short_attack();
  c.forced_level = ArfmLevel::C;
  const auto r = run_once(c, 1);
  const auto& s = r.report.cmd_counts;
  CHECK(s.rfm > 0);
  CHECK(s.rfm <= s.act / 31 + 1);
}

TEST_CASE("sweeps") {
  ExperimentConfig c = short_attack(4'000'000);
  c.mitigation.scheme = Scheme::CounterBased;
  const auto rows = sweep_trc(c, {60, 70, 80, 90, 100});
  REQUIRE(rows.size() == 10);
  CHECK(rows[0].trc_ns == 60);
  CHECK_FALSE(rows[0].marc);
  CHECK(rows[1].marc);
  CHECK(rows[0].mer == 1.0);
  for (const auto& r : rows) CHECK(r.mer == doctest::Approx(r.max_exposure / rows[0].max_exposure));

  const auto aggr = sweep_aggressors(c, {10, 50});
  REQUIRE(aggr.size() == 4);
  CHECK(aggr[2].n_aggressors == 50);
  CHECK(aggr[2].mer == 1.0);

  CHECK(benchmark_plan().size() == 19);
  const auto sizes = detection_case_sizes();
  REQUIRE(sizes.size() == 23);
  CHECK(sizes.front() == 1);
  CHECK(sizes[19] == 20);
  CHECK(sizes.back() == 90);
}

TEST_CASE("detector-only runs") {
  TimingConfig timing;
  DetectorConfig det;
  ComboSpec one;
  one.values = {65};
  CHECK(recognition_rate(detect_only(gen_trc_combo(one), det, timing)) > 0.99);

  ComboSpec slow;
  slow.values = {120, 200, 150};
  CHECK(recognition_rate(detect_only(gen_trc_combo(slow), det, timing)) == 0.0);

  ComboSpec mixed;
  mixed.n_distinct = 50;
  mixed.pool_hi = 200;
  mixed.seed = 11;
  CHECK(recognition_rate(detect_only(gen_trc_combo(mixed), det, timing)) < 0.5);
}

TEST_CASE("bench_detect shape") {
  ExperimentConfig c;
  c.threads = 1;
  const auto cases = bench_detect(c, {1, 3}, 4, 7);
  REQUIRE(cases.size() == 2);
  for (const auto& k : cases) {
    CHECK(k.patterns == 4);
    CHECK(k.min_rate <= k.mean_rate);
    CHECK(k.mean_rate <= k.max_rate);
    CHECK(k.mean_rate > 0.99);
  }
}

TEST_CASE("max exposure agrees with an independent replay") {
  std::mt19937_64 g(5150);
  for (int rep = 0; rep < 40; ++rep) {
    SimulationOptions o;
    o.timing.t_refw = 200'000 + static_cast<Nanos>(g() % 400'000);
    o.record_commands = true;
    o.marc_enabled = g() % 2;
    o.mitigation.side = g() % 2 ? Side::DramSide : Side::McSide;
    o.mitigation.scheme = g() % 2 ? Scheme::Probabilistic : Scheme::CounterBased;
    o.mitigation.seed = g();
    CommandTrace t;
    Nanos now = 0;
    std::vector<Nanos> last(2, -1'000);
    for (int i = 0; i < 3'000; ++i) {
      const auto bank = static_cast<BankId>(g() % 2);
      now = std::max(now + static_cast<Nanos>(g() % 40), last[bank] + 60 + static_cast<Nanos>(g() % 80));
      last[bank] = now;
      t.commands.push_back(Command::act(now, bank, static_cast<RowId>(g() % 6)));
    }
    t.duration = now;
    const auto r = simulate(t, o);
    CHECK(r.report.max_exposure == oracle::replay_max_exposure(r.executed, r.cures, o.timing.t_refw));
  }
}

TEST_CASE("invalid configurations are rejected") {
  ExperimentConfig c;
  c.seeds.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  ExperimentConfig t;
  t.pattern = PatternKind::TraceFile;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  ExperimentConfig missing;
  missing.pattern = PatternKind::TraceFile;
  missing.trace_path = "/nonexistent/trace.txt";
  CHECK_THROWS_AS(run_point(missing), Error);
}

TEST_CASE("csv writers") {
  CHECK(report_csv_header() ==
        "pattern_id,side,scheme,marc,trc_ns,n_aggressors,max_exposure,mer,recognition_rate,acts,refs,rfms,cures");
  ReportRow r;
  r.pattern_id = "x";
  r.max_exposure = 12;
  const auto csv = report_csv({r});
  CHECK(csv.rfind(report_csv_header(), 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(report_csv_header(true).find("max_exposure_min,max_exposure_max,runs") != std::string::npos);
  CHECK(timeline_csv({}).rfind("window_index,short_count,dup,loop,verdict", 0) == 0);
  CHECK(detection_csv({}).rfind("n_distinct,patterns,mean_recognition_rate", 0) == 0);
}
