#include "marc/engine.hpp"

#include <algorithm>

#include "marc/errors.hpp"

namespace marc {

struct WindowedDetectors::BankDetector {
  BankDetector(const DetectorConfig& c, const TimingConfig& t) : detector(c, t) {}
  Detector detector;
  std::optional<Nanos> last_act;
};

WindowedDetectors::WindowedDetectors(const DetectorConfig& config, const TimingConfig& timing)
    : config_(config), timing_(timing) {}
WindowedDetectors::~WindowedDetectors() = default;
WindowedDetectors::WindowedDetectors(WindowedDetectors&&) noexcept = default;
WindowedDetectors& WindowedDetectors::operator=(WindowedDetectors&&) noexcept = default;

WindowedDetectors::BankDetector& WindowedDetectors::bank(BankId id) {
  if (id >= banks_.size()) banks_.resize(id + 1);
  if (!banks_[id]) banks_[id] = std::make_unique<BankDetector>(config_, timing_);
  return *banks_[id];
}

void WindowedDetectors::close_window(Nanos duration) {
  WindowRecord record;
  record.index = window_index_;
  record.duration = duration;
  Verdict worst = Verdict::Inactive;
  for (auto& b : banks_) {
    if (!b) continue;
    const WindowSummary s = b->detector.finalize_window();
    const Verdict v = b->detector.inspect(s);
    record.summary.short_count = std::max(record.summary.short_count, s.short_count);
    record.summary.dup = record.summary.dup || s.dup;
    record.summary.loop = record.summary.loop || s.loop;
    worst = std::max(worst, v);
  }
  record.verdict = worst;
  verdict_ = worst;
  timeline_.windows.push_back(record);
  ++window_index_;
  window_start_ += duration;
}

std::size_t WindowedDetectors::advance(Nanos time) {
  std::size_t closed = 0;
  while (time >= window_start_ + timing_.t_refi) {
    close_window(timing_.t_refi);
    ++closed;
  }
  return closed;
}

void WindowedDetectors::observe_act(BankId id, Nanos time) {
  BankDetector& b = bank(id);
  if (b.last_act) {
    const TrcLabel label = encode_trc(time - *b.last_act, config_, timing_);
    if (b.detector.buffer().full()) ++overflow_;
    else b.detector.observe(label);
  }
  b.last_act = time;
}

void WindowedDetectors::finish(Nanos end) {
  advance(end);
  if (end > window_start_) close_window(end - window_start_);
}

namespace {

class Simulator {
 public:
  explicit Simulator(const SimulationOptions& o)
      : opt_(o),
        rfm_(o.rfm),
        rfm_on_(o.rfm.rfm_enabled || o.marc_enabled || o.forced_level.has_value()),
        detectors_(o.detector, o.timing),
        ledger_(o.timing.t_refw) {
    if (opt_.forced_level) rfm_.set_arfm_level(*opt_.forced_level);
  }

  SimulationResult run(const CommandTrace& input) {
    const CommandTrace merged = prepare(input);
    validate_trace(merged, opt_.timing);
    if (opt_.record_commands) result_.executed.commands.reserve(merged.size() + merged.size() / 16);

    for (const Command& c : merged.commands) {
      if (detectors_.advance(c.time) > 0) apply_verdict();
      switch (c.kind) {
        case CommandKind::Act: on_act(c); break;
        case CommandKind::Ref: on_ref(c); break;
        case CommandKind::Rfm: on_external_rfm(c); break;
      }
    }

    const Nanos end = std::max(merged.duration, merged.empty() ? 0 : merged.commands.back().time);
    detectors_.finish(end);
    result_.executed.duration = end;
    result_.report.max_exposure = ledger_.max_exposure();
    result_.report.cmd_counts = stats_;
    result_.timeline = detectors_.take_timeline();
    result_.report.recognition_rate = recognition_rate(result_.timeline);
    return std::move(result_);
  }

 private:
  struct Bank {
    Bank(const MitigationParams& p, const TimingConfig& t, BankId id) : pipeline(p, t, id) {}
    MitigationPipeline pipeline;
    Nanos blocked_until = 0;
  };

  CommandTrace prepare(const CommandTrace& input) const {
    const bool has_ref = std::any_of(input.commands.begin(), input.commands.end(),
                                     [](const Command& c) { return c.kind == CommandKind::Ref; });
    if (has_ref) return input;
    const auto refs = schedule_refresh(opt_.timing, input.duration);
    if (!opt_.drop_ref_collisions) return merge_streams(input, refs);
    return merge_streams(drop_ref_collisions(input, refs), refs);
  }

  Bank& bank(BankId id) {
    if (id >= banks_.size()) banks_.resize(id + 1);
    if (!banks_[id]) banks_[id] = std::make_unique<Bank>(opt_.mitigation, opt_.timing, id);
    return *banks_[id];
  }

  void apply_verdict() {
    if (opt_.marc_enabled && !opt_.forced_level)
      rfm_.set_arfm_level(to_arfm_level(detectors_.verdict()));
  }

  void record(const Command& c) {
    if (opt_.record_commands) result_.executed.commands.push_back(c);
  }

  void cure(BankId id, RowId aggressor, Nanos now) {
    const Bank& b = *banks_[id];
    neighbors_ = neighbor_rows(aggressor, b.pipeline.blast_radius(), b.pipeline.max_row());
    ledger_.record_cure(id, neighbors_);
    ++stats_.cures;
    if (opt_.record_commands)
      result_.cures.push_back({now, id, neighbors_, result_.executed.commands.size()});
  }

  void cure_slot(BankId id, Nanos now) {
    if (auto aggressor = banks_[id]->pipeline.cure_slot(now)) cure(id, *aggressor, now);
  }

  void on_act(const Command& c) {
    Bank& b = bank(c.bank);
    if (c.time < b.blocked_until) {
      ++result_.dropped_acts;
      return;
    }
    record(c);
    ++stats_.act;
    ledger_.record_act(c.bank, *c.row, c.time);
    detectors_.observe_act(c.bank, c.time);
    if (auto aggressor = b.pipeline.on_act(c.time, *c.row)) cure(c.bank, *aggressor, c.time);

    if (!rfm_on_) return;
    rfm_.on_act(c.bank);
    if (rfm_.rfm_pending(c.bank)) {
      record(rfm_.issue_rfm(c.bank, c.time));
      ++stats_.rfm;
      if (opt_.rfm_blocking_ns > 0) b.blocked_until = c.time + opt_.rfm_blocking_ns;
      if (b.pipeline.cures_on_rfm()) cure_slot(c.bank, c.time);
    }
  }

  void on_ref(const Command& c) {
    record(c);
    ++stats_.ref;
    ledger_.advance(c.time);
    const bool single = opt_.timing.per_bank_refresh;
    if (rfm_on_) {
      if (single) rfm_.on_ref(c.bank);
      else rfm_.on_ref_all();
    }
    ++ref_count_;
    if (ref_count_ % opt_.timing.nrr_per_refresh != 0) return;
    for (BankId id = 0; id < banks_.size(); ++id) {
      if (!banks_[id] || (single && id != c.bank)) continue;
      if (banks_[id]->pipeline.cures_on_ref()) cure_slot(id, c.time);
    }
  }

  void on_external_rfm(const Command& c) {
    record(c);
    ++stats_.rfm;
    Bank& b = bank(c.bank);
    if (rfm_on_) rfm_.on_rfm(c.bank);
    if (opt_.rfm_blocking_ns > 0) b.blocked_until = c.time + opt_.rfm_blocking_ns;
    if (b.pipeline.cures_on_rfm()) cure_slot(c.bank, c.time);
  }

  const SimulationOptions& opt_;
  RfmState rfm_;
  bool rfm_on_;
  WindowedDetectors detectors_;
  ExposureLedger ledger_;
  std::vector<std::unique_ptr<Bank>> banks_;
  std::uint64_t ref_count_ = 0;
  CommandStats stats_;
  std::vector<RowId> neighbors_;
  SimulationResult result_;
};

}  // namespace

SimulationResult simulate(const CommandTrace& trace, const SimulationOptions& options) {
  options.timing.validate();
  options.rfm.validate();
  options.detector.validate(options.timing);
  return Simulator(options).run(trace);
}

DetectionTimeline detect_only(const CommandTrace& trace, const DetectorConfig& config,
                              const TimingConfig& timing) {
  timing.validate();
  config.validate(timing);
  validate_trace(trace, timing);
  WindowedDetectors detectors(config, timing);
  for (const Command& c : trace.commands) {
    detectors.advance(c.time);
    if (c.kind == CommandKind::Act) detectors.observe_act(c.bank, c.time);
  }
  const Nanos end = std::max(trace.duration, trace.empty() ? 0 : trace.commands.back().time);
  detectors.finish(end);
  return detectors.take_timeline();
}

}  // namespace marc
