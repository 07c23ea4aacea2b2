#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "marc/detector.hpp"
#include "marc/dram.hpp"
#include "marc/metrics.hpp"
#include "marc/mitigation.hpp"
#include "marc/rfm.hpp"

namespace marc {

struct SimulationOptions {
  TimingConfig timing;
  RfmConfig rfm;
  DetectorConfig detector;
  MitigationParams mitigation;
  bool marc_enabled = false;
  /// Pins the ARFM level for the whole run; the detector still runs but is not obeyed.
  std::optional<ArfmLevel> forced_level;
  /// Drop ACT slots that collide with a scheduled REF.
  bool drop_ref_collisions = true;
  /// ACTs on a bank are suppressed for this long after each RFM it receives.
  Nanos rfm_blocking_ns = 0;
  /// Keep the executed command stream and cure log in the result.
  bool record_commands = false;
};

struct CureEvent {
  Nanos time = 0;
  BankId bank = 0;
  std::vector<RowId> rows;
  std::size_t after = 0;  // number of executed commands that precede the cure
};

struct SimulationResult {
  RunReport report;
  DetectionTimeline timeline;
  CommandTrace executed;
  std::vector<CureEvent> cures;
  std::uint64_t dropped_acts = 0;
};

/// Per-bank detectors sharing one tREFi window clock. Used by the full
/// simulation and by detector-only runs.
class WindowedDetectors {
 public:
  WindowedDetectors(const DetectorConfig& config, const TimingConfig& timing);
  ~WindowedDetectors();
  WindowedDetectors(WindowedDetectors&&) noexcept;
  WindowedDetectors& operator=(WindowedDetectors&&) noexcept;

  /// Closes every window that ends at or before `time`; returns how many closed.
  std::size_t advance(Nanos time);
  /// Measures the tRC since the bank's previous ACT and feeds its label.
  void observe_act(BankId bank, Nanos time);
  /// Closes windows up to `end`, including a trailing partial window.
  void finish(Nanos end);

  /// Highest verdict over all banks after the last closed window.
  Verdict verdict() const { return verdict_; }
  const DetectionTimeline& timeline() const { return timeline_; }
  DetectionTimeline take_timeline() { return std::move(timeline_); }
  std::uint64_t overflowed_labels() const { return overflow_; }

 private:
  struct BankDetector;
  void close_window(Nanos duration);
  BankDetector& bank(BankId id);

  DetectorConfig config_;
  TimingConfig timing_;
  std::vector<std::unique_ptr<BankDetector>> banks_;
  Nanos window_start_ = 0;
  std::size_t window_index_ = 0;
  Verdict verdict_ = Verdict::Inactive;
  DetectionTimeline timeline_;
  std::uint64_t overflow_ = 0;
};

/// Runs one trace through RFM accounting, the detector, the mitigation IP and
/// the exposure ledger. REFs are scheduled at tREFi unless the trace already
/// carries them. Deterministic for a given trace and options.
SimulationResult simulate(const CommandTrace& trace, const SimulationOptions& options);

/// Detector only: no RFM issuance and no mitigation.
DetectionTimeline detect_only(const CommandTrace& trace, const DetectorConfig& config,
                              const TimingConfig& timing);

}  // namespace marc
