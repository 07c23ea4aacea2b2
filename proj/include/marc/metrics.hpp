#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "marc/detector.hpp"
#include "marc/dram.hpp"

namespace marc {

/// Per-row activation counts since the row was last cured, restarted at every
/// tREFW boundary. Tracks the highest count any row has ever reached.
class ExposureLedger {
 public:
  explicit ExposureLedger(Nanos t_refw = TimingConfig{}.t_refw) : t_refw_(t_refw) {}

  void record_act(BankId bank, RowId row, Nanos time);
  void record_act(RowId row, Nanos time) { record_act(0, row, time); }
  void record_cure(BankId bank, std::span<const RowId> rows);
  void record_cure(std::span<const RowId> rows) { record_cure(0, rows); }
  /// Applies any tREFW rollover up to `time` without recording an ACT.
  void advance(Nanos time);

  std::uint32_t max_exposure() const { return running_max_; }
  std::uint32_t count(BankId bank, RowId row) const;
  std::uint32_t count(RowId row) const { return count(0, row); }
  Nanos t_refw() const { return t_refw_; }

 private:
  static std::uint64_t key(BankId bank, RowId row) {
    return (static_cast<std::uint64_t>(bank) << 32) | row;
  }

  Nanos t_refw_;
  std::int64_t window_ = 0;
  std::unordered_map<std::uint64_t, std::uint32_t> counts_;
  std::uint32_t running_max_ = 0;
};

std::uint32_t max_exposure(const ExposureLedger& ledger);
/// value / baseline. Throws ZeroBaseline when baseline <= 0.
double mer(double value, double baseline);

struct WindowRecord {
  std::size_t index = 0;
  WindowSummary summary;
  Verdict verdict = Verdict::Inactive;
  Nanos duration = 0;
};

struct DetectionTimeline {
  std::vector<WindowRecord> windows;

  Nanos total_duration() const;
  Nanos recognized_duration() const;
};

/// Duration-weighted share of windows whose verdict is not Inactive.
double recognition_rate(const DetectionTimeline& timeline);

struct CommandStats {
  std::uint64_t act = 0;
  std::uint64_t ref = 0;
  std::uint64_t rfm = 0;
  std::uint64_t cures = 0;

  std::uint64_t total_commands() const { return act + ref + rfm; }
  double rfm_share() const {
    return total_commands() ? static_cast<double>(rfm) / static_cast<double>(total_commands()) : 0.0;
  }
  friend bool operator==(const CommandStats&, const CommandStats&) = default;
};

CommandStats command_stats(const CommandTrace& trace, std::uint64_t cures);

struct RunReport {
  std::uint32_t max_exposure = 0;
  double mer = 1.0;
  double recognition_rate = 0.0;
  CommandStats cmd_counts;
};

}  // namespace marc
