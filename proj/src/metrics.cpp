#include "marc/metrics.hpp"

#include <algorithm>

#include "marc/errors.hpp"

namespace marc {

void ExposureLedger::advance(Nanos time) {
  const std::int64_t w = time / t_refw_;
  if (w != window_) {
    counts_.clear();
    window_ = w;
  }
}

void ExposureLedger::record_act(BankId bank, RowId row, Nanos time) {
  advance(time);
  const std::uint32_t c = ++counts_[key(bank, row)];
  running_max_ = std::max(running_max_, c);
}

void ExposureLedger::record_cure(BankId bank, std::span<const RowId> rows) {
  for (RowId r : rows) {
    auto it = counts_.find(key(bank, r));
    if (it != counts_.end()) it->second = 0;
  }
}

std::uint32_t ExposureLedger::count(BankId bank, RowId row) const {
  auto it = counts_.find(key(bank, row));
  return it == counts_.end() ? 0 : it->second;
}

std::uint32_t max_exposure(const ExposureLedger& ledger) { return ledger.max_exposure(); }

double mer(double value, double baseline) {
  if (!(baseline > 0.0)) throw ZeroBaseline();
  return value / baseline;
}

Nanos DetectionTimeline::total_duration() const {
  Nanos total = 0;
  for (const auto& w : windows) total += w.duration;
  return total;
}

Nanos DetectionTimeline::recognized_duration() const {
  Nanos total = 0;
  for (const auto& w : windows)
    if (w.verdict != Verdict::Inactive) total += w.duration;
  return total;
}

double recognition_rate(const DetectionTimeline& timeline) {
  const Nanos total = timeline.total_duration();
  if (total <= 0) return 0.0;
  return static_cast<double>(timeline.recognized_duration()) / static_cast<double>(total);
}

CommandStats command_stats(const CommandTrace& trace, std::uint64_t cures) {
  CommandStats s;
  for (const Command& c : trace.commands) {
    switch (c.kind) {
      case CommandKind::Act: ++s.act; break;
      case CommandKind::Ref: ++s.ref; break;
      case CommandKind::Rfm: ++s.rfm; break;
    }
  }
  s.cures = cures;
  return s;
}

}  // namespace marc
