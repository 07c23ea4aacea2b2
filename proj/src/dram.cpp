#include "marc/dram.hpp"

#include <algorithm>
#include <unordered_map>

#include "marc/errors.hpp"

namespace marc {

void TimingConfig::validate() const {
  if (t_rc_min <= 0) throw ConfigError("timing.t_rc_min must be positive");
  if (t_refi <= t_rc_min) throw ConfigError("timing.t_refi must exceed timing.t_rc_min");
  if (t_refw < t_refi) throw ConfigError("timing.t_refw must span at least one tREFi");
  if (t_ras && t_rp && *t_ras + *t_rp != t_rc_min)
    throw ConfigError("timing.t_ras + timing.t_rp must equal timing.t_rc_min");
  if (short_trc_max < t_rc_min) throw ConfigError("timing.short_trc_max must be >= t_rc_min");
  if (nrr_per_refresh == 0) throw ConfigError("timing.nrr_per_refresh must be >= 1");
}

std::string_view to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::Act: return "ACT";
    case CommandKind::Ref: return "REF";
    case CommandKind::Rfm: return "RFM";
  }
  return "?";
}

std::size_t CommandTrace::count(CommandKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      commands.begin(), commands.end(), [kind](const Command& c) { return c.kind == kind; }));
}

const CommandTrace& validate_trace(const CommandTrace& trace, const TimingConfig& timing) {
  std::unordered_map<BankId, Nanos> last_act;
  for (std::size_t i = 0; i < trace.commands.size(); ++i) {
    const Command& c = trace.commands[i];
    if (i > 0 && c.time < trace.commands[i - 1].time) throw UnorderedTrace(i);
    if (c.kind != CommandKind::Act) continue;
    auto [it, inserted] = last_act.try_emplace(c.bank, c.time);
    if (!inserted) {
      if (c.time - it->second < timing.t_rc_min) throw TimingViolation(i);
      it->second = c.time;
    }
  }
  return trace;
}

TrcSeries compute_trc_series(const CommandTrace& trace) {
  TrcSeries series;
  std::unordered_map<BankId, Nanos> last_act;
  for (std::size_t i = 0; i < trace.commands.size(); ++i) {
    const Command& c = trace.commands[i];
    if (c.kind != CommandKind::Act) continue;
    auto [it, inserted] = last_act.try_emplace(c.bank, c.time);
    if (!inserted) {
      series.push_back({i, c.bank, c.time - it->second});
      it->second = c.time;
    }
  }
  return series;
}

std::vector<Command> schedule_refresh(const TimingConfig& timing, Nanos duration) {
  std::vector<Command> refs;
  if (duration <= 0) return refs;
  const Nanos n = duration / timing.t_refi;
  refs.reserve(static_cast<std::size_t>(n));
  for (Nanos k = 1; k <= n; ++k) refs.push_back(Command::ref(k * timing.t_refi));
  return refs;
}

CommandTrace merge_streams(const CommandTrace& acts, std::span<const Command> refreshes) {
  CommandTrace out;
  out.duration = acts.duration;
  out.commands.reserve(acts.commands.size() + refreshes.size());
  auto a = acts.commands.begin();
  auto r = refreshes.begin();
  while (a != acts.commands.end() || r != refreshes.end()) {
    // REF wins ties against every non-REF command.
    const bool take_ref = r != refreshes.end() &&
                          (a == acts.commands.end() || r->time < a->time ||
                           (r->time == a->time && a->kind != CommandKind::Ref));
    if (take_ref) {
      out.duration = std::max(out.duration, r->time);
      out.commands.push_back(*r++);
    } else {
      out.commands.push_back(*a++);
    }
  }
  return out;
}

CommandTrace drop_ref_collisions(const CommandTrace& acts, std::span<const Command> refreshes,
                                 Nanos blocking) {
  CommandTrace out;
  out.duration = acts.duration;
  out.commands.reserve(acts.commands.size());
  auto r = refreshes.begin();
  for (const Command& c : acts.commands) {
    while (r != refreshes.end() && r->time + std::max<Nanos>(blocking, 0) < c.time) ++r;
    if (c.kind == CommandKind::Act && r != refreshes.end()) {
      const bool hit = blocking > 0 ? (c.time >= r->time && c.time < r->time + blocking)
                                    : c.time == r->time;
      if (hit) continue;
    }
    out.commands.push_back(c);
  }
  return out;
}

}  // namespace marc
