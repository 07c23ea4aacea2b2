#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace marc {

using Nanos = std::int64_t;
using BankId = std::uint32_t;
using RowId = std::uint32_t;

/// DRAM timing constants. Defaults follow LPDDR5 (tRCmin 60 ns, tREFi 15.6 us, tREFW 128 ms).
struct TimingConfig {
  Nanos t_rc_min = 60;
  Nanos t_refi = 15'600;
  Nanos t_refw = 128'000'000;
  Nanos t_rfc = 280;
  std::optional<Nanos> t_ras;
  std::optional<Nanos> t_rp;
  std::uint32_t nrr_per_refresh = 10;
  Nanos short_trc_max = 100;
  bool per_bank_refresh = false;

  /// Throws ConfigError when an invariant is broken.
  void validate() const;

  /// Labels that fit in one tREFi window at the fastest legal cadence.
  std::size_t acts_per_refi() const { return static_cast<std::size_t>(t_refi / t_rc_min); }

  static constexpr Nanos kRefw512ms = 512'000'000;
};

enum class CommandKind : std::uint8_t { Act, Ref, Rfm };

std::string_view to_string(CommandKind kind);

struct Command {
  Nanos time = 0;
  CommandKind kind = CommandKind::Act;
  BankId bank = 0;
  std::optional<RowId> row;  // present iff kind == Act

  static Command act(Nanos t, BankId bank, RowId row) { return {t, CommandKind::Act, bank, row}; }
  static Command ref(Nanos t, BankId bank = 0) { return {t, CommandKind::Ref, bank, std::nullopt}; }
  static Command rfm(Nanos t, BankId bank) { return {t, CommandKind::Rfm, bank, std::nullopt}; }

  friend bool operator==(const Command&, const Command&) = default;
};

struct CommandTrace {
  std::vector<Command> commands;
  Nanos duration = 0;

  std::size_t size() const { return commands.size(); }
  bool empty() const { return commands.empty(); }
  std::size_t count(CommandKind kind) const;

  friend bool operator==(const CommandTrace&, const CommandTrace&) = default;
};

struct TrcEntry {
  std::size_t act_index;  // index into the trace's command list
  BankId bank;
  Nanos trc;

  friend bool operator==(const TrcEntry&, const TrcEntry&) = default;
};

using TrcSeries = std::vector<TrcEntry>;

/// Checks ordering and per-bank ACT spacing. Returns the trace unchanged on success.
/// Throws UnorderedTrace or TimingViolation (with the offending command index).
const CommandTrace& validate_trace(const CommandTrace& trace, const TimingConfig& timing);

/// Gap between each ACT and the previous ACT on the same bank.
TrcSeries compute_trc_series(const CommandTrace& trace);

/// All-bank REF commands at k * tREFi for k = 1..floor(duration / tREFi).
std::vector<Command> schedule_refresh(const TimingConfig& timing, Nanos duration);

/// Time-ordered merge. At equal timestamps REF sorts before ACT; otherwise
/// the relative order inside each input is preserved.
CommandTrace merge_streams(const CommandTrace& acts, std::span<const Command> refreshes);

/// Removes ACTs whose timestamp coincides with a REF, or that fall inside the
/// [REF, REF + blocking) interval when blocking > 0.
CommandTrace drop_ref_collisions(const CommandTrace& acts, std::span<const Command> refreshes,
                                 Nanos blocking = 0);

}  // namespace marc
