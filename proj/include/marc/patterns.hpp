#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "marc/dram.hpp"

namespace marc {

enum class AttackMode : std::uint8_t { SingleSided, DoubleSided, MultiSided };

std::string_view to_string(AttackMode mode);

struct AttackSpec {
  std::uint32_t n_aggressors = 50;
  Nanos trc = 60;
  AttackMode mode = AttackMode::MultiSided;
  Nanos duration = 128'000'000;
  BankId bank = 0;
  RowId row_base = 0;  // first aggressor; the victim for double-sided
};

struct ComboSpec {
  std::uint32_t n_distinct = 1;
  std::uint64_t total_acts = 33'280;
  Nanos pool_lo = 60;
  Nanos pool_hi = 100;
  std::uint64_t seed = 1;
  /// Explicit gap list; overrides the random draw when non-empty.
  std::vector<Nanos> values;
  BankId bank = 0;
  std::uint32_t n_rows = 4;
};

struct NormalSpec {
  double short_fraction = 0.005;
  std::pair<Nanos, Nanos> trc_long_range{110, 600};
  Nanos duration = 64'000'000;
  std::uint64_t seed = 1;
  /// Stop after this many ACTs even if duration is not reached.
  std::optional<std::uint64_t> max_acts;
  BankId bank = 0;
  std::uint32_t n_rows = 65'536;
};

/// ACTs every `trc` from t = 0, floor(duration / trc) of them.
CommandTrace gen_attack(const AttackSpec& spec, const TimingConfig& timing);

/// The gap list drawn for a combo spec (n_distinct entries).
std::vector<Nanos> combo_values(const ComboSpec& spec);
/// ACT gaps repeat the drawn gap list cyclically.
CommandTrace gen_trc_combo(const ComboSpec& spec);

/// Mostly long gaps, with a `short_fraction` share of gaps in [tRCmin, short_trc_max].
CommandTrace gen_normal(const NormalSpec& spec, const TimingConfig& timing);

/// One command per line: `<time_ns> <ACT|REF|RFM> <bank> [<row>]`. A
/// `# duration_ns=<n>` comment carries the trace duration; other comments and
/// blank lines are ignored. Throws ParseError.
CommandTrace parse_trace(std::string_view text);
std::string write_trace(const CommandTrace& trace);

CommandTrace read_trace_file(const std::string& path);
void write_trace_file(const std::string& path, const CommandTrace& trace);

}  // namespace marc
