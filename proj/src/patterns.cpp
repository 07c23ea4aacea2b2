#include "marc/patterns.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "marc/errors.hpp"
#include "marc/random.hpp"

namespace marc {

std::string_view to_string(AttackMode mode) {
  switch (mode) {
    case AttackMode::SingleSided: return "single";
    case AttackMode::DoubleSided: return "double";
    case AttackMode::MultiSided: return "multi";
  }
  return "?";
}

CommandTrace gen_attack(const AttackSpec& spec, const TimingConfig& timing) {
  if (spec.n_aggressors == 0) throw ConfigError("attack needs at least one aggressor");
  if (spec.trc < timing.t_rc_min) throw ConfigError("attack tRC below tRCmin");
  if (spec.mode == AttackMode::DoubleSided && spec.row_base == 0)
    throw ConfigError("double-sided attack needs a victim row >= 1");

  CommandTrace trace;
  trace.duration = spec.duration;
  const Nanos n = spec.duration / spec.trc;
  trace.commands.reserve(static_cast<std::size_t>(n));
  for (Nanos i = 0; i < n; ++i) {
    RowId row = spec.row_base;
    switch (spec.mode) {
      case AttackMode::SingleSided:
        break;
      case AttackMode::DoubleSided:
        row = (i % 2 == 0) ? spec.row_base - 1 : spec.row_base + 1;
        break;
      case AttackMode::MultiSided:
        row = spec.row_base + static_cast<RowId>(i % spec.n_aggressors);
        break;
    }
    trace.commands.push_back(Command::act(i * spec.trc, spec.bank, row));
  }
  return trace;
}

std::vector<Nanos> combo_values(const ComboSpec& spec) {
  if (!spec.values.empty()) return spec.values;
  if (spec.n_distinct == 0) throw ConfigError("combo needs n_distinct >= 1");
  if (spec.pool_hi < spec.pool_lo) throw ConfigError("combo pool is empty");

  Rng rng(spec.seed);
  const auto pool_size = static_cast<std::uint64_t>(spec.pool_hi - spec.pool_lo + 1);
  std::vector<Nanos> values;
  values.reserve(spec.n_distinct);
  if (spec.n_distinct <= pool_size) {
    // Partial Fisher-Yates: distinct draws while the pool allows it.
    std::vector<Nanos> pool(pool_size);
    std::iota(pool.begin(), pool.end(), spec.pool_lo);
    for (std::uint32_t i = 0; i < spec.n_distinct; ++i) {
      const auto j = i + uniform_below(rng, pool_size - i);
      std::swap(pool[i], pool[j]);
      values.push_back(pool[i]);
    }
  } else {
    for (std::uint32_t i = 0; i < spec.n_distinct; ++i)
      values.push_back(uniform_int(rng, spec.pool_lo, spec.pool_hi));
  }
  return values;
}

CommandTrace gen_trc_combo(const ComboSpec& spec) {
  const auto values = combo_values(spec);
  if (spec.total_acts < values.size()) throw ConfigError("combo needs total_acts >= n_distinct");
  const std::uint32_t rows = std::max<std::uint32_t>(spec.n_rows, 1);

  CommandTrace trace;
  trace.commands.reserve(spec.total_acts);
  Nanos t = 0;
  for (std::uint64_t i = 0; i < spec.total_acts; ++i) {
    trace.commands.push_back(Command::act(t, spec.bank, static_cast<RowId>(i % rows)));
    t += values[i % values.size()];
  }
  trace.duration = t;
  return trace;
}

CommandTrace gen_normal(const NormalSpec& spec, const TimingConfig& timing) {
  const auto [lo, hi] = spec.trc_long_range;
  if (lo > hi || lo < timing.t_rc_min) throw ConfigError("normal workload long-tRC range is invalid");
  if (spec.short_fraction < 0.0 || spec.short_fraction > 1.0)
    throw ConfigError("normal workload short_fraction must lie in [0, 1]");

  Rng rng(spec.seed);
  CommandTrace trace;
  trace.duration = spec.duration;
  const std::uint64_t limit = spec.max_acts.value_or(UINT64_MAX);
  Nanos t = 0;
  while (t < spec.duration && trace.commands.size() < limit) {
    const auto row = static_cast<RowId>(uniform_below(rng, std::max<std::uint32_t>(spec.n_rows, 1)));
    trace.commands.push_back(Command::act(t, spec.bank, row));
    t += bernoulli(rng, spec.short_fraction) ? uniform_int(rng, timing.t_rc_min, timing.short_trc_max)
                                             : uniform_int(rng, lo, hi);
  }
  return trace;
}

namespace {

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

constexpr std::string_view kDurationTag = "duration_ns=";

}  // namespace

CommandTrace parse_trace(std::string_view text) {
  CommandTrace trace;
  std::optional<Nanos> duration;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      if (body.starts_with(kDurationTag)) {
        Nanos d = 0;
        if (!parse_number(body.substr(kDurationTag.size()), d) || d < 0)
          throw ParseError(line_no, std::string(raw));
        duration = d;
      }
      continue;
    }

    const auto tokens = split(line);
    if (tokens.size() < 3) throw ParseError(line_no, std::string(raw));
    Command c;
    if (!parse_number(tokens[0], c.time) || c.time < 0) throw ParseError(line_no, std::string(raw));
    if (tokens[1] == "ACT") c.kind = CommandKind::Act;
    else if (tokens[1] == "REF") c.kind = CommandKind::Ref;
    else if (tokens[1] == "RFM") c.kind = CommandKind::Rfm;
    else throw ParseError(line_no, std::string(raw));
    if (!parse_number(tokens[2], c.bank)) throw ParseError(line_no, std::string(raw));

    const std::size_t expected = c.kind == CommandKind::Act ? 4 : 3;
    if (tokens.size() != expected) throw ParseError(line_no, std::string(raw));
    if (c.kind == CommandKind::Act) {
      RowId row = 0;
      if (!parse_number(tokens[3], row)) throw ParseError(line_no, std::string(raw));
      c.row = row;
    }
    trace.commands.push_back(c);
  }
  trace.duration = duration.value_or(trace.commands.empty() ? 0 : trace.commands.back().time);
  return trace;
}

std::string write_trace(const CommandTrace& trace) {
  std::string out;
  out.reserve(trace.commands.size() * 20 + 32);
  out += "# duration_ns=";
  out += std::to_string(trace.duration);
  out += '\n';
  for (const Command& c : trace.commands) {
    out += std::to_string(c.time);
    out += ' ';
    out += to_string(c.kind);
    out += ' ';
    out += std::to_string(c.bank);
    if (c.row) {
      out += ' ';
      out += std::to_string(*c.row);
    }
    out += '\n';
  }
  return out;
}

CommandTrace read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open trace file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

void write_trace_file(const std::string& path, const CommandTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write trace file '" + path + "'");
  out << write_trace(trace);
}

}  // namespace marc
