#include "marc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "marc/errors.hpp"

namespace marc {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
}

template <typename T>
T integer(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad(key, value);
  return out;
}

double real(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string s(value);
    const double v = std::stod(s, &used);
    if (used != s.size()) bad(key, value);
    return v;
  } catch (const std::logic_error&) {
    bad(key, value);
  }
}

bool boolean(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  bad(key, value);
}

std::vector<Nanos> nanos_list(std::string_view key, std::string_view value) {
  std::vector<Nanos> out;
  while (!value.empty()) {
    const auto comma = value.find(',');
    out.push_back(integer<Nanos>(key, trim(value.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> m;
#define MARC_INT(name, field, type) \
  m[name] = [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.field = integer<type>(k, v); }
#define MARC_BOOL(name, field) \
  m[name] = [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.field = boolean(k, v); }

    MARC_INT("timing.t_rc_min", timing.t_rc_min, Nanos);
    MARC_INT("timing.t_refi", timing.t_refi, Nanos);
    MARC_INT("timing.t_refw", timing.t_refw, Nanos);
    MARC_INT("timing.t_rfc", timing.t_rfc, Nanos);
    MARC_INT("timing.t_ras", timing.t_ras, Nanos);
    MARC_INT("timing.t_rp", timing.t_rp, Nanos);
    MARC_INT("timing.nrr_per_refresh", timing.nrr_per_refresh, std::uint32_t);
    MARC_BOOL("timing.per_bank_refresh", timing.per_bank_refresh);
    m["timing.short_trc_max"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.timing.short_trc_max = c.detector.short_trc_max = integer<Nanos>(k, v);
    };

    m["rfm.raaimt"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      RfmConfig r = RfmConfig::from_base(integer<std::uint32_t>(k, v));
      r.raammt_multiplier = c.rfm.raammt_multiplier;
      r.rfm_enabled = c.rfm.rfm_enabled;
      r.strict_threshold = c.rfm.strict_threshold;
      r.scale_raadec = c.rfm.scale_raadec;
      c.rfm = r;
    };
    MARC_INT("rfm.raaimt_a", rfm.raaimt_level[0], std::uint32_t);
    MARC_INT("rfm.raaimt_b", rfm.raaimt_level[1], std::uint32_t);
    MARC_INT("rfm.raaimt_c", rfm.raaimt_level[2], std::uint32_t);
    MARC_INT("rfm.raammt_mult", rfm.raammt_multiplier, std::uint32_t);
    MARC_INT("rfm.raadec_ref", rfm.raadec_ref, std::uint32_t);
    MARC_INT("rfm.raadec_rfm", rfm.raadec_rfm, std::uint32_t);
    MARC_BOOL("rfm.enabled", rfm.rfm_enabled);
    MARC_BOOL("rfm.strict_threshold", rfm.strict_threshold);
    MARC_BOOL("rfm.scale_raadec", rfm.scale_raadec);

    MARC_INT("detector.k", detector.k, std::uint32_t);
    MARC_INT("detector.s_trc_th", detector.s_trc_th, std::uint32_t);
    MARC_INT("detector.eviction_threshold", detector.eviction_threshold, std::uint32_t);
    MARC_INT("detector.escalation_step", detector.escalation_step, std::uint32_t);
    MARC_INT("detector.clean_windows_to_reset", detector.clean_windows_to_reset, std::uint32_t);
    MARC_INT("detector.resolution", detector.resolution, Nanos);
    MARC_BOOL("detector.strict_window_count", detector.strict_window_count);
    m["detector.short_trc_max"] = m["timing.short_trc_max"];

    m["mitigation.side"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      if (v == "dram") c.mitigation.side = Side::DramSide;
      else if (v == "mc") c.mitigation.side = Side::McSide;
      else bad(k, v);
    };
    m["mitigation.scheme"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      if (v == "none") c.mitigation.scheme = Scheme::None;
      else if (v == "probabilistic" || v == "para") c.mitigation.scheme = Scheme::Probabilistic;
      else if (v == "counter" || v == "graphene") c.mitigation.scheme = Scheme::CounterBased;
      else bad(k, v);
    };
    MARC_INT("mitigation.sample_window_multiple", mitigation.probabilistic.sample_window_multiple,
             std::uint32_t);
    MARC_INT("mitigation.table_size", mitigation.counter.table_size, std::size_t);
    MARC_INT("mitigation.threshold", mitigation.counter.logic_threshold, std::uint32_t);
    MARC_BOOL("mitigation.subtract_on_trigger", mitigation.counter.subtract_on_trigger);
    m["mitigation.para_p"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.mitigation.para.probability = real(k, v);
    };
    MARC_INT("mitigation.blast_radius", mitigation.blast_radius, std::uint32_t);
    MARC_INT("mitigation.max_row", mitigation.max_row, RowId);
    MARC_BOOL("mitigation.immediate_cure", mitigation.immediate_cure);

    m["pattern.kind"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      if (v == "attack") c.pattern = PatternKind::Attack;
      else if (v == "combo") c.pattern = PatternKind::Combo;
      else if (v == "normal") c.pattern = PatternKind::Normal;
      else if (v == "trace") c.pattern = PatternKind::TraceFile;
      else bad(k, v);
    };
    MARC_INT("pattern.aggressors", attack.n_aggressors, std::uint32_t);
    MARC_INT("pattern.trc", attack.trc, Nanos);
    m["pattern.mode"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      if (v == "single") c.attack.mode = AttackMode::SingleSided;
      else if (v == "double") c.attack.mode = AttackMode::DoubleSided;
      else if (v == "multi") c.attack.mode = AttackMode::MultiSided;
      else bad(k, v);
    };
    m["pattern.duration"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.attack.duration = c.normal.duration = integer<Nanos>(k, v);
    };
    m["pattern.bank"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.attack.bank = c.combo.bank = c.normal.bank = integer<BankId>(k, v);
    };
    MARC_INT("pattern.row_base", attack.row_base, RowId);
    MARC_INT("pattern.n_distinct", combo.n_distinct, std::uint32_t);
    MARC_INT("pattern.total_acts", combo.total_acts, std::uint64_t);
    MARC_INT("pattern.pool_lo", combo.pool_lo, Nanos);
    MARC_INT("pattern.pool_hi", combo.pool_hi, Nanos);
    m["pattern.values"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.combo.values = nanos_list(k, v);
    };
    m["pattern.n_rows"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.combo.n_rows = c.normal.n_rows = integer<std::uint32_t>(k, v);
    };
    m["pattern.short_fraction"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.normal.short_fraction = real(k, v);
    };
    MARC_INT("pattern.long_lo", normal.trc_long_range.first, Nanos);
    MARC_INT("pattern.long_hi", normal.trc_long_range.second, Nanos);
    MARC_INT("pattern.max_acts", normal.max_acts, std::uint64_t);
    m["pattern.path"] = [](ExperimentConfig& c, std::string_view, std::string_view v) {
      c.trace_path = std::string(v);
    };
    m["pattern.id"] = [](ExperimentConfig& c, std::string_view, std::string_view v) {
      c.pattern_id = std::string(v);
    };

    MARC_BOOL("experiment.marc", marc_enabled);
    m["experiment.arfm_level"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      if (v == "auto") c.forced_level.reset();
      else if (v == "base") c.forced_level = ArfmLevel::Base;
      else if (v == "A" || v == "a") c.forced_level = ArfmLevel::A;
      else if (v == "B" || v == "b") c.forced_level = ArfmLevel::B;
      else if (v == "C" || v == "c") c.forced_level = ArfmLevel::C;
      else bad(k, v);
    };
    m["experiment.seeds"] = [](ExperimentConfig& c, std::string_view, std::string_view v) {
      c.seeds = parse_u64_list(v);
    };
    MARC_BOOL("experiment.drop_ref_collisions", drop_ref_collisions);
    MARC_INT("experiment.rfm_blocking_ns", rfm_blocking_ns, Nanos);
    m["experiment.output"] = [](ExperimentConfig& c, std::string_view, std::string_view v) {
      c.output = std::string(v);
    };
    m["experiment.event_log"] = [](ExperimentConfig& c, std::string_view, std::string_view v) {
      c.event_log = std::string(v);
    };
    MARC_BOOL("experiment.seed_stats", seed_stats);
    MARC_INT("experiment.threads", threads, unsigned);
#undef MARC_INT
#undef MARC_BOOL
    return m;
  }();
  return table;
}

}  // namespace

std::vector<std::uint64_t> parse_u64_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  const std::string_view key = "seed list";
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    const auto dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(integer<std::uint64_t>(key, item));
    } else {
      const auto lo = integer<std::uint64_t>(key, trim(item.substr(0, dots)));
      const auto hi = integer<std::uint64_t>(key, trim(item.substr(dots + 2)));
      if (hi < lo) bad(key, item);
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) bad(key, text);
  return out;
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(trim(key));
  if (it == table.end()) throw ConfigError("unknown config key: " + std::string(key));
  it->second(config, trim(key), trim(value));
}

void apply_config_text(ExperimentConfig& config, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
  }
}

void load_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(config, ss.str());
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

}  // namespace marc
