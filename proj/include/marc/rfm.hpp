#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "marc/dram.hpp"

namespace marc {

enum class ArfmLevel : std::uint8_t { Base = 0, A = 1, B = 2, C = 3 };

std::string_view to_string(ArfmLevel level);

/// RFM / ARFM thresholds. Level thresholds default to successive integer halving of
/// the base RAAIMT (clamped to >= 1); RAAMMT is a multiple of the base RAAIMT.
struct RfmConfig {
  std::uint32_t raaimt_base = 248;
  std::array<std::uint32_t, 3> raaimt_level{124, 62, 31};  // A, B, C
  std::uint32_t raammt_multiplier = 8;
  std::uint32_t raadec_ref = 4 * 248;
  std::uint32_t raadec_rfm = 4 * 248;
  bool rfm_enabled = false;
  /// Trigger when RAACNT > RAAIMT instead of >=.
  bool strict_threshold = false;
  /// Scale RAADEC by the level RAAIMT / base RAAIMT ratio.
  bool scale_raadec = false;

  /// Config with every derived value recomputed from a base RAAIMT.
  static RfmConfig from_base(std::uint32_t raaimt_base);

  std::uint32_t raammt() const { return raammt_multiplier * raaimt_base; }
  /// RFMTH = RAAIMT x tRCmin.
  Nanos rfm_threshold(const TimingConfig& timing) const {
    return static_cast<Nanos>(raaimt_base) * timing.t_rc_min;
  }
  void validate() const;
};

std::uint32_t effective_raaimt(const RfmConfig& config, ArfmLevel level);

/// Per-bank rolling accumulated ACT counters. Banks are created on first use.
class RfmState {
 public:
  explicit RfmState(const RfmConfig& config) : config_(config) {}

  void on_act(BankId bank);
  void on_ref(BankId bank);
  void on_ref_all();
  /// Emits an RFM for `bank` at `now` and applies RAADEC. Throws NotPending.
  Command issue_rfm(BankId bank, Nanos now);
  /// Applies the RFM decrement for an RFM issued elsewhere.
  void on_rfm(BankId bank);
  void set_arfm_level(ArfmLevel level);

  std::uint32_t raa_cnt(BankId bank) const { return bank < raa_.size() ? raa_[bank] : 0; }
  bool rfm_pending(BankId bank) const { return bank < raa_.size() && pending(raa_[bank]); }
  ArfmLevel active_level() const { return level_; }
  std::size_t bank_count() const { return raa_.size(); }
  const RfmConfig& config() const { return config_; }

  /// Test hook: places a bank at an arbitrary count.
  void set_raa_cnt(BankId bank, std::uint32_t value);

 private:
  bool pending(std::uint32_t count) const;
  std::uint32_t decrement(std::uint32_t base_dec) const;
  void ensure(BankId bank);

  RfmConfig config_;
  std::vector<std::uint32_t> raa_;
  ArfmLevel level_ = ArfmLevel::Base;
};

}  // namespace marc
