#include "marc/rfm.hpp"

#include <algorithm>

#include "marc/errors.hpp"

namespace marc {

std::string_view to_string(ArfmLevel level) {
  switch (level) {
    case ArfmLevel::Base: return "Base";
    case ArfmLevel::A: return "A";
    case ArfmLevel::B: return "B";
    case ArfmLevel::C: return "C";
  }
  return "?";
}

RfmConfig RfmConfig::from_base(std::uint32_t base) {
  RfmConfig c;
  c.raaimt_base = base;
  std::uint32_t v = base;
  for (auto& level : c.raaimt_level) {
    v = std::max<std::uint32_t>(v / 2, 1);
    level = v;
  }
  c.raadec_ref = 4 * base;
  c.raadec_rfm = 4 * base;
  return c;
}

void RfmConfig::validate() const {
  if (raaimt_base == 0) throw ConfigError("rfm.raaimt must be >= 1");
  if (raammt_multiplier == 0) throw ConfigError("rfm.raammt_mult must be >= 1");
  if (!(raaimt_base >= raaimt_level[0] && raaimt_level[0] >= raaimt_level[1] &&
        raaimt_level[1] >= raaimt_level[2] && raaimt_level[2] >= 1))
    throw ConfigError("rfm levels must satisfy raaimt >= A >= B >= C >= 1");
}

std::uint32_t effective_raaimt(const RfmConfig& config, ArfmLevel level) {
  if (level == ArfmLevel::Base) return config.raaimt_base;
  return std::max<std::uint32_t>(config.raaimt_level[static_cast<std::size_t>(level) - 1], 1);
}

bool RfmState::pending(std::uint32_t count) const {
  const std::uint32_t th = effective_raaimt(config_, level_);
  return config_.strict_threshold ? count > th : count >= th;
}

std::uint32_t RfmState::decrement(std::uint32_t base_dec) const {
  if (!config_.scale_raadec || level_ == ArfmLevel::Base) return base_dec;
  const auto scaled = static_cast<std::uint64_t>(base_dec) * effective_raaimt(config_, level_) /
                      config_.raaimt_base;
  return static_cast<std::uint32_t>(std::max<std::uint64_t>(scaled, 1));
}

void RfmState::ensure(BankId bank) {
  if (bank >= raa_.size()) raa_.resize(bank + 1, 0);
}

void RfmState::on_act(BankId bank) {
  ensure(bank);
  raa_[bank] = std::min(raa_[bank] + 1, config_.raammt());
}

void RfmState::on_ref(BankId bank) {
  ensure(bank);
  const std::uint32_t dec = decrement(config_.raadec_ref);
  raa_[bank] = raa_[bank] > dec ? raa_[bank] - dec : 0;
}

void RfmState::on_ref_all() {
  for (BankId b = 0; b < raa_.size(); ++b) on_ref(b);
}

Command RfmState::issue_rfm(BankId bank, Nanos now) {
  if (!rfm_pending(bank)) throw NotPending(bank);
  on_rfm(bank);
  return Command::rfm(now, bank);
}

void RfmState::on_rfm(BankId bank) {
  ensure(bank);
  const std::uint32_t dec = decrement(config_.raadec_rfm);
  raa_[bank] = raa_[bank] > dec ? raa_[bank] - dec : 0;
}

void RfmState::set_arfm_level(ArfmLevel level) { level_ = level; }

void RfmState::set_raa_cnt(BankId bank, std::uint32_t value) {
  ensure(bank);
  raa_[bank] = std::min(value, config_.raammt());
}

}  // namespace marc
