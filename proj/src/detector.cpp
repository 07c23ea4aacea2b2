#include "marc/detector.hpp"

#include <algorithm>

#include "marc/errors.hpp"

namespace marc {

std::string_view to_string(TrcLabel label) {
  switch (label) {
    case TrcLabel::ShortA: return "A";
    case TrcLabel::ShortB: return "B";
    case TrcLabel::ShortC: return "C";
    case TrcLabel::ShortD: return "D";
    case TrcLabel::Long: return "L";
  }
  return "?";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Inactive: return "Inactive";
    case Verdict::LevelA: return "LevelA";
    case Verdict::LevelB: return "LevelB";
    case Verdict::LevelC: return "LevelC";
  }
  return "?";
}

ArfmLevel to_arfm_level(Verdict verdict) {
  return static_cast<ArfmLevel>(static_cast<std::uint8_t>(verdict));
}

void DetectorConfig::validate(const TimingConfig& timing) const {
  if (k < 2) throw ConfigError("detector.k must be >= 2");
  if (s_trc_th > timing.acts_per_refi())
    throw ConfigError("detector.s_trc_th exceeds the short-tRC buffer capacity");
  if (resolution <= 0) throw ConfigError("detector.resolution must be positive");
  if (short_trc_max < timing.t_rc_min) throw ConfigError("detector.short_trc_max below tRCmin");
  if (clean_windows_to_reset == 0) throw ConfigError("detector.clean_windows_to_reset must be >= 1");
}

TrcLabel encode_trc(Nanos trc, const DetectorConfig& config, const TimingConfig& timing) {
  if (trc < timing.t_rc_min) throw BelowTrcMin(trc);
  if (trc > config.short_trc_max) return TrcLabel::Long;
  const Nanos bin = (trc - timing.t_rc_min) / config.resolution;
  return static_cast<TrcLabel>(std::min<Nanos>(bin, 3));
}

void ShortTrcBuffer::push(TrcLabel label) {
  if (full()) throw WindowFull(capacity_);
  entries_.push_back(label);
  if (label != TrcLabel::Long) ++short_count_;
}

void ShortTrcBuffer::clear() {
  entries_.clear();
  short_count_ = 0;
}

Detector::Detector(const DetectorConfig& config, const TimingConfig& timing)
    : config_(config), buffer_(timing.acts_per_refi()) {
  capture_latch_.reserve(config_.k);
  eviction_latch_.reserve(config_.eviction_capacity());
}

void Detector::push_trc(TrcLabel label) { buffer_.push(label); }

void Detector::capture_step(TrcLabel label) {
  if (label == TrcLabel::Long) return;

  switch (phase_) {
    case DetectorPhase::Point:
      if (!point_latch_) {
        point_latch_ = label;
      } else if (label == *point_latch_) {
        flags_.point_cmp = true;
        dup_seen_ = true;
      } else {
        capture_latch_.assign(1, label);
        phase_ = DetectorPhase::Capture;
        if (capture_latch_.size() == config_.k) phase_ = DetectorPhase::Monitor;
      }
      break;

    case DetectorPhase::Capture:
      if (capture_latch_.size() + 1 == config_.k) {
        // The last slot takes whatever arrives, but a repeat still registers.
        if (label == capture_latch_.back()) {
          flags_.capture_cmp = true;
          dup_seen_ = true;
        }
        capture_latch_.push_back(label);
        phase_ = DetectorPhase::Monitor;
        cursor_ = 0;
        match_run_ = 0;
      } else if (label == capture_latch_.back()) {
        flags_.capture_cmp = true;
        dup_seen_ = true;
      } else {
        capture_latch_.push_back(label);
      }
      break;

    case DetectorPhase::Monitor:
      monitor_step(label);
      break;
  }
  previous_ = label;
}

void Detector::monitor_step(TrcLabel label) {
  if (label == previous_) {
    flags_.capture_cmp = true;
    dup_seen_ = true;
  }
  if (label == capture_latch_[cursor_]) {
    loop_seen_ = true;
    cursor_ = (cursor_ + 1) % capture_latch_.size();
    if (++match_run_ >= capture_latch_.size()) eviction_count_ = 0;
    return;
  }

  match_run_ = 0;
  // A captured label out of turn: pick the sequence up from there.
  const auto at = std::find(capture_latch_.begin(), capture_latch_.end(), label);
  if (at != capture_latch_.end()) {
    cursor_ = static_cast<std::size_t>(at - capture_latch_.begin() + 1) % capture_latch_.size();
    return;
  }

  if (std::find(eviction_latch_.begin(), eviction_latch_.end(), label) != eviction_latch_.end()) {
    flags_.eviction_flag = true;
    dup_seen_ = true;
  } else {
    if (eviction_latch_.size() == config_.eviction_capacity())
      eviction_latch_.erase(eviction_latch_.begin());
    eviction_latch_.push_back(label);
    ++eviction_count_;
  }

  if (eviction_count_ > config_.eviction_threshold && reset()) {
    // The label that broke the sequence starts the next one.
    point_latch_ = label;
    return;
  }
  cursor_ = 0;
}

WindowSummary Detector::finalize_window() {
  WindowSummary summary{buffer_.short_count(), dup_seen_, loop_seen_};
  buffer_.clear();
  dup_seen_ = false;
  loop_seen_ = false;
  flags_ = {};
  return summary;
}

Verdict Detector::inspect(const WindowSummary& summary) {
  const bool attack = summary.short_count >= config_.s_trc_th && (summary.dup || summary.loop);
  if (attack) {
    ++attack_windows_;
    clean_windows_ = 0;
  } else if (++clean_windows_ >= config_.clean_windows_to_reset) {
    attack_windows_ = 0;
  }

  const std::uint32_t first = config_.strict_window_count ? 3 : 2;
  const std::uint32_t step = config_.escalation_step;
  if (attack_windows_ >= first + 2 * step) {
    verdict_ = Verdict::LevelC;
  } else if (attack_windows_ >= first + step) {
    verdict_ = Verdict::LevelB;
  } else if (attack_windows_ >= first) {
    verdict_ = Verdict::LevelA;
  } else {
    verdict_ = Verdict::Inactive;
  }
  return verdict_;
}

void Detector::clear_pipeline() {
  phase_ = DetectorPhase::Point;
  point_latch_.reset();
  capture_latch_.clear();
  eviction_count_ = 0;
  cursor_ = 0;
  match_run_ = 0;
}

bool Detector::reset(bool full) {
  if (full) {
    clear_pipeline();
    eviction_latch_.clear();
    previous_.reset();
    flags_ = {};
    dup_seen_ = false;
    loop_seen_ = false;
    buffer_.clear();
    attack_windows_ = 0;
    clean_windows_ = 0;
    verdict_ = Verdict::Inactive;
    return true;
  }
  if (flags_.any()) return false;
  clear_pipeline();
  return true;
}

}  // namespace marc
