#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "marc/dram.hpp"
#include "marc/rfm.hpp"

namespace marc {

enum class TrcLabel : std::uint8_t { ShortA, ShortB, ShortC, ShortD, Long };

std::string_view to_string(TrcLabel label);

struct DetectorConfig {
  std::uint32_t k = 3;                   // capture latch entries
  std::uint32_t s_trc_th = 130;          // short tRCs per window to qualify
  std::uint32_t eviction_threshold = 2;  // evictions tolerated before a pipeline reset
  std::uint32_t escalation_step = 4;     // windows between ARFM levels
  std::uint32_t clean_windows_to_reset = 2;
  Nanos short_trc_max = 100;
  Nanos resolution = 10;
  /// Require more than two attack windows (instead of at least two) for level A.
  bool strict_window_count = false;

  std::size_t eviction_capacity() const { return k > 3 ? k - 2 : 1; }
  void validate(const TimingConfig& timing) const;
};

/// Bins a tRC into 10 ns short labels starting at tRCmin; anything above
/// short_trc_max is Long. Throws BelowTrcMin under tRCmin.
TrcLabel encode_trc(Nanos trc, const DetectorConfig& config, const TimingConfig& timing);

/// One tREFi window worth of encoded labels.
class ShortTrcBuffer {
 public:
  explicit ShortTrcBuffer(std::size_t capacity) : capacity_(capacity) { entries_.reserve(capacity); }

  void push(TrcLabel label);
  void clear();
  bool full() const { return entries_.size() >= capacity_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  std::uint32_t short_count() const { return short_count_; }
  const std::vector<TrcLabel>& entries() const { return entries_; }

 private:
  std::size_t capacity_;
  std::vector<TrcLabel> entries_;
  std::uint32_t short_count_ = 0;
};

enum class DetectorPhase : std::uint8_t { Point, Capture, Monitor };
enum class Verdict : std::uint8_t { Inactive = 0, LevelA = 1, LevelB = 2, LevelC = 3 };

std::string_view to_string(Verdict verdict);
ArfmLevel to_arfm_level(Verdict verdict);

struct WindowSummary {
  std::uint32_t short_count = 0;
  bool dup = false;
  bool loop = false;

  friend bool operator==(const WindowSummary&, const WindowSummary&) = default;
};

struct CompareFlags {
  bool point_cmp = false;
  bool capture_cmp = false;
  bool eviction_flag = false;
  bool any() const { return point_cmp || capture_cmp || eviction_flag; }
};

/// Short-tRC pattern detector. Consumes encoded labels, one tREFi window at a
/// time, and escalates an ARFM verdict while duplicated or looping label
/// sequences persist in windows dense with short tRCs. Row addresses are never seen.
class Detector {
 public:
  Detector(const DetectorConfig& config, const TimingConfig& timing);

  /// Stores a label in the window buffer. Throws WindowFull past capacity.
  void push_trc(TrcLabel label);
  /// One step of the point / capture / monitor pipeline. Long labels are ignored.
  void capture_step(TrcLabel label);
  void observe(TrcLabel label) {
    push_trc(label);
    capture_step(label);
  }

  /// Closes the current window: summarizes it, clears the buffer and the
  /// per-window compare flags. Latch contents carry over.
  WindowSummary finalize_window();
  Verdict inspect(const WindowSummary& summary);

  /// Empties latches and returns to the point phase. A pipeline reset is
  /// refused (returns false) while any compare flag is held; a full reset also
  /// clears the verdict and the attack-window counter and always succeeds.
  bool reset(bool full = false);

  const DetectorConfig& config() const { return config_; }
  const ShortTrcBuffer& buffer() const { return buffer_; }
  DetectorPhase phase() const { return phase_; }
  std::optional<TrcLabel> point_latch() const { return point_latch_; }
  const std::vector<TrcLabel>& capture_latch() const { return capture_latch_; }
  const std::vector<TrcLabel>& eviction_latch() const { return eviction_latch_; }
  std::uint32_t eviction_count() const { return eviction_count_; }
  const CompareFlags& flags() const { return flags_; }
  bool dup_signal() const { return dup_seen_; }
  bool loop_signal() const { return loop_seen_; }
  std::uint32_t attack_windows() const { return attack_windows_; }
  Verdict verdict() const { return verdict_; }

 private:
  void clear_pipeline();
  void monitor_step(TrcLabel label);

  DetectorConfig config_;
  ShortTrcBuffer buffer_;

  DetectorPhase phase_ = DetectorPhase::Point;
  std::optional<TrcLabel> point_latch_;
  std::vector<TrcLabel> capture_latch_;
  std::vector<TrcLabel> eviction_latch_;
  std::uint32_t eviction_count_ = 0;
  std::size_t cursor_ = 0;  // next expected capture latch entry
  std::optional<TrcLabel> previous_;  // last short label seen
  std::uint32_t match_run_ = 0;
  CompareFlags flags_;
  bool dup_seen_ = false;
  bool loop_seen_ = false;

  std::uint32_t attack_windows_ = 0;
  std::uint32_t clean_windows_ = 0;
  Verdict verdict_ = Verdict::Inactive;
};

}  // namespace marc
