#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "marc/dram.hpp"
#include "marc/metrics.hpp"
#include "marc/random.hpp"

namespace marc {

enum class Side : std::uint8_t { DramSide, McSide };
enum class Scheme : std::uint8_t { None, Probabilistic, CounterBased };

std::string_view to_string(Side side);
std::string_view to_string(Scheme scheme);

struct ProbabilisticConfig {
  std::uint32_t sample_window_multiple = 10;  // sampling window in tREFi units
};

struct CounterConfig {
  std::size_t table_size = 214;
  std::uint32_t logic_threshold = 1024;
  /// Subtract the threshold on a hit instead of resetting the count to zero.
  bool subtract_on_trigger = false;

  static constexpr std::size_t kLargeTableSize = 16384;
};

struct ParaConfig {
  double probability = 0.02;
};

/// Row activation tracker with Misra-Gries replacement.
class TrackerTable {
 public:
  explicit TrackerTable(const CounterConfig& config) : config_(config) {
    entries_.reserve(config.table_size * 2);
  }

  /// Counts one activation. Returns the row when its count reaches the logic threshold.
  std::optional<RowId> update(RowId row);

  std::size_t size() const { return entries_.size(); }
  std::uint32_t count(RowId row) const;
  bool contains(RowId row) const { return entries_.contains(row); }

 private:
  CounterConfig config_;
  std::unordered_map<RowId, std::uint32_t> entries_;
};

std::optional<RowId> counter_update(TrackerTable& table, RowId row);

/// FIFO of unique aggressor rows waiting for a neighbor refresh.
class CureQueue {
 public:
  /// False when the row is already queued.
  bool push(RowId row);
  std::optional<RowId> pop();
  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }
  bool contains(RowId row) const { return members_.contains(row); }

 private:
  std::deque<RowId> order_;
  std::unordered_set<RowId> members_;
};

struct TimedAct {
  Nanos time;
  RowId row;
};

/// Draws t* uniformly in [start, end) and returns the row of the ACT closest
/// to it; the earlier ACT wins a tie. `acts` must be time-sorted.
std::optional<RowId> prob_sample(Nanos start, Nanos end, std::span<const TimedAct> acts, Rng& rng);

/// Rows within `radius` of `aggressor`, clamped to [0, max_row].
std::vector<RowId> neighbor_rows(RowId aggressor, std::uint32_t radius, RowId max_row);

/// Dequeues one aggressor and cures its neighbors in the ledger.
std::vector<RowId> nrr_execute(CureQueue& queue, ExposureLedger& ledger, std::uint32_t radius,
                               BankId bank = 0, RowId max_row = UINT32_MAX);

/// With probability p, returns the activated row as a neighbor-refresh request.
std::optional<RowId> para_on_act(RowId row, const ParaConfig& config, Rng& rng);

struct MitigationParams {
  Side side = Side::DramSide;
  Scheme scheme = Scheme::Probabilistic;
  ProbabilisticConfig probabilistic;
  CounterConfig counter;
  ParaConfig para;
  std::uint32_t blast_radius = 1;
  RowId max_row = 65'535;
  std::uint64_t seed = 1;
  /// MC-side PARA cures at the ACT instead of waiting for an RFM slot.
  bool immediate_cure = false;
};

/// One bank's mitigation IP. Observes ACTs and, at each cure opportunity,
/// names the rows to refresh.
class MitigationPipeline {
 public:
  MitigationPipeline(const MitigationParams& params, const TimingConfig& timing, std::uint64_t stream);

  /// Whether every nrr_per_refresh-th REF is a cure opportunity (DRAM-side only).
  bool cures_on_ref() const { return params_.side == Side::DramSide; }
  bool cures_on_rfm() const { return params_.scheme != Scheme::None; }

  /// Returns an aggressor to cure right away (MC-side PARA with immediate_cure).
  std::optional<RowId> on_act(Nanos time, RowId row);
  /// Executes one cure slot; returns the aggressor whose neighbors get refreshed.
  std::optional<RowId> cure_slot(Nanos now);

  std::uint32_t blast_radius() const { return params_.blast_radius; }
  RowId max_row() const { return params_.max_row; }

  const CureQueue& queue() const { return queue_; }

 private:
  MitigationParams params_;
  Nanos sample_window_;
  Rng rng_;
  TrackerTable tracker_;
  CureQueue queue_;
  std::vector<TimedAct> history_;  // ACTs inside the sampling window start at history_head_
  std::size_t history_head_ = 0;
};

MitigationPipeline attach_policy(Side side, Scheme scheme, MitigationParams params,
                                 const TimingConfig& timing);

}  // namespace marc
