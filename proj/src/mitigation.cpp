#include "marc/mitigation.hpp"

#include <algorithm>

namespace marc {

std::string_view to_string(Side side) {
  return side == Side::DramSide ? "dram" : "mc";
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::None: return "none";
    case Scheme::Probabilistic: return "probabilistic";
    case Scheme::CounterBased: return "counter";
  }
  return "?";
}

std::optional<RowId> TrackerTable::update(RowId row) {
  auto it = entries_.find(row);
  if (it != entries_.end()) {
    ++it->second;
  } else if (entries_.size() < config_.table_size) {
    it = entries_.emplace(row, 1).first;
  } else {
    // Full and absent: decrement everything, the newcomer is not stored.
    std::erase_if(entries_, [](auto& e) { return --e.second == 0; });
    return std::nullopt;
  }

  if (it->second < config_.logic_threshold) return std::nullopt;
  if (config_.subtract_on_trigger) it->second -= config_.logic_threshold;
  else it->second = 0;
  if (it->second == 0) entries_.erase(it);
  return row;
}

std::uint32_t TrackerTable::count(RowId row) const {
  auto it = entries_.find(row);
  return it == entries_.end() ? 0 : it->second;
}

std::optional<RowId> counter_update(TrackerTable& table, RowId row) { return table.update(row); }

bool CureQueue::push(RowId row) {
  if (!members_.insert(row).second) return false;
  order_.push_back(row);
  return true;
}

std::optional<RowId> CureQueue::pop() {
  if (order_.empty()) return std::nullopt;
  const RowId row = order_.front();
  order_.pop_front();
  members_.erase(row);
  return row;
}

std::optional<RowId> prob_sample(Nanos start, Nanos end, std::span<const TimedAct> acts, Rng& rng) {
  auto by_time = [](const TimedAct& a, Nanos t) { return a.time < t; };
  auto first = std::lower_bound(acts.begin(), acts.end(), start, by_time);
  auto last = std::lower_bound(first, acts.end(), end, by_time);
  if (first == last || end <= start) return std::nullopt;

  const double target = static_cast<double>(start) + uniform01(rng) * static_cast<double>(end - start);
  auto after = std::lower_bound(first, last, target,
                                [](const TimedAct& a, double t) { return static_cast<double>(a.time) < t; });
  if (after == first) return after->row;
  // Earliest ACT sharing the preceding timestamp.
  auto before = std::lower_bound(first, after, std::prev(after)->time, by_time);
  if (after == last) return before->row;
  const double d_before = target - static_cast<double>(before->time);
  const double d_after = static_cast<double>(after->time) - target;
  return d_after < d_before ? after->row : before->row;
}

std::vector<RowId> neighbor_rows(RowId aggressor, std::uint32_t radius, RowId max_row) {
  std::vector<RowId> rows;
  rows.reserve(2 * radius);
  for (std::uint32_t d = 1; d <= radius; ++d) {
    if (aggressor >= d) rows.push_back(aggressor - d);
    if (static_cast<std::uint64_t>(aggressor) + d <= max_row) rows.push_back(aggressor + d);
  }
  return rows;
}

std::vector<RowId> nrr_execute(CureQueue& queue, ExposureLedger& ledger, std::uint32_t radius,
                               BankId bank, RowId max_row) {
  const auto aggressor = queue.pop();
  if (!aggressor) return {};
  auto rows = neighbor_rows(*aggressor, radius, max_row);
  ledger.record_cure(bank, rows);
  return rows;
}

std::optional<RowId> para_on_act(RowId row, const ParaConfig& config, Rng& rng) {
  if (bernoulli(rng, config.probability)) return row;
  return std::nullopt;
}

MitigationPipeline::MitigationPipeline(const MitigationParams& params, const TimingConfig& timing,
                                       std::uint64_t stream)
    : params_(params),
      sample_window_(static_cast<Nanos>(params.probabilistic.sample_window_multiple) * timing.t_refi),
      tracker_(params.counter) {
  std::seed_seq seq{static_cast<std::uint32_t>(params.seed), static_cast<std::uint32_t>(params.seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  rng_.seed(seq);
}

std::optional<RowId> MitigationPipeline::on_act(Nanos time, RowId row) {
  switch (params_.scheme) {
    case Scheme::None:
      break;
    case Scheme::CounterBased:
      if (auto aggressor = tracker_.update(row)) queue_.push(*aggressor);
      break;
    case Scheme::Probabilistic:
      if (params_.side == Side::McSide) {
        if (auto request = para_on_act(row, params_.para, rng_)) {
          if (params_.immediate_cure) return request;
          queue_.push(*request);
        }
      } else {
        history_.push_back({time, row});
        const Nanos horizon = time - sample_window_;
        while (history_[history_head_].time < horizon) ++history_head_;
        if (history_head_ > 4096 && history_head_ * 2 > history_.size()) {
          history_.erase(history_.begin(), history_.begin() + static_cast<std::ptrdiff_t>(history_head_));
          history_head_ = 0;
        }
      }
      break;
  }
  return std::nullopt;
}

std::optional<RowId> MitigationPipeline::cure_slot(Nanos now) {
  if (params_.scheme == Scheme::Probabilistic && params_.side == Side::DramSide) {
    std::span<const TimedAct> window(history_.data() + history_head_, history_.size() - history_head_);
    return prob_sample(std::max<Nanos>(now - sample_window_, 0), now + 1, window, rng_);
  }
  return queue_.pop();
}

MitigationPipeline attach_policy(Side side, Scheme scheme, MitigationParams params,
                                 const TimingConfig& timing) {
  params.side = side;
  params.scheme = scheme;
  return MitigationPipeline(params, timing, 0);
}

}  // namespace marc
