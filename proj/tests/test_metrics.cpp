#include <random>

#include "doctest.h"
#include "marc/errors.hpp"
#include "marc/metrics.hpp"

using namespace marc;

TEST_CASE("exposure ledger") {
  SUBCASE("counts without cures") {
    ExposureLedger l;
    for (int i = 0; i < 5; ++i) l.record_act(7, i * 60);
    CHECK(l.max_exposure() == 5);
    CHECK(max_exposure(l) == 5);
  }
  SUBCASE("cure restarts a row") {
    ExposureLedger l;
    for (int i = 0; i < 3; ++i) l.record_act(7, i);
    const RowId cured[] = {7};
    l.record_cure(cured);
    CHECK(l.count(7) == 0);
    l.record_act(7, 10);
    l.record_act(7, 11);
    CHECK(l.max_exposure() == 3);
    CHECK(l.count(7) == 2);
  }
  SUBCASE("tREFW rollover") {
    ExposureLedger l(1'000);
    for (int i = 0; i < 4; ++i) l.record_act(1, 900 + i);
    l.record_act(1, 1'000);
    CHECK(l.count(1) == 1);
    CHECK(l.max_exposure() == 4);
    l.advance(2'500);
    CHECK(l.count(1) == 0);
  }
  SUBCASE("cures of untouched rows and empty lists are no-ops") {
    ExposureLedger l;
    l.record_act(3, 0);
    const RowId other[] = {99};
    l.record_cure(other);
    l.record_cure(std::span<const RowId>{});
    CHECK(l.count(3) == 1);
    CHECK(l.count(99) == 0);
  }
  SUBCASE("banks are separate") {
    ExposureLedger l;
    l.record_act(0, 5, 0);
    l.record_act(1, 5, 0);
    l.record_act(1, 5, 1);
    CHECK(l.count(0, 5) == 1);
    CHECK(l.count(1, 5) == 2);
  }
}

TEST_CASE("adding a cure never raises max exposure") {
  std::mt19937_64 g(21);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<std::pair<bool, RowId>> events(300);
    for (auto& e : events) e = {g() % 6 == 0, static_cast<RowId>(g() % 8)};
    auto replay = [&](std::optional<std::size_t> extra) {
      ExposureLedger l;
      for (std::size_t i = 0; i < events.size(); ++i) {
        if (extra == i) {
          const RowId r[] = {events[i].second};
          l.record_cure(r);
        }
        if (events[i].first) {
          const RowId r[] = {events[i].second};
          l.record_cure(r);
        } else {
          l.record_act(events[i].second, static_cast<Nanos>(i));
        }
      }
      return l.max_exposure();
    };
    const auto at = static_cast<std::size_t>(g() % events.size());
    CHECK(replay(at) <= replay(std::nullopt));
  }
}

TEST_CASE("mer") {
  CHECK(mer(1234, 1234) == 1.0);
  CHECK(mer(500, 1000) == 0.5);
  CHECK_THROWS_AS(mer(5, 0), ZeroBaseline);
  CHECK_THROWS_AS(mer(5, -1), ZeroBaseline);
}

TEST_CASE("recognition rate") {
  DetectionTimeline all;
  for (std::size_t i = 0; i < 10; ++i) all.windows.push_back({i, {}, Verdict::LevelA, 15'600});
  CHECK(recognition_rate(all) == 1.0);

  DetectionTimeline late;
  for (std::size_t i = 0; i < 100; ++i)
    late.windows.push_back({i, {}, i < 2 ? Verdict::Inactive : Verdict::LevelB, 15'600});
  CHECK(recognition_rate(late) == doctest::Approx(0.98).epsilon(1e-12));
  CHECK(late.recognized_duration() <= late.total_duration());

  DetectionTimeline quiet;
  for (std::size_t i = 0; i < 10; ++i) quiet.windows.push_back({i, {}, Verdict::Inactive, 15'600});
  CHECK(recognition_rate(quiet) == 0.0);
  CHECK(recognition_rate(DetectionTimeline{}) == 0.0);

  DetectionTimeline weighted;
  weighted.windows.push_back({0, {}, Verdict::LevelA, 15'600});
  weighted.windows.push_back({1, {}, Verdict::Inactive, 5'200});
  CHECK(recognition_rate(weighted) == doctest::Approx(0.75));
}

TEST_CASE("command stats") {
  CommandTrace t{{Command::act(0, 0, 1), Command::ref(10), Command::act(70, 0, 1), Command::rfm(80, 0)}, 80};
  const CommandStats s = command_stats(t, 3);
  CHECK(s.act == 2);
  CHECK(s.ref == 1);
  CHECK(s.rfm == 1);
  CHECK(s.cures == 3);
  CHECK(s.total_commands() == 4);
  CHECK(s.rfm_share() == 0.25);
  CHECK(CommandStats{}.rfm_share() == 0.0);
}
