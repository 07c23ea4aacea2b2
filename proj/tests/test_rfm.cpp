#include <random>

#include "doctest.h"
#include "marc/errors.hpp"
#include "marc/rfm.hpp"
#include "oracles.hpp"

using namespace marc;

TEST_CASE("rfm defaults and levels") {
  RfmConfig c;
  CHECK(c.raaimt_base == 248);
  CHECK(c.raammt() == 8 * 248);
  CHECK(c.raadec_ref == 4 * 248);
  CHECK(c.raadec_rfm == 4 * 248);
  CHECK(c.rfm_threshold(TimingConfig{}) == 248 * 60);

  CHECK(effective_raaimt(c, ArfmLevel::Base) == 248);
  CHECK(effective_raaimt(c, ArfmLevel::A) == 124);
  CHECK(effective_raaimt(c, ArfmLevel::B) == 62);
  CHECK(effective_raaimt(c, ArfmLevel::C) == 31);

  const RfmConfig one = RfmConfig::from_base(1);
  CHECK(effective_raaimt(one, ArfmLevel::C) == 1);

  SUBCASE("halving matches integer division for every base") {
    for (std::uint32_t base = 1; base <= 2048; ++base) {
      const RfmConfig r = RfmConfig::from_base(base);
      CHECK(effective_raaimt(r, ArfmLevel::A) == std::max(base / 2, 1u));
      CHECK(effective_raaimt(r, ArfmLevel::B) == std::max(std::max(base / 2, 1u) / 2, 1u));
      CHECK(effective_raaimt(r, ArfmLevel::A) >= effective_raaimt(r, ArfmLevel::B));
      CHECK(effective_raaimt(r, ArfmLevel::B) >= effective_raaimt(r, ArfmLevel::C));
      CHECK(effective_raaimt(r, ArfmLevel::C) >= 1);
      CHECK_NOTHROW(r.validate());
    }
  }

  RfmConfig bad;
  bad.raaimt_level = {100, 200, 31};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("on_act threshold and saturation") {
  RfmState s{RfmConfig{}};
  s.set_raa_cnt(0, 247);
  CHECK_FALSE(s.rfm_pending(0));
  s.on_act(0);
  CHECK(s.raa_cnt(0) == 248);
  CHECK(s.rfm_pending(0));

  s.on_act(1);
  CHECK(s.raa_cnt(1) == 1);
  CHECK_FALSE(s.rfm_pending(1));

  s.set_raa_cnt(2, 1984);
  s.on_act(2);
  CHECK(s.raa_cnt(2) == 1984);
  CHECK(s.rfm_pending(2));

  SUBCASE("strict threshold") {
    RfmConfig c;
    c.strict_threshold = true;
    RfmState st{c};
    st.set_raa_cnt(0, 248);
    CHECK_FALSE(st.rfm_pending(0));
    st.on_act(0);
    CHECK(st.rfm_pending(0));
  }
}

TEST_CASE("on_ref decrements and clamps") {
  RfmState s{RfmConfig{}};
  s.set_raa_cnt(0, 1000);
  s.on_ref(0);
  CHECK(s.raa_cnt(0) == 8);
  s.set_raa_cnt(0, 500);
  s.on_ref(0);
  CHECK(s.raa_cnt(0) == 0);
  s.set_raa_cnt(0, 1200);
  CHECK(s.rfm_pending(0));
  s.on_ref(0);
  CHECK_FALSE(s.rfm_pending(0));

  s.set_raa_cnt(3, 1500);
  s.on_ref_all();
  CHECK(s.raa_cnt(3) == 508);
}

TEST_CASE("issue_rfm") {
  RfmState s{RfmConfig{}};
  s.set_raa_cnt(0, 248);
  const Command rfm = s.issue_rfm(0, 1234);
  CHECK(rfm == Command::rfm(1234, 0));
  CHECK(s.raa_cnt(0) == 0);
  CHECK_THROWS_AS(s.issue_rfm(0, 1300), NotPending);

  s.set_raa_cnt(1, 300);
  s.set_raa_cnt(2, 1500);
  s.issue_rfm(1, 10);
  s.issue_rfm(2, 10);
  CHECK(s.raa_cnt(1) == 0);
  CHECK(s.raa_cnt(2) == 508);
}

TEST_CASE("set_arfm_level") {
  RfmState s{RfmConfig{}};
  s.set_raa_cnt(0, 130);
  CHECK_FALSE(s.rfm_pending(0));
  s.set_arfm_level(ArfmLevel::A);
  CHECK(s.rfm_pending(0));
  s.set_arfm_level(ArfmLevel::C);
  s.set_arfm_level(ArfmLevel::C);
  CHECK(s.active_level() == ArfmLevel::C);
  s.set_raa_cnt(0, 10);
  for (auto l : {ArfmLevel::Base, ArfmLevel::A, ArfmLevel::B, ArfmLevel::C}) {
    s.set_arfm_level(l);
    CHECK_FALSE(s.rfm_pending(0));
  }
}

TEST_CASE("scaled RAADEC") {
  RfmConfig c;
  c.scale_raadec = true;
  RfmState s{c};
  s.set_arfm_level(ArfmLevel::C);
  s.set_raa_cnt(0, 1000);
  s.on_ref(0);
  CHECK(s.raa_cnt(0) == 1000 - 992 * 31 / 248);
}

TEST_CASE("random sequences agree with the reference counter") {
  std::mt19937_64 g(2024);
  for (int seq = 0; seq < 500; ++seq) {
    RfmState s{RfmConfig{}};
    oracle::RaaModel m;
    for (int i = 0; i < 400; ++i) {
      switch (g() % 8) {
        case 0: s.on_ref(0); m.ref(); break;
        case 1:
          if (m.pending()) {
            s.issue_rfm(0, i);
            m.rfm();
          }
          break;
        default:
          s.on_act(0);
          m.act();
      }
      REQUIRE(static_cast<std::int64_t>(s.raa_cnt(0)) == m.cnt);
      REQUIRE(s.rfm_pending(0) == m.pending());
    }
  }
}
