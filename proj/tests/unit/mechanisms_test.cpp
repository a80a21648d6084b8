// Copyright 2026 The diffauction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "auction_oracle.hpp"
#include "diffauction/errors.hpp"
#include "diffauction/instance_io.hpp"
#include "diffauction/mechanisms.hpp"
#include "diffauction/verification.hpp"

namespace diffauction {
namespace {

const Priors kUniform = Priors::uniform();

std::vector<BuyerId> ids(std::initializer_list<std::uint32_t> v) {
  std::vector<BuyerId> out;
  for (auto x : v) out.push_back(BuyerId{x});
  return out;
}

StructureProfile load_fixture(const char* name) {
  return load_instance(std::string(DIFFAUCTION_DATA_DIR) + "/instances/" + name).structure;
}

ReportProfile truthful(const StructureProfile& s, std::vector<double> v) {
  return ReportProfile::truthful(s, std::move(v));
}

StructureProfile fork3() {
  const Edge e[] = {{BuyerId{1}, BuyerId{2}}, {BuyerId{1}, BuyerId{3}}};
  return StructureProfile::from_edges(3, ids({1}), e);
}

TEST(Myerson, Examples) {
  const auto all = ids({1, 2, 3});
  const std::vector<double> bids{0.9, 0.7, 0.3};
  EXPECT_EQ(myerson(all, bids, kUniform), (Outcome{BuyerId{1}, 0.7}));
  EXPECT_EQ(myerson(all, std::vector<double>{0.4, 0.2, 0.49}, kUniform), Outcome{});
  EXPECT_EQ(myerson(ids({1}), std::vector<double>{0.6}, kUniform), (Outcome{BuyerId{1}, 0.5}));
  // Ties go to the smaller id, who pays her own bid.
  EXPECT_EQ(myerson(all, std::vector<double>{0.6, 0.8, 0.8}, kUniform),
            (Outcome{BuyerId{2}, 0.8}));
  EXPECT_THROW(myerson(all, std::vector<double>{0.6, 1.8, 0.8}, kUniform), DomainError);
}

TEST(Myerson, MatchesSecondPriceWithReserve) {
  Rng rng = make_stream(11, 0);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 1 + t % 6;
    std::vector<double> bids(n);
    std::vector<std::uint32_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      bids[i] = t % 2 ? std::floor(uniform01(rng) * 11) / 10 : uniform01(rng);
      members.push_back(static_cast<std::uint32_t>(i + 1));
    }
    std::vector<BuyerId> part;
    for (auto m : members) part.push_back(BuyerId{m});
    const Outcome o = myerson(part, bids, kUniform);
    const auto s = oracle::second_price(members, bids, 0.5);
    ASSERT_EQ(o.winner.has_value(), s.winner.has_value());
    if (s.winner) {
      ASSERT_EQ(o.winner->value, *s.winner);
      ASSERT_NEAR(o.price, s.price, 1e-15);
    }
  }
}

TEST(PotentialWinners, EightBuyerInstance) {
  const auto fig = load_fixture("fig1.json");
  const Priors virt = Priors::iid(std::make_shared<VirtualBidPrior>());
  const auto report = truthful(fig, {3, 2, 4, 7, 1, 9, 5, 6});
  const auto chain = potential_winners(report, virt);
  ASSERT_EQ(chain.size(), 2u);
  EXPECT_EQ(chain[0].buyer, BuyerId{4});
  EXPECT_DOUBLE_EQ(chain[0].rival_level, 6.0);
  EXPECT_DOUBLE_EQ(chain[0].potential_payment, 6.0);
  EXPECT_EQ(chain[1].buyer, BuyerId{6});
  EXPECT_DOUBLE_EQ(chain[1].rival_level, 7.0);
  EXPECT_EQ(cwm(report, virt), (Outcome{BuyerId{4}, 6.0}));
  EXPECT_EQ(definitional_cwm_oracle(report, virt), (Outcome{BuyerId{4}, 6.0}));
}

TEST(PotentialWinners, ChainAndEmpty) {
  const auto chain3 = chain_structure(3);
  const auto c = potential_winners(truthful(chain3, {0.9, 0.8, 0.7}), kUniform);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].buyer, BuyerId{1});
  EXPECT_TRUE(potential_winners(truthful(chain3, {0.1, 0.2, 0.3}), kUniform).empty());
}

TEST(CwmFast, EightBuyerTrace) {
  const auto fig = load_fixture("fig1.json");
  const Priors virt = Priors::iid(std::make_shared<VirtualBidPrior>());
  std::vector<FrontierStep> trace;
  const Outcome o = cwm_fast(truthful(fig, {3, 2, 4, 7, 1, 9, 5, 6}), virt, &trace);
  EXPECT_EQ(o, (Outcome{BuyerId{4}, 6.0}));
  ASSERT_EQ(trace.size(), 3u);
  EXPECT_EQ(trace[0].winner, BuyerId{1});
  EXPECT_EQ(trace[1].winner, BuyerId{4});
  EXPECT_EQ(trace[2].winner, BuyerId{4});
  EXPECT_EQ(trace[0].frontier, ids({1, 2}));
  EXPECT_EQ(trace[1].frontier, ids({1, 2, 4, 5}));
  EXPECT_EQ(trace[2].frontier, ids({1, 2, 3, 4, 5, 8}));
  EXPECT_DOUBLE_EQ(trace[1].virtual_level, 3.0);
  EXPECT_DOUBLE_EQ(trace[2].virtual_level, 6.0);
}

TEST(CwmFast, StarIsOneRoundOfMyerson) {
  const auto star = star_structure(4);
  std::vector<FrontierStep> trace;
  const auto report = truthful(star, {0.3, 0.9, 0.7, 0.2});
  EXPECT_EQ(cwm_fast(report, kUniform, &trace), myerson(ids({1, 2, 3, 4}), report.bids, kUniform));
  EXPECT_EQ(trace.size(), 1u);
}

TEST(Cwm, Examples) {
  EXPECT_EQ(cwm(truthful(chain_structure(3), {0.6, 0.9, 0.99}), kUniform),
            (Outcome{BuyerId{1}, 0.5}));
  EXPECT_EQ(cwm(truthful(chain_structure(3), {0.1, 0.2, 0.3}), kUniform), Outcome{});
}

TEST(Cwm, EquivalentFormsOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto r = oracle::random_report(seed, 1 + seed % 12, 0.15, 0.8, seed % 3 == 0);
    const ReportProfile report{r.declared, r.bids};
    const Outcome a = cwm(report, kUniform);
    const Outcome b = cwm_fast(report, kUniform);
    const Outcome c = definitional_cwm_oracle(report, kUniform);
    ASSERT_EQ(a.winner, b.winner) << seed;
    ASSERT_EQ(a.winner, c.winner) << seed;
    ASSERT_NEAR(a.price, b.price, 1e-12);
    ASSERT_NEAR(a.price, c.price, 1e-12);
  }
}

TEST(Cwm, NoCutPointsMeansMyersonOverAll) {
  // Two seller neighbours joined to every other buyer: nobody is critical.
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 2 + seed % 7;
    std::vector<Edge> edges;
    for (std::size_t j = 3; j <= n; ++j) {
      edges.emplace_back(BuyerId{1}, BuyerId{static_cast<std::uint32_t>(j)});
      edges.emplace_back(BuyerId{2}, BuyerId{static_cast<std::uint32_t>(j)});
    }
    const auto s = StructureProfile::from_edges(n, ids({1, 2}), edges);
    Rng rng = make_stream(seed, 1);
    std::vector<double> v(n);
    for (auto& x : v) x = uniform01(rng);
    const auto report = truthful(s, v);
    EXPECT_EQ(cwm(report, kUniform), myerson(valid_buyers(s.network()), v, kUniform));
  }
}

TEST(Cwm, RelabelingEquivariance) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const std::size_t n = 2 + seed % 8;
    const auto r = oracle::random_report(seed, n, 0.2, 1.0, false);
    // Reverse the labels; continuous bids make ties irrelevant.
    const auto flip = [n](BuyerId b) { return BuyerId{static_cast<std::uint32_t>(n + 1 - b.value)}; };
    std::vector<BuyerId> rs;
    for (BuyerId b : r.declared.seller_neighbors()) rs.push_back(flip(b));
    std::vector<std::vector<BuyerId>> adj(n);
    std::vector<double> bids(n);
    for (std::size_t i = 0; i < n; ++i) {
      const BuyerId b = BuyerId::from_index(i);
      for (BuyerId c : r.declared.neighbors(b)) adj[flip(b).index()].push_back(flip(c));
      bids[flip(b).index()] = r.bids[i];
    }
    const Outcome a = cwm({r.declared, r.bids}, kUniform);
    const Outcome b = cwm({Network(rs, adj), bids}, kUniform);
    ASSERT_EQ(a.winner.has_value(), b.winner.has_value());
    if (a.winner) {
      ASSERT_EQ(flip(*a.winner), *b.winner);
      ASSERT_DOUBLE_EQ(a.price, b.price);
    }
  }
}

TEST(Kpwm, PartialPotentialWinner) {
  const auto w = k_partial_potential_winner(truthful(fork3(), {0.9, 0.3, 0.8}), kUniform, 2);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->buyer, BuyerId{1});
  EXPECT_DOUBLE_EQ(w->payment, 0.5);
  EXPECT_FALSE(k_partial_potential_winner(truthful(star_structure(3), {0.9, 0.8, 0.7}), kUniform, 2));
  EXPECT_THROW(k_partial_potential_winner(truthful(star_structure(2), {0.9, 0.8}), kUniform, 2),
               PreconditionError);
  // On a 4-chain no single buyer can leave exactly two valid buyers and win
  // among them with these bids: buyer 2 stops at {1, 2} but loses to 1.
  EXPECT_FALSE(k_partial_potential_winner(truthful(chain_structure(4), {0.9, 0.3, 0.8, 0.6}),
                                          kUniform, 2));
}

TEST(Kpwm, Boxes) {
  const auto star3 = star_structure(3);
  const auto report = truthful(star3, {0.7, 0.9, 0.6});
  EXPECT_EQ(k_pwm(report, kUniform, 3), myerson(ids({1, 2, 3}), report.bids, kUniform));
  EXPECT_EQ(k_pwm(truthful(star_structure(2), {0.9, 0.8}), kUniform, 3), Outcome{});
  EXPECT_EQ(k_pwm(truthful(fork3(), {0.9, 0.3, 0.8}), kUniform, 2), (Outcome{BuyerId{1}, 0.5}));
  EXPECT_THROW(k_pwm(report, kUniform, 0), PreconditionError);
}

TEST(Kpwm, MatchesSubsetOracle) {
  for (std::uint64_t seed = 0; seed < 600; ++seed) {
    const std::size_t n = 2 + seed % 6;
    const std::size_t k = 1 + seed % 4;
    const auto r = oracle::random_report(seed, n, 0.25, 0.85, seed % 2 == 0);
    const Outcome o = k_pwm({r.declared, r.bids}, kUniform, k);
    const auto s = oracle::kpwm(r.declared, r.bids, k, 0.5);
    ASSERT_EQ(o.winner.has_value(), s.winner.has_value()) << seed;
    if (s.winner) {
      ASSERT_EQ(o.winner->value, *s.winner);
      ASSERT_NEAR(o.price, s.price, 1e-15);
    }
  }
}

TEST(CwmSrp, ZeroShiftIsCwm) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto r = oracle::random_report(seed, 1 + seed % 10, 0.2, 0.9, seed % 2 == 0);
    const ReportProfile report{r.declared, r.bids};
    ASSERT_EQ(cwm_srp(report, kUniform, ShiftingFunction{}), cwm(report, kUniform));
  }
}

TEST(CwmSrp, FallsThroughToDeeperBuyer) {
  const auto s = broom_structure(1);
  const auto report = truthful(s, {0.55, 0.3, 0.8});
  EXPECT_EQ(cwm(report, kUniform), (Outcome{BuyerId{1}, 0.5}));
  const Outcome o = cwm_srp(report, kUniform, ShiftingFunction::parse("sigma1"));
  EXPECT_EQ(o.winner, BuyerId{3});
  EXPECT_DOUBLE_EQ(o.price, 0.55);
}

TEST(CwmSrp, ShiftedPastSupportNeverWins) {
  const auto s = star_structure(3);
  const auto sigma = ShiftingFunction::indicator(0.6, 1);
  EXPECT_EQ(cwm_srp(truthful(s, {1.0, 0.99, 0.98}), kUniform, sigma), Outcome{});
}

TEST(CwmSrp, PriceIsShiftedReserveOrPotentialPayment) {
  const auto sigma = ShiftingFunction::parse("sigma2");
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto r = oracle::random_report(seed, 1 + seed % 9, 0.2, 1.0, false);
    const ReportProfile report{r.declared, r.bids};
    const Outcome o = cwm_srp(report, kUniform, sigma);
    if (!o.winner) continue;
    const int d = diffusion_distance(r.declared, *o.winner);
    ASSERT_GE(report.bid(*o.winner), 0.5 + sigma(d));
    ASSERT_GE(o.price, 0.5 + sigma(d) - 1e-15);
    ASSERT_LE(o.price, report.bid(*o.winner));
  }
}

TEST(Shifting, Parse) {
  const auto s1 = ShiftingFunction::parse("indicator:0.1:1");
  EXPECT_DOUBLE_EQ(s1(1), 0.1);
  EXPECT_DOUBLE_EQ(s1(2), 0.0);
  EXPECT_TRUE(s1.is_monotone());
  const auto s2 = ShiftingFunction::parse("sigma2");
  EXPECT_DOUBLE_EQ(s2(1), 0.2);
  EXPECT_DOUBLE_EQ(s2(2), 0.1);
  EXPECT_DOUBLE_EQ(s2(3), 0.0);
  EXPECT_TRUE(s2.is_monotone());
  const auto rising = ShiftingFunction::parse("table:1=0.1,2=0.2,default=0");
  EXPECT_FALSE(rising.is_monotone());
  EXPECT_EQ(ShiftingFunction::parse(rising.to_string())(2), 0.2);
  EXPECT_THROW(ShiftingFunction::parse("table:0=0.1"), ParseError);
  EXPECT_THROW(ShiftingFunction::parse("indicator:0.1"), ParseError);
  EXPECT_THROW(ShiftingFunction::parse("bogus"), ParseError);
  EXPECT_THROW(ShiftingFunction::parse("indicator:1.5:1").check_range(1.0), DomainError);
  EXPECT_THROW(ShiftingFunction::parse("table:1=-0.1").check_range(1.0), DomainError);
}

TEST(Registry, Ids) {
  for (const char* id : {"myerson-rs", "myerson-all", "kpwm:3", "cwm", "cwm-fast",
                         "cwm-srp:sigma1", "cwm-srp:table:1=0.2,2=0.1,default=0"}) {
    EXPECT_EQ(make_mechanism(id)->id(), id);
  }
  EXPECT_THROW(make_mechanism("kpwm:0"), ParseError);
  EXPECT_THROW(make_mechanism("kpwm:x"), ParseError);
  EXPECT_THROW(make_mechanism("vcg"), ParseError);
  const auto bp = make_mechanism("cwm-srp:sigma2")->breakpoints(kUniform, 3);
  EXPECT_EQ(bp, (std::vector<double>{0.0, 0.5, 0.6, 0.7, 1.0}));
}

TEST(Mechanisms, IndividuallyRationalPointwise) {
  std::vector<MechanismPtr> all;
  for (const char* id : {"myerson-rs", "myerson-all", "kpwm:2", "kpwm:3", "cwm", "cwm-fast",
                         "cwm-srp:sigma1", "cwm-srp:sigma2"}) {
    all.push_back(make_mechanism(id));
  }
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto r = oracle::random_report(seed, 1 + seed % 7, 0.2, 1.0, seed % 2 == 0);
    for (const auto& m : all) {
      const Outcome o = m->run({r.declared, r.bids}, kUniform);
      if (o.winner) {
        ASSERT_LE(o.price, r.bids[o.winner->index()] + 1e-12) << m->id();
        ASSERT_GE(o.price, 0.0);
      }
    }
  }
}

}  // namespace
}  // namespace diffauction
