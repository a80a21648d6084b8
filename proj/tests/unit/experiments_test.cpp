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

#include <bit>
#include <cmath>
#include <set>

#include "diffauction/errors.hpp"
#include "diffauction/experiments.hpp"
#include "exact_oracle.hpp"

namespace diffauction {
namespace {

double exact_of(const Mechanism& m, const StructureProfile& s) {
  const auto prepared = m.prepare(s.network(), Priors::uniform());
  return oracle::exact_uniform_revenue(
      [&](const std::vector<double>& v) { return prepared->allocate(v).revenue(); },
      s.buyer_count(), {0.5, 0.6, 0.7});
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  double sum = 0, x8 = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sum += w[k];
    x8 += w[k] * std::pow(x[k], 8);
  }
  EXPECT_NEAR(sum, 2.0, 1e-14);
  EXPECT_NEAR(x8, 2.0 / 9.0, 1e-14);
}

TEST(MonteCarlo, SerialAndParallelAgreeBitwise) {
  const auto m = make_mechanism("cwm-srp:sigma2");
  const auto s = generate_random_structure(9, 0.2, 4);
  const auto a = monte_carlo_revenue(*m, s, Priors::uniform(), 20001, 77, Execution::kSerial);
  const auto b = monte_carlo_revenue(*m, s, Priors::uniform(), 20001, 77, Execution::kParallel);
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a.mean), std::bit_cast<std::uint64_t>(b.mean));
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a.std_error), std::bit_cast<std::uint64_t>(b.std_error));
  EXPECT_EQ(a.samples, 20001u);
}

TEST(MonteCarlo, SingleSampleHasZeroError) {
  const auto m = make_mechanism("cwm");
  const auto s = chain_structure(3);
  const auto r = monte_carlo_revenue(*m, s, Priors::uniform(), 1, 5);
  EXPECT_EQ(r.std_error, 0.0);
  EXPECT_EQ(r.mean, revenue_trace(*m, s, Priors::uniform(), 1, 5)[0]);
}

TEST(MonteCarlo, KpwmAboveSizeIsZero) {
  const auto r = monte_carlo_revenue(*make_mechanism("kpwm:4"), star_structure(3),
                                     Priors::uniform(), 1000, 1);
  EXPECT_EQ(r.mean, 0.0);
}

TEST(MonteCarlo, ChainThree) {
  const auto r = monte_carlo_revenue(*make_mechanism("cwm"), chain_structure(3),
                                     Priors::uniform(), 200000, 3);
  EXPECT_NEAR(r.mean, 7.0 / 16.0, 4 * r.std_error);
}

TEST(MonteCarlo, ZeroSamplesRejected) {
  EXPECT_THROW(monte_carlo_revenue(*make_mechanism("cwm"), chain_structure(2), Priors::uniform(),
                                   0, 1),
               PreconditionError);
}

TEST(Quadrature, MatchesExactOracleOnSmallStructures) {
  for (const char* id : {"myerson-rs", "myerson-all", "kpwm:2", "cwm", "cwm-srp:sigma1",
                         "cwm-srp:sigma2"}) {
    const auto m = make_mechanism(id);
    for (const auto& s : enumerate_structures(3)) {
      const auto q = exact_revenue_small(*m, s, Priors::uniform(), {32, 0});
      EXPECT_NEAR(q.value, exact_of(*m, s), 2e-3) << id;
      EXPECT_TRUE(std::isnan(q.error_estimate));
    }
  }
}

TEST(Quadrature, BroomPair) {
  const auto s = broom_structure(1);
  const auto cwm = exact_revenue_small(*make_mechanism("cwm"), s, Priors::uniform());
  const auto srp = exact_revenue_small(*make_mechanism("cwm-srp:sigma1"), s, Priors::uniform());
  EXPECT_NEAR(cwm.value, 97.0 / 192.0, 1e-3);
  EXPECT_NEAR(srp.value, 0.5099, 1e-3);
  EXPECT_LT(cwm.error_estimate, 1e-3);
}

TEST(Quadrature, SerialAndParallelAgree) {
  const auto m = make_mechanism("cwm");
  const auto s = chain_structure(3);
  const auto a = exact_revenue_small(*m, s, Priors::uniform(), {24, 0, Execution::kSerial});
  const auto b = exact_revenue_small(*m, s, Priors::uniform(), {24, 0, Execution::kParallel});
  EXPECT_EQ(a.value, b.value);
}

TEST(Quadrature, RefusesLargeInstances) {
  EXPECT_THROW(exact_revenue_small(*make_mechanism("cwm"), chain_structure(6), Priors::uniform()),
               PreconditionError);
}

TEST(Quadrature, FourBuyerTiming) {
  const auto m = make_mechanism("cwm-srp:sigma2");
  const auto s = chain_structure(4);
  const auto q = exact_revenue_small(*m, s, Priors::uniform(), {64, 0});
  EXPECT_NEAR(q.value, exact_of(*m, s), 3e-3);
}

TEST(Structures, EnumerationCounts) {
  EXPECT_EQ(enumerate_structures(1).size(), 1u);
  EXPECT_EQ(enumerate_structures(2).size(), 3u);
  const auto three = enumerate_structures(3);
  std::set<std::vector<std::uint8_t>> codes;
  for (const auto& s : three) codes.insert(canonical_code(s));
  EXPECT_EQ(codes.size(), three.size());
  for (const auto& e : structure_catalog()) {
    if (e.structure.buyer_count() == 3) {
      EXPECT_TRUE(codes.count(canonical_code(e.structure))) << e.id;
    }
  }
}

TEST(Structures, CanonicalCodeIgnoresLabels) {
  const std::vector<Edge> a = {{BuyerId{1}, BuyerId{2}}, {BuyerId{2}, BuyerId{3}}};
  const std::vector<Edge> b = {{BuyerId{3}, BuyerId{2}}, {BuyerId{2}, BuyerId{1}}};
  EXPECT_EQ(canonical_code(StructureProfile::from_edges(3, {BuyerId{1}}, a)),
            canonical_code(StructureProfile::from_edges(3, {BuyerId{3}}, b)));
  EXPECT_NE(canonical_code(chain_structure(3)), canonical_code(star_structure(3)));
}

TEST(Structures, CatalogAliases) {
  ASSERT_NE(find_structure("chain-4"), nullptr);
  EXPECT_EQ(find_structure("chain-4")->structure.buyer_count(), 4u);
  EXPECT_EQ(canonical_code(find_structure("chain-3")->structure),
            canonical_code(chain_structure(3)));
  EXPECT_EQ(find_structure("nope"), nullptr);
  std::size_t n3 = 0, n4 = 0;
  for (const auto& e : structure_catalog()) (e.structure.buyer_count() == 3 ? n3 : n4)++;
  EXPECT_EQ(n3, 5u);
  EXPECT_EQ(n4, 15u);
}

// Variants that differ only in edges marked optional give identical
// revenue on every draw.
TEST(Structures, OptionalEdgesDoNotMatter) {
  for (const auto& e : structure_catalog()) {
    const auto variants = e.variants();
    const std::string kpwm = "kpwm:" + std::to_string(e.structure.buyer_count());
    for (const std::string& id : {std::string("cwm"), kpwm, std::string("cwm-srp:sigma2")}) {
      const auto m = make_mechanism(id);
      const auto base = revenue_trace(*m, variants.front(), Priors::uniform(), 2000, 8);
      for (std::size_t v = 1; v < variants.size(); ++v) {
        EXPECT_EQ(revenue_trace(*m, variants[v], Priors::uniform(), 2000, 8), base)
            << e.id << " " << id;
      }
    }
  }
}

TEST(Ratio, ChainFour) {
  const auto r = approximation_ratio(*make_mechanism("cwm"), chain_structure(4), Priors::uniform(),
                                     EstimationMode::kQuadrature, 0, 0);
  EXPECT_NEAR(r.ratio, (15.0 / 32.0) / (49.0 / 80.0), 3e-3);
  const auto mc = approximation_ratio(*make_mechanism("cwm"), chain_structure(4),
                                      Priors::uniform(), EstimationMode::kMonteCarlo, 100000, 2);
  EXPECT_NEAR(mc.ratio, (15.0 / 32.0) / (49.0 / 80.0), 4 * mc.std_error);
}

TEST(Ratio, NoCutPointsIsOne) {
  const auto r = approximation_ratio(*make_mechanism("cwm"), star_structure(5), Priors::uniform(),
                                     EstimationMode::kMonteCarlo, 5000, 2);
  EXPECT_EQ(r.ratio, 1.0);
}

TEST(Ratio, ZeroDenominatorThrows) {
  const auto never = Priors::iid(std::make_shared<UniformDistribution>(-2.0, -1.0));
  EXPECT_THROW(approximation_ratio(*make_mechanism("cwm"), chain_structure(2), never,
                                   EstimationMode::kMonteCarlo, 100, 1),
               std::exception);
}

TEST(Config, ParsesAndReports) {
  const auto cfg = parse_experiment_config(R"({
    "structures": [{"name": "chain-3"}, {"chain": [1, 2]},
                   {"random": {"n": 6, "extra": 0.2, "count": 3, "seed": 1}, "aggregate": true}],
    "mechanisms": ["cwm", "myerson-all"],
    "samples": 2000, "seed": 4
  })");
  ASSERT_EQ(cfg.structures.size(), 4u);
  const std::string csv = table_report(cfg);
  EXPECT_EQ(csv, table_report(cfg));
  EXPECT_EQ(csv.substr(0, kCsvHeader.size()), kCsvHeader);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  EXPECT_EQ(lines, 1u + 2 * (1 + 2 + 3 + 1));
  EXPECT_NE(csv.find("random(n=6,extra=0.2),6,cwm,mc"), std::string::npos);
}

TEST(Config, SmallWorldGroups) {
  const auto cfg = parse_experiment_config(R"({
    "structures": [{"small_world": {"n": [20, 30], "degree": 2, "rewire": 0.5, "count": 4,
                                    "seed": 7}, "aggregate": true}],
    "mechanisms": ["cwm"], "samples": 500
  })");
  ASSERT_EQ(cfg.structures.size(), 2u);
  EXPECT_EQ(cfg.structures[0].structures.size(), 4u);
  EXPECT_EQ(cfg.structures[1].structures.front().second.buyer_count(), 30u);
  for (const auto& src : cfg.structures) {
    EXPECT_TRUE(src.aggregate);
    for (const auto& [id, s] : src.structures) {
      EXPECT_EQ(valid_buyers(s.network()).size(), s.buyer_count()) << id;
    }
  }
  EXPECT_NE(table_report(cfg).find("small-world(n=30,degree=2,p=0.5),30,cwm,mc"),
            std::string::npos);
}

TEST(Config, EmptyMechanismsGiveHeaderOnly) {
  const auto cfg = parse_experiment_config(R"({"structures": [{"name": "chain-3"}]})");
  EXPECT_EQ(table_report(cfg), std::string(kCsvHeader) + "\n");
}

TEST(Config, ErrorsCarryFieldPaths) {
  const auto field_of = [](const char* text) {
    try {
      parse_experiment_config(text);
    } catch (const ParseError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(field_of(R"({"structures": [{"name": "zzz"}]})"), "structures[0].name");
  EXPECT_EQ(field_of(R"({"structures": [], "mechanisms": ["cwm", "bogus"]})"), "mechanisms[1]");
  EXPECT_EQ(field_of(R"({"structures": [], "mode": "fast"})"), "mode");
  EXPECT_EQ(field_of(R"({"structures": [], "colour": 1})"), "colour");
  EXPECT_EQ(field_of(R"({"structures": [{"chain": 7}], "mode": "quad"})"), "mode");
  EXPECT_EQ(field_of(R"({"structures": [{"small_world": {"n": 5, "count": 1, "seed": 1}}]})"),
            "structures[0].small_world.degree");
}

}  // namespace
}  // namespace diffauction
