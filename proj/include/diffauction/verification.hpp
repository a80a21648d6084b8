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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "diffauction/mechanisms.hpp"

namespace diffauction {

/// Finite surrogate for the bid space plus the exhaustive-mode caps.
struct DeviationGrid {
  std::vector<double> bids;
  std::size_t buyer_cap = 5;
  std::size_t degree_cap = 6;

  /// `points` evenly spaced values over [low, high], plus the reserve and the
  /// reserve one step either side.
  static DeviationGrid evenly_spaced(const ValueDistribution& dist, std::size_t points);

  /// Throws PreconditionError unless sorted, unique and inside the support.
  void validate(const ValueDistribution& dist) const;
};

struct Deviation {
  double bid = 0.0;
  std::vector<BuyerId> declared;
  bool operator==(const Deviation&) const = default;
};

struct Violation {
  enum class Kind { kIr, kIc };
  Kind kind = Kind::kIc;
  BuyerId buyer;
  double truthful_utility = 0.0;
  double deviating_utility = 0.0;
  Deviation deviation;             // the truthful report itself for IR
  std::vector<double> valuations;  // true valuation profile
};

struct CheckOptions {
  enum class Mode { kExhaustive, kSampled };
  Mode mode = Mode::kExhaustive;
  /// Sampled mode: random (profile, deviation) draws per buyer.
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  bool parallel = true;
};

inline constexpr double kUtilityTolerance = 1e-12;

/// Truthful utility >= -1e-12 on every grid valuation profile.
std::vector<Violation> check_ir(const Mechanism& mechanism, const StructureProfile& structure,
                                const Priors& priors, const DeviationGrid& grid,
                                const CheckOptions& options = {});

/// Truthful utility >= best joint (bid, neighbour subset) deviation - 1e-12
/// for every buyer and every grid profile of the others. Exhaustive mode
/// refuses instances beyond the grid's caps. Violations come back sorted by
/// buyer, bid, declared set and profile, whatever the thread count.
std::vector<Violation> check_ic(const Mechanism& mechanism, const StructureProfile& structure,
                                const Priors& priors, const DeviationGrid& grid,
                                const CheckOptions& options = {});

struct AxiomReport {
  bool passed = true;
  std::size_t trials = 0;
  std::size_t trials_with_invalid = 0;  // 0 means the pass is vacuous
  std::vector<std::string> failures;
};

/// Samples declared subsets and bids, then checks that invalid buyers never
/// win and that re-drawing invalid buyers' reports leaves the outcome
/// bitwise unchanged.
AxiomReport check_axioms(const Mechanism& mechanism, const StructureProfile& structure,
                         const Priors& priors, std::size_t trials, std::uint64_t seed);
/// Same, holding valid buyers' reports at `report`.
AxiomReport check_axioms(const Mechanism& mechanism, const ReportProfile& report,
                         const Priors& priors, std::size_t trials, std::uint64_t seed);

/// CWM straight from the definitions: rebuilds V_{-r_i'} for every valid
/// buyer and orders potential winners by |C(i)|. Quadratic or worse; for
/// cross-checking only.
Outcome definitional_cwm_oracle(const ReportProfile& report, const Priors& priors);

/// Deliberately broken mechanisms for mutation testing: "overcharge",
/// "ignore-reserve", "wrong-tie-break", "read-invalid-bid".
MechanismPtr make_mutant(std::string_view name);
std::vector<std::string> mutant_names();

std::string violation_to_json(const Violation& v);

}  // namespace diffauction
