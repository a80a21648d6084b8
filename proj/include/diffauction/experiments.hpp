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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diffauction/mechanisms.hpp"

namespace diffauction {

enum class Execution { kSerial, kParallel };

struct RevenueEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(samples)
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string mechanism;
  std::string structure_id;
};

/// Average revenue over i.i.d. valuation profiles under truthful reports.
/// Samples are drawn in fixed-size batches, each from its own seed stream,
/// and batch results are combined in batch order, so serial and parallel
/// runs agree bit for bit.
RevenueEstimate monte_carlo_revenue(const Mechanism& mechanism, const StructureProfile& structure,
                                    const Priors& priors, std::size_t samples, std::uint64_t seed,
                                    Execution execution = Execution::kParallel);

/// Two mechanisms on the same valuation draws.
struct PairedEstimate {
  RevenueEstimate first;
  RevenueEstimate second;
  double mean_difference = 0.0;  // first - second
  double difference_std_error = 0.0;
  double ratio = 0.0;  // first / second
  double ratio_std_error = 0.0;  // delta method
};

PairedEstimate paired_monte_carlo(const Mechanism& first, const Mechanism& second,
                                  const StructureProfile& structure, const Priors& priors,
                                  std::size_t samples, std::uint64_t seed,
                                  Execution execution = Execution::kParallel);

/// Per-sample revenues in draw order. For sample-by-sample comparisons.
std::vector<double> revenue_trace(const Mechanism& mechanism, const StructureProfile& structure,
                                  const Priors& priors, std::size_t samples, std::uint64_t seed);

inline constexpr std::size_t kMaxQuadratureBuyers = 5;

struct QuadratureEstimate {
  double value = 0.0;
  /// |Q(nodes) - Q(check_nodes)|; NaN when no check was requested.
  double error_estimate = 0.0;
  std::size_t nodes_per_dim = 0;
};

struct QuadratureOptions {
  std::size_t nodes_per_dim = 64;
  /// Second node count for the error estimate; 0 skips it.
  std::size_t check_nodes = 96;
  Execution execution = Execution::kParallel;
};

/// Expected revenue by tensor-product Gauss-Legendre quadrature over the
/// valuation box. Each axis is split into panels at the mechanism's
/// breakpoints; nodes are shared out over panels in proportion to their
/// length. Points where two valuations coincide are evaluated twice, with
/// the tie nudged each way, and averaged. n <= 5.
QuadratureEstimate exact_revenue_small(const Mechanism& mechanism,
                                       const StructureProfile& structure, const Priors& priors,
                                       const QuadratureOptions& options = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(std::size_t order, std::vector<double>& nodes, std::vector<double>& weights);

/// Connected seller-rooted structures on n buyers, one per rooted
/// isomorphism class, in a fixed order. n <= 5.
std::vector<StructureProfile> enumerate_structures(std::size_t n);

/// Canonical form under buyer relabeling; equal iff isomorphic.
std::vector<std::uint8_t> canonical_code(const StructureProfile& structure);

/// Named benchmark structures: five with n = 3 and fifteen with n = 4.
struct NamedStructure {
  std::string id;
  std::vector<std::string> aliases;
  StructureProfile structure;
  /// Edges whose presence does not change any outcome.
  std::vector<Edge> optional_edges;

  /// The structure with every subset of optional_edges added.
  std::vector<StructureProfile> variants() const;
};

const std::vector<NamedStructure>& structure_catalog();
/// Looks up by id or alias; nullptr when unknown.
const NamedStructure* find_structure(std::string_view name);

struct RatioEstimate {
  double ratio = 0.0;
  double std_error = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
};

enum class EstimationMode { kMonteCarlo, kQuadrature };

/// E[rev of mechanism] / E[rev of Myerson over every valid buyer]. Monte
/// Carlo uses the same draws for both; quadrature reports the combined
/// error estimate as std_error. Throws PreconditionError when the
/// denominator is 0.
RatioEstimate approximation_ratio(const Mechanism& mechanism, const StructureProfile& structure,
                                  const Priors& priors, EstimationMode mode, std::size_t samples,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Config-driven reports.

struct StructureSource {
  std::string label;  // structure_id prefix in the CSV
  std::vector<std::pair<std::string, StructureProfile>> structures;
  bool aggregate = false;  // emit a row averaging over this group
};

struct ExperimentConfig {
  std::vector<StructureSource> structures;
  std::vector<std::string> mechanisms;
  Priors priors = Priors::uniform();
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  EstimationMode mode = EstimationMode::kMonteCarlo;
  std::size_t nodes_per_dim = 64;
  std::size_t check_nodes = 0;
};

/// Parses the JSON config. Relative file paths resolve against base_dir.
/// Throws ParseError with a field path.
ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         const std::string& base_dir = ".");

/// CSV with columns structure_id,n,mechanism,mode,mean,stderr,samples,seed.
/// Quadrature rows put the error estimate in stderr and nodes per axis in
/// samples. Aggregate rows average per-structure means over a generated
/// group; their stderr is the spread across structures.
std::string table_report(const ExperimentConfig& config);

inline constexpr std::string_view kCsvHeader =
    "structure_id,n,mechanism,mode,mean,stderr,samples,seed";

}  // namespace diffauction
