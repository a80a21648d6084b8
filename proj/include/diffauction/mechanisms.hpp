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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diffauction/network.hpp"
#include "diffauction/valuation.hpp"

namespace diffauction {

/// Single-item outcome. Only the winner can pay; every other payment is 0.
struct Outcome {
  std::optional<BuyerId> winner;
  double price = 0.0;

  double payment(BuyerId i) const { return winner == i ? price : 0.0; }
  double revenue() const { return winner ? price : 0.0; }
  bool operator==(const Outcome&) const = default;
};

struct PotentialWinner {
  BuyerId buyer;
  /// p*_i: price against the best virtual bid valid without i.
  double potential_payment;
  /// The virtual level that price corresponds to, max(0, best rival).
  double rival_level;
};

/// Potential winners ordered from the seller outwards; each one is a
/// critical buyer of the next.
using PotentialWinnerChain = std::vector<PotentialWinner>;

/// sigma(d): extra reserve for a buyer at diffusion distance d.
class ShiftingFunction {
 public:
  ShiftingFunction() = default;
  ShiftingFunction(std::map<int, double> increments, double fallback);

  /// sigma(d) = amount for d <= max_distance, 0 beyond.
  static ShiftingFunction indicator(double amount, int max_distance);
  /// "indicator:<amount>:<max_d>", "table:1=0.2,2=0.1,default=0", "zero",
  /// or the named presets "sigma1" and "sigma2". Throws ParseError.
  static ShiftingFunction parse(std::string_view text);

  double operator()(int distance) const;
  bool is_monotone() const;
  /// Throws DomainError unless 0 <= sigma(d) <= width for every d.
  void check_range(double width) const;
  /// Distinct values sigma takes.
  std::vector<double> values() const;
  std::string to_string() const;

  const std::map<int, double>& increments() const { return increments_; }
  double fallback() const { return fallback_; }

 private:
  std::map<int, double> increments_;
  double fallback_ = 0.0;
};

/// One step of the linear-time CWM loop.
struct FrontierStep {
  std::vector<BuyerId> frontier;  // B at the start of the step, sorted
  std::optional<BuyerId> winner;
  double payment = 0.0;           // Myerson price among B
  double virtual_level = 0.0;     // max(0, best rival in B)
};

// ---------------------------------------------------------------------------
// Mechanisms as plain functions of a report.

/// Myerson among `participants`. Highest non-negative virtual bid wins
/// (smallest id on ties) and pays phi^{-1}(max(0, best other virtual bid)).
Outcome myerson(std::span<const BuyerId> participants, std::span<const double> bids,
                const Priors& priors);

PotentialWinnerChain potential_winners(const ReportProfile& report, const Priors& priors);

struct PartialPotentialWinner {
  BuyerId buyer;
  double payment;  // minimal k-partial potential payment
};

/// Unique buyer who can shrink the valid set to exactly k by withholding
/// invitations and then win Myerson among it. Requires |V| > k.
std::optional<PartialPotentialWinner> k_partial_potential_winner(const ReportProfile& report,
                                                                 const Priors& priors,
                                                                 std::size_t k);

Outcome k_pwm(const ReportProfile& report, const Priors& priors, std::size_t k);
Outcome cwm(const ReportProfile& report, const Priors& priors);
/// Frontier-expansion form of cwm. Appends one entry per loop iteration to
/// `trace` when given.
Outcome cwm_fast(const ReportProfile& report, const Priors& priors,
                 std::vector<FrontierStep>* trace = nullptr);
Outcome cwm_srp(const ReportProfile& report, const Priors& priors, const ShiftingFunction& sigma);

// ---------------------------------------------------------------------------
// Registry for experiments, verification and the CLI.

/// A mechanism bound to one declared network and one set of priors. Only the
/// bids vary between calls, which is what Monte Carlo, quadrature and the
/// deviation checker need. allocate() is thread-safe.
class PreparedAuction {
 public:
  virtual ~PreparedAuction() = default;
  virtual Outcome allocate(std::span<const double> bids) const = 0;
};

class Mechanism {
 public:
  virtual ~Mechanism() = default;

  virtual std::string id() const = 0;
  virtual std::unique_ptr<PreparedAuction> prepare(const Network& declared,
                                                   const Priors& priors) const = 0;
  /// Valuation levels at which the outcome changes form for an n-buyer
  /// instance (reserves and shifted reserves), for aligning quadrature panels.
  virtual std::vector<double> breakpoints(const Priors& priors, std::size_t n) const;

  Outcome run(const ReportProfile& report, const Priors& priors) const;
};

using MechanismPtr = std::shared_ptr<const Mechanism>;

/// Parses "myerson-rs", "myerson-all", "kpwm:<k>", "cwm", "cwm-fast",
/// "cwm-srp:<sigma>". Throws ParseError.
MechanismPtr make_mechanism(std::string_view id);

}  // namespace diffauction
