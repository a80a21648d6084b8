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

#include <algorithm>
#include <functional>
#include <limits>

#include "diffauction/errors.hpp"
#include "diffauction/verification.hpp"
#include "json.hpp"

namespace diffauction {
namespace {

struct OracleVariant {
  double surcharge = 0.0;
  bool floor_at_zero = true;
  bool keep_tied_rivals = true;
};

bool beats(double va, BuyerId a, double vb, BuyerId b) {
  return va > vb || (va == vb && a < b);
}

Outcome definitional(const ReportProfile& report, const Priors& priors, const OracleVariant& how) {
  const Network& net = report.declared;
  struct Entry {
    std::size_t critical;
    BuyerId buyer;
    double price;
  };
  std::vector<Entry> winners;
  for (BuyerId i : valid_buyers(net)) {
    const auto& dist = priors.of(i);
    const double vi = dist.virtual_value(report.bid(i));
    if (vi < 0) continue;
    bool wins = true;
    double rival = -std::numeric_limits<double>::infinity();
    for (BuyerId j : valid_without_diffusion(net, i)) {
      if (j == i) continue;
      const double vj = priors.of(j).virtual_value(report.bid(j));
      if (beats(vj, j, vi, i)) wins = false;
      if (!how.keep_tied_rivals && vj == vi) continue;
      rival = std::max(rival, vj);
    }
    if (!wins) continue;
    const double level = how.floor_at_zero ? std::max(0.0, rival) : rival;
    winners.push_back({critical_buyers(net, i).size(), i, dist.threshold(level)});
  }
  if (winners.empty()) return {};
  const auto head = std::min_element(winners.begin(), winners.end(),
                                     [](const Entry& a, const Entry& b) {
                                       return a.critical < b.critical;
                                     });
  return {head->buyer, head->price + how.surcharge};
}

// Prepared form that simply replays a report-level function.
class ReplayAuction final : public PreparedAuction {
 public:
  using Fn = std::function<Outcome(const ReportProfile&, const Priors&)>;
  ReplayAuction(const Network& declared, const Priors& priors, Fn fn)
      : declared_(declared), priors_(priors), fn_(std::move(fn)) {}
  Outcome allocate(std::span<const double> bids) const override {
    return fn_({declared_, {bids.begin(), bids.end()}}, priors_);
  }

 private:
  Network declared_;
  Priors priors_;
  Fn fn_;
};

class Mutant final : public Mechanism {
 public:
  Mutant(std::string name, ReplayAuction::Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string id() const override { return "mutant:" + name_; }
  std::unique_ptr<PreparedAuction> prepare(const Network& declared,
                                           const Priors& priors) const override {
    return std::make_unique<ReplayAuction>(declared, priors, fn_);
  }

 private:
  std::string name_;
  ReplayAuction::Fn fn_;
};

}  // namespace

Outcome definitional_cwm_oracle(const ReportProfile& report, const Priors& priors) {
  return definitional(report, priors, {});
}

std::vector<std::string> mutant_names() {
  return {"overcharge", "ignore-reserve", "wrong-tie-break", "read-invalid-bid"};
}

MechanismPtr make_mutant(std::string_view name) {
  if (name == "overcharge") {
    return std::make_shared<Mutant>("overcharge", [](const ReportProfile& r, const Priors& p) {
      return definitional(r, p, {.surcharge = 0.1});
    });
  }
  if (name == "ignore-reserve") {
    return std::make_shared<Mutant>("ignore-reserve", [](const ReportProfile& r, const Priors& p) {
      return definitional(r, p, {.floor_at_zero = false});
    });
  }
  if (name == "wrong-tie-break") {
    return std::make_shared<Mutant>("wrong-tie-break", [](const ReportProfile& r, const Priors& p) {
      return definitional(r, p, {.keep_tied_rivals = false});
    });
  }
  if (name == "read-invalid-bid") {
    return std::make_shared<Mutant>("read-invalid-bid", [](const ReportProfile& r, const Priors& p) {
      std::vector<BuyerId> everyone;
      for (std::size_t i = 0; i < r.buyer_count(); ++i) everyone.push_back(BuyerId::from_index(i));
      return myerson(everyone, r.bids, p);
    });
  }
  throw ParseError("unknown mutant '" + std::string(name) + "'", 0, "mutant");
}

std::string violation_to_json(const Violation& v) {
  nlohmann::json j;
  j["kind"] = v.kind == Violation::Kind::kIr ? "ir" : "ic";
  j["buyer"] = v.buyer.value;
  j["truthful_utility"] = v.truthful_utility;
  j["deviating_utility"] = v.deviating_utility;
  std::vector<std::uint32_t> declared;
  for (BuyerId b : v.deviation.declared) declared.push_back(b.value);
  j["deviation"] = {{"bid", v.deviation.bid}, {"declared", declared}};
  j["valuations"] = v.valuations;
  return j.dump();
}

}  // namespace diffauction
