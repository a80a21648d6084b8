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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "diffauction/errors.hpp"
#include "diffauction/experiments.hpp"
#include "diffauction/instance_io.hpp"
#include "json.hpp"

namespace diffauction {
namespace {

using nlohmann::json;

const json& require(const json& j, const char* key, const std::string& at) {
  if (!j.is_object() || !j.contains(key)) throw ParseError("missing", 0, at + "." + key);
  return j.at(key);
}

std::uint64_t as_count(const json& j, const std::string& at) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw ParseError("expected a non-negative integer", 0, at);
  }
  return j.get<std::uint64_t>();
}

double as_real(const json& j, const std::string& at) {
  if (!j.is_number()) throw ParseError("expected a number", 0, at);
  return j.get<double>();
}

std::string as_string(const json& j, const std::string& at) {
  if (!j.is_string()) throw ParseError("expected a string", 0, at);
  return j.get<std::string>();
}

std::vector<std::uint64_t> counts(const json& j, const std::string& at) {
  std::vector<std::uint64_t> out;
  if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_count(j[k], at + "[" + std::to_string(k) + "]"));
  } else {
    out.push_back(as_count(j, at));
  }
  return out;
}

std::string fmt_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Wraps library precondition failures raised while materialising a config.
template <typename Fn>
auto at_field(const std::string& field, Fn fn) {
  try {
    return fn();
  } catch (const PreconditionError& e) {
    throw ParseError(e.what(), 0, field);
  }
}

std::vector<StructureSource> parse_source(const json& j, const std::string& at,
                                          const std::string& base_dir) {
  if (!j.is_object()) throw ParseError("expected an object", 0, at);
  const bool aggregate = j.value("aggregate", false);
  std::vector<StructureSource> out;
  const auto single = [&](std::string id, StructureProfile s) {
    StructureSource src{id, {{std::move(id), std::move(s)}}, false};
    out.push_back(std::move(src));
  };

  if (j.contains("catalog")) {
    const std::string which = as_string(j["catalog"], at + ".catalog");
    if (which != "n3" && which != "n4" && which != "all") {
      throw ParseError("expected \"n3\", \"n4\" or \"all\"", 0, at + ".catalog");
    }
    for (const auto& e : structure_catalog()) {
      if (which == "all" || e.id.starts_with(which + "-")) single(e.id, e.structure);
    }
  } else if (j.contains("name")) {
    const std::string name = as_string(j["name"], at + ".name");
    const NamedStructure* e = find_structure(name);
    if (!e) throw ParseError("unknown structure '" + name + "'", 0, at + ".name");
    single(name, e->structure);
  } else if (j.contains("file")) {
    std::filesystem::path path = as_string(j["file"], at + ".file");
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    EdgeListOptions opts;
    if (j.contains("seller_node")) opts.seller_node = as_string(j["seller_node"], at + ".seller_node");
    auto inst = load_instance(path, opts);
    single(j.value("id", path.stem().string()), std::move(inst.structure));
  } else if (j.contains("inline")) {
    auto inst = parse_instance_json(j["inline"].dump());
    single(j.value("id", std::string("inline")), std::move(inst.structure));
  } else if (j.contains("chain") || j.contains("star") || j.contains("broom")) {
    const char* kind = j.contains("chain") ? "chain" : j.contains("star") ? "star" : "broom";
    for (auto n : counts(j[kind], at + "." + kind)) {
      const std::string id = std::string(kind) + "-" + std::to_string(n);
      single(id, at_field(at, [&] {
               if (n == 0) throw PreconditionError("size must be positive");
               return std::string_view(kind) == "chain"  ? chain_structure(n)
                      : std::string_view(kind) == "star" ? star_structure(n)
                                                          : broom_structure(n);
             }));
    }
  } else if (j.contains("enumerate")) {
    const auto n = as_count(j["enumerate"], at + ".enumerate");
    const auto all = at_field(at + ".enumerate", [&] { return enumerate_structures(n); });
    for (std::size_t k = 0; k < all.size(); ++k) {
      single("enum-n" + std::to_string(n) + "-" + std::to_string(k + 1), all[k]);
    }
  } else if (j.contains("small_world") || j.contains("random")) {
    const bool sw = j.contains("small_world");
    const std::string key = sw ? "small_world" : "random";
    const json& g = j[key];
    const std::string gat = at + "." + key;
    const auto count = as_count(require(g, "count", gat), gat + ".count");
    const auto seed = as_count(require(g, "seed", gat), gat + ".seed");
    for (auto n : counts(require(g, "n", gat), gat + ".n")) {
      StructureSource src;
      if (sw) {
        const auto degree = as_count(require(g, "degree", gat), gat + ".degree");
        const double p = as_real(require(g, "rewire", gat), gat + ".rewire");
        SellerAttachment attach;
        if (g.contains("attachment")) {
          const std::string mode = as_string(g["attachment"], gat + ".attachment");
          if (mode == "random") {
            attach.kind = SellerAttachment::Kind::kRandomBuyers;
            attach.random_links = g.value("links", std::size_t{1});
          } else if (mode != "designated") {
            throw ParseError("expected \"designated\" or \"random\"", 0, gat + ".attachment");
          }
        }
        std::ostringstream label;
        label << "small-world(n=" << n << ",degree=" << degree << ",p=" << fmt_real(p) << ")";
        src.label = label.str();
        for (std::uint64_t s = 0; s < count; ++s) {
          src.structures.emplace_back(
              src.label + "#" + std::to_string(s + 1),
              at_field(gat, [&] {
                return generate_small_world(n, degree, p, stream_seed(seed, n * 1000003 + s), attach);
              }));
        }
      } else {
        const double extra = as_real(require(g, "extra", gat), gat + ".extra");
        src.label = "random(n=" + std::to_string(n) + ",extra=" + fmt_real(extra) + ")";
        for (std::uint64_t s = 0; s < count; ++s) {
          src.structures.emplace_back(
              src.label + "#" + std::to_string(s + 1),
              at_field(gat, [&] {
                return generate_random_structure(n, extra, stream_seed(seed, n * 1000003 + s));
              }));
        }
      }
      src.aggregate = aggregate;
      out.push_back(std::move(src));
    }
  } else {
    throw ParseError("unknown structure source", 0, at);
  }
  if (j.contains("aggregate") && !j.contains("small_world") && !j.contains("random")) {
    // Several single structures can still be averaged as one group.
    if (aggregate && out.size() > 1) {
      StructureSource merged{j.value("label", std::string("aggregate")), {}, true};
      for (auto& s : out) {
        for (auto& p : s.structures) merged.structures.push_back(std::move(p));
      }
      out = {std::move(merged)};
    }
  }
  return out;
}

}  // namespace

RatioEstimate approximation_ratio(const Mechanism& mechanism, const StructureProfile& structure,
                                  const Priors& priors, EstimationMode mode, std::size_t samples,
                                  std::uint64_t seed) {
  const auto benchmark = make_mechanism("myerson-all");
  RatioEstimate out;
  if (mode == EstimationMode::kMonteCarlo) {
    const auto p = paired_monte_carlo(mechanism, *benchmark, structure, priors, samples, seed);
    out.numerator = p.first.mean;
    out.denominator = p.second.mean;
    out.ratio = p.ratio;
    out.std_error = p.ratio_std_error;
  } else {
    const auto a = exact_revenue_small(mechanism, structure, priors);
    const auto b = exact_revenue_small(*benchmark, structure, priors);
    out.numerator = a.value;
    out.denominator = b.value;
    if (b.value != 0) {
      out.ratio = a.value / b.value;
      out.std_error = std::abs(out.ratio) * std::hypot(a.error_estimate / a.value,
                                                      b.error_estimate / b.value);
    }
  }
  if (out.denominator == 0) {
    throw PreconditionError("benchmark revenue is 0; the ratio is undefined");
  }
  return out;
}

ExperimentConfig parse_experiment_config(std::string_view json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t k = 0; k < std::min<std::size_t>(e.byte, json_text.size()); ++k) {
      line += json_text[k] == '\n';
    }
    throw ParseError(e.what(), line);
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  static const std::set<std::string> known = {"structures", "mechanisms", "distribution", "samples",
                                              "seed", "mode", "nodes_per_dim", "check_nodes"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ParseError("unknown key", 0, key);
  }
  ExperimentConfig cfg;
  const json& structures = require(j, "structures", "config");
  if (!structures.is_array()) throw ParseError("expected an array", 0, "structures");
  for (std::size_t k = 0; k < structures.size(); ++k) {
    for (auto& s : parse_source(structures[k], "structures[" + std::to_string(k) + "]", base_dir)) {
      cfg.structures.push_back(std::move(s));
    }
  }
  if (j.contains("mechanisms")) {
    const json& m = j["mechanisms"];
    if (!m.is_array()) throw ParseError("expected an array", 0, "mechanisms");
    for (std::size_t k = 0; k < m.size(); ++k) {
      const std::string at = "mechanisms[" + std::to_string(k) + "]";
      const std::string id = as_string(m[k], at);
      try {
        make_mechanism(id);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), 0, at);
      }
      cfg.mechanisms.push_back(id);
    }
  }
  if (j.contains("distribution")) {
    try {
      cfg.priors = Priors::iid(parse_distribution(j["distribution"].dump()));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), 0, "distribution");
    }
  }
  if (j.contains("samples")) cfg.samples = as_count(j["samples"], "samples");
  if (j.contains("seed")) cfg.seed = as_count(j["seed"], "seed");
  if (j.contains("nodes_per_dim")) cfg.nodes_per_dim = as_count(j["nodes_per_dim"], "nodes_per_dim");
  if (j.contains("check_nodes")) cfg.check_nodes = as_count(j["check_nodes"], "check_nodes");
  if (j.contains("mode")) {
    const std::string mode = as_string(j["mode"], "mode");
    if (mode == "monte-carlo" || mode == "mc") {
      cfg.mode = EstimationMode::kMonteCarlo;
    } else if (mode == "quadrature" || mode == "quad") {
      cfg.mode = EstimationMode::kQuadrature;
    } else {
      throw ParseError("expected \"monte-carlo\" or \"quadrature\"", 0, "mode");
    }
  }
  if (cfg.samples == 0) throw ParseError("must be positive", 0, "samples");
  if (cfg.mode == EstimationMode::kQuadrature) {
    for (const auto& src : cfg.structures) {
      for (const auto& [id, s] : src.structures) {
        if (s.buyer_count() > kMaxQuadratureBuyers) {
          throw ParseError("quadrature mode needs n <= 5, structure " + id + " has " +
                           std::to_string(s.buyer_count()),
                           0, "mode");
        }
      }
    }
  }
  return cfg;
}

std::string table_report(const ExperimentConfig& config) {
  std::ostringstream csv;
  csv << kCsvHeader << '\n';
  const bool quad = config.mode == EstimationMode::kQuadrature;
  const char* mode = quad ? "quad" : "mc";
  std::vector<MechanismPtr> mechanisms;
  for (const auto& id : config.mechanisms) mechanisms.push_back(make_mechanism(id));

  std::uint64_t index = 0;
  for (const auto& src : config.structures) {
    std::vector<std::vector<double>> means(mechanisms.size());
    for (const auto& [id, structure] : src.structures) {
      const std::uint64_t seed = stream_seed(config.seed, index++);
      for (std::size_t m = 0; m < mechanisms.size(); ++m) {
        double mean, err;
        std::size_t samples;
        if (quad) {
          const auto q = exact_revenue_small(*mechanisms[m], structure, config.priors,
                                             {config.nodes_per_dim, config.check_nodes});
          mean = q.value;
          err = q.error_estimate;
          samples = config.nodes_per_dim;
        } else {
          const auto r = monte_carlo_revenue(*mechanisms[m], structure, config.priors,
                                             config.samples, seed);
          mean = r.mean;
          err = r.std_error;
          samples = r.samples;
        }
        means[m].push_back(mean);
        csv << id << ',' << structure.buyer_count() << ',' << mechanisms[m]->id() << ',' << mode
            << ',' << fmt_real(mean) << ',' << fmt_real(err) << ',' << samples << ','
            << (quad ? 0 : seed) << '\n';
      }
    }
    if (!src.aggregate || src.structures.empty()) continue;
    for (std::size_t m = 0; m < mechanisms.size(); ++m) {
      const auto& xs = means[m];
      const double k = static_cast<double>(xs.size());
      double mean = 0;
      for (double x : xs) mean += x;
      mean /= k;
      double ss = 0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      const double err = xs.size() > 1 ? std::sqrt(ss / (k - 1) / k) : 0.0;
      csv << src.label << ',' << src.structures.front().second.buyer_count() << ','
          << mechanisms[m]->id() << ',' << mode << ',' << fmt_real(mean) << ',' << fmt_real(err)
          << ',' << (quad ? config.nodes_per_dim : config.samples * xs.size()) << ','
          << config.seed << '\n';
    }
  }
  return csv.str();
}

}  // namespace diffauction
