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

#include "cli.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "diffauction/errors.hpp"
#include "diffauction/experiments.hpp"
#include "diffauction/instance_io.hpp"
#include "diffauction/verification.hpp"
#include "json.hpp"

namespace diffauction::cli {
namespace {

using nlohmann::json;

struct Common {
  std::string distribution;
  std::string seller_node;
  std::string out_path;
  std::uint64_t seed = 0;
};

Priors priors_from(const Common& c) {
  if (c.distribution.empty()) return Priors::uniform();
  return Priors::iid(parse_distribution(c.distribution));
}

Instance load(const std::string& path, const Common& c) {
  EdgeListOptions opts;
  if (!c.seller_node.empty()) opts.seller_node = c.seller_node;
  return load_instance(path, opts);
}

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ParseError("not a number: '" + item + "'", 0, flag);
    }
  }
  return out;
}

void warn_about_sigma(const std::string& mechanism, std::ostream& err) {
  constexpr std::string_view prefix = "cwm-srp:";
  if (!mechanism.starts_with(prefix)) return;
  const auto sigma = ShiftingFunction::parse(std::string_view(mechanism).substr(prefix.size()));
  if (!sigma.is_monotone()) {
    err << "warning: shifting function " << sigma.to_string()
        << " increases with distance; truthfulness guarantees assume it does not\n";
  }
}

std::string ids(std::span<const BuyerId> xs) {
  std::string s = "{";
  for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? "," : "") + std::to_string(xs[k].value);
  return s + "}";
}

std::string num(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

void emit(const std::string& text, const Common& c, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
  } else {
    write_text_file(c.out_path, text);
  }
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string instance, mechanism, valuations, virtual_bids;
  std::optional<std::uint64_t> sample;
  bool explain = false;
};

int do_run(const RunArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  warn_about_sigma(a.mechanism, err);
  const auto mechanism = make_mechanism(a.mechanism);
  auto inst = load(a.instance, c);
  const std::size_t n = inst.structure.buyer_count();
  Priors priors = a.virtual_bids.empty() ? priors_from(c)
                                         : Priors::iid(std::make_shared<VirtualBidPrior>());

  std::vector<double> bids;
  if (!a.virtual_bids.empty()) {
    bids = parse_list(a.virtual_bids, "--virtual-bids");
  } else if (!a.valuations.empty()) {
    bids = parse_list(a.valuations, "--valuations");
  } else if (a.sample) {
    Rng rng = make_stream(*a.sample, 0);
    priors.sample(n, rng, bids);
  } else if (inst.valuations) {
    bids = *inst.valuations;
  } else {
    throw PreconditionError("no valuations: pass --valuations, --virtual-bids or --sample");
  }
  if (bids.size() != n) {
    throw ParseError("expected " + std::to_string(n) + " values, got " +
                     std::to_string(bids.size()), 0, "valuations");
  }
  priors.check_covers(n);

  const auto report = ReportProfile::truthful(inst.structure, bids);
  const Outcome outcome = mechanism->run(report, priors);

  std::ostringstream s;
  s << "mechanism: " << mechanism->id() << '\n';
  s << "valuations: ";
  for (std::size_t k = 0; k < n; ++k) s << (k ? "," : "") << num(bids[k]);
  s << '\n';
  s << "winner: " << (outcome.winner ? std::to_string(outcome.winner->value) : "none") << '\n';
  s << "payment: " << num(outcome.price) << '\n';
  s << "revenue: " << num(outcome.revenue()) << '\n';
  if (a.explain) {
    const DiffusionAnalysis analysis(report.declared);
    s << "valid buyers: " << ids(analysis.valid_buyers()) << '\n';
    for (BuyerId i : analysis.valid_buyers()) {
      const auto cb = analysis.critical_buyers(i);
      if (!cb.empty()) s << "  C(" << i.value << ") = " << ids(cb) << '\n';
    }
    s << "potential winners, nearest first:\n";
    for (const auto& w : potential_winners(report, priors)) {
      s << "  buyer " << w.buyer.value << ": potential payment " << num(w.potential_payment)
        << ", rival level " << num(w.rival_level) << '\n';
    }
    std::vector<FrontierStep> trace;
    cwm_fast(report, priors, &trace);
    s << "frontier expansion:\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
      const auto& t = trace[k];
      s << "  step " << k + 1 << ": B = " << ids(t.frontier) << ", winner "
        << (t.winner ? std::to_string(t.winner->value) : "none") << ", price " << num(t.payment)
        << '\n';
    }
  }
  emit(s.str(), c, out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string mechanism, instance;
  std::size_t all_structures = 0;
  std::size_t grid_points = 11;
  std::size_t axiom_trials = 200;
  bool sampled = false;
  std::size_t samples = 10000;
  bool serial = false;
};

int do_verify(const VerifyArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  warn_about_sigma(a.mechanism, err);
  const auto mechanism = a.mechanism.starts_with("mutant:")
                             ? make_mutant(std::string_view(a.mechanism).substr(7))
                             : make_mechanism(a.mechanism);
  const Priors priors = priors_from(c);

  std::vector<std::pair<std::string, StructureProfile>> targets;
  if (!a.instance.empty()) targets.emplace_back(stem_of(a.instance), load(a.instance, c).structure);
  for (std::size_t n = 1; n <= a.all_structures; ++n) {
    const auto all = enumerate_structures(n);
    for (std::size_t k = 0; k < all.size(); ++k) {
      targets.emplace_back("enum-n" + std::to_string(n) + "-" + std::to_string(k + 1), all[k]);
    }
  }
  if (targets.empty()) throw ParseError("give an instance file or --all-structures", 0, "verify");

  const auto grid = DeviationGrid::evenly_spaced(priors.common(), a.grid_points);
  CheckOptions opts;
  opts.mode = a.sampled ? CheckOptions::Mode::kSampled : CheckOptions::Mode::kExhaustive;
  opts.samples = a.samples;
  opts.seed = c.seed;
  opts.parallel = !a.serial;

  json reports = json::array();
  bool ok = true;
  for (const auto& [id, structure] : targets) {
    const auto ir = check_ir(*mechanism, structure, priors, grid, opts);
    const auto ic = check_ic(*mechanism, structure, priors, grid, opts);
    const auto ax = check_axioms(*mechanism, structure, priors, a.axiom_trials, c.seed);
    json r;
    r["mechanism"] = mechanism->id();
    r["structure_id"] = id;
    r["checks"] = {{"ir", ir.empty()}, {"ic", ic.empty()}, {"axioms", ax.passed}};
    r["violations"] = json::array();
    for (const auto* list : {&ir, &ic}) {
      for (const auto& v : *list) r["violations"].push_back(json::parse(violation_to_json(v)));
    }
    r["axiom_failures"] = ax.failures;
    ok = ok && ir.empty() && ic.empty() && ax.passed;
    err << id << ": ir " << (ir.empty() ? "pass" : "FAIL") << ", ic "
        << (ic.empty() ? "pass" : "FAIL") << ", axioms " << (ax.passed ? "pass" : "FAIL") << '\n';
    reports.push_back(std::move(r));
  }
  emit(reports.dump(2) + "\n", c, out);
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::string instance;
  std::vector<std::string> mechanisms;
  std::size_t samples = 100000;
  std::string mode = "mc";
  std::size_t nodes = 64;
  std::size_t check_nodes = 96;
};

EstimationMode mode_of(const std::string& text) {
  if (text == "mc" || text == "monte-carlo") return EstimationMode::kMonteCarlo;
  if (text == "quad" || text == "quadrature") return EstimationMode::kQuadrature;
  throw ParseError("expected mc or quad", 0, "--mode");
}

int do_estimate(const EstimateArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  for (const auto& m : a.mechanisms) {
    warn_about_sigma(m, err);
    make_mechanism(m);
  }
  cfg.structures.push_back({stem_of(a.instance), {{stem_of(a.instance), load(a.instance, c).structure}}, false});
  cfg.mechanisms = a.mechanisms;
  cfg.priors = priors_from(c);
  cfg.samples = a.samples;
  cfg.seed = c.seed;
  cfg.mode = mode_of(a.mode);
  cfg.nodes_per_dim = a.nodes;
  cfg.check_nodes = a.check_nodes;
  emit(table_report(cfg), c, out);
  return kOk;
}

struct TableArgs {
  std::string config;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::size_t> check_nodes;
};

int do_table(const TableArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const auto base = std::filesystem::path(a.config).parent_path().string();
  auto cfg = parse_experiment_config(read_text_file(a.config), base.empty() ? "." : base);
  if (a.samples) cfg.samples = *a.samples;
  if (a.seed) cfg.seed = *a.seed;
  if (a.mode) cfg.mode = mode_of(*a.mode);
  if (a.check_nodes) cfg.check_nodes = *a.check_nodes;
  if (!c.distribution.empty()) cfg.priors = priors_from(c);
  for (const auto& m : cfg.mechanisms) warn_about_sigma(m, err);
  emit(table_report(cfg), c, out);
  return kOk;
}

struct RatioArgs {
  std::string instance, mechanism;
  std::size_t samples = 100000;
  std::string mode = "mc";
};

int do_ratio(const RatioArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  warn_about_sigma(a.mechanism, err);
  const auto m = make_mechanism(a.mechanism);
  const auto r = approximation_ratio(*m, load(a.instance, c).structure, priors_from(c),
                                     mode_of(a.mode), a.samples, c.seed);
  std::ostringstream s;
  s << "structure_id,mechanism,mode,ratio,stderr,revenue,benchmark\n"
    << stem_of(a.instance) << ',' << m->id() << ',' << a.mode << ',' << num(r.ratio) << ','
    << num(r.std_error) << ',' << num(r.numerator) << ',' << num(r.denominator) << '\n';
  emit(s.str(), c, out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::vector<double> small_world;  // n degree p
  std::vector<double> random;       // n extra
  std::size_t chain = 0, star = 0, broom = 0;
  std::string catalog;
  std::string attachment = "designated";
  std::size_t links = 1;
  std::string format = "json";
  bool with_valuations = false;
};

std::size_t as_size(double x, const char* flag) {
  if (x < 0 || x != std::floor(x)) throw ParseError("expected a non-negative integer", 0, flag);
  return static_cast<std::size_t>(x);
}

int do_gen(const GenArgs& a, const Common& c, std::ostream& out, std::ostream&) {
  const int chosen = !a.small_world.empty() + !a.random.empty() + (a.chain > 0) + (a.star > 0) +
                     (a.broom > 0) + !a.catalog.empty();
  if (chosen != 1) {
    throw ParseError(
        "pick exactly one of --small-world, --random, --chain, --star, --broom, --catalog", 0,
        "gen");
  }
  StructureProfile s;
  if (!a.small_world.empty()) {
    SellerAttachment attach;
    if (a.attachment == "random") {
      attach.kind = SellerAttachment::Kind::kRandomBuyers;
      attach.random_links = a.links;
    } else if (a.attachment != "designated") {
      throw ParseError("expected designated or random", 0, "--attachment");
    }
    s = generate_small_world(as_size(a.small_world[0], "--small-world"),
                             as_size(a.small_world[1], "--small-world"), a.small_world[2], c.seed,
                             attach);
  } else if (!a.random.empty()) {
    s = generate_random_structure(as_size(a.random[0], "--random"), a.random[1], c.seed);
  } else if (!a.catalog.empty()) {
    const NamedStructure* e = find_structure(a.catalog);
    if (!e) throw ParseError("unknown structure '" + a.catalog + "'", 0, "--catalog");
    s = e->structure;
  } else if (a.chain) {
    s = chain_structure(a.chain);
  } else if (a.star) {
    s = star_structure(a.star);
  } else {
    s = broom_structure(a.broom);
  }
  std::optional<std::vector<double>> valuations;
  if (a.with_valuations) {
    Rng rng = make_stream(c.seed, 1);
    valuations.emplace();
    priors_from(c).sample(s.buyer_count(), rng, *valuations);
  }
  if (a.format == "edges") {
    if (valuations) throw ParseError("edge lists cannot carry valuations", 0, "--format");
    emit(serialize_edge_list(s), c, out);
  } else if (a.format == "json") {
    std::string text = serialize_instance_json(s, valuations);
    if (!text.ends_with('\n')) text += '\n';
    emit(text, c, out);
  } else {
    throw ParseError("expected json or edges", 0, "--format");
  }
  return kOk;
}

void add_common(CLI::App* app, Common& c, bool with_instance_opts = true) {
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--out,-o", c.out_path, "Write output to this file instead of stdout");
  app->add_option("--distribution", c.distribution,
                  R"(Valuation prior as JSON, e.g. {"kind":"uniform","low":0,"high":1})");
  if (with_instance_opts) {
    app->add_option("--seller-node", c.seller_node, "Edge-list node label that is the seller");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diffusion auctions on social networks", "diffauction"};
  app.require_subcommand(1);
  Common common;

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a mechanism on one instance");
  run_cmd->add_option("instance", run_args.instance, "Instance file (JSON or edge list)")
      ->required();
  run_cmd->add_option("mechanism", run_args.mechanism, "Mechanism id")->required();
  auto* vals = run_cmd->add_option("--valuations", run_args.valuations, "Comma-separated values");
  auto* vbids = run_cmd->add_option("--virtual-bids", run_args.virtual_bids,
                                    "Comma-separated virtual bids; prices are virtual too");
  auto* sample = run_cmd->add_option("--sample", run_args.sample, "Draw valuations with this seed");
  vals->excludes(vbids)->excludes(sample);
  vbids->excludes(sample);
  run_cmd->add_flag("--explain", run_args.explain, "Print potential winners and frontier steps");
  add_common(run_cmd, common);

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Check IR, IC and the diffusion axioms");
  verify_cmd->add_option("mechanism", verify_args.mechanism, "Mechanism id or mutant:<name>")
      ->required();
  verify_cmd->add_option("instance", verify_args.instance, "Instance file");
  verify_cmd->add_option("--all-structures", verify_args.all_structures,
                         "Every connected structure with up to this many buyers");
  verify_cmd->add_option("--grid", verify_args.grid_points, "Evenly spaced bid grid points")
      ->check(CLI::Range(2, 1000));
  verify_cmd->add_option("--axiom-trials", verify_args.axiom_trials, "Axiom check trials");
  verify_cmd->add_flag("--sampled", verify_args.sampled, "Random deviations instead of all");
  verify_cmd->add_option("--samples", verify_args.samples, "Draws per buyer in sampled mode");
  verify_cmd->add_flag("--serial", verify_args.serial, "Single-threaded checks");
  add_common(verify_cmd, common);

  EstimateArgs est_args;
  auto* est_cmd = app.add_subcommand("estimate", "Expected revenue on one instance");
  est_cmd->add_option("instance", est_args.instance, "Instance file")->required();
  est_cmd->add_option("mechanisms", est_args.mechanisms, "Mechanism ids")->required();
  est_cmd->add_option("--samples", est_args.samples, "Monte Carlo samples")
      ->check(CLI::PositiveNumber);
  est_cmd->add_option("--mode", est_args.mode, "mc or quad");
  est_cmd->add_option("--nodes", est_args.nodes, "Quadrature nodes per axis");
  est_cmd->add_option("--check-nodes", est_args.check_nodes, "Second node count, 0 to skip");
  add_common(est_cmd, common);

  TableArgs table_args;
  auto* table_cmd = app.add_subcommand("table", "CSV report from an experiment config");
  table_cmd->add_option("--config", table_args.config, "Config JSON")->required();
  table_cmd->add_option("--samples", table_args.samples, "Override samples");
  table_cmd->add_option("--mode", table_args.mode, "Override mode: mc or quad");
  table_cmd->add_option("--check-nodes", table_args.check_nodes, "Override check nodes");
  table_cmd->add_option("--seed", table_args.seed, "Override seed");
  table_cmd->add_option("--out,-o", common.out_path, "Output file");
  table_cmd->add_option("--distribution", common.distribution, "Override the prior");

  RatioArgs ratio_args;
  auto* ratio_cmd = app.add_subcommand("ratio", "Revenue relative to Myerson over all buyers");
  ratio_cmd->add_option("instance", ratio_args.instance, "Instance file")->required();
  ratio_cmd->add_option("mechanism", ratio_args.mechanism, "Mechanism id")->required();
  ratio_cmd->add_option("--samples", ratio_args.samples, "Monte Carlo samples")
      ->check(CLI::PositiveNumber);
  ratio_cmd->add_option("--mode", ratio_args.mode, "mc or quad");
  add_common(ratio_cmd, common);

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance file");
  gen_cmd->add_option("--small-world", gen_args.small_world, "n degree rewire-probability")
      ->expected(3);
  gen_cmd->add_option("--random", gen_args.random, "n extra-edge-probability")->expected(2);
  gen_cmd->add_option("--chain", gen_args.chain, "Chain of n buyers");
  gen_cmd->add_option("--star", gen_args.star, "n buyers all next to the seller");
  gen_cmd->add_option("--broom", gen_args.broom, "Seller to 1 and 2, buyer 1 to k more");
  gen_cmd->add_option("--catalog", gen_args.catalog, "A named table structure, e.g. chain-4");
  gen_cmd->add_option("--attachment", gen_args.attachment, "designated or random");
  gen_cmd->add_option("--links", gen_args.links, "Seller links in random attachment");
  gen_cmd->add_option("--format", gen_args.format, "json or edges");
  gen_cmd->add_flag("--with-valuations", gen_args.with_valuations, "Sample valuations too");
  add_common(gen_cmd, common, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kParseFailed;
  }

  try {
    if (run_cmd->parsed()) return do_run(run_args, common, out, err);
    if (verify_cmd->parsed()) return do_verify(verify_args, common, out, err);
    if (est_cmd->parsed()) return do_estimate(est_args, common, out, err);
    if (table_cmd->parsed()) return do_table(table_args, common, out, err);
    if (ratio_cmd->parsed()) return do_ratio(ratio_args, common, out, err);
    return do_gen(gen_args, common, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseFailed;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return kPreconditionFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kPreconditionFailed;
  }
}

}  // namespace diffauction::cli
