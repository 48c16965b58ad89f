// popdyn: simulate, enumerate equilibria, test invariant sets, run the reachability
// oracle, and analyze stochastic stability of a population given as JSON.

#include "popdyn/config.hpp"
#include "popdyn/dynamics.hpp"
#include "popdyn/oracle.hpp"
#include "popdyn/report.hpp"
#include "popdyn/stochastic.hpp"
#include "popdyn/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

using namespace popdyn;

constexpr int kConfigError = 2;
constexpr int kGuardExceeded = 3;
constexpr int kVerificationFailed = 4;

struct Options {
  std::string config;
  std::string out;
  std::uint64_t max_states = 0;
  unsigned threads = 1;
  bool verify = false;
  bool no_oracle = false;
  std::int64_t steps = 1000;
  std::optional<std::uint64_t> seed;
  std::string csv;
  std::string initial = "all-defect";
  std::vector<std::string> epsilons;
  std::string adjacency;
  std::string dot;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  return f;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
  } else {
    auto f = open_output(o.out);
    f << text;
  }
}

std::uint64_t guard(const Options& o) { return o.max_states ? o.max_states : max_states_from_env(); }

State parse_initial(const PopulationSpec& pop, const std::string& spec) {
  if (spec == "all-defect") return all_defect(pop);
  if (spec == "all-cooperate") return all_cooperate(pop);
  State x;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      x.counts.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("bad --initial entry '" + item + "'");
    }
  }
  if (x.counts.size() != pop.cells().size() || !in_bounds(pop, x))
    throw UsageError("--initial needs " + std::to_string(pop.cells().size()) + " in-range cell counts");
  return x;
}

// Verification results go into the report; a failing check turns the exit code to 4.
int finish(const Options& o, nlohmann::json report, const std::vector<Check>* checks) {
  int code = 0;
  if (checks) {
    report["verification"] = checks_json(*checks);
    report["verified"] = all_pass(*checks);
    for (const Check& c : *checks)
      if (!c.pass) std::cerr << "verification failed: " << c.name << ": " << c.detail << '\n';
    if (!all_pass(*checks)) code = kVerificationFailed;
  }
  emit(o, report.dump(2) + "\n");
  return code;
}

int cmd_simulate(const Options& o, const PopulationConfig& cfg) {
  PopulationSpec pop = validate_population(cfg.raw);
  if (!o.seed) throw UsageError("simulate needs --seed");
  if (o.steps < 0) throw UsageError("--steps must be non-negative");
  State x0 = parse_initial(pop, o.initial);
  ActivationPolicy policy = UniformRandom{*o.seed};
  if (cfg.activation) {
    BinaryTypePopulation bpop(pop, cfg.activation);
    const ActivationWeights& w = bpop.weights();
    policy = Weighted{{to_double(w.anticoordinating_imitators), to_double(w.coordinating_imitators),
                       to_double(w.nonconformists), to_double(w.conformists)},
                      *o.seed};
  }
  Trajectory traj = simulate(pop, x0, policy, o.steps);
  if (o.csv.empty() || o.csv == "-") {
    write_trajectory_csv(std::cout, pop, traj);
  } else {
    auto f = open_output(o.csv);
    write_trajectory_csv(f, pop, traj);
  }
  return 0;
}

int cmd_equilibria(const Options& o, const PopulationConfig& cfg) {
  PopulationSpec pop = validate_population(cfg.raw);
  nlohmann::json report = equilibria_report(pop);
  if (!o.verify) return finish(o, report, nullptr);
  TransitionDigraph g = build_transition_digraph(pop, guard(o), o.threads);
  std::vector<Check> checks = verify_equilibria(g);
  return finish(o, report, &checks);
}

int cmd_invariants(const Options& o, const PopulationConfig& cfg) {
  PopulationSpec pop = validate_population(cfg.raw);
  if (o.no_oracle && o.verify) throw UsageError("--verify needs the oracle");
  std::unique_ptr<TransitionDigraph> g;
  if (!o.no_oracle) g = std::make_unique<TransitionDigraph>(build_transition_digraph(pop, guard(o), o.threads));
  nlohmann::json report = invariants_report(pop, g.get(), guard(o));
  if (!o.verify) return finish(o, report, nullptr);
  std::vector<Check> checks = verify_invariants(*g, guard(o));
  return finish(o, report, &checks);
}

int cmd_oracle(const Options& o, const PopulationConfig& cfg) {
  PopulationSpec pop = validate_population(cfg.raw);
  TransitionDigraph g = build_transition_digraph(pop, guard(o), o.threads);
  if (!o.adjacency.empty()) {
    auto f = open_output(o.adjacency);
    write_adjacency(f, g);
  }
  nlohmann::json report = oracle_report(g);
  if (!o.verify) return finish(o, report, nullptr);
  std::vector<Check> checks = verify_equilibria(g);
  for (Check& c : verify_invariants(g, guard(o))) checks.push_back(std::move(c));
  return finish(o, report, &checks);
}

int cmd_stochastic(const Options& o, const PopulationConfig& cfg) {
  BinaryTypePopulation bpop(validate_population(cfg.raw), cfg.activation);
  if (bpop.state_count() > guard(o))
    throw StateSpaceTooLarge(std::to_string(bpop.state_count()) + " states exceed the guard");
  std::vector<Rational> eps;
  for (const std::string& e : o.epsilons) {
    Rational v = parse_rational(e);
    if (v <= 0 || v >= 1) throw UsageError("--epsilon must lie in (0,1)");
    eps.push_back(v);
  }
  StochasticModel model(std::move(bpop));
  std::vector<StationaryRun> runs;
  for (const Rational& e : eps) runs.push_back({e, stationary_distribution(build_chain(model.population(), e))});
  if (!o.dot.empty()) {
    auto f = open_output(o.dot);
    write_class_dot(f, model);
  }
  nlohmann::json report = stochastic_report(model, runs);
  if (!o.verify) return finish(o, report, nullptr);
  std::vector<Check> checks = verify_stochastic(model, eps);
  return finish(o, report, &checks);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous best-response and imitation dynamics: simulation and analysis"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "population JSON")->required();
    sub->add_option("--max-states", o.max_states, "state-space guard (default 1000000 or POPDYN_MAX_STATES)");
    sub->add_option("--out", o.out, "write the report here instead of stdout");
  };
  auto analysis = [&](CLI::App* sub) {
    common(sub);
    sub->add_flag("--verify", o.verify, "cross-check closed forms against the oracle; exit 4 on disagreement");
    sub->add_option("--threads", o.threads, "oracle construction threads")->check(CLI::PositiveNumber);
  };

  CLI::App* sim = app.add_subcommand("simulate", "simulate a trajectory and write CSV");
  common(sim);
  sim->add_option("--steps", o.steps, "number of activations");
  sim->add_option("--seed", o.seed, "RNG seed");
  sim->add_option("--csv", o.csv, "CSV output path (default stdout)");
  sim->add_option("--initial", o.initial, "all-defect | all-cooperate | comma list of cell counts");

  CLI::App* eq = app.add_subcommand("equilibria", "closed-form equilibria and stability");
  analysis(eq);
  CLI::App* inv = app.add_subcommand("invariants", "benchmark-index invariant sets");
  analysis(inv);
  inv->add_flag("--no-oracle", o.no_oracle, "skip minimal invariant sets");
  CLI::App* orc = app.add_subcommand("oracle", "brute-force transition digraph");
  analysis(orc);
  orc->add_option("--adjacency", o.adjacency, "write the adjacency list here");
  CLI::App* sto = app.add_subcommand("stochastic", "stochastic stability of a binary-type population");
  analysis(sto);
  sto->add_option("--epsilon", o.epsilons, "mistake probability, repeatable");
  sto->add_option("--dot", o.dot, "write the class cost digraph as DOT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    PopulationConfig cfg = load_population_config(o.config);
    if (sim->parsed()) return cmd_simulate(o, cfg);
    if (eq->parsed()) return cmd_equilibria(o, cfg);
    if (inv->parsed()) return cmd_invariants(o, cfg);
    if (orc->parsed()) return cmd_oracle(o, cfg);
    return cmd_stochastic(o, cfg);
  } catch (const StateSpaceTooLarge& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kGuardExceeded;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const PopulationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const NotBinaryType& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
  }
  return kConfigError;
}
