#pragma once

#include "popdyn/config.hpp"
#include "popdyn/dynamics.hpp"
#include "popdyn/model.hpp"
#include "popdyn/oracle.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testing {

using namespace popdyn;

inline std::string fixture(const std::string& name) { return std::string(POPDYN_FIXTURE_DIR) + "/" + name; }

inline PopulationConfig load_fixture(const std::string& name) { return load_population_config(fixture(name)); }
inline PopulationSpec fixture_spec(const std::string& name) { return validate_population(load_fixture(name).raw); }

inline Rational q(const char* s) { return parse_rational(s); }

// A type given by its two utility lines.
inline RawTypeSpec line_type(const char* cs, const char* ci, const char* ds, const char* di, int best, int imit = 0) {
  RawTypeSpec t;
  t.cooperator = UtilityLine{q(cs), q(ci)};
  t.defector = UtilityLine{q(ds), q(di)};
  t.best_responders = best;
  t.imitators = imit;
  return t;
}

// A type with lines crossing at `temper`: coordinating types get uC steeper than uD.
inline RawTypeSpec temper_type(Kind kind, const Rational& temper, int best, int imit = 0) {
  RawTypeSpec t;
  Rational sc = kind == Kind::coordinating ? 2 : -1;
  Rational sd = kind == Kind::coordinating ? -1 : 2;
  t.defector = UtilityLine{sd, 0};
  t.cooperator = UtilityLine{sc, (sd - sc) * temper};
  t.best_responders = best;
  t.imitators = imit;
  return t;
}

// Successors computed straight from the update rules, independently of the oracle kernel.
inline std::set<State> successors_by_rules(const PopulationSpec& pop, const State& x) {
  std::set<State> out;
  for (const AgentRef& a : present_agents(pop, x)) out.insert(step(pop, x, a));
  return out;
}

inline std::vector<State> all_states(const PopulationSpec& pop) {
  StateSpace space(pop);
  std::vector<State> out;
  for (std::uint64_t i = 0; i < space.size(); ++i) out.push_back(space.state(i));
  return out;
}

// Random population with n <= max_n agents and 1 <= b + b' <= max_types. Tempers are
// non-integer rationals with small denominators; slopes and intercepts are small integers
// or halves so that utility ties at integer cooperator counts do occur.
inline RawPopulation random_population(std::mt19937_64& rng, int max_n = 14, int max_types = 3) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  while (true) {
    int types = pick(1, max_types);
    int b = pick(0, types);
    RawPopulation raw;
    std::set<Rational> used_a, used_c;
    int n = 0;
    bool ok = true;
    for (int t = 0; t < types && ok; ++t) {
      Kind kind = t < b ? Kind::anticoordinating : Kind::coordinating;
      int best = pick(0, 4) == 0 ? 1 : pick(1, 5);
      int imit = pick(0, 2) == 0 ? 0 : pick(1, 4);
      n += best + imit;
      Rational temper;
      static const int denominators[] = {2, 4, 10, 3};
      for (int tries = 0;; ++tries) {
        int den = denominators[pick(0, 3)];
        int num = pick(-den, (max_n + 1) * den);
        temper = Rational(num, den);
        auto& used = kind == Kind::anticoordinating ? used_a : used_c;
        if (!is_integer(temper) && !used.count(temper)) {
          used.insert(temper);
          break;
        }
        if (tries > 50) {
          ok = false;
          break;
        }
      }
      Rational sc = Rational(pick(-6, 6), pick(1, 2));
      Rational gap = Rational(pick(1, 6), pick(1, 2));
      Rational sd = kind == Kind::coordinating ? Rational(sc - gap) : Rational(sc + gap);
      Rational di = Rational(pick(-20, 20), pick(1, 2));
      RawTypeSpec spec;
      spec.defector = UtilityLine{sd, di};
      spec.cooperator = UtilityLine{sc, di + (sd - sc) * temper};
      spec.best_responders = best;
      spec.imitators = imit;
      (kind == Kind::anticoordinating ? raw.anticoordinating : raw.coordinating).push_back(spec);
    }
    if (!ok || n > max_n || n == 0) continue;
    return raw;
  }
}

inline RawPopulation random_binary_population(std::mt19937_64& rng, int max_n = 12) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  while (true) {
    int ma = pick(1, 3), na = pick(1, 3), mc = pick(1, 3), nc = pick(1, 4);
    int n = ma + na + mc + nc;
    if (n > max_n) continue;
    auto temper = [&] {
      while (true) {
        Rational t(pick(-2, 4 * (n + 1)), 4);
        if (!is_integer(t)) return t;
      }
    };
    auto lines = [&](Kind kind, int best, int imit) {
      Rational tau = temper();
      Rational sc = Rational(pick(-6, 6), pick(1, 2));
      Rational gap = Rational(pick(1, 6), pick(1, 2));
      Rational sd = kind == Kind::coordinating ? Rational(sc - gap) : Rational(sc + gap);
      Rational di = Rational(pick(-20, 20), pick(1, 2));
      RawTypeSpec s;
      s.defector = UtilityLine{sd, di};
      s.cooperator = UtilityLine{sc, di + (sd - sc) * tau};
      s.best_responders = best;
      s.imitators = imit;
      return s;
    };
    RawPopulation raw;
    raw.anticoordinating.push_back(lines(Kind::anticoordinating, na, ma));
    raw.coordinating.push_back(lines(Kind::coordinating, nc, mc));
    return raw;
  }
}

}  // namespace testing
