#include "popdyn/stochastic.hpp"

#include "popdyn/dynamics.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace popdyn {

std::string format_state(const RefinedState& s) {
  return format_tuple({s.x1I, s.xa, s.x2I, s.xc});
}

BinaryTypePopulation::BinaryTypePopulation(PopulationSpec spec, std::optional<ActivationWeights> weights)
    : spec_(std::move(spec)) {
  if (spec_.b() != 1 || spec_.b_prime() != 1)
    throw NotBinaryType("need exactly one anticoordinating and one coordinating type");
  const auto& a = spec_.types(Kind::anticoordinating)[0];
  const auto& c = spec_.types(Kind::coordinating)[0];
  ma_ = a.imitators;
  na_ = a.best_responders;
  mc_ = c.imitators;
  nc_ = c.best_responders;
  if (ma_ < 1 || na_ < 1 || mc_ < 1 || nc_ < 1)
    throw NotBinaryType("every subpopulation needs at least one agent");
  if (weights) {
    weights_ = *weights;
  } else {
    Rational p = Rational(1) / n();
    weights_ = {p, p, p, p};
  }
  const ActivationWeights& w = weights_;
  if (w.anticoordinating_imitators <= 0 || w.nonconformists <= 0 || w.coordinating_imitators <= 0 ||
      w.conformists <= 0)
    throw ConfigError("activation weights must be positive");
  Rational total = ma_ * w.anticoordinating_imitators + na_ * w.nonconformists +
                   mc_ * w.coordinating_imitators + nc_ * w.conformists;
  if (total != 1) throw ConfigError("activation weights must sum to 1 over all agents, got " + to_string(total));
}

std::size_t BinaryTypePopulation::state_count() const {
  return static_cast<std::size_t>(ma_ + 1) * (na_ + 1) * (mc_ + 1) * (nc_ + 1);
}

std::size_t BinaryTypePopulation::index(const RefinedState& s) const {
  return ((static_cast<std::size_t>(s.x1I) * (na_ + 1) + s.xa) * (mc_ + 1) + s.x2I) * (nc_ + 1) + s.xc;
}

RefinedState BinaryTypePopulation::state(std::size_t i) const {
  RefinedState s;
  s.xc = static_cast<int>(i % (nc_ + 1));
  i /= nc_ + 1;
  s.x2I = static_cast<int>(i % (mc_ + 1));
  i /= mc_ + 1;
  s.xa = static_cast<int>(i % (na_ + 1));
  s.x1I = static_cast<int>(i / (na_ + 1));
  return s;
}

bool BinaryTypePopulation::contains(const RefinedState& s) const {
  return s.x1I >= 0 && s.x1I <= ma_ && s.xa >= 0 && s.xa <= na_ && s.x2I >= 0 && s.x2I <= mc_ && s.xc >= 0 &&
         s.xc <= nc_;
}

// Cell order of the general model: imitators a, imitators c, best-responders a, c.
State BinaryTypePopulation::to_state(const RefinedState& s) const { return State{{s.x1I, s.x2I, s.xa, s.xc}}; }

RefinedState BinaryTypePopulation::from_state(const State& x) const {
  return {x.counts.at(0), x.counts.at(2), x.counts.at(1), x.counts.at(3)};
}

PerturbedChain build_chain(const BinaryTypePopulation& bpop, const Rational& epsilon) {
  if (epsilon < 0 || epsilon >= 1) throw std::invalid_argument("epsilon must lie in [0,1)");
  const PopulationSpec& pop = bpop.spec();
  const ActivationWeights& w = bpop.weights();
  const Rational cell_weight[4] = {w.anticoordinating_imitators, w.coordinating_imitators, w.nonconformists,
                                   w.conformists};
  const std::size_t N = bpop.state_count();

  PerturbedChain chain;
  chain.epsilon = epsilon;
  chain.moves.resize(N);
  std::vector<Eigen::Triplet<Rational>> triplets;
  std::vector<std::vector<std::uint32_t>> support(N);
  const auto& cells = pop.cells();

  for (std::size_t i = 0; i < N; ++i) {
    State x = bpop.to_state(bpop.state(i));
    const int nC = x.cooperators();
    for (int c = 0; c < 4; ++c) {
      for (Strategy current : {Strategy::cooperate, Strategy::defect}) {
        int k = current == Strategy::cooperate ? x.counts[c] : cells[c].capacity - x.counts[c];
        if (k == 0) continue;
        Strategy next;
        if (cells[c].role == Role::imitator) {
          next = imitation_next(pop, x, current);
        } else {
          const AgentTypeSpec& t = pop.type(cells[c].type);
          next = best_response_next(t.kind, t.temper, current, nC);
        }
        auto destination = [&](Strategy chosen) {
          State y = x;
          if (chosen != current) y.counts[c] += chosen == Strategy::cooperate ? 1 : -1;
          return static_cast<std::uint32_t>(bpop.index(bpop.from_state(y)));
        };
        Move mv{k * cell_weight[c], destination(next), destination(opposite(next))};
        triplets.emplace_back(i, mv.intended, mv.mass * (1 - epsilon));
        if (epsilon != 0) triplets.emplace_back(i, mv.opposite, mv.mass * epsilon);
        support[i].push_back(mv.intended);
        chain.moves[i].push_back(std::move(mv));
      }
    }
    std::sort(support[i].begin(), support[i].end());
    support[i].erase(std::unique(support[i].begin(), support[i].end()), support[i].end());
  }
  chain.P.resize(N, N);
  chain.P.setFromTriplets(triplets.begin(), triplets.end());
  chain.P.makeCompressed();
  chain.support = csr_from_lists(support);
  return chain;
}

int CostGraph::edge_cost(std::uint32_t from, std::uint32_t to) const {
  if (from == to) return 0;
  for (auto [v, c] : edges.at(from))
    if (v == to) return c;
  return kInfiniteCost;
}

CostGraph cost_graph(const PerturbedChain& chain) {
  CostGraph g;
  g.edges.resize(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    std::map<std::uint32_t, int> best;
    auto offer = [&](std::uint32_t v, int c) {
      if (v == i) return;
      auto [it, fresh] = best.emplace(v, c);
      if (!fresh) it->second = std::min(it->second, c);
    };
    for (const Move& mv : chain.moves[i]) {
      offer(mv.intended, 0);
      offer(mv.opposite, 1);
    }
    g.edges[i].assign(best.begin(), best.end());
  }
  return g;
}

int cost(const CostGraph& g, const std::vector<std::uint32_t>& U, const std::vector<std::uint32_t>& V,
         const std::vector<bool>* blocked) {
  const std::size_t N = g.edges.size();
  std::vector<bool> target(N, false);
  for (auto v : V) target.at(v) = true;
  std::vector<int> dist(N, kInfiniteCost);
  std::deque<std::uint32_t> queue;
  for (auto u : U) {
    if (target[u]) return 0;
    dist.at(u) = 0;
    queue.push_back(u);
  }
  while (!queue.empty()) {
    std::uint32_t u = queue.front();
    queue.pop_front();
    if (target[u]) return dist[u];
    for (auto [v, c] : g.edges[u]) {
      if (blocked && (*blocked)[v] && !target[v]) continue;
      int d = dist[u] + c;
      if (d < dist[v]) {
        dist[v] = d;
        if (c == 0)
          queue.push_front(v);
        else
          queue.push_back(v);
      }
    }
  }
  return kInfiniteCost;
}

std::vector<std::vector<std::uint32_t>> recurrent_classes(const PerturbedChain& chain) {
  return sink_components(chain.support);
}

int gamma_brute_force(const std::vector<std::vector<int>>& W, int root) {
  const int k = static_cast<int>(W.size());
  std::vector<int> parent(k, -1);
  int best = kInfiniteCost;

  auto reaches_root = [&](int v) {
    for (int steps = 0; steps <= k; ++steps) {
      if (v == root) return true;
      v = parent[v];
    }
    return false;
  };
  std::function<void(int, int)> assign = [&](int v, int acc) {
    if (acc >= best) return;
    if (v == k) {
      for (int u = 0; u < k; ++u)
        if (!reaches_root(u)) return;
      best = acc;
      return;
    }
    if (v == root) return assign(v + 1, acc);
    for (int p = 0; p < k; ++p) {
      if (p == v || W[v][p] >= kInfiniteCost) continue;
      parent[v] = p;
      assign(v + 1, acc + W[v][p]);
    }
    parent[v] = -1;
  };
  assign(0, 0);
  return best;
}

int gamma_arborescence(const std::vector<std::vector<int>>& W, int root) {
  // Chu-Liu/Edmonds on the reversed digraph: an in-tree towards root becomes an out-tree from it.
  struct Edge {
    int u, v;
    long long w;
  };
  int n = static_cast<int>(W.size());
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && W[i][j] < kInfiniteCost) edges.push_back({j, i, W[i][j]});
  const long long inf = std::numeric_limits<long long>::max() / 4;
  long long total = 0;
  while (true) {
    std::vector<long long> in(n, inf);
    std::vector<int> pre(n, -1);
    for (const Edge& e : edges)
      if (e.u != e.v && e.w < in[e.v]) {
        in[e.v] = e.w;
        pre[e.v] = e.u;
      }
    for (int i = 0; i < n; ++i)
      if (i != root && in[i] == inf) return kInfiniteCost;
    int count = 0;
    std::vector<int> id(n, -1), seen(n, -1);
    in[root] = 0;
    for (int i = 0; i < n; ++i) {
      total += in[i];
      int v = i;
      while (seen[v] != i && id[v] == -1 && v != root) {
        seen[v] = i;
        v = pre[v];
      }
      if (v != root && id[v] == -1) {
        for (int u = pre[v]; u != v; u = pre[u]) id[u] = count;
        id[v] = count++;
      }
    }
    if (count == 0) break;
    for (int i = 0; i < n; ++i)
      if (id[i] == -1) id[i] = count++;
    for (Edge& e : edges) {
      int v = e.v;
      e.u = id[e.u];
      e.v = id[e.v];
      if (e.u != e.v) e.w -= in[v];
    }
    n = count;
    root = id[root];
  }
  return static_cast<int>(total);
}

StochasticModel::StochasticModel(BinaryTypePopulation bpop)
    : bpop_(std::move(bpop)), chain0_(build_chain(bpop_, 0)), costs_(cost_graph(chain0_)) {
  ClassAnalysis& a = analysis_;
  const std::size_t N = chain0_.size();
  a.classes = recurrent_classes(chain0_);
  const int k = static_cast<int>(a.classes.size());
  a.class_of.assign(N, -1);
  for (int c = 0; c < k; ++c)
    for (auto s : a.classes[c]) a.class_of[s] = c;

  // Which classes each state can reach in the unperturbed support.
  std::vector<std::vector<std::uint32_t>> reverse(N);
  for (std::size_t u = 0; u < N; ++u)
    for (auto v : chain0_.support.successors(u))
      if (v != u) reverse[v].push_back(static_cast<std::uint32_t>(u));
  Csr back = csr_from_lists(reverse);
  std::vector<int> reachable_classes(N, 0);
  std::vector<std::vector<bool>> reaches(k);
  for (int c = 0; c < k; ++c) {
    reaches[c] = forward_closure(back, a.classes[c]);
    for (std::size_t s = 0; s < N; ++s) reachable_classes[s] += reaches[c][s];
  }
  a.basins.resize(k);
  a.radii.resize(k);
  for (int c = 0; c < k; ++c) {
    std::vector<std::uint32_t> outside;
    for (std::size_t s = 0; s < N; ++s) {
      if (reaches[c][s] && reachable_classes[s] == 1)
        a.basins[c].push_back(static_cast<std::uint32_t>(s));
      else
        outside.push_back(static_cast<std::uint32_t>(s));
    }
    a.radii[c] = outside.empty() ? kInfiniteCost : cost(costs_, a.classes[c], outside);
  }

  a.weights.assign(k, std::vector<int>(k, 0));
  segment_.assign(k, std::vector<int>(k, 0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      a.weights[i][j] = cost(costs_, a.classes[i], a.classes[j]);
      std::vector<bool> blocked(N, false);
      for (std::size_t s = 0; s < N; ++s) blocked[s] = a.class_of[s] >= 0 && a.class_of[s] != i;
      segment_[i][j] = cost(costs_, a.classes[i], a.classes[j], &blocked);
    }

  const bool brute = k <= 9;
  for (int c = 0; c < k; ++c) {
    int arb = gamma_arborescence(a.weights, c);
    a.gamma.push_back(brute ? gamma_brute_force(a.weights, c) : arb);
    if (brute) a.gamma_check.push_back(arb);
  }
  int best = *std::min_element(a.gamma.begin(), a.gamma.end());
  for (int c = 0; c < k; ++c)
    if (a.gamma[c] == best) a.stable_classes.push_back(c);
}

std::vector<std::uint32_t> StochasticModel::stochastically_stable_set() const {
  std::vector<std::uint32_t> out;
  for (int c : analysis_.stable_classes)
    out.insert(out.end(), analysis_.classes[c].begin(), analysis_.classes[c].end());
  std::sort(out.begin(), out.end());
  return out;
}

int StochasticModel::cost_between(const std::vector<RefinedState>& U, const std::vector<RefinedState>& V) const {
  std::vector<std::uint32_t> u, v;
  for (const auto& s : U) u.push_back(static_cast<std::uint32_t>(bpop_.index(s)));
  for (const auto& s : V) v.push_back(static_cast<std::uint32_t>(bpop_.index(s)));
  return cost(costs_, u, v);
}

int StochasticModel::class_containing(const RefinedState& s) const {
  if (!bpop_.contains(s)) return -1;
  return analysis_.class_of[bpop_.index(s)];
}

int StochasticModel::modified_cost(std::uint32_t x, int target) const {
  const ClassAnalysis& a = analysis_;
  const int k = static_cast<int>(a.classes.size());
  if (a.class_of.at(x) == target) throw std::invalid_argument("state lies in the target class");

  // Path cost so far, minus the radii of every class left after the first one.
  int best = kInfiniteCost;
  std::vector<bool> used(k, false);
  std::function<void(int, int, bool)> extend = [&](int cur, int acc, bool first) {
    if (cur == target) {
      best = std::min(best, acc);
      return;
    }
    used[cur] = true;
    for (int next = 0; next < k; ++next) {
      if (used[next] || segment_[cur][next] >= kInfiniteCost) continue;
      if (!first && a.radii[cur] >= kInfiniteCost) continue;
      extend(next, acc + segment_[cur][next] - (first ? 0 : a.radii[cur]), false);
    }
    used[cur] = false;
  };

  if (a.class_of[x] >= 0) {
    extend(a.class_of[x], 0, true);
  } else {
    std::vector<bool> blocked(a.class_of.size());
    for (int j = 0; j < k; ++j) {
      for (std::size_t s = 0; s < blocked.size(); ++s) blocked[s] = a.class_of[s] >= 0 && a.class_of[s] != j;
      int start = cost(costs_, {x}, a.classes[j], &blocked);
      if (start < kInfiniteCost) extend(j, start, true);
    }
  }
  return best;
}

namespace {

Eigen::Matrix<double, Eigen::Dynamic, 1> to_double(const Eigen::Matrix<Rational, Eigen::Dynamic, 1>& v) {
  Eigen::Matrix<double, Eigen::Dynamic, 1> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = popdyn::to_double(v[i]);
  return out;
}

}  // namespace

StationaryDistribution stationary_distribution(const PerturbedChain& chain) {
  if (chain.epsilon <= 0) throw std::invalid_argument("stationary distribution needs epsilon > 0");
  const Eigen::Index N = static_cast<Eigen::Index>(chain.size());
  StationaryDistribution out;

  // mu (P - I) = 0 with the last equation replaced by sum(mu) = 1.
  Eigen::SparseMatrix<double, Eigen::RowMajor> Pd = chain.P.unaryExpr([](const Rational& r) {
    return popdyn::to_double(r);
  });
  Eigen::Matrix<double, Eigen::Dynamic, 1> mu;
  if (static_cast<std::size_t>(N) <= kExactSolveLimit) {
    using Mat = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
    Mat A = Mat(chain.P.transpose()) - Mat::Identity(N, N);
    A.row(N - 1).setConstant(Rational(1));
    Vec rhs = Vec::Zero(N);
    rhs[N - 1] = 1;
    Eigen::PartialPivLU<Mat> lu(A);
    Vec x = lu.solve(rhs);
    if (A * x != rhs) throw SingularSystem("stationary system is singular");
    out.exact = std::vector<Rational>(x.begin(), x.end());
    mu = to_double(x);
  } else {
    std::vector<Eigen::Triplet<double>> entries;
    for (int i = 0; i < Pd.outerSize(); ++i)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Pd, i); it; ++it)
        if (it.col() != N - 1) entries.emplace_back(it.col(), it.row(), it.value());
    for (Eigen::Index i = 0; i + 1 < N; ++i) entries.emplace_back(i, i, -1.0);
    for (Eigen::Index j = 0; j < N; ++j) entries.emplace_back(N - 1, j, 1.0);
    Eigen::SparseMatrix<double> Ar(N, N);
    Ar.setFromTriplets(entries.begin(), entries.end());
    Ar.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(Ar);
    if (lu.info() != Eigen::Success) throw SingularSystem("stationary system is singular");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
    rhs[N - 1] = 1.0;
    mu = lu.solve(rhs);
    for (int round = 0; round < 8; ++round) {
      Eigen::VectorXd r = rhs - Ar * mu;
      if (r.lpNorm<1>() <= 1e-15) break;
      mu += lu.solve(r);
    }
  }
  out.probabilities.assign(mu.data(), mu.data() + N);
  Eigen::RowVectorXd row = mu.transpose();
  out.residual = (row * Pd - row).lpNorm<1>();
  return out;
}

RefinedState corresponding_extreme(const BinaryTypePopulation& bpop, const RefinedState& s) {
  const int r = s.x1I + s.x2I;
  if (!bpop.contains(s) || r < 1 || r > bpop.m() - 1) throw NotMixed(format_state(s) + " is not mixed");
  if (s.xa == bpop.na() && s.xc == 0) return {0, bpop.na(), 0, 0};
  if (s.xa == 0 && s.xc == bpop.nc()) return {bpop.ma(), 0, bpop.mc(), bpop.nc()};
  throw NotMixed(format_state(s) + " has no corresponding extreme state");
}

const char* to_string(HypothesisStatus h) {
  switch (h) {
    case HypothesisStatus::holds: return "holds";
    case HypothesisStatus::fails: return "fails";
    case HypothesisStatus::vacuous: return "vacuous";
  }
  return "?";
}

ExtremeTheoremVerdict check_extreme_theorem(const StochasticModel& model) {
  const BinaryTypePopulation& bpop = model.population();
  const ClassAnalysis& a = model.analysis();
  ExtremeTheoremVerdict v;

  std::vector<bool> equilibrium(bpop.state_count(), false);
  for (const auto& cls : a.classes)
    if (cls.size() == 1) equilibrium[cls[0]] = true;
  auto is_mixed = [&](const RefinedState& s) {
    int r = s.x1I + s.x2I;
    return r >= 1 && r <= bpop.m() - 1;
  };

  bool any_equilibrium = std::find(equilibrium.begin(), equilibrium.end(), true) != equilibrium.end();
  v.hypothesis = any_equilibrium ? HypothesisStatus::holds : HypothesisStatus::vacuous;
  for (std::size_t i = 0; i < equilibrium.size(); ++i) {
    RefinedState s = bpop.state(i);
    if (!equilibrium[i] || !is_mixed(s)) continue;
    ExtremeTheoremVerdict::Pairing p{s, s, false};
    try {
      p.extreme = corresponding_extreme(bpop, s);
      p.extreme_is_equilibrium = equilibrium[bpop.index(p.extreme)];
    } catch (const NotMixed&) {
    }
    if (!p.extreme_is_equilibrium) v.hypothesis = HypothesisStatus::fails;
    v.pairings.push_back(p);
  }

  for (auto i : model.stochastically_stable_set()) {
    RefinedState s = bpop.state(i);
    v.stable_states.push_back(s);
    if (equilibrium[i]) {
      v.stable_set_has_equilibrium = true;
      if (!is_mixed(s)) v.stable_set_has_extreme_equilibrium = true;
    }
  }
  v.conclusion_holds = !v.stable_set_has_equilibrium || v.stable_set_has_extreme_equilibrium;
  switch (v.hypothesis) {
    case HypothesisStatus::vacuous: v.conclusion = "trivially consistent"; break;
    case HypothesisStatus::holds: v.conclusion = v.conclusion_holds ? "verified" : "violated"; break;
    case HypothesisStatus::fails: v.conclusion = "not applicable"; break;
  }
  return v;
}

void write_class_dot(std::ostream& out, const StochasticModel& model) {
  const ClassAnalysis& a = model.analysis();
  const BinaryTypePopulation& bpop = model.population();
  out << "digraph classes {\n";
  for (std::size_t c = 0; c < a.classes.size(); ++c) {
    std::ostringstream label;
    for (std::size_t i = 0; i < a.classes[c].size(); ++i)
      label << (i ? "\\n" : "") << format_state(bpop.state(a.classes[c][i]));
    bool stable = std::find(a.stable_classes.begin(), a.stable_classes.end(), static_cast<int>(c)) !=
                  a.stable_classes.end();
    out << "  k" << c << " [label=\"" << label.str() << "\\ngamma=" << a.gamma[c] << "\""
        << (stable ? ", peripheries=2" : "") << "];\n";
  }
  for (std::size_t i = 0; i < a.classes.size(); ++i)
    for (std::size_t j = 0; j < a.classes.size(); ++j)
      if (i != j) out << "  k" << i << " -> k" << j << " [label=\"" << a.weights[i][j] << "\"];\n";
  out << "}\n";
}

}  // namespace popdyn
