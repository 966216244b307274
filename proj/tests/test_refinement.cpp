#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "doctest.h"
#include "sudakov/refinement.hpp"
#include "test_support.hpp"

using namespace sudakov;
using testing_support::rand_vec;
using Q = Rational;

namespace {

std::vector<PlanEntry<Q>> restrict_to(const std::vector<PlanEntry<Q>>& entries,
                                      const std::vector<int>& members) {
  std::vector<PlanEntry<Q>> out;
  for (const auto& e : entries)
    if (std::binary_search(members.begin(), members.end(), e.i)) out.push_back(e);
  return out;
}

// Graph with `s` sources and `t` targets from explicit edge lists.
CarriageGraph<Q> manual_graph(int s, int t, const std::vector<std::pair<int, int>>& fwd,
                              const std::vector<std::pair<int, int>>& ret) {
  CarriageGraph<Q> g;
  g.sources.resize(s);
  g.targets.resize(t);
  std::iota(g.sources.begin(), g.sources.end(), 0);
  std::iota(g.targets.begin(), g.targets.end(), 0);
  g.forward.assign(s, {});
  g.back.assign(t, {});
  for (auto [a, b] : fwd) g.forward[a].push_back(b);
  for (auto [a, b] : ret) g.back[a].push_back(b);
  return g;
}

CarriageGraph<Q> random_graph(std::mt19937_64& rng, int s, int t) {
  std::vector<std::pair<int, int>> fwd, ret;
  for (int a = 0; a < s; ++a) {
    fwd.push_back({a, static_cast<int>(rng() % t)});
    if (rng() % 3 == 0) fwd.push_back({a, static_cast<int>(rng() % t)});
  }
  for (int b = 0; b < t; ++b)
    for (int a = 0; a < s; ++a)
      if (rng() % 4 == 0) ret.push_back({b, a});
  auto g = manual_graph(s, t, fwd, ret);
  for (auto& f : g.forward) {
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
  }
  return g;
}

// Exhaustive enumeration of all alternating paths with at most `len` edges.
std::set<int> path_oracle(const CarriageGraph<Q>& g, int seed, int len) {
  const int S = g.num_sources();
  std::set<int> seen;
  std::function<void(int, int)> walk = [&](int v, int left) {
    seen.insert(v);
    if (left == 0) return;
    if (v < S)
      for (int t : g.forward[v]) walk(S + t, left - 1);
    else
      for (int s : g.back[v - S]) walk(s, left - 1);
  };
  walk(seed, len);
  return seen;
}

// Tarjan's algorithm on the source-to-source digraph (s -> t -> s').
std::vector<int> tarjan_components(const CarriageGraph<Q>& g) {
  const int S = g.num_sources();
  std::vector<std::vector<int>> adj(S);
  for (int s = 0; s < S; ++s)
    for (int t : g.forward[s])
      for (int s2 : g.back[t]) adj[s].push_back(s2);
  std::vector<int> index(S, -1), low(S, 0), comp(S, -1), stack;
  std::vector<char> on(S, 0);
  int counter = 0, ncomp = 0;
  std::function<void(int)> dfs = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on[v] = 1;
    for (int w : adj[v]) {
      if (index[w] < 0) {
        dfs(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on[w] = 0;
        comp[w] = ncomp;
      } while (w != v);
      ++ncomp;
    }
  };
  for (int v = 0; v < S; ++v)
    if (index[v] < 0) dfs(v);
  return comp;
}

// Same partition of 0..n-1 given by two labelings.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> ab, ba;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (ab.count(a[k]) && ab[a[k]] != b[k]) return false;
    if (ba.count(b[k]) && ba[b[k]] != a[k]) return false;
    ab[a[k]] = b[k];
    ba[b[k]] = a[k];
  }
  return true;
}

template <typename T>
void check_witness(const TransportInstance<T>& inst, const PolyhedralCost<T>& cost,
                   const SubClass<T>& sc) {
  REQUIRE(sc.witness.size() >= 3);
  CHECK(sc.witness.front() == sc.witness.back());
  std::set<int> visited;
  for (std::size_t k = 0; k + 1 < sc.witness.size(); ++k) {
    const auto& a = sc.witness[k];
    const auto& b = sc.witness[k + 1];
    REQUIRE(a.target != b.target);
    if (!a.target) {
      visited.insert(a.index);
      bool pair = std::any_of(sc.entries.begin(), sc.entries.end(),
                              [&](const PlanEntry<T>& e) { return e.i == a.index && e.j == b.index; });
      CHECK(pair);
    } else {
      CHECK(face_contains(cost, sc.face, sub(inst.nu_points[a.index], inst.mu_points[b.index])));
    }
  }
  CHECK(visited == std::set<int>(sc.members.begin(), sc.members.end()));
}

}  // namespace

TEST_CASE("reach sets: small examples and the exhaustive path oracle") {
  auto single = manual_graph(1, 1, {{0, 0}}, {});
  auto h = reach_set(single, 0);
  CHECK(h == std::vector<char>{1, 1});

  // 3-cycle of pairs: s0->t0->s1->t1->s2->t2->s0
  auto cyc = manual_graph(3, 3, {{0, 0}, {1, 1}, {2, 2}}, {{0, 1}, {1, 2}, {2, 0}});
  for (int s = 0; s < 3; ++s) {
    auto r = reach_set(cyc, s);
    CHECK(std::count(r.begin(), r.end(), 1) == 6);
  }
  auto th = theta_prime(cyc);
  CHECK(indecomposable_classes(cyc, th).size() == 1);

  auto empty_seed = manual_graph(2, 1, {{0, 0}}, {});
  CHECK_THROWS_AS(reach_set(empty_seed, 1), InputError);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    int s = 1 + static_cast<int>(rng() % 5), t = 1 + static_cast<int>(rng() % 5);
    auto g = random_graph(rng, s, t);
    for (int seed = 0; seed < s; ++seed) {
      auto r = reach_set(g, seed);
      auto oracle = path_oracle(g, seed, 10);
      std::set<int> got;
      for (int v = 0; v < g.num_nodes(); ++v)
        if (r[v]) got.insert(v);
      CHECK(got == oracle);
    }
  }
}

TEST_CASE("theta' digits") {
  // everything reachable from the only seed
  auto one = manual_graph(1, 2, {{0, 0}, {0, 1}}, {});
  for (const auto& d : theta_prime(one)) {
    CHECK(digits_string(d) == "2");
    CHECK(digits_value(d) == doctest::Approx(2.0 / 3.0));
  }
  // two components; seed 1 reaches seed 0 but not conversely
  auto two = manual_graph(2, 2, {{0, 0}, {1, 1}}, {{1, 0}});
  auto th = theta_prime(two);
  CHECK(digits_string(th[0]) == "22");
  CHECK(digits_string(th[2]) == "22");
  CHECK(digits_string(th[1]) == "02");
  CHECK(digits_string(th[3]) == "02");
  CHECK(digits_value(th[0]) == doctest::Approx(2.0 / 3.0 + 2.0 / 9.0));
  CHECK(digits_value(th[1]) == doctest::Approx(2.0 / 9.0));
  CHECK(indecomposable_classes(two, th).size() == 2);

  // digit-set oracle on random graphs, and equal values on every support pair
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_graph(rng, 1 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 6));
    auto t = theta_prime(g);
    const int S = g.num_sources();
    for (int v = 0; v < g.num_nodes(); ++v)
      for (int n = 0; n < S; ++n) CHECK(t[v][n] == (path_oracle(g, n, 12).count(v) == 1));
  }
}

TEST_CASE("SCCs coincide with theta' level classes") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = random_graph(rng, 1 + static_cast<int>(rng() % 12), 1 + static_cast<int>(rng() % 12));
    auto th = theta_prime(g);
    auto comps = indecomposable_classes(g, th);
    std::vector<int> label(g.num_sources());
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (int s : comps[c]) label[s] = static_cast<int>(c);
    CHECK(same_partition(label, tarjan_components(g)));
  }
}

TEST_CASE("theta' is constant on the pairs of every finite-cost plan") {
  std::mt19937_64 rng(31);
  auto cost = preset_cost<Q>("linf", 2);
  int tested = 0;
  for (int trial = 0; trial < 40; ++trial) {
    int n = 3 + trial % 4;
    Vec<Vec<Q>> xs, ys;
    for (int k = 0; k < n; ++k) {
      xs.push_back({Q(3) + Q(static_cast<int>(rng() % 5), 4), Q(static_cast<int>(rng() % 13), 2)});
      ys.push_back({Q(0), Q(static_cast<int>(rng() % 13), 2)});
    }
    auto inst = make_instance<Q>(cost, xs, Vec<Q>(n, Q(1)), ys, Vec<Q>(n, Q(1)));
    auto plan = solve_primal(inst);
    // the face where -x1 is the only active piece; some permutations leave it
    Face<Q> face = minimal_extremal_face(cost, Vec<Q>{Q(-1), Q(0)});
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    auto g = build_carriage_graph(inst, cost, face, all, plan.entries);
    auto th = theta_prime(g);
    std::map<int, int> tloc;
    for (std::size_t t = 0; t < g.targets.size(); ++t) tloc[g.targets[t]] = static_cast<int>(t);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      bool finite = true;
      for (int i = 0; i < n && finite; ++i)
        finite = face_contains(cost, face, sub(ys[perm[i]], xs[i]));
      if (!finite) continue;
      ++tested;
      for (int i = 0; i < n; ++i) {
        REQUIRE(tloc.count(perm[i]) == 1);
        CHECK(th[i] == th[n + tloc[perm[i]]]);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  CHECK(tested > 40);
}

TEST_CASE("theta envelope: cone monotonicity and agreement on the carriage") {
  auto ex = testing_support::second_marginal_lattice<Q>(Q(1, 2));
  auto plan = solve_primal(ex.inst);
  auto part = first_partition(ex.inst, ex.cost, plan);
  std::mt19937_64 rng(37);
  for (const auto& cls : part.classes) {
    auto g = build_carriage_graph(ex.inst, ex.cost, cls.face, cls.members, restrict_to(ex.plus, cls.members));
    auto th = theta_prime(g);
    std::vector<LiftedPoint<Q>> pts;
    for (int s : g.sources) pts.push_back({Q(1), ex.inst.mu_points[s]});
    for (int t : g.targets) pts.push_back({Q(0), ex.inst.nu_points[t]});
    auto on_nodes = theta_envelope(ex.inst, ex.cost, g, th, pts);
    for (int v = 0; v < g.num_nodes(); ++v) CHECK(on_nodes[v] == th[v]);

    for (int k = 0; k < 60; ++k)
      pts.push_back({Q(1 + static_cast<int>(rng() % 6), 2), rand_vec(rng, 2, 8, 2)});
    auto th_all = theta_envelope(ex.inst, ex.cost, g, th, pts);
    int compared = 0;
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = 0; b < pts.size(); ++b) {
        Q dt = pts[a].t - pts[b].t;
        if (dt <= 0) continue;
        if (!face_contains(ex.cost, cls.face, scale(sub(pts[b].x, pts[a].x), Q(Q(1) / dt)))) continue;
        ++compared;
        CHECK_FALSE(th_all[a] < th_all[b]);
      }
    CHECK(compared > 0);
  }
}

TEST_CASE("second-marginal refinement") {
  auto ex = testing_support::second_marginal_lattice<Q>(Q(1, 4));
  auto plan = solve_primal(ex.inst);
  auto part = first_partition(ex.inst, ex.cost, plan);
  REQUIRE(part.classes.size() == 2);
  for (const auto& cls : part.classes) {
    auto plus = refine_partition(ex.inst, ex.cost, cls, ex.plus);
    CHECK(plus.chart.kappa == doctest::Approx(1.0));
    Q mass = 0;
    for (const auto& sc : plus.subclasses) {
      CHECK(sc.ell == 1);
      CHECK(sc.indecomposable);
      REQUIRE(sc.face.directions.size() == 1);
      const auto& v = sc.face.directions[0];
      CHECK(v[0] + v[1] == 0);
      std::set<Q> sums;
      for (int i : sc.members) sums.insert(ex.inst.mu_points[i][0] + ex.inst.mu_points[i][1]);
      CHECK(sums.size() == 1);
      CHECK(std::includes(sc.face.active.begin(), sc.face.active.end(), cls.active.begin(),
                          cls.active.end()));
      for (const auto& e : sc.entries) {
        Vec<Q> dir{Q(1)};
        for (int k = 0; k < 2; ++k) dir.push_back(ex.inst.mu_points[e.i][k] - ex.inst.nu_points[e.j][k]);
        CHECK(sc.subcone.contains(dir));
      }
      check_witness(ex.inst, ex.cost, sc);
      mass += sc.mass;
    }
    CHECK(mass == cls.mass);
    // lines x1 + x2 = const meeting the disc
    std::set<Q> all_sums;
    for (int i : cls.members) all_sums.insert(ex.inst.mu_points[i][0] + ex.inst.mu_points[i][1]);
    CHECK(plus.subclasses.size() == all_sums.size());

    auto avg = refine_partition(ex.inst, ex.cost, cls, ex.averaged);
    REQUIRE(avg.subclasses.size() == 1);
    CHECK(avg.subclasses[0].ell == 2);
    CHECK(avg.subclasses[0].indecomposable);
    CHECK(avg.subclasses[0].members == cls.members);
    check_witness(ex.inst, ex.cost, avg.subclasses[0]);
  }
}

TEST_CASE("fibration chart") {
  auto ex = testing_support::second_marginal_lattice<Q>(Q(1, 2));
  auto part = first_partition(ex.inst, ex.cost, solve_primal(ex.inst));
  const auto& cls = part.classes[0];
  auto ch = to_fibration_coords(ex.cost, cls, ex.inst.mu_points[cls.members[0]]);
  CHECK(ch.kappa == doctest::Approx(1.0));
  for (int i : cls.members) {
    LiftedPoint<Q> z{Q(1), ex.inst.mu_points[i]};
    auto c = ch.to_chart(z);
    CHECK(c == Vec<Q>{Q(1), z.x[0], z.x[1]});
  }

  // a 1-dim face of a random cost in d = 3
  std::mt19937_64 rng(41);
  int found = 0;
  for (int trial = 0; trial < 4000 && found < 10; ++trial) {
    auto cost = testing_support::random_cost(rng, 3, 10);
    auto q = rand_vec(rng, 3, 4, 1);
    Face<Q> f = minimal_extremal_face(cost, q);
    if (f.affine_dim != 1) continue;
    ++found;
    auto cone = lifted_face_cone(cost, f);
    Vec<Q> x0 = rand_vec(rng, 3);
    auto chart = make_chart(f, cone, x0);
    CHECK(chart.h == 1);
    CHECK(chart.kappa > 1e-6);
    CHECK(chart.cone.dimension() == 2);
    for (int k = 0; k < 10; ++k) {
      Vec<Q> ty{Q(static_cast<int>(rng() % 8), 2), testing_support::rand_rational(rng, 5, 3)};
      auto z = chart.from_chart(ty);
      CHECK(chart.to_chart(z) == ty);
      // points of the class span at t = 1 land on the chart line
      LiftedPoint<Q> m{Q(1), add(x0, scale(f.directions[0], testing_support::rand_rational(rng, 5, 3)))};
      auto back = chart.from_chart(chart.to_chart(m));
      CHECK(back.x == m.x);
    }
    // cone membership of differences is preserved by the chart
    for (int k = 0; k < 20; ++k) {
      Vec<Q> a{Q(static_cast<int>(rng() % 4), 2), Q(static_cast<int>(rng() % 7) - 3)};
      Vec<Q> b{Q(static_cast<int>(rng() % 4), 2), Q(static_cast<int>(rng() % 7) - 3)};
      auto za = chart.from_chart(a), zb = chart.from_chart(b);
      Vec<Q> lifted{zb.t - za.t};
      auto dx = sub(zb.x, za.x);
      lifted.insert(lifted.end(), dx.begin(), dx.end());
      CHECK(chart.cone.contains(sub(b, a)) == cone.contains(lifted));
    }
  }
  CHECK(found == 10);
}

TEST_CASE("grid envelope: shadow, semigroup, agreement with theta") {
  // box cone |y_k| <= t in chart coordinates, h = 2
  Mat<Q> ineq{{Q(1), Q(-1), Q(0)}, {Q(1), Q(1), Q(0)}, {Q(1), Q(0), Q(-1)}, {Q(1), Q(0), Q(1)}};
  auto box = cone_from_inequalities<Q>(ineq, {}, 3);
  GridSpec<Q> spec{{Q(0), Q(1), Q(2), Q(3)}, {Q(-4), Q(-4)}, {Q(4), Q(4)}, {9, 9}};
  std::vector<GridSeed<Q>> one{{{Q(0), Q(1)}, Digits{true}}};
  auto env = grid_usc_envelope(box, spec, one);
  for (std::size_t l = 0; l < spec.levels.size(); ++l)
    for (int k = 0; k < spec.num_nodes(); ++k) {
      auto y = spec.node(k);
      Q dy0 = y[0], dy1 = y[1] - 1;
      bool inside = Q(dy0 < 0 ? -dy0 : dy0) <= spec.levels[l] && Q(dy1 < 0 ? -dy1 : dy1) <= spec.levels[l];
      CHECK(env[l][k] == Digits{inside});
    }
  CHECK_THROWS_AS(grid_usc_envelope(box, spec, {{{Q(9), Q(0)}, Digits{true}}}), InputError);

  // two-step evolution equals one step, random seeds on grid nodes
  std::mt19937_64 rng(43);
  std::vector<GridSeed<Q>> seeds;
  for (int k = 0; k < 5; ++k) {
    Digits d(5, false);
    d[k] = true;
    seeds.push_back({spec.node(static_cast<int>(rng() % spec.num_nodes())), d});
  }
  auto env5 = grid_usc_envelope(box, spec, seeds);
  auto s1 = evolve(box, spec, env5[0], Q(0), Q(1));
  CHECK(s1 == env5[1]);
  auto s13 = evolve(box, spec, s1, Q(1), Q(3));
  auto s03 = evolve(box, spec, env5[0], Q(0), Q(3));
  CHECK(s13 == s03);
  CHECK(s03 == env5[3]);

  // vartheta from target seeds equals theta at the same lifted points
  auto ex = testing_support::second_marginal_lattice<Q>(Q(1, 2));
  auto part = first_partition(ex.inst, ex.cost, solve_primal(ex.inst));
  for (const auto& cls : part.classes) {
    auto g = build_carriage_graph(ex.inst, ex.cost, cls.face, cls.members, restrict_to(ex.plus, cls.members));
    auto th = theta_prime(g);
    auto chart = to_fibration_coords(ex.cost, cls, ex.inst.mu_points[cls.members[0]]);
    std::vector<GridSeed<Q>> tseeds;
    for (std::size_t t = 0; t < g.targets.size(); ++t) {
      auto c = chart.to_chart({Q(0), ex.inst.nu_points[g.targets[t]]});
      tseeds.push_back({Vec<Q>(c.begin() + 1, c.end()), th[g.num_sources() + t]});
    }
    GridSpec<Q> gs{{Q(0), Q(1, 2), Q(1)}, {Q(-4), Q(-4)}, {Q(4), Q(4)}, {17, 17}};
    auto vt = grid_usc_envelope(chart.cone, gs, tseeds);
    for (std::size_t l = 0; l < gs.levels.size(); ++l) {
      std::vector<LiftedPoint<Q>> pts;
      for (int k = 0; k < gs.num_nodes(); ++k) {
        Vec<Q> ty{gs.levels[l]};
        auto y = gs.node(k);
        ty.insert(ty.end(), y.begin(), y.end());
        pts.push_back(chart.from_chart(ty));
      }
      auto theta = theta_envelope(ex.inst, ex.cost, g, th, pts);
      for (int k = 0; k < gs.num_nodes(); ++k) CHECK(vt[l][k] == theta[k]);
    }
  }
}
