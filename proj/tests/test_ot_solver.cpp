#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "sudakov/ot_solver.hpp"
#include "test_support.hpp"

using namespace sudakov;
using testing_support::rand_vec;
using testing_support::random_cost;
using Q = Rational;

namespace {

TransportInstance<Q> matrix_instance(const Mat<Q>& c) {
  TransportInstance<Q> inst;
  inst.dim = 1;
  int m = static_cast<int>(c.size()), n = static_cast<int>(c[0].size());
  for (int i = 0; i < m; ++i) {
    inst.mu_points.push_back({Q(i)});
    inst.mu_weights.push_back(Q(1, m));
  }
  for (int j = 0; j < n; ++j) {
    inst.nu_points.push_back({Q(j)});
    inst.nu_weights.push_back(Q(1, n));
  }
  inst.cost = c;
  return inst;
}

// Uniform square instances: optimal plans are permutations (Birkhoff).
struct PermutationOracle {
  Q best;
  std::set<std::pair<int, int>> used;  // pairs in some optimal permutation
};

PermutationOracle permutation_oracle(const Mat<Q>& c) {
  int n = static_cast<int>(c.size());
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  PermutationOracle o;
  bool first = true;
  std::vector<std::vector<int>> optimal;
  do {
    Q v = 0;
    for (int i = 0; i < n; ++i) v += c[i][p[i]];
    if (first || v < o.best) {
      o.best = v;
      optimal.clear();
      first = false;
    }
    if (v == o.best) optimal.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  o.best /= n;
  for (const auto& q : optimal)
    for (int i = 0; i < n; ++i) o.used.insert({i, q[i]});
  return o;
}

template <typename T>
void check_certificate(const TransportInstance<T>& inst, const Plan<T>& plan) {
  CHECK(marginal_error(inst, plan.entries) == T(0));
  CHECK(plan.value == plan_cost(inst, plan.entries));
  CHECK(plan.value == dual_value(inst, plan.phi, plan.psi));
  CHECK(static_cast<int>(plan.entries.size()) <= inst.m() + inst.n() - 1);
  for (int i = 0; i < inst.m(); ++i)
    for (int j = 0; j < inst.n(); ++j)
      if (inst.is_allowed(i, j)) CHECK(plan.psi[j] - plan.phi[i] <= inst.cost[i][j]);
  for (const auto& e : plan.entries) CHECK(plan.psi[e.j] - plan.phi[e.i] == inst.cost[e.i][e.j]);
}

}  // namespace

TEST_CASE("trivial instances") {
  auto linf = preset_cost<Q>("linf", 2);
  auto one = make_instance<Q>(linf, {{Q(0), Q(0)}}, {Q(3)}, {{Q(1), Q(2)}}, {Q(5)});
  auto p = solve_primal(one);
  REQUIRE(p.entries.size() == 1);
  CHECK(p.entries[0].mass == 1);
  CHECK(p.value == 2);

  auto diag = matrix_instance({{Q(0), Q(1)}, {Q(1), Q(0)}});
  auto d = solve_primal(diag);
  CHECK(d.value == 0);
  REQUIRE(d.entries.size() == 2);
  CHECK(d.entries[0].i == 0);
  CHECK(d.entries[0].j == 0);
  CHECK(d.entries[1].j == 1);
  check_certificate(diag, d);
}

TEST_CASE("input validation") {
  auto linf = preset_cost<Q>("linf", 1);
  CHECK_THROWS_AS(make_instance<Q>(linf, {{Q(0)}}, {Q(0)}, {{Q(1)}}, {Q(1)}), InputError);
  CHECK_THROWS_AS(make_instance<Q>(linf, {{Q(0)}}, {Q(1)}, {{Q(1), Q(2)}}, {Q(1)}), InputError);
  auto inst = matrix_instance({{Q(0), Q(1)}, {Q(1), Q(0)}});
  inst.nu_weights[0] = Q(1, 3);
  CHECK_THROWS_AS(solve_primal(inst), InputError);
}

TEST_CASE("masked pairs are absent arcs; infeasibility is detected") {
  auto inst = matrix_instance({{Q(5), Q(0)}, {Q(0), Q(5)}});
  inst.allowed = {{1, 0}, {1, 0}};
  CHECK_FALSE(is_feasible(inst));
  CHECK_THROWS_AS(solve_primal(inst), InputError);

  inst.allowed = {{1, 0}, {0, 1}};
  CHECK(is_feasible(inst));
  auto p = solve_primal(inst);
  CHECK(p.value == 5);
  check_certificate(inst, p);

  auto linf = preset_cost<Q>("linf", 1);
  auto bij = solve_constrained(inst, linf);
  REQUIRE(bij.entries.size() == 2);
  CHECK(bij.entries[0].j == 0);
  CHECK(bij.entries[1].j == 1);
}

TEST_CASE("quadratic secondary gives the monotone matching on a line") {
  auto quad = preset_cost<Q>("quadratic", 2);
  // collinear along (1, 2); sources in scrambled order
  Vec<Vec<Q>> xs = {{Q(2), Q(4)}, {Q(0), Q(0)}, {Q(1), Q(2)}};
  Vec<Vec<Q>> ys = {{Q(5), Q(10)}, {Q(3), Q(6)}, {Q(7, 2), Q(7)}};
  auto inst = make_instance<Q>(quad, xs, {Q(1), Q(1), Q(1)}, ys, {Q(1), Q(1), Q(1)});
  auto p = solve_constrained(inst, quad);
  // permutation oracle on the secondary cost
  Mat<Q> c(3, Vec<Q>(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c[i][j] = evaluate_cost(quad, sub(ys[j], xs[i]));
  auto o = permutation_oracle(c);
  CHECK(p.value == o.best);
  std::vector<int> assign(3, -1);
  for (const auto& e : p.entries) assign[e.i] = e.j;
  // order-preserving: x order (1, 2, 0) pairs with y order (1, 2, 0)
  CHECK(assign == std::vector<int>{0, 1, 2});
}

TEST_CASE("random rational instances agree with the permutation oracle") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 2 + trial % 5;
    Mat<Q> c(n, Vec<Q>(n));
    for (auto& row : c)
      for (auto& x : row) x = Q(static_cast<int>(rng() % 4));  // small range forces ties
    auto inst = matrix_instance(c);
    auto p = solve_primal(inst);
    auto o = permutation_oracle(c);
    CHECK(p.value == o.best);
    check_certificate(inst, p);
    auto canon = strictly_complementary_duals(inst, p);
    std::set<std::pair<int, int>> tight;
    for (int i = 0; i < n; ++i)
      for (int j : canon.tight[i]) tight.insert({i, j});
    CHECK(tight == o.used);
    // strict complementarity in the shifted duals
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Q r = c[i][j] + canon.phi[i] - canon.psi[j];
        CHECK(r >= 0);
        CHECK((r == 0) == (tight.count({i, j}) == 1));
      }
    CHECK(dual_value(inst, canon.phi, canon.psi) == p.value);
  }
}

TEST_CASE("geometric instances: certificate, monotonicity, float agreement") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    int d = 1 + trial % 3;
    auto cost = random_cost(rng, d);
    int m = 3 + static_cast<int>(rng() % 18), n = 3 + static_cast<int>(rng() % 18);
    Vec<Vec<Q>> xs, ys;
    Vec<Q> wx, wy;
    for (int i = 0; i < m; ++i) {
      xs.push_back(rand_vec(rng, d));
      wx.push_back(Q(1 + static_cast<int>(rng() % 5)));
    }
    for (int j = 0; j < n; ++j) {
      ys.push_back(rand_vec(rng, d));
      wy.push_back(Q(1 + static_cast<int>(rng() % 5)));
    }
    auto inst = make_instance<Q>(cost, xs, wx, ys, wy);
    auto p = solve_primal(inst);
    check_certificate(inst, p);
    CHECK_FALSE(find_monotonicity_violation(inst, p, 3).has_value());

    auto dcost = testing_support::convert_cost<double>(cost);
    Vec<Vec<double>> dx, dy;
    Vec<double> dwx, dwy;
    for (auto& x : xs) dx.push_back(convert_vec<double>(x));
    for (auto& y : ys) dy.push_back(convert_vec<double>(y));
    for (auto& w : wx) dwx.push_back(to_double(w));
    for (auto& w : wy) dwy.push_back(to_double(w));
    auto dinst = make_instance<double>(dcost, dx, dwx, dy, dwy);
    auto dp = solve_primal(dinst);
    CHECK(dp.value == doctest::Approx(to_double(p.value)).epsilon(1e-9));
    CHECK(marginal_error(dinst, dp.entries) < 1e-12);
  }
}

TEST_CASE("a swapped pair breaks cyclical monotonicity") {
  auto inst = matrix_instance({{Q(0), Q(3)}, {Q(3), Q(0)}});
  Plan<Q> bad;
  bad.entries = {{0, 1, Q(1, 2)}, {1, 0, Q(1, 2)}};
  auto v = find_monotonicity_violation(inst, bad, 2);
  REQUIRE(v.has_value());
  CHECK(v->size() == 2);
}

TEST_CASE("short-cycle search agrees with exhaustive enumeration") {
  std::mt19937_64 rng(29);
  int found = 0;
  for (int trial = 0; trial < 300; ++trial) {
    int n = 3 + static_cast<int>(rng() % 5);
    Mat<Q> c(n, Vec<Q>(n));
    for (auto& row : c)
      for (auto& x : row) x = Q(static_cast<int>(rng() % 7));
    auto inst = matrix_instance(c);
    if (trial % 3 == 0) inst.allowed.assign(n, std::vector<char>(n, 1));
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    if (trial % 3 == 0)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (j != perm[i] && rng() % 4 == 0) inst.allowed[i][j] = 0;
    Plan<Q> plan;
    for (int i = 0; i < n; ++i) plan.entries.push_back({i, perm[i], Q(1, n)});
    if (trial % 2 == 0) {  // arbitrary potentials must not change the answer
      for (int i = 0; i < n; ++i) plan.phi.push_back(Q(static_cast<int>(rng() % 9) - 4, 3));
      for (int j = 0; j < n; ++j) plan.psi.push_back(Q(static_cast<int>(rng() % 9) - 4, 2));
    }
    auto cost_of = [&](int a, int b) -> std::optional<Q> {
      const auto &ea = plan.entries[a], &eb = plan.entries[b];
      if (!inst.is_allowed(ea.i, eb.j)) return std::nullopt;
      return c[ea.i][eb.j] - c[ea.i][ea.j];
    };
    bool oracle = false;
    for (int a = 0; a < n && !oracle; ++a)
      for (int b = 0; b < n && !oracle; ++b) {
        if (a == b) continue;
        auto x = cost_of(a, b), y = cost_of(b, a);
        if (x && y && *x + *y < 0) oracle = true;
        for (int d = 0; d < n && !oracle; ++d) {
          if (d == a || d == b) continue;
          auto y2 = cost_of(b, d), z = cost_of(d, a);
          if (x && y2 && z && *x + *y2 + *z < 0) oracle = true;
        }
      }
    auto v = find_monotonicity_violation(inst, plan, 3);
    CHECK(v.has_value() == oracle);
    if (v) {
      ++found;
      Q sum = 0;
      for (std::size_t k = 0; k < v->size(); ++k) {
        auto step = cost_of((*v)[k], (*v)[(k + 1) % v->size()]);
        REQUIRE(step.has_value());
        sum += *step;
      }
      CHECK(sum < 0);
    }
  }
  CHECK(found > 50);
}
