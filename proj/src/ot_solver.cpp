#include "sudakov/ot_solver.hpp"

#include <map>

#include "sudakov/generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace sudakov {

namespace {

template <typename T>
bool positive_mass(const T& x) {
  if constexpr (Num<T>::exact)
    return x > 0;
  else
    return x > 1e-13;
}

// Primal network simplex on sources -> targets with an artificial root.
// Phase 1 drives the artificial flow to zero; phase 2 freezes the artificial
// arcs at zero capacity and optimizes the real costs.
template <typename T>
class NetworkSimplex {
 public:
  NetworkSimplex(const TransportInstance<T>& inst, const Mat<T>& cost) : inst_(inst) {
    m_ = inst.m();
    n_ = inst.n();
    root_ = m_ + n_;
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j)
        if (inst.is_allowed(i, j)) {
          src_.push_back(i);
          dst_.push_back(m_ + j);
          real_cost_.push_back(cost[i][j]);
        }
    real_ = static_cast<int>(src_.size());
    for (int i = 0; i < m_; ++i) {
      src_.push_back(i);
      dst_.push_back(root_);
      real_cost_.push_back(T(0));
    }
    for (int j = 0; j < n_; ++j) {
      src_.push_back(root_);
      dst_.push_back(m_ + j);
      real_cost_.push_back(T(0));
    }
    arcs_ = static_cast<int>(src_.size());
    cost_.assign(arcs_, T(0));
    for (int e = real_; e < arcs_; ++e) cost_[e] = 1;
    flow_.assign(arcs_, T(0));
    state_.assign(arcs_, 1);
    frozen_.assign(arcs_, 0);

    int nodes = root_ + 1;
    parent_.assign(nodes, -1);
    pred_.assign(nodes, -1);
    depth_.assign(nodes, 0);
    dir_.assign(nodes, 0);
    children_.assign(nodes, {});
    pi_.assign(nodes, T(0));
    for (int i = 0; i < m_; ++i) attach_initial(i, real_ + i, inst.mu_weights[i]);
    for (int j = 0; j < n_; ++j) attach_initial(m_ + j, real_ + m_ + j, inst.nu_weights[j]);
    recompute_subtree(root_);

    block_ = std::max(10, static_cast<int>(std::sqrt(static_cast<double>(arcs_))));
    if constexpr (!Num<T>::exact) {
      double cmax = 1;
      for (int e = 0; e < real_; ++e) cmax = std::max(cmax, std::fabs(real_cost_[e]));
      eps_ = 1e-12 * cmax;
    }
  }

  bool run() {
    phase2_ = false;
    simplex();
    T art = 0;
    for (int e = real_; e < arcs_; ++e) art += flow_[e];
    if (Num<T>::sign(art) > 0) return false;
    phase2_ = true;
    for (int e = real_; e < arcs_; ++e) {
      flow_[e] = 0;
      frozen_[e] = 1;
      cost_[e] = 0;
    }
    for (int e = 0; e < real_; ++e) cost_[e] = real_cost_[e];
    recompute_subtree(root_);
    simplex();
    return true;
  }

  Plan<T> plan() const {
    Plan<T> p;
    for (int e = 0; e < real_; ++e)
      if (positive_mass(flow_[e])) {
        p.entries.push_back({src_[e], dst_[e] - m_, flow_[e]});
        p.value += flow_[e] * real_cost_[e];
      }
    std::sort(p.entries.begin(), p.entries.end(),
              [](const auto& a, const auto& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    T shift = n_ > 0 ? T(pi_[m_]) : T(0);
    for (int i = 0; i < m_; ++i) p.phi.push_back(pi_[i] - shift);
    for (int j = 0; j < n_; ++j) p.psi.push_back(pi_[m_ + j] - shift);
    return p;
  }

 private:
  void attach_initial(int node, int arc, const T& mass) {
    parent_[node] = root_;
    pred_[node] = arc;
    dir_[node] = src_[arc] == node ? 1 : -1;
    children_[root_].push_back(node);
    flow_[arc] = mass;
    state_[arc] = 0;
  }

  T reduced(int e) const { return cost_[e] + pi_[src_[e]] - pi_[dst_[e]]; }

  bool violating(const T& v) const {
    if constexpr (Num<T>::exact)
      return v < 0;
    else
      return v < -eps_;
  }

  int find_entering() {
    int best = -1;
    T best_v = 0;
    int scanned = 0;
    for (int k = 0; k < arcs_; ++k) {
      int e = next_;
      next_ = next_ + 1 == arcs_ ? 0 : next_ + 1;
      if (state_[e] != 0 && !frozen_[e] && !(phase2_ && e >= real_)) {
        T v = reduced(e) * T(state_[e]);
        if (violating(v) && (best < 0 || v < best_v)) {
          best = e;
          best_v = v;
        }
      }
      if (++scanned == block_) {
        if (best >= 0) return best;
        scanned = 0;
      }
    }
    return best;
  }

  int find_join(int u, int v) const {
    while (u != v) {
      if (depth_[u] > depth_[v])
        u = parent_[u];
      else if (depth_[v] > depth_[u])
        v = parent_[v];
      else {
        u = parent_[u];
        v = parent_[v];
      }
    }
    return u;
  }

  // Residual capacity of the tree arc above u when flow moves parent -> u
  // (toward_child) or u -> parent. nullopt means unbounded.
  std::optional<T> residual(int u, bool toward_child) const {
    int e = pred_[u];
    bool increases = toward_child ? dir_[u] < 0 : dir_[u] > 0;
    if (!increases) return flow_[e];
    if (frozen_[e]) return T(0) - flow_[e];
    return std::nullopt;
  }

  void simplex() {
    while (true) {
      int in = find_entering();
      if (in < 0) return;
      pivot(in);
    }
  }

  void pivot(int in) {
    int first, second;
    if (state_[in] == 1) {
      first = src_[in];
      second = dst_[in];
    } else {
      first = dst_[in];
      second = src_[in];
    }
    int join = find_join(first, second);
    std::optional<T> delta;
    if (frozen_[in]) delta = T(0);
    int u_out = -1, result = 0;
    auto less = [](const std::optional<T>& a, const std::optional<T>& b, bool strict) {
      if (!a) return false;
      if (!b) return true;
      return strict ? *a < *b : *a <= *b;
    };
    for (int u = first; u != join; u = parent_[u]) {
      auto d = residual(u, true);
      if (less(d, delta, true)) {
        delta = d;
        u_out = u;
        result = 1;
      }
    }
    for (int u = second; u != join; u = parent_[u]) {
      auto d = residual(u, false);
      if (less(d, delta, false)) {
        delta = d;
        u_out = u;
        result = 2;
      }
    }
    if (!delta) throw std::logic_error("network simplex: unbounded cycle");

    T val = *delta * T(state_[in]);
    if (*delta != T(0)) {  // tiny float steps still move mass; only exact zeros are degenerate
      flow_[in] += val;
      for (int u = src_[in]; u != join; u = parent_[u]) flow_[pred_[u]] -= T(dir_[u]) * val;
      for (int u = dst_[in]; u != join; u = parent_[u]) flow_[pred_[u]] += T(dir_[u]) * val;
    }
    if (result == 0) {
      state_[in] = static_cast<signed char>(-state_[in]);
      return;
    }
    int out_arc = pred_[u_out];
    state_[in] = 0;
    state_[out_arc] = 1;
    if (!Num<T>::exact) flow_[out_arc] = 0;
    int u_in = result == 1 ? first : second;
    int v_in = result == 1 ? second : first;
    rehang(u_in, v_in, in, u_out);
    recompute_subtree(u_in);
  }

  void remove_child(int p, int c) {
    auto& ch = children_[p];
    ch.erase(std::find(ch.begin(), ch.end(), c));
  }

  // Reverse the tree path u_in .. u_out and hang it below v_in through `in`.
  void rehang(int u_in, int v_in, int in, int u_out) {
    int new_parent = v_in;
    int new_pred = in;
    int u = u_in;
    while (true) {
      int old_parent = parent_[u];
      int old_pred = pred_[u];
      remove_child(old_parent, u);
      parent_[u] = new_parent;
      pred_[u] = new_pred;
      dir_[u] = src_[new_pred] == u ? 1 : -1;
      children_[new_parent].push_back(u);
      if (u == u_out) break;
      new_parent = u;
      new_pred = old_pred;
      u = old_parent;
    }
  }

  void recompute_subtree(int top) {
    stack_.clear();
    stack_.push_back(top);
    while (!stack_.empty()) {
      int u = stack_.back();
      stack_.pop_back();
      if (u != root_) {
        int p = parent_[u];
        int e = pred_[u];
        depth_[u] = depth_[p] + 1;
        if (dir_[u] > 0)
          pi_[u] = pi_[p] - cost_[e];
        else
          pi_[u] = pi_[p] + cost_[e];
      }
      for (int c : children_[u]) stack_.push_back(c);
    }
  }

  const TransportInstance<T>& inst_;
  int m_ = 0, n_ = 0, root_ = 0, real_ = 0, arcs_ = 0, block_ = 10, next_ = 0;
  bool phase2_ = false;
  double eps_ = 0;
  std::vector<int> src_, dst_;
  Vec<T> cost_, real_cost_, flow_;
  std::vector<signed char> state_, frozen_;
  std::vector<int> parent_, pred_, depth_;
  std::vector<signed char> dir_;
  std::vector<std::vector<int>> children_;
  Vec<T> pi_;
  std::vector<int> stack_;
};

template <typename T>
void check_instance(const TransportInstance<T>& inst) {
  if (inst.m() == 0 || inst.n() == 0) throw InputError("empty marginal");
  T sm = 0, sn = 0;
  for (const auto& w : inst.mu_weights) {
    if (Num<T>::sign(w) <= 0) throw InputError("weights must be positive");
    sm += w;
  }
  for (const auto& w : inst.nu_weights) {
    if (Num<T>::sign(w) <= 0) throw InputError("weights must be positive");
    sn += w;
  }
  bool balanced;
  if constexpr (Num<T>::exact)
    balanced = sm == sn;
  else
    balanced = std::fabs(sm - sn) <= 1e-12 * std::max(1.0, std::fabs(sm));
  if (!balanced) throw InputError("unbalanced marginals");
  if (static_cast<int>(inst.cost.size()) != inst.m()) throw InputError("cost matrix shape");
}

template <typename T>
T cap_sum(const Vec<T>& w) {
  T s = 0;
  for (const auto& x : w) s += x;
  return s;
}

// Dinic max flow on source -> mu -> nu -> sink.
template <typename T>
T max_flow(const TransportInstance<T>& inst) {
  int m = inst.m(), n = inst.n();
  int S = m + n, Tn = m + n + 1, N = m + n + 2;
  struct Edge {
    int to;
    T cap;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adj(N);
  auto add_edge = [&](int u, int v, const T& c) {
    adj[u].push_back(static_cast<int>(edges.size()));
    edges.push_back({v, c});
    adj[v].push_back(static_cast<int>(edges.size()));
    edges.push_back({u, T(0)});
  };
  T big = cap_sum(inst.mu_weights) + T(1);
  for (int i = 0; i < m; ++i) add_edge(S, i, inst.mu_weights[i]);
  for (int j = 0; j < n; ++j) add_edge(m + j, Tn, inst.nu_weights[j]);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (inst.is_allowed(i, j)) add_edge(i, m + j, big);
  T total = 0;
  std::vector<int> level(N), it(N);
  while (true) {
    std::fill(level.begin(), level.end(), -1);
    std::vector<int> queue{S};
    level[S] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h)
      for (int id : adj[queue[h]])
        if (Num<T>::sign(edges[id].cap) > 0 && level[edges[id].to] < 0) {
          level[edges[id].to] = level[queue[h]] + 1;
          queue.push_back(edges[id].to);
        }
    if (level[Tn] < 0) break;
    std::fill(it.begin(), it.end(), 0);
    std::function<T(int, T)> dfs = [&](int u, T f) -> T {
      if (u == Tn) return f;
      for (int& k = it[u]; k < static_cast<int>(adj[u].size()); ++k) {
        int id = adj[u][k];
        Edge& e = edges[id];
        if (Num<T>::sign(e.cap) > 0 && level[e.to] == level[u] + 1) {
          T pushed = dfs(e.to, e.cap < f ? T(e.cap) : f);
          if (Num<T>::sign(pushed) > 0) {
            e.cap -= pushed;
            edges[id ^ 1].cap += pushed;
            return pushed;
          }
        }
      }
      return T(0);
    };
    while (true) {
      T f = dfs(S, big);
      if (Num<T>::sign(f) <= 0) break;
      total += f;
    }
  }
  return total;
}

}  // namespace

template <typename T>
TransportInstance<T> make_instance(const PolyhedralCost<T>& cost, Vec<Vec<T>> mu_points,
                                   Vec<T> mu_weights, Vec<Vec<T>> nu_points, Vec<T> nu_weights) {
  if (mu_points.size() != mu_weights.size() || nu_points.size() != nu_weights.size())
    throw InputError("points and weights differ in length");
  if (mu_points.empty() || nu_points.empty()) throw InputError("empty marginal");
  TransportInstance<T> inst;
  inst.dim = cost.dim;
  for (const auto* pts : {&mu_points, &nu_points})
    for (const auto& p : *pts)
      if (static_cast<int>(p.size()) != cost.dim) throw InputError("point dimension mismatch");
  for (auto* w : {&mu_weights, &nu_weights}) {
    T s = 0;
    for (const auto& x : *w) {
      if (Num<T>::sign(x) <= 0) throw InputError("weights must be positive");
      s += x;
    }
    for (auto& x : *w) x /= s;
  }
  inst.mu_points = std::move(mu_points);
  inst.mu_weights = std::move(mu_weights);
  inst.nu_points = std::move(nu_points);
  inst.nu_weights = std::move(nu_weights);
  inst.cost.assign(inst.m(), Vec<T>(inst.n()));
  for (int i = 0; i < inst.m(); ++i)
    for (int j = 0; j < inst.n(); ++j)
      inst.cost[i][j] = evaluate_cost(cost, sub(inst.nu_points[j], inst.mu_points[i]));
  return inst;
}

template <typename T>
Plan<T> solve_primal(const TransportInstance<T>& inst) {
  check_instance(inst);
  NetworkSimplex<T> ns(inst, inst.cost);
  if (!ns.run()) throw InputError("infeasible transport instance: masked pairs admit no coupling");
  return ns.plan();
}

template <typename T>
Plan<T> solve_constrained(const TransportInstance<T>& inst, const PolyhedralCost<T>& secondary) {
  check_instance(inst);
  Mat<T> cost(inst.m(), Vec<T>(inst.n(), T(0)));
  for (int i = 0; i < inst.m(); ++i)
    for (int j = 0; j < inst.n(); ++j)
      if (inst.is_allowed(i, j))
        cost[i][j] = evaluate_cost(secondary, sub(inst.nu_points[j], inst.mu_points[i]));
  NetworkSimplex<T> ns(inst, cost);
  if (!ns.run()) throw InputError("infeasible transport instance: masked pairs admit no coupling");
  return ns.plan();
}

template <typename T>
bool is_feasible(const TransportInstance<T>& inst) {
  T f = max_flow(inst);
  T total = cap_sum(inst.mu_weights);
  if constexpr (Num<T>::exact)
    return f == total;
  else
    return std::fabs(f - total) <= 1e-9;
}

template <typename T>
std::vector<PlanEntry<T>> plan_from_maps(
    const TransportInstance<T>& inst,
    const std::vector<std::pair<Mat<Rational>, Vec<Rational>>>& maps) {
  if (maps.empty()) throw InputError("pushforward plan needs at least one map");
  std::map<Vec<T>, int> where;
  for (int j = 0; j < inst.n(); ++j) where.emplace(inst.nu_points[j], j);
  std::map<std::pair<int, int>, T> mass;
  T share = T(1) / T(static_cast<int>(maps.size()));
  for (const auto& [A, b] : maps)
    for (int i = 0; i < inst.m(); ++i) {
      auto it = where.find(affine_image(A, b, inst.mu_points[i]));
      if (it == where.end())
        throw InputError("pushforward image of source " + std::to_string(i) + " is not a target atom");
      mass[{i, it->second}] += inst.mu_weights[i] * share;
    }
  std::vector<PlanEntry<T>> out;
  for (const auto& [ij, w] : mass) out.push_back({ij.first, ij.second, w});
  return out;
}

template <typename T>
T plan_cost(const TransportInstance<T>& inst, const std::vector<PlanEntry<T>>& entries) {
  T v = 0;
  for (const auto& e : entries) v += e.mass * inst.cost[e.i][e.j];
  return v;
}

template <typename T>
T dual_value(const TransportInstance<T>& inst, const Vec<T>& phi, const Vec<T>& psi) {
  T v = 0;
  for (int j = 0; j < inst.n(); ++j) v += psi[j] * inst.nu_weights[j];
  for (int i = 0; i < inst.m(); ++i) v -= phi[i] * inst.mu_weights[i];
  return v;
}

template <typename T>
T marginal_error(const TransportInstance<T>& inst, const std::vector<PlanEntry<T>>& entries) {
  Vec<T> row(inst.m(), T(0)), col(inst.n(), T(0));
  for (const auto& e : entries) {
    row[e.i] += e.mass;
    col[e.j] += e.mass;
  }
  T worst = 0;
  for (int i = 0; i < inst.m(); ++i) worst = std::max<T>(worst, Num<T>::abs(T(row[i] - inst.mu_weights[i])));
  for (int j = 0; j < inst.n(); ++j) worst = std::max<T>(worst, Num<T>::abs(T(col[j] - inst.nu_weights[j])));
  return worst;
}

template <typename T>
std::optional<std::vector<int>> find_monotonicity_violation(const TransportInstance<T>& inst,
                                                            const Plan<T>& plan, int max_len) {
  const auto& E = plan.entries;
  const int s = static_cast<int>(E.size());
  // Cycle sums do not change when c_ij is replaced by c_ij - psi_j + phi_i, so
  // the search runs on D[a][b] = r(i_a, j_b) - r(i_a, j_a). Any potentials are
  // valid; with optimal ones D is mostly nonnegative and the bounds below prune.
  Vec<T> phi(inst.m(), T(0)), psi(inst.n(), T(0));
  if (static_cast<int>(plan.phi.size()) == inst.m() && static_cast<int>(plan.psi.size()) == inst.n()) {
    phi = plan.phi;
    psi = plan.psi;
  }
  auto negative = [&](const T& v) {
    if constexpr (Num<T>::exact)
      return v < 0;
    else
      return v < -1e-9;
  };
  Vec<T> diag(s);
  for (int a = 0; a < s; ++a) diag[a] = inst.cost[E[a].i][E[a].j] - psi[E[a].j] + phi[E[a].i];
  auto D = [&](int a, int b) -> std::optional<T> {
    if (!inst.is_allowed(E[a].i, E[b].j)) return std::nullopt;
    return T(inst.cost[E[a].i][E[b].j] - psi[E[b].j] + phi[E[a].i] - diag[a]);
  };
  if (max_len >= 2)
    for (int a = 0; a < s; ++a)
      for (int b = a + 1; b < s; ++b) {
        auto x = D(a, b), y = D(b, a);
        if (x && y && negative(T(*x + *y))) return std::vector<int>{a, b};
      }
  if (max_len >= 3 && s >= 3) {
    // row_min[a] = min_b D(a, b), col_min[a] = min_b D(b, a); D(a, a) = 0
    Vec<T> row_min(s, T(0)), col_min(s, T(0));
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) {
        if (a == b) continue;
        if (auto x = D(a, b)) {
          if (*x < row_min[a]) row_min[a] = *x;
          if (*x < col_min[b]) col_min[b] = *x;
        }
      }
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) {
        if (b == a) continue;
        auto x = D(a, b);
        if (!x || !negative(T(*x + row_min[b] + col_min[a]))) continue;
        for (int d = 0; d < s; ++d) {
          if (d == a || d == b) continue;
          auto y = D(b, d), z = D(d, a);
          if (y && z && negative(T(*x + *y + *z))) {
            std::vector<int> cyc{a, b, d};
            std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
            return cyc;
          }
        }
      }
  }
  return std::nullopt;
}

template <typename T>
CanonicalDuals<T> strictly_complementary_duals(const TransportInstance<T>& inst,
                                               const Plan<T>& optimal) {
  int m = inst.m(), n = inst.n(), N = m + n;
  auto tight = [&](int i, int j) {
    T r = inst.cost[i][j] + optimal.phi[i] - optimal.psi[j];
    if constexpr (Num<T>::exact)
      return r == 0;
    else
      return r <= 1e-9;
  };
  std::vector<std::vector<int>> adj(N);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (inst.is_allowed(i, j) && tight(i, j)) adj[i].push_back(m + j);
  for (const auto& e : optimal.entries) adj[m + e.j].push_back(e.i);

  // Iterative Tarjan; components come out sinks first.
  std::vector<int> index(N, -1), low(N, 0), comp(N, -1), stack, call;
  std::vector<std::size_t> edge_pos(N, 0);
  std::vector<char> on_stack(N, 0);
  int counter = 0, ncomp = 0;
  for (int s = 0; s < N; ++s) {
    if (index[s] >= 0) continue;
    call.push_back(s);
    while (!call.empty()) {
      int u = call.back();
      if (index[u] < 0) {
        index[u] = low[u] = counter++;
        stack.push_back(u);
        on_stack[u] = 1;
      }
      if (edge_pos[u] < adj[u].size()) {
        int v = adj[u][edge_pos[u]++];
        if (index[v] < 0)
          call.push_back(v);
        else if (on_stack[v])
          low[u] = std::min(low[u], index[v]);
        continue;
      }
      if (low[u] == index[u]) {
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = ncomp;
          if (w == u) break;
        }
        ++ncomp;
      }
      call.pop_back();
      if (!call.empty()) low[call.back()] = std::min(low[call.back()], low[u]);
    }
  }
  std::vector<std::vector<int>> members(ncomp);
  for (int v = 0; v < N; ++v) members[comp[v]].push_back(v);
  std::vector<int> level(ncomp, 0);
  int max_level = 0;
  for (int c = 0; c < ncomp; ++c) {
    for (int u : members[c])
      for (int v : adj[u])
        if (comp[v] != c) level[c] = std::max(level[c], level[comp[v]] + 1);
    max_level = std::max(max_level, level[c]);
  }
  bool have_gap = false;
  T min_gap = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      if (!inst.is_allowed(i, j) || tight(i, j)) continue;
      T r = inst.cost[i][j] + optimal.phi[i] - optimal.psi[j];
      if (!have_gap || r < min_gap) {
        min_gap = r;
        have_gap = true;
      }
    }
  T eps = have_gap ? T(min_gap / T(2 * (max_level + 1))) : T(1);
  CanonicalDuals<T> out;
  out.phi = optimal.phi;
  out.psi = optimal.psi;
  for (int i = 0; i < m; ++i) out.phi[i] += eps * T(level[comp[i]]);
  for (int j = 0; j < n; ++j) out.psi[j] += eps * T(level[comp[m + j]]);
  out.tight.assign(m, {});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (inst.is_allowed(i, j) && comp[i] == comp[m + j] && tight(i, j)) out.tight[i].push_back(j);
  return out;
}

#define SUDAKOV_INSTANTIATE(T)                                                                    \
  template TransportInstance<T> make_instance<T>(const PolyhedralCost<T>&, Vec<Vec<T>>, Vec<T>,   \
                                                 Vec<Vec<T>>, Vec<T>);                            \
  template Plan<T> solve_primal<T>(const TransportInstance<T>&);                                  \
  template Plan<T> solve_constrained<T>(const TransportInstance<T>&, const PolyhedralCost<T>&);   \
  template bool is_feasible<T>(const TransportInstance<T>&);                                      \
  template std::vector<PlanEntry<T>> plan_from_maps<T>(                                          \
      const TransportInstance<T>&, const std::vector<std::pair<Mat<Rational>, Vec<Rational>>>&);  \
  template T plan_cost<T>(const TransportInstance<T>&, const std::vector<PlanEntry<T>>&);         \
  template T dual_value<T>(const TransportInstance<T>&, const Vec<T>&, const Vec<T>&);            \
  template T marginal_error<T>(const TransportInstance<T>&, const std::vector<PlanEntry<T>>&);    \
  template std::optional<std::vector<int>> find_monotonicity_violation<T>(                        \
      const TransportInstance<T>&, const Plan<T>&, int);                                          \
  template CanonicalDuals<T> strictly_complementary_duals<T>(const TransportInstance<T>&,         \
                                                             const Plan<T>&);

SUDAKOV_INSTANTIATE(double)
SUDAKOV_INSTANTIATE(Rational)

}  // namespace sudakov
