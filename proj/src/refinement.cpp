#include "sudakov/refinement.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace sudakov {

std::string digits_string(const Digits& d) {
  std::string s;
  s.reserve(d.size());
  for (bool b : d) s.push_back(b ? '2' : '0');
  return s;
}

double digits_value(const Digits& d) {
  double v = 0, w = 2.0 / 3.0;
  for (bool b : d) {
    if (b) v += w;
    w /= 3.0;
    if (w == 0) break;
  }
  return v;
}

namespace {

template <typename T>
Vec<T> mean_displacement(const TransportInstance<T>& inst, const std::vector<PlanEntry<T>>& entries) {
  Vec<T> q(inst.dim, T(0));
  for (const auto& e : entries) q = add(q, sub(inst.nu_points[e.j], inst.mu_points[e.i]));
  return scale(q, T(T(1) / T(static_cast<int>(entries.size()))));
}

template <typename T>
Face<T> face_of_mean(const PolyhedralCost<T>& cost, const Vec<T>& q) {
  if (cost.strictly_convex) return face_from_point(cost, {}, q);
  return face_from_point(cost, active_set(cost, q), q);
}

// Shortest path with at least one edge from local node `from` to `to`,
// moving only through nodes with allowed[node] set.
template <typename T>
std::vector<int> bfs_path(const CarriageGraph<T>& g, const std::vector<char>& allowed, int from,
                          int to) {
  const int S = g.num_sources();
  std::vector<int> prev(g.num_nodes(), -2);
  std::deque<int> queue;
  auto succ = [&](int v, auto&& fn) {
    if (v < S)
      for (int t : g.forward[v]) fn(S + t);
    else
      for (int s : g.back[v - S]) fn(s);
  };
  succ(from, [&](int w) {
    if (allowed[w] && prev[w] == -2) {
      prev[w] = from;
      queue.push_back(w);
    }
  });
  while (!queue.empty() && prev[to] == -2) {
    int v = queue.front();
    queue.pop_front();
    succ(v, [&](int w) {
      if (allowed[w] && prev[w] == -2) {
        prev[w] = v;
        queue.push_back(w);
      }
    });
  }
  if (prev[to] == -2) return {};
  std::vector<int> path{to};
  int v = prev[to];
  while (v != from) {
    path.push_back(v);
    v = prev[v];
  }
  std::reverse(path.begin(), path.end());
  return path;  // excludes `from`
}

template <typename T>
bool lifted_step_finite(const PolyhedralCost<T>& cost, const Face<T>& face, const T& dt,
                        const Vec<T>& dx_target_minus_point) {
  // w - w' = (dt, x - y) with y the lower point; finite iff (y - x)/dt lies in O
  if (is_zero(dt)) return vec_is_zero(dx_target_minus_point);
  if (Num<T>::sign(dt) < 0) return false;
  return face_contains(cost, face, scale(dx_target_minus_point, T(T(1) / dt)));
}

template <typename T>
bool chart_step_finite(const Cone<T>& cone, const T& dt, const Vec<T>& dy) {
  if (is_zero(dt)) return vec_is_zero(dy);
  if (Num<T>::sign(dt) < 0) return false;
  Vec<T> v{dt};
  v.insert(v.end(), dy.begin(), dy.end());
  return cone.contains(v);
}

template <typename T>
void refine_rec(const TransportInstance<T>& inst, const PolyhedralCost<T>& cost,
                const Face<T>& face, const std::vector<int>& sources,
                const std::vector<PlanEntry<T>>& entries, const std::string& parent,
                const std::string& prefix, int depth, ClassRefinement<T>& out) {
  CarriageGraph<T> g = build_carriage_graph(inst, cost, face, sources, entries);
  auto th = theta_prime(g);
  auto comps = indecomposable_classes(g, th);
  if (depth == 0) {
    out.graph = g;
    out.theta_prime = th;
  }
  int k = 0;
  for (const auto& comp : comps) {
    std::vector<int> members;
    for (int s : comp) members.push_back(g.sources[s]);
    std::sort(members.begin(), members.end());
    std::vector<PlanEntry<T>> sub_entries;
    for (const auto& e : entries)
      if (std::binary_search(members.begin(), members.end(), e.i)) sub_entries.push_back(e);
    Face<T> sub = face_of_mean(cost, mean_displacement(inst, sub_entries));
    std::string label = prefix + "." + std::to_string(k++);
    if (sub.affine_dim < face.affine_dim) {
      refine_rec(inst, cost, sub, members, sub_entries, parent, label, depth + 1, out);
      continue;
    }
    SubClass<T> sc;
    sc.parent = parent;
    sc.label = label;
    sc.ell = sub.affine_dim;
    sc.depth = depth;
    sc.face = sub;
    sc.subcone = lifted_face_cone(cost, sub);
    sc.members = members;
    for (const auto& e : sub_entries) sc.targets.push_back(e.j);
    std::sort(sc.targets.begin(), sc.targets.end());
    sc.targets.erase(std::unique(sc.targets.begin(), sc.targets.end()), sc.targets.end());
    sc.entries = sub_entries;
    for (int i : members) sc.mass += inst.mu_weights[i];
    // one component of the graph built on its own face, spanning that face
    sc.indecomposable = sc.subcone.dimension() - 1 == sc.ell;
    sc.witness = witness_cycle(g, comp);
    out.subclasses.push_back(std::move(sc));
  }
}

}  // namespace

template <typename T>
CarriageGraph<T> build_carriage_graph(const TransportInstance<T>& inst,
                                      const PolyhedralCost<T>& cost, const Face<T>& face,
                                      const std::vector<int>& sources,
                                      const std::vector<PlanEntry<T>>& entries) {
  CarriageGraph<T> g;
  g.face = face;
  g.sources = sources;
  std::map<int, int> src_local;
  for (std::size_t s = 0; s < sources.size(); ++s) src_local[sources[s]] = static_cast<int>(s);
  for (const auto& e : entries) {
    if (!src_local.count(e.i)) throw InputError("carriage entry starts outside the class");
    g.targets.push_back(e.j);
  }
  std::sort(g.targets.begin(), g.targets.end());
  g.targets.erase(std::unique(g.targets.begin(), g.targets.end()), g.targets.end());
  std::map<int, int> tgt_local;
  for (std::size_t t = 0; t < g.targets.size(); ++t) tgt_local[g.targets[t]] = static_cast<int>(t);
  g.forward.assign(sources.size(), {});
  for (const auto& e : entries) g.forward[src_local[e.i]].push_back(tgt_local[e.j]);
  for (auto& f : g.forward) {
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
  }
  g.entries = entries;
  g.back.assign(g.targets.size(), {});
  for (std::size_t t = 0; t < g.targets.size(); ++t)
    for (std::size_t s = 0; s < sources.size(); ++s)
      if (face_contains(cost, face, sub(inst.nu_points[g.targets[t]], inst.mu_points[sources[s]])))
        g.back[t].push_back(static_cast<int>(s));
  return g;
}

template <typename T>
std::vector<char> reach_set(const CarriageGraph<T>& g, int seed) {
  if (seed < 0 || seed >= g.num_sources() || g.forward[seed].empty())
    throw InputError("seed is not a carriage source");
  const int S = g.num_sources();
  std::vector<char> seen(g.num_nodes(), 0);
  std::vector<int> stack{seed};
  seen[seed] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (v < S) {
      for (int t : g.forward[v])
        if (!seen[S + t]) {
          seen[S + t] = 1;
          stack.push_back(S + t);
        }
    } else {
      for (int s : g.back[v - S])
        if (!seen[s]) {
          seen[s] = 1;
          stack.push_back(s);
        }
    }
  }
  return seen;
}

template <typename T>
std::vector<Digits> theta_prime(const CarriageGraph<T>& g) {
  const int S = g.num_sources();
  std::vector<Digits> th(g.num_nodes(), Digits(S, false));
  for (int n = 0; n < S; ++n) {
    auto h = reach_set(g, n);
    for (int v = 0; v < g.num_nodes(); ++v)
      if (h[v]) th[v][n] = true;
  }
  return th;
}

template <typename T>
std::vector<Digits> theta_envelope(const TransportInstance<T>& inst, const PolyhedralCost<T>& cost,
                                   const CarriageGraph<T>& g, const std::vector<Digits>& theta_p,
                                   const std::vector<LiftedPoint<T>>& points) {
  const int S = g.num_sources();
  std::vector<Digits> out;
  for (const auto& w : points) {
    Digits best(S, false);
    for (std::size_t t = 0; t < g.targets.size(); ++t) {
      const auto& y = inst.nu_points[g.targets[t]];
      if (!lifted_step_finite(cost, g.face, w.t, sub(y, w.x))) continue;
      if (best < theta_p[S + t]) best = theta_p[S + t];
    }
    out.push_back(std::move(best));
  }
  return out;
}

template <typename T>
std::vector<std::vector<int>> indecomposable_classes(const CarriageGraph<T>& g,
                                                     const std::vector<Digits>& theta_p) {
  std::map<Digits, int> index;
  std::vector<std::vector<int>> out;
  for (int s = 0; s < g.num_sources(); ++s) {
    auto [it, fresh] = index.emplace(theta_p[s], static_cast<int>(out.size()));
    if (fresh) out.emplace_back();
    out[it->second].push_back(s);
  }
  return out;
}

template <typename T>
std::vector<NodeRef> witness_cycle(const CarriageGraph<T>& g, const std::vector<int>& component) {
  const int S = g.num_sources();
  std::vector<char> allowed(g.num_nodes(), 0);
  for (int s : component) {
    allowed[s] = 1;
    for (int t : g.forward[s]) allowed[S + t] = 1;
  }
  auto ref = [&](int v) {
    return v < S ? NodeRef{false, g.sources[v]} : NodeRef{true, g.targets[v - S]};
  };
  std::vector<NodeRef> cycle{ref(component[0])};
  int at = component[0];
  std::vector<int> stops(component.begin() + 1, component.end());
  stops.push_back(component[0]);
  for (int next : stops) {
    auto path = bfs_path(g, allowed, at, next);
    if (path.empty()) return {};  // not strongly connected
    for (int v : path) cycle.push_back(ref(v));
    at = next;
  }
  return cycle;
}

template <typename T>
Vec<T> FibrationChart<T>::to_chart(const LiftedPoint<T>& z) const {
  Vec<T> r = sub(z.x, base);
  r = sub(r, scale(drift, T(z.t - T(1))));
  Vec<T> out{z.t};
  if (h > 0) {
    auto y = coordinates_in(basis, r);
    out.insert(out.end(), y.begin(), y.end());
  }
  return out;
}

template <typename T>
LiftedPoint<T> FibrationChart<T>::from_chart(const Vec<T>& ty) const {
  LiftedPoint<T> z;
  z.t = ty[0];
  z.x = add(base, scale(drift, T(z.t - T(1))));
  for (int k = 0; k < h; ++k) z.x = add(z.x, scale(basis[k], ty[k + 1]));
  return z;
}

template <typename T>
FibrationChart<T> make_chart(const Face<T>& face, const Cone<T>& cone, const Vec<T>& base_point,
                             double kappa_min) {
  FibrationChart<T> ch;
  const int d = cone.dim - 1;
  ch.dim = d;
  ch.basis = face.directions;
  ch.h = static_cast<int>(ch.basis.size());
  Vec<T> u = relint_point(cone);
  if (Num<T>::sign(u[0]) <= 0) throw InputError("class cone is not transversal to t = const");
  Vec<T> ux(d);
  for (int k = 0; k < d; ++k) ux[k] = u[k + 1] / u[0];
  ch.drift = sub(ux, project_onto(ch.basis, ux));
  ch.base = sub(base_point, project_onto(ch.basis, base_point));

  // linear part of the inverse chart: (t, y) -> (t, t * drift + basis^T y)
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d + 1, ch.h + 1);
  M(0, 0) = 1;
  for (int k = 0; k < d; ++k) M(k + 1, 0) = to_double(ch.drift[k]);
  for (int c = 0; c < ch.h; ++c)
    for (int k = 0; k < d; ++k) M(k + 1, c + 1) = to_double(ch.basis[c][k]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  ch.kappa = 1.0 / svd.singularValues()(0);
  if (ch.kappa < kappa_min) throw InputError("degenerate class span (kappa below minimum)");

  auto pull = [&](const Vec<T>& row) {
    Vec<T> r(ch.h + 1, T(0));
    r[0] = row[0];
    for (int k = 0; k < d; ++k) r[0] += row[k + 1] * ch.drift[k];
    for (int c = 0; c < ch.h; ++c)
      for (int k = 0; k < d; ++k) r[c + 1] += row[k + 1] * ch.basis[c][k];
    return r;
  };
  Mat<T> ineq, eq;
  for (const auto& row : cone.ineq) {
    auto r = pull(row);
    if (!vec_is_zero(r)) ineq.push_back(r);
  }
  for (const auto& row : cone.eq) {
    auto r = pull(row);
    if (!vec_is_zero(r)) eq.push_back(r);
  }
  ch.cone = cone_from_inequalities(ineq, eq, ch.h + 1);
  return ch;
}

template <typename T>
FibrationChart<T> to_fibration_coords(const PolyhedralCost<T>& cost, const FaceClass<T>& cls,
                                      const Vec<T>& base_point, double kappa_min) {
  (void)cost;
  return make_chart(cls.face, cls.cone, base_point, kappa_min);
}

template <typename T>
ClassRefinement<T> refine_partition(const TransportInstance<T>& inst, const PolyhedralCost<T>& cost,
                                    const FaceClass<T>& cls, const std::vector<PlanEntry<T>>& entries) {
  ClassRefinement<T> out;
  out.label = cls.label;
  if (cls.members.empty()) return out;
  out.chart = to_fibration_coords(cost, cls, inst.mu_points[cls.members[0]]);
  std::vector<PlanEntry<T>> own;
  for (const auto& e : entries)
    if (std::binary_search(cls.members.begin(), cls.members.end(), e.i)) own.push_back(e);
  refine_rec(inst, cost, cls.face, cls.members, own, cls.label, cls.label, 0, out);
  return out;
}

template <typename T>
int GridSpec<T>::num_nodes() const {
  int n = 1;
  for (int c : counts) n *= c;
  return n;
}

template <typename T>
Vec<T> GridSpec<T>::node(int k) const {
  const int h = static_cast<int>(counts.size());
  Vec<T> y(h);
  for (int a = h - 1; a >= 0; --a) {
    int idx = k % counts[a];
    k /= counts[a];
    y[a] = lo[a] + (hi[a] - lo[a]) * T(idx) / T(counts[a] - 1);
  }
  return y;
}

template <typename T>
std::vector<std::vector<Digits>> grid_usc_envelope(const Cone<T>& cone, const GridSpec<T>& spec,
                                                   const std::vector<GridSeed<T>>& seeds) {
  const int h = static_cast<int>(spec.counts.size());
  if (cone.dim != h + 1) throw InputError("grid and cone dimensions differ");
  if (spec.levels.empty()) throw InputError("grid needs at least one level");
  for (int c : spec.counts)
    if (c < 2) throw InputError("grid needs at least two nodes per axis");
  std::size_t bits = seeds.empty() ? 0 : seeds[0].value.size();
  for (const auto& s : seeds)
    for (int a = 0; a < h; ++a)
      if (approx_less(s.y[a], spec.lo[a]) || approx_less(spec.hi[a], s.y[a]))
        throw InputError("grid does not cover the class");
  std::vector<std::vector<Digits>> out;
  const int n = spec.num_nodes();
  for (const auto& t : spec.levels) {
    std::vector<Digits> level(n, Digits(bits, false));
    for (int k = 0; k < n; ++k) {
      Vec<T> y = spec.node(k);
      for (const auto& s : seeds)
        if (chart_step_finite(cone, T(t - spec.levels[0]), sub(y, s.y)) && level[k] < s.value)
          level[k] = s.value;
    }
    out.push_back(std::move(level));
  }
  return out;
}

template <typename T>
std::vector<Digits> evolve(const Cone<T>& cone, const GridSpec<T>& spec,
                           const std::vector<Digits>& values, const T& from, const T& to) {
  const int n = spec.num_nodes();
  if (static_cast<int>(values.size()) != n) throw InputError("grid level size mismatch");
  std::size_t bits = values.empty() ? 0 : values[0].size();
  std::vector<Vec<T>> nodes(n);
  for (int k = 0; k < n; ++k) nodes[k] = spec.node(k);
  std::vector<Digits> out(n, Digits(bits, false));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      if (chart_step_finite(cone, T(to - from), sub(nodes[k], nodes[l])) && out[k] < values[l])
        out[k] = values[l];
  return out;
}

#define SUDAKOV_INSTANTIATE(T)                                                                    \
  template CarriageGraph<T> build_carriage_graph<T>(const TransportInstance<T>&,                  \
                                                    const PolyhedralCost<T>&, const Face<T>&,     \
                                                    const std::vector<int>&,                      \
                                                    const std::vector<PlanEntry<T>>&);            \
  template std::vector<char> reach_set<T>(const CarriageGraph<T>&, int);                          \
  template std::vector<Digits> theta_prime<T>(const CarriageGraph<T>&);                           \
  template std::vector<Digits> theta_envelope<T>(                                                 \
      const TransportInstance<T>&, const PolyhedralCost<T>&, const CarriageGraph<T>&,             \
      const std::vector<Digits>&, const std::vector<LiftedPoint<T>>&);                            \
  template std::vector<std::vector<int>> indecomposable_classes<T>(const CarriageGraph<T>&,       \
                                                                   const std::vector<Digits>&);   \
  template std::vector<NodeRef> witness_cycle<T>(const CarriageGraph<T>&, const std::vector<int>&); \
  template struct FibrationChart<T>;                                                              \
  template FibrationChart<T> make_chart<T>(const Face<T>&, const Cone<T>&, const Vec<T>&, double); \
  template FibrationChart<T> to_fibration_coords<T>(const PolyhedralCost<T>&, const FaceClass<T>&, \
                                                    const Vec<T>&, double);                       \
  template ClassRefinement<T> refine_partition<T>(const TransportInstance<T>&,                    \
                                                  const PolyhedralCost<T>&, const FaceClass<T>&,  \
                                                  const std::vector<PlanEntry<T>>&);              \
  template struct GridSpec<T>;                                                                    \
  template std::vector<std::vector<Digits>> grid_usc_envelope<T>(                                 \
      const Cone<T>&, const GridSpec<T>&, const std::vector<GridSeed<T>>&);                       \
  template std::vector<Digits> evolve<T>(const Cone<T>&, const GridSpec<T>&,                      \
                                         const std::vector<Digits>&, const T&, const T&);

SUDAKOV_INSTANTIATE(double)
SUDAKOV_INSTANTIATE(Rational)

}  // namespace sudakov
