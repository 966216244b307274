#include "sudakov/cone_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace sudakov {

namespace {

template <typename T>
Vec<T> normalized_direction(const Vec<T>& v) {
  Vec<T> out = v;
  if constexpr (Num<T>::exact) {
    for (const auto& x : v)
      if (!is_zero(x)) {
        T s = Num<T>::abs(x);
        for (auto& y : out) y /= s;
        break;
      }
  } else {
    double m = 0;
    for (double x : v) m = std::max(m, std::fabs(x));
    if (m > 0)
      for (auto& y : out) y /= m;
  }
  return out;
}

template <typename T>
void push_unique_direction(Vec<Vec<T>>& list, const Vec<T>& v) {
  Vec<T> n = normalized_direction(v);
  for (const auto& u : list)
    if (vec_approx_eq(u, n)) return;
  list.push_back(std::move(n));
}

void for_each_combination(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

template <typename T>
void check_dim(const PolyhedralCost<T>& cost, const Vec<T>& q) {
  if (static_cast<int>(q.size()) != cost.dim)
    throw InputError("dimension mismatch: cost has dim " + std::to_string(cost.dim) +
                     ", point has " + std::to_string(q.size()));
}

template <typename T>
T half_sq(const Vec<T>& q) {
  return dot(q, q) / T(2);
}

}  // namespace

template <typename T>
PolyhedralCost<T> make_cost(int dim, Vec<Vec<T>> a, Vec<T> b, std::string name) {
  if (dim <= 0) throw InputError("cost dimension must be positive");
  if (a.empty()) throw InputError("cost has no pieces");
  if (a.size() != b.size()) throw InputError("piece count mismatch");
  PolyhedralCost<T> c;
  c.dim = dim;
  c.name = std::move(name);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (static_cast<int>(a[i].size()) != dim)
      throw InputError("piece " + std::to_string(i) + " has wrong dimension");
    bool dup = false;
    for (std::size_t k = 0; k < c.a.size(); ++k)
      if (vec_approx_eq(c.a[k], a[i]) && approx_eq(c.b[k], b[i])) dup = true;
    if (dup) continue;
    c.a.push_back(a[i]);
    c.b.push_back(b[i]);
  }
  return c;
}

template <typename T>
PolyhedralCost<T> preset_cost(std::string_view name, int d) {
  if (d <= 0) throw InputError("cost dimension must be positive");
  Vec<Vec<T>> a;
  Vec<T> b;
  if (name == "linf") {
    for (int i = 0; i < d; ++i)
      for (int s : {1, -1}) {
        Vec<T> v(d, T(0));
        v[i] = s;
        a.push_back(v);
        b.push_back(T(0));
      }
  } else if (name == "l1") {
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vec<T> v(d);
      for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? T(-1) : T(1);
      a.push_back(v);
      b.push_back(T(0));
    }
  } else if (name == "quadratic") {
    PolyhedralCost<T> c;
    c.dim = d;
    c.strictly_convex = true;
    c.name = "quadratic";
    return c;
  } else {
    throw InputError("unknown cost preset '" + std::string(name) + "'");
  }
  return make_cost<T>(d, std::move(a), std::move(b), std::string(name));
}

template <typename T>
T evaluate_cost(const PolyhedralCost<T>& cost, const Vec<T>& q) {
  check_dim(cost, q);
  if (cost.strictly_convex) return half_sq(q);
  T best = dot(cost.a[0], q) + cost.b[0];
  for (std::size_t i = 1; i < cost.size(); ++i) {
    T v = dot(cost.a[i], q) + cost.b[i];
    if (v > best) best = v;
  }
  if (Num<T>::sign(best) < 0) throw InputError("cost is negative at a queried point");
  return best;
}

template <typename T>
std::vector<int> active_set(const PolyhedralCost<T>& cost, const Vec<T>& q, const T& tol) {
  check_dim(cost, q);
  std::vector<int> out;
  if (cost.strictly_convex) return out;
  Vec<T> vals(cost.size());
  T best = 0;
  for (std::size_t i = 0; i < cost.size(); ++i) {
    vals[i] = dot(cost.a[i], q) + cost.b[i];
    if (i == 0 || vals[i] > best) best = vals[i];
  }
  for (std::size_t i = 0; i < cost.size(); ++i)
    if (vals[i] >= best - tol) out.push_back(static_cast<int>(i));
  return out;
}

template <typename T>
Face<T> face_from_point(const PolyhedralCost<T>& cost, const std::vector<int>& active,
                        const Vec<T>& q) {
  Face<T> f;
  f.point = q;
  if (cost.strictly_convex) {
    f.generators = {q};
    f.affine_dim = 0;
    f.slope = q;
    f.offset = -half_sq(q);
    return f;
  }
  const int d = cost.dim;
  f.active = active;
  int i0 = active.front();
  Mat<T> rows;
  for (int i : active)
    if (i != i0) rows.push_back(sub(cost.a[i], cost.a[i0]));
  f.directions = nullspace(rows, d);
  f.affine_dim = static_cast<int>(f.directions.size());
  f.slope = cost.a[i0];
  f.offset = cost.b[i0];
  T cq = dot(cost.a[i0], q) + cost.b[i0];
  f.generators.push_back(q);
  for (const auto& v : f.directions) {
    T eps = 1;
    for (std::size_t l = 0; l < cost.size(); ++l) {
      if (std::binary_search(active.begin(), active.end(), static_cast<int>(l))) continue;
      T slack = cq - (dot(cost.a[l], q) + cost.b[l]);
      T rate = dot(sub(cost.a[l], cost.a[i0]), v);
      if (Num<T>::sign(rate) > 0) {
        T e = slack / (T(2) * rate);
        if (e < eps) eps = e;
      }
    }
    f.generators.push_back(add(q, scale(v, eps)));
  }
  return f;
}

template <typename T>
Face<T> minimal_extremal_face(const PolyhedralCost<T>& cost, const Vec<T>& q) {
  check_dim(cost, q);
  if (cost.strictly_convex) return face_from_point(cost, {}, q);
  return face_from_point(cost, active_set(cost, q), q);
}

template <typename T>
bool face_contains(const PolyhedralCost<T>& cost, const Face<T>& face, const Vec<T>& p) {
  if (cost.strictly_convex) return vec_approx_eq(face.point, p);
  auto act = active_set(cost, p);
  return std::includes(act.begin(), act.end(), face.active.begin(), face.active.end());
}

template <typename T>
Vec<Vec<T>> subdifferential(const PolyhedralCost<T>& cost, const Vec<T>& q) {
  check_dim(cost, q);
  if (cost.strictly_convex) return {q};
  Vec<Vec<T>> out;
  for (int i : active_set(cost, q)) {
    bool dup = false;
    for (const auto& v : out)
      if (vec_approx_eq(v, cost.a[i])) dup = true;
    if (!dup) out.push_back(cost.a[i]);
  }
  return out;
}

template <typename T>
LiftedCost<T> lift_cost(const PolyhedralCost<T>& cost) {
  LiftedCost<T> lc;
  lc.base = cost;
  for (std::size_t i = 0; i < cost.size(); ++i) {
    lc.slope.push_back(scale(cost.a[i], T(-1)));
    lc.b.push_back(cost.b[i]);
  }
  return lc;
}

template <typename T>
std::optional<T> evaluate_lifted(const LiftedCost<T>& lc, const T& t, const Vec<T>& x) {
  check_dim(lc.base, x);
  int s = Num<T>::sign(t);
  if (s < 0) return std::nullopt;
  if (s == 0) {
    if (vec_is_zero(x)) return T(0);
    return std::nullopt;
  }
  if (lc.base.strictly_convex) return half_sq(x) / t;
  T best = lc.b[0] * t + dot(lc.slope[0], x);
  for (std::size_t i = 1; i < lc.slope.size(); ++i) {
    T v = lc.b[i] * t + dot(lc.slope[i], x);
    if (v > best) best = v;
  }
  if (Num<T>::sign(best) < 0) throw InputError("cost is negative at a queried point");
  return best;
}

template <typename T>
bool Cone<T>::contains(const Vec<T>& v) const {
  for (const auto& g : ineq)
    if (Num<T>::sign(dot(g, v)) < 0) return false;
  for (const auto& g : eq)
    if (!is_zero(dot(g, v))) return false;
  return true;
}

template <typename T>
Cone<T> cone_from_inequalities(const Mat<T>& ineq, const Mat<T>& eq, int dim) {
  Cone<T> c;
  c.dim = dim;
  c.ineq = ineq;
  c.eq = eq;
  Mat<T> all = ineq;
  all.insert(all.end(), eq.begin(), eq.end());
  Mat<T> lin = nullspace(all, dim);
  Mat<T> base = eq;
  base.insert(base.end(), lin.begin(), lin.end());
  int rb = rank_of(base, dim);
  int need = dim - 1 - rb;
  Vec<Vec<T>> rays;
  if (need >= 0) {
    for_each_combination(static_cast<int>(ineq.size()), need, [&](const std::vector<int>& idx) {
      Mat<T> m = base;
      for (int i : idx) m.push_back(ineq[i]);
      Mat<T> ns = nullspace(m, dim);
      if (ns.size() != 1) return;
      for (int sgn : {1, -1}) {
        Vec<T> r = scale(ns[0], T(sgn));
        bool ok = true;
        for (const auto& g : ineq)
          if (Num<T>::sign(dot(g, r)) < 0) {
            ok = false;
            break;
          }
        if (ok) push_unique_direction(rays, r);
      }
    });
  }
  c.generators = rays;
  for (const auto& l : lin) {
    c.generators.push_back(l);
    c.generators.push_back(scale(l, T(-1)));
  }
  return c;
}

template <typename T>
Cone<T> cone_from_generators(const Vec<Vec<T>>& gens_in, int dim) {
  Vec<Vec<T>> gens;
  for (const auto& g : gens_in) {
    if (static_cast<int>(g.size()) != dim) throw InputError("generator dimension mismatch");
    if (!vec_is_zero(g)) push_unique_direction(gens, g);
  }
  Mat<T> eq = nullspace(Mat<T>(gens), dim);
  int k = dim - static_cast<int>(eq.size());
  Mat<T> facets;
  if (k > 0) {
    for_each_combination(static_cast<int>(gens.size()), k - 1, [&](const std::vector<int>& idx) {
      Mat<T> m = eq;
      for (int i : idx) m.push_back(gens[i]);
      Mat<T> ns = nullspace(m, dim);
      if (ns.size() != 1) return;
      const Vec<T>& n = ns[0];
      int pos = 0, neg = 0;
      for (const auto& g : gens) {
        int s = Num<T>::sign(dot(n, g));
        if (s > 0) ++pos;
        if (s < 0) ++neg;
        if (pos && neg) return;
      }
      if (neg == 0)
        push_unique_direction(facets, n);
      else
        push_unique_direction(facets, scale(n, T(-1)));
    });
  }
  return cone_from_inequalities(facets, eq, dim);
}

template <typename T>
Cone<T> lifted_face_cone(const PolyhedralCost<T>& cost, const std::vector<int>& active) {
  const int d = cost.dim;
  if (cost.strictly_convex) throw InputError("strictly convex costs have point faces");
  auto lifted_row = [&](int i) {
    Vec<T> r(d + 1);
    r[0] = cost.b[i];
    for (int k = 0; k < d; ++k) r[k + 1] = -cost.a[i][k];
    return r;
  };
  int i0 = active.front();
  Vec<T> r0 = lifted_row(i0);
  Mat<T> eq, ineq;
  Vec<T> tpos(d + 1, T(0));
  tpos[0] = 1;
  ineq.push_back(tpos);
  for (int i = 0; i < static_cast<int>(cost.size()); ++i) {
    if (i == i0) continue;
    if (std::binary_search(active.begin(), active.end(), i))
      eq.push_back(sub(lifted_row(i), r0));
    else
      ineq.push_back(sub(r0, lifted_row(i)));
  }
  return cone_from_inequalities(ineq, eq, d + 1);
}

template <typename T>
Cone<T> lifted_face_cone(const PolyhedralCost<T>& cost, const Face<T>& face) {
  if (cost.strictly_convex) {
    Vec<T> g(cost.dim + 1);
    g[0] = 1;
    for (int k = 0; k < cost.dim; ++k) g[k + 1] = -face.point[k];
    return cone_from_generators<T>({g}, cost.dim + 1);
  }
  return lifted_face_cone(cost, face.active);
}

template <typename T>
Cone<T> minimal_face_of_cone(const Cone<T>& cone, const Vec<T>& v) {
  if (!cone.contains(v)) throw InputError("vector is not in the cone");
  Mat<T> ineq, eq = cone.eq;
  for (const auto& g : cone.ineq) {
    if (is_zero(dot(g, v)))
      eq.push_back(g);
    else
      ineq.push_back(g);
  }
  return cone_from_inequalities(ineq, eq, cone.dim);
}

template <typename T>
Vec<T> relint_point(const Cone<T>& cone) {
  Vec<T> s(cone.dim, T(0));
  for (const auto& g : cone.generators) s = add(s, g);
  return s;
}

template <typename T>
Cone<T> direction_hull(const Vec<Vec<T>>& dirs) {
  if (dirs.empty()) throw InputError("direction_hull needs at least one direction");
  int dim = static_cast<int>(dirs[0].size());
  for (const auto& v : dirs)
    if (static_cast<int>(v.size()) != dim || !approx_eq(v[0], T(1)))
      throw InputError("directions must have t-component 1");
  return cone_from_generators(dirs, dim);
}

template <typename T>
bool Polytope<T>::contains(const Vec<T>& x) const {
  if (empty) return false;
  for (std::size_t i = 0; i < ineq.size(); ++i)
    if (Num<T>::sign(T(dot(ineq[i], x) - ineq_rhs[i])) < 0) return false;
  for (std::size_t i = 0; i < eq.size(); ++i)
    if (!approx_eq(dot(eq[i], x), eq_rhs[i])) return false;
  return true;
}

template <typename T>
Vec<Vec<T>> Polytope<T>::vertices() const {
  Vec<Vec<T>> out;
  if (empty) return out;
  int re = rank_of(eq, dim);
  int need = dim - re;
  for_each_combination(static_cast<int>(ineq.size()), need, [&](const std::vector<int>& idx) {
    Mat<T> A = eq;
    Vec<T> b = eq_rhs;
    for (int i : idx) {
      A.push_back(ineq[i]);
      b.push_back(ineq_rhs[i]);
    }
    if (rank_of(A, dim) != dim) return;
    auto x = solve_linear(A, b, dim);
    if (!x || !contains(*x)) return;
    for (const auto& v : out)
      if (vec_approx_eq(v, *x)) return;
    out.push_back(*x);
  });
  return out;
}

template <typename T>
Polytope<T> cone_diamond(const Vec<T>& w, const Vec<T>& w2, const Cone<T>& cone) {
  Polytope<T> p;
  p.dim = cone.dim;
  if (!cone.contains(sub(w2, w))) {
    p.empty = true;
    return p;
  }
  for (const auto& g : cone.ineq) {
    p.ineq.push_back(g);
    p.ineq_rhs.push_back(dot(g, w));
    p.ineq.push_back(scale(g, T(-1)));
    p.ineq_rhs.push_back(-dot(g, w2));
  }
  for (const auto& g : cone.eq) {
    p.eq.push_back(g);
    p.eq_rhs.push_back(dot(g, w));
  }
  return p;
}

template <typename T>
std::vector<std::pair<double, double>> section_polygon(const Cone<T>& cone, double bound) {
  if (cone.dim != 3) throw InputError("section_polygon needs a lifted cone in d = 2");
  Polytope<double> p;
  p.dim = 2;
  for (const auto& g : cone.ineq) {
    p.ineq.push_back({to_double(g[1]), to_double(g[2])});
    p.ineq_rhs.push_back(-to_double(g[0]));
  }
  for (const auto& g : cone.eq) {
    p.eq.push_back({to_double(g[1]), to_double(g[2])});
    p.eq_rhs.push_back(-to_double(g[0]));
  }
  for (int k = 0; k < 2; ++k)
    for (double s : {1.0, -1.0}) {
      Vec<double> r(2, 0.0);
      r[k] = -s;
      p.ineq.push_back(r);
      p.ineq_rhs.push_back(-bound);
    }
  auto verts = p.vertices();
  std::vector<std::pair<double, double>> out;
  double cx = 0, cy = 0;
  for (const auto& v : verts) {
    cx += v[0];
    cy += v[1];
  }
  if (verts.empty()) return out;
  cx /= verts.size();
  cy /= verts.size();
  for (const auto& v : verts) out.emplace_back(v[0], v[1]);
  std::sort(out.begin(), out.end(), [&](auto& a, auto& b) {
    return std::atan2(a.second - cy, a.first - cx) < std::atan2(b.second - cy, b.first - cx);
  });
  return out;
}

namespace {

double point_segment_distance(std::pair<double, double> p, std::pair<double, double> a,
                              std::pair<double, double> b) {
  double dx = b.first - a.first, dy = b.second - a.second;
  double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.first - a.first) * dx + (p.second - a.second) * dy) / len2 : 0;
  t = std::clamp(t, 0.0, 1.0);
  double ex = a.first + t * dx - p.first, ey = a.second + t * dy - p.second;
  return std::sqrt(ex * ex + ey * ey);
}

double point_polygon_distance(std::pair<double, double> p,
                              const std::vector<std::pair<double, double>>& poly) {
  if (poly.size() == 1)
    return std::hypot(p.first - poly[0].first, p.second - poly[0].second);
  bool inside = poly.size() >= 3;
  double best = 1e300;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    auto a = poly[i], b = poly[(i + 1) % poly.size()];
    double cross = (b.first - a.first) * (p.second - a.second) -
                   (b.second - a.second) * (p.first - a.first);
    if (cross < -1e-12) inside = false;
    best = std::min(best, point_segment_distance(p, a, b));
  }
  return inside ? 0.0 : best;
}

}  // namespace

double hausdorff_convex_2d(const std::vector<std::pair<double, double>>& a,
                           const std::vector<std::pair<double, double>>& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty() ? 0.0 : 1e300;
  double h = 0;
  for (auto p : a) h = std::max(h, point_polygon_distance(p, b));
  for (auto p : b) h = std::max(h, point_polygon_distance(p, a));
  return h;
}

#define SUDAKOV_INSTANTIATE(T)                                                                   \
  template PolyhedralCost<T> make_cost<T>(int, Vec<Vec<T>>, Vec<T>, std::string);               \
  template PolyhedralCost<T> preset_cost<T>(std::string_view, int);                              \
  template T evaluate_cost<T>(const PolyhedralCost<T>&, const Vec<T>&);                          \
  template std::vector<int> active_set<T>(const PolyhedralCost<T>&, const Vec<T>&, const T&);    \
  template Face<T> face_from_point<T>(const PolyhedralCost<T>&, const std::vector<int>&,         \
                                      const Vec<T>&);                                            \
  template Face<T> minimal_extremal_face<T>(const PolyhedralCost<T>&, const Vec<T>&);            \
  template bool face_contains<T>(const PolyhedralCost<T>&, const Face<T>&, const Vec<T>&);       \
  template Vec<Vec<T>> subdifferential<T>(const PolyhedralCost<T>&, const Vec<T>&);              \
  template LiftedCost<T> lift_cost<T>(const PolyhedralCost<T>&);                                 \
  template std::optional<T> evaluate_lifted<T>(const LiftedCost<T>&, const T&, const Vec<T>&);   \
  template struct Cone<T>;                                                                       \
  template Cone<T> cone_from_inequalities<T>(const Mat<T>&, const Mat<T>&, int);                 \
  template Cone<T> cone_from_generators<T>(const Vec<Vec<T>>&, int);                             \
  template Cone<T> lifted_face_cone<T>(const PolyhedralCost<T>&, const std::vector<int>&);       \
  template Cone<T> lifted_face_cone<T>(const PolyhedralCost<T>&, const Face<T>&);                \
  template Cone<T> minimal_face_of_cone<T>(const Cone<T>&, const Vec<T>&);                       \
  template Vec<T> relint_point<T>(const Cone<T>&);                                               \
  template Cone<T> direction_hull<T>(const Vec<Vec<T>>&);                                        \
  template struct Polytope<T>;                                                                   \
  template Polytope<T> cone_diamond<T>(const Vec<T>&, const Vec<T>&, const Cone<T>&);            \
  template std::vector<std::pair<double, double>> section_polygon<T>(const Cone<T>&, double);

SUDAKOV_INSTANTIATE(double)
SUDAKOV_INSTANTIATE(Rational)

}  // namespace sudakov
