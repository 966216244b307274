#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "sudakov/linalg.hpp"

namespace sudakov {

template <typename T>
T default_tol() {
  if constexpr (Num<T>::exact)
    return T(0);
  else
    return T(Num<T>::tol);
}

/// Convex cost c(q) = max_i (a_i . q + b_i). The quadratic preset sets
/// strictly_convex and carries no pieces; it is evaluated as |q|^2 / 2.
template <typename T>
struct PolyhedralCost {
  int dim = 0;
  Vec<Vec<T>> a;
  Vec<T> b;
  bool strictly_convex = false;
  std::string name;

  std::size_t size() const { return a.size(); }
};

/// Validates shapes and drops duplicate pieces.
template <typename T>
PolyhedralCost<T> make_cost(int dim, Vec<Vec<T>> a, Vec<T> b, std::string name = "");

/// "linf", "l1" or "quadratic" in dimension d.
template <typename T>
PolyhedralCost<T> preset_cost(std::string_view name, int d);

template <typename T>
T evaluate_cost(const PolyhedralCost<T>& cost, const Vec<T>& q);

template <typename T>
std::vector<int> active_set(const PolyhedralCost<T>& cost, const Vec<T>& q, const T& tol);

template <typename T>
std::vector<int> active_set(const PolyhedralCost<T>& cost, const Vec<T>& q) {
  return active_set(cost, q, default_tol<T>());
}

/// Projected face O of epi c: the points where every piece of `active` is maximal.
template <typename T>
struct Face {
  std::vector<int> active;
  Vec<Vec<T>> generators;
  int affine_dim = 0;
  Vec<T> slope;  // c(p) = slope . p + offset on the face
  T offset = 0;
  Vec<Vec<T>> directions;  // basis of the direction space of aff(O)
  Vec<T> point;            // relative interior point the face was built from
};

template <typename T>
Face<T> minimal_extremal_face(const PolyhedralCost<T>& cost, const Vec<T>& q);

/// Face with a prescribed active set; `q` must have exactly that active set.
template <typename T>
Face<T> face_from_point(const PolyhedralCost<T>& cost, const std::vector<int>& active,
                        const Vec<T>& q);

template <typename T>
bool face_contains(const PolyhedralCost<T>& cost, const Face<T>& face, const Vec<T>& p);

template <typename T>
bool same_face(const Face<T>& f, const Face<T>& g) {
  if (f.active != g.active) return false;
  if (f.active.empty()) return vec_approx_eq(f.point, g.point);
  return true;
}

/// Vertices of the subdifferential conv{a_i : i active}; the gradient for
/// the quadratic preset.
template <typename T>
Vec<Vec<T>> subdifferential(const PolyhedralCost<T>& cost, const Vec<T>& q);

/// 1-homogeneous lifting cbar(t, x) = t c(-x / t).
template <typename T>
struct LiftedCost {
  PolyhedralCost<T> base;
  Vec<Vec<T>> slope;  // -a_i
  Vec<T> b;
};

template <typename T>
LiftedCost<T> lift_cost(const PolyhedralCost<T>& cost);

/// nullopt stands for +infinity (t < 0, or t = 0 with x != 0).
template <typename T>
std::optional<T> evaluate_lifted(const LiftedCost<T>& lc, const T& t, const Vec<T>& x);

/// Closed polyhedral cone {v : ineq v >= 0, eq v = 0} with its generators
/// (extreme rays plus a +/- basis of the lineality space).
template <typename T>
struct Cone {
  int dim = 0;
  Vec<Vec<T>> generators;
  Mat<T> ineq;
  Mat<T> eq;

  bool contains(const Vec<T>& v) const;
  int dimension() const { return rank_of(Mat<T>(generators), dim); }
};

template <typename T>
Cone<T> cone_from_generators(const Vec<Vec<T>>& gens, int dim);

template <typename T>
Cone<T> cone_from_inequalities(const Mat<T>& ineq, const Mat<T>& eq, int dim);

/// Lifted cone C_I = closure of R+ (1, -O_I) in [0, inf) x R^d.
template <typename T>
Cone<T> lifted_face_cone(const PolyhedralCost<T>& cost, const std::vector<int>& active);

template <typename T>
Cone<T> lifted_face_cone(const PolyhedralCost<T>& cost, const Face<T>& face);

/// Smallest face of `cone` containing v (v must lie in the cone).
template <typename T>
Cone<T> minimal_face_of_cone(const Cone<T>& cone, const Vec<T>& v);

/// Sum of generators; lies in the relative interior.
template <typename T>
Vec<T> relint_point(const Cone<T>& cone);

/// R+ conv(dirs); every direction must have t-component 1.
template <typename T>
Cone<T> direction_hull(const Vec<Vec<T>>& dirs);

/// {x : ineq x >= ineq_rhs, eq x = eq_rhs}.
template <typename T>
struct Polytope {
  int dim = 0;
  Mat<T> ineq;
  Vec<T> ineq_rhs;
  Mat<T> eq;
  Vec<T> eq_rhs;
  bool empty = false;

  bool contains(const Vec<T>& x) const;
  /// Brute-force vertex enumeration (small dimension only).
  Vec<Vec<T>> vertices() const;
};

/// (w + C) n (w2 - C).
template <typename T>
Polytope<T> cone_diamond(const Vec<T>& w, const Vec<T>& w2, const Cone<T>& cone);

/// t = 1 section of a lifted cone in d = 2, clipped to |x|_inf <= bound,
/// as a counter-clockwise polygon.
template <typename T>
std::vector<std::pair<double, double>> section_polygon(const Cone<T>& cone, double bound);

double hausdorff_convex_2d(const std::vector<std::pair<double, double>>& a,
                           const std::vector<std::pair<double, double>>& b);

}  // namespace sudakov
