#pragma once

#include <map>
#include <string>

#include "sudakov/ot_solver.hpp"

namespace sudakov {

/// z = (t, x); sources sit at t = 1, targets at t = 0.
template <typename T>
struct LiftedPoint {
  T t = 0;
  Vec<T> x;

  Vec<T> stacked() const {
    Vec<T> v{t};
    v.insert(v.end(), x.begin(), x.end());
    return v;
  }
};

/// Extension of the target potential by the Lax formula
///   phibar(t, x) = min_j ( -psi_j + cbar(t, x - y_j) ).
template <typename T>
struct PotentialField {
  PolyhedralCost<T> cost;
  LiftedCost<T> lifted;
  Vec<Vec<T>> targets;
  Vec<T> psi;
};

template <typename T>
PotentialField<T> make_potential(const PolyhedralCost<T>& cost, Vec<Vec<T>> targets, Vec<T> psi);

/// nullopt when every target is at infinite lifted cost (t = 0 off the atoms).
template <typename T>
std::optional<T> lax_extend(const PotentialField<T>& field, const LiftedPoint<T>& z);

/// Targets attaining the minimum in the Lax formula.
template <typename T>
std::vector<int> lax_argmin(const PotentialField<T>& field, const LiftedPoint<T>& z);

/// Candidates realizing the sub- or super-differential equality at z, with
/// their directions normalized to t-component 1. Candidates at the same
/// level as z carry no direction and are skipped.
template <typename T>
struct DifferentialPairs {
  std::vector<int> indices;
  Vec<Vec<T>> directions;
};

/// z' with t' < t and phibar(z) - phibar(z') = cbar(z - z').
template <typename T>
DifferentialPairs<T> subdiff_pairs(const PotentialField<T>& field, const LiftedPoint<T>& z,
                                   const std::vector<LiftedPoint<T>>& candidates);

/// z'' with t'' > t and phibar(z'') - phibar(z) = cbar(z'' - z).
template <typename T>
DifferentialPairs<T> superdiff_pairs(const PotentialField<T>& field, const LiftedPoint<T>& z,
                                     const std::vector<LiftedPoint<T>>& candidates);

enum class PointKind { Fixed, BackwardRegular, ForwardRegular, Regular, Residual };

std::string to_string(PointKind k);

template <typename T>
struct Classification {
  PointKind kind = PointKind::Residual;
  int h = -1;          // backward hull dimension (-1 when the hull is not convex)
  int h_forward = -1;  // forward hull dimension
  std::vector<int> tight;
  Face<T> face;  // O for the backward hull, when convex
  bool backward_convex = false;
  bool forward_convex = false;
  bool backward_witness = false;
  bool forward_witness = false;
  std::vector<std::string> reasons;
};

template <typename T>
struct ClassifyOptions {
  T witness_radius = T(1) / T(1000);
};

/// Caches per-piece lifted cones; one instance per potential field.
template <typename T>
class PointClassifier {
 public:
  PointClassifier(const PotentialField<T>& field, ClassifyOptions<T> opts = {});

  /// Tight targets from the Lax argmin.
  Classification<T> classify(const LiftedPoint<T>& z);
  /// Tight targets supplied (e.g. from strictly complementary duals).
  Classification<T> classify(const LiftedPoint<T>& z, const std::vector<int>& tight);

  const Cone<T>& piece_cone(int i);
  Cone<T> face_cone(const Face<T>& f);

 private:
  struct Hull {
    bool fixed = false;
    bool convex = false;
    int h = -1;
    Face<T> face;
    std::vector<int> tight;
  };
  struct Forward {
    bool convex = false;
    int h = -1;
  };
  Hull backward_hull(const LiftedPoint<T>& z, const std::vector<int>& tight);
  Forward forward_hull(const Hull& b);
  Vec<T> inner_direction(const Hull& b);

  const PotentialField<T>& field_;
  ClassifyOptions<T> opts_;
  std::map<int, Cone<T>> piece_cones_;
  std::map<std::vector<int>, Cone<T>> face_cones_;
};

/// One element of the directed locally affine partition.
template <typename T>
struct FaceClass {
  std::string label;
  int h = 0;
  std::vector<int> active;  // active set of the projected face O
  Face<T> face;
  Cone<T> cone;  // lifted cone, its t = 1 section is -O
  std::vector<int> members;  // source indices
  T mass = 0;
  Mat<T> directions;  // basis of the direction space V of aff O
  Mat<T> normals;     // reduced basis W of V-perp
  Vec<T> offset;      // W x, shared by all members
};

template <typename T>
struct Partition {
  std::vector<FaceClass<T>> classes;
  std::vector<Classification<T>> records;  // per source
  std::vector<int> class_of;               // per source, -1 when unclassified
  T fixed_mass = 0;
  T residual_mass = 0;
  CanonicalDuals<T> duals;
  PotentialField<T> field;
};

/// Classes keyed by (h, active set, affine span). `optimal` must be an LP
/// optimum with potentials; the canonical duals it induces are shared by
/// every optimal plan, so the partition does not depend on which one is given.
template <typename T>
Partition<T> first_partition(const TransportInstance<T>& inst, const PolyhedralCost<T>& cost,
                             const Plan<T>& optimal, const ClassifyOptions<T>& opts = {});

}  // namespace sudakov
