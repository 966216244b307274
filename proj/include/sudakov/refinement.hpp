#pragma once

#include <string>

#include "sudakov/lifting_potential.hpp"

namespace sudakov {

/// Ternary value sum_n 2 * 3^-(n+1) [bit n], one bit per seed; comparing the
/// bit strings lexicographically compares the values exactly.
using Digits = std::vector<bool>;

std::string digits_string(const Digits& d);  // "2020..." ternary digits
double digits_value(const Digits& d);

/// Bipartite carriage digraph of one class. Local node ids: sources first
/// (0 .. S-1), then targets (S .. S+T-1).
template <typename T>
struct CarriageGraph {
  Face<T> face;                                // current face; return edges need y - x in it
  std::vector<int> sources;                    // instance indices
  std::vector<int> targets;                    // instance indices
  std::vector<std::vector<int>> forward;       // per local source: local target ids (support pairs)
  std::vector<std::vector<int>> back;          // per local target: local source ids (return edges)
  std::vector<PlanEntry<T>> entries;           // support pairs, instance indices

  int num_sources() const { return static_cast<int>(sources.size()); }
  int num_nodes() const { return static_cast<int>(sources.size() + targets.size()); }
};

/// Every entry must start at one of `sources`. Return edge t -> s whenever
/// the displacement y_t - x_s lies in `face` (lifted: finite indicator cost).
template <typename T>
CarriageGraph<T> build_carriage_graph(const TransportInstance<T>& inst,
                                      const PolyhedralCost<T>& cost, const Face<T>& face,
                                      const std::vector<int>& sources,
                                      const std::vector<PlanEntry<T>>& entries);

/// Nodes reachable from a local source by alternating support and return edges.
template <typename T>
std::vector<char> reach_set(const CarriageGraph<T>& g, int seed);

/// theta' per node with every source as a seed, in local index order.
template <typename T>
std::vector<Digits> theta_prime(const CarriageGraph<T>& g);

/// theta(w) = max theta'(w') over targets w' with w - w' in the lifted face
/// cone (finite cost); zero when there is none.
template <typename T>
std::vector<Digits> theta_envelope(const TransportInstance<T>& inst, const PolyhedralCost<T>& cost,
                                   const CarriageGraph<T>& g, const std::vector<Digits>& theta_p,
                                   const std::vector<LiftedPoint<T>>& points);

/// Strongly connected components on the sources (lists of local source ids),
/// read off as the level classes of theta'.
template <typename T>
std::vector<std::vector<int>> indecomposable_classes(const CarriageGraph<T>& g,
                                                     const std::vector<Digits>& theta_p);

struct NodeRef {
  bool target = false;
  int index = 0;  // instance index
  bool operator==(const NodeRef& o) const { return target == o.target && index == o.index; }
};

/// Closed axial path through every source of one component.
template <typename T>
std::vector<NodeRef> witness_cycle(const CarriageGraph<T>& g, const std::vector<int>& component);

/// Affine chart from a class's lifted span onto [0, inf) x R^h, keeping t.
template <typename T>
struct FibrationChart {
  int dim = 0;  // d
  int h = 0;
  Mat<T> basis;  // h x d basis of V
  Vec<T> drift;  // V-perp part of the inner displacement, per unit of t
  Vec<T> base;   // V-perp part of the base point at t = 1
  double kappa = 1;
  Cone<T> cone;  // the class cone in chart coordinates (dimension 1 + h)

  Vec<T> to_chart(const LiftedPoint<T>& z) const;
  LiftedPoint<T> from_chart(const Vec<T>& ty) const;
};

template <typename T>
FibrationChart<T> to_fibration_coords(const PolyhedralCost<T>& cost, const FaceClass<T>& cls,
                                      const Vec<T>& base_point, double kappa_min = 1e-6);

/// Same chart for an arbitrary face and cone.
template <typename T>
FibrationChart<T> make_chart(const Face<T>& face, const Cone<T>& cone, const Vec<T>& base_point,
                             double kappa_min = 1e-6);

template <typename T>
struct SubClass {
  std::string parent;
  std::string label;
  int ell = 0;
  int depth = 0;
  Face<T> face;
  Cone<T> subcone;
  std::vector<int> members;  // source indices
  std::vector<int> targets;  // target indices reached by its pairs
  std::vector<PlanEntry<T>> entries;
  T mass = 0;
  bool indecomposable = false;
  std::vector<NodeRef> witness;
};

template <typename T>
struct ClassRefinement {
  std::string label;
  FibrationChart<T> chart;
  std::vector<Digits> theta_prime;  // first level, per graph node
  CarriageGraph<T> graph;           // first level
  std::vector<SubClass<T>> subclasses;
};

/// Splits a class into components of its carriage graph and recurses into
/// the minimal face of each component while that face is smaller.
template <typename T>
ClassRefinement<T> refine_partition(const TransportInstance<T>& inst, const PolyhedralCost<T>& cost,
                                    const FaceClass<T>& cls, const std::vector<PlanEntry<T>>& entries);

/// Regular grid in chart coordinates: levels in t and a box in y.
template <typename T>
struct GridSpec {
  std::vector<T> levels;  // increasing, levels[0] is the seed level
  Vec<T> lo;
  Vec<T> hi;
  std::vector<int> counts;  // nodes per axis (>= 2)

  int num_nodes() const;
  Vec<T> node(int k) const;
};

template <typename T>
struct GridSeed {
  Vec<T> y;
  Digits value;
};

/// vartheta on every grid level: max over seeds (at t = levels[0]) whose
/// cone shadow contains the node.
template <typename T>
std::vector<std::vector<Digits>> grid_usc_envelope(const Cone<T>& cone, const GridSpec<T>& spec,
                                                   const std::vector<GridSeed<T>>& seeds);

/// Max-plus evolution of a grid level through the cone indicator.
template <typename T>
std::vector<Digits> evolve(const Cone<T>& cone, const GridSpec<T>& spec,
                           const std::vector<Digits>& values, const T& from, const T& to);

}  // namespace sudakov
