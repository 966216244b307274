#pragma once

#include <algorithm>

#include "sudakov/refinement.hpp"

namespace sudakov {

/// A class of the decomposition as seen by map extraction: its face and the
/// sources it owns. Plan entries are assigned to the slice owning their source.
template <typename T>
struct ClassSlice {
  std::string label;
  Face<T> face;
  std::vector<int> members;  // sorted source indices
};

template <typename T>
std::vector<ClassSlice<T>> slices_from_partition(const Partition<T>& part);

template <typename T>
std::vector<ClassSlice<T>> slices_from_refinement(const std::vector<ClassRefinement<T>>& refs);

template <typename T>
struct ClassMap {
  std::string label;
  std::vector<int> members;
  std::vector<PlanEntry<T>> entries;  // secondary optimum, instance indices
  bool deterministic = true;
  T mass = 0;
  T primary_cost = 0;         // of the secondary optimum
  T primary_cost_before = 0;  // of the input plan on this class
  T secondary_cost = 0;
  T pushforward_residual = 0;
};

template <typename T>
struct MongeMap {
  std::vector<int> target;        // per source; -1 when split or unassigned
  std::vector<char> split;        // per source: mass leaves to several targets
  std::vector<Vec<T>> image;      // per source: target point or barycentre of its targets
  std::vector<PlanEntry<T>> entries;
  std::vector<ClassMap<T>> classes;
  std::vector<int> unclassified;  // sources passed through from the input plan
  T pushforward_residual = 0;     // against nu, max abs deviation

  bool deterministic() const {
    return std::none_of(split.begin(), split.end(), [](char c) { return c != 0; });
  }
};

/// Per slice, re-couples the slice's marginals under |p|^2 / 2 with pairs
/// outside the face masked out. Sources outside every slice keep their plan
/// entries. Throws InputError on a class marginal mismatch.
template <typename T>
MongeMap<T> extract_map(const TransportInstance<T>& inst, const PolyhedralCost<T>& cost,
                        const std::vector<ClassSlice<T>>& slices,
                        const std::vector<PlanEntry<T>>& plan);

template <typename T>
struct ClassReconciliation {
  std::string label;
  T mass = 0;
  T affine_cost = 0;  // mass * (offset + slope . (mean nu - mean mu))
  T direct_cost = 0;
};

template <typename T>
struct FaceOptimalityReport {
  std::vector<ClassReconciliation<T>> classes;
  std::vector<PlanEntry<T>> violations;  // support pairs outside their class face
  T unclassified_mass = 0;
  T unclassified_cost = 0;
  T formula_total = 0;  // sum of affine costs plus the unclassified cost
  T plan_value = 0;
  T gap = 0;
  bool ok = false;
};

/// Reconciles the plan's cost with the support-plane formula of each face.
/// Exact in rational mode, 1e-9 relative in float mode.
template <typename T>
FaceOptimalityReport<T> verify_face_optimality(const TransportInstance<T>& inst,
                                               const PolyhedralCost<T>& cost,
                                               const std::vector<ClassSlice<T>>& slices,
                                               const std::vector<PlanEntry<T>>& plan);

}  // namespace sudakov
