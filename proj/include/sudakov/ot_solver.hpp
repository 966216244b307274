#pragma once

#include <optional>

#include "sudakov/cone_geometry.hpp"

namespace sudakov {

template <typename T>
struct TransportInstance {
  int dim = 0;
  Vec<Vec<T>> mu_points;
  Vec<T> mu_weights;
  Vec<Vec<T>> nu_points;
  Vec<T> nu_weights;
  Mat<T> cost;                            // |mu| x |nu|
  std::vector<std::vector<char>> allowed;  // empty means every pair is allowed

  int m() const { return static_cast<int>(mu_weights.size()); }
  int n() const { return static_cast<int>(nu_weights.size()); }
  bool is_allowed(int i, int j) const { return allowed.empty() || allowed[i][j]; }
};

template <typename T>
struct PlanEntry {
  int i = 0;
  int j = 0;
  T mass = 0;
};

/// Coupling with dual potentials: psi_j - phi_i <= c_ij, equality on support.
template <typename T>
struct Plan {
  std::vector<PlanEntry<T>> entries;
  T value = 0;
  Vec<T> phi;
  Vec<T> psi;
};

/// Normalizes both weight vectors to unit mass and fills the cost matrix
/// c_ij = cost(y_j - x_i).
template <typename T>
TransportInstance<T> make_instance(const PolyhedralCost<T>& cost, Vec<Vec<T>> mu_points,
                                   Vec<T> mu_weights, Vec<Vec<T>> nu_points, Vec<T> nu_weights);

/// Coupling that sends each source x_i to A_k x_i + b_k with mass
/// mu_i / (number of maps), for every map k; each image must be a target atom.
template <typename T>
std::vector<PlanEntry<T>> plan_from_maps(
    const TransportInstance<T>& inst,
    const std::vector<std::pair<Mat<Rational>, Vec<Rational>>>& maps);

/// Network simplex on the bipartite graph; masked pairs are absent arcs.
template <typename T>
Plan<T> solve_primal(const TransportInstance<T>& inst);

/// Re-solves on the unmasked pairs with a secondary cost.
template <typename T>
Plan<T> solve_constrained(const TransportInstance<T>& inst, const PolyhedralCost<T>& secondary);

/// Max-flow test that the masked pairs admit a coupling.
template <typename T>
bool is_feasible(const TransportInstance<T>& inst);

template <typename T>
T plan_cost(const TransportInstance<T>& inst, const std::vector<PlanEntry<T>>& entries);

template <typename T>
T dual_value(const TransportInstance<T>& inst, const Vec<T>& phi, const Vec<T>& psi);

/// Row/column sum residual (max abs deviation).
template <typename T>
T marginal_error(const TransportInstance<T>& inst, const std::vector<PlanEntry<T>>& entries);

/// Violating cycle (pairs of support entries) of length <= max_len, if any.
template <typename T>
std::optional<std::vector<int>> find_monotonicity_violation(const TransportInstance<T>& inst,
                                                            const Plan<T>& plan, int max_len);

/// Duals in which a pair is tight exactly when some optimal plan uses it.
template <typename T>
struct CanonicalDuals {
  Vec<T> phi;
  Vec<T> psi;
  std::vector<std::vector<int>> tight;  // per source, sorted target indices
};

template <typename T>
CanonicalDuals<T> strictly_complementary_duals(const TransportInstance<T>& inst,
                                               const Plan<T>& optimal);

}  // namespace sudakov
