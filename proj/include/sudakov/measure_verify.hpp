#pragma once

#include <functional>
#include <optional>

#include "sudakov/map_extract.hpp"

namespace sudakov {

/// Histogram of the reference measure along one class, in the coordinates of
/// the class's direction basis relative to its first member.
struct ClassHistogram {
  std::string label;
  int h = 0;
  double mass = 0;           // fraction of the total reference mass
  std::vector<double> lo;    // per axis, lower edge of bin 0
  double bin_width = 0;
  std::vector<int> counts;   // bins per axis
  std::vector<double> bins;  // conditional mass per bin (sums to 1), row-major
  int occupied = 0;
  double max_density = 0;    // max bin mass / bin volume
  double top_share = 0;      // mass in the floor(1%) heaviest occupied bins
  bool concentrated = false;
  std::vector<double> quotient;  // W x of the class (transversal coordinate)
};

struct DisintegrationReport {
  std::vector<ClassHistogram> classes;
  double class_mass = 0;
  double residual_mass = 0;
  double total_mass = 0;
  int resolution = 0;  // bins per unit length along the chart axes
  bool mass_balanced = false;
  bool any_concentrated = false;
};

/// Bins each class's members (weighted by mu) at `resolution` bins per unit
/// chart length. A class with k occupied bins is flagged when its floor(k/100)
/// heaviest bins hold at least half of its mass; h = 0 classes carry no
/// histogram. Throws InputError on an empty decomposition.
template <typename T>
DisintegrationReport disintegration_report(const TransportInstance<T>& inst,
                                           const std::vector<ClassSlice<T>>& slices,
                                           int resolution = 16);

/// Finite grid set at one level: cells [anchor + k * cell, anchor + (k+1) * cell]
/// for the multi-indices k with in_set, over a box of `counts` cells.
struct GridSet {
  Vec<Rational> anchor;
  Rational cell;
  std::vector<int> counts;
  std::vector<char> in_set;  // row-major

  long long size() const;
};

struct AreaEstimateReport {
  int h = 0;
  Rational t_bar, s, eps;
  Vec<Rational> y_star;  // target point at level eps
  Rational alpha;        // side of the default box S
  int resolution = 0;
  long long set_cells = 0;
  long long image_cells = 0;  // level-s cells contained in sigma_s(S)
  double ratio = 0;
  double bound = 0;  // ((s - eps) / (t_bar - eps))^h
  double slack = 0;
  bool ok = false;
};

/// sigma_s is the homothety about y_star with ratio (s - eps) / (t_bar - eps):
/// it moves each point of S down the ray to (eps, y_star) onto level s. The
/// measured area is the inner cell count on the same lattice, which cannot
/// decrease under dyadic refinement. Every ray must lie in `cone`.
AreaEstimateReport area_estimate_on_set(const Cone<Rational>& cone, const Vec<Rational>& y_star,
                                        const Rational& t_bar, const Rational& s,
                                        const Rational& eps, const GridSet& set, double slack);

/// Default setup: y_star = eps * u with u the cone's inner direction at t = 1;
/// S is the box of side alpha centred at t_bar * u, alpha halved from 1 until
/// all its rays to y_star stay in the cone, cut into resolution^h cells.
AreaEstimateReport area_estimate_check(const Cone<Rational>& cone, const Rational& t_bar,
                                       const Rational& s, const Rational& eps, int resolution = 200,
                                       double slack = 0.05);

struct InvariantCheck {
  std::string name;
  bool ok = true;
  std::string witness;  // empty on success
};

/// Artifacts of one run; absent ones are skipped.
template <typename T>
struct RunArtifacts {
  const TransportInstance<T>* inst = nullptr;
  const PolyhedralCost<T>* cost = nullptr;
  const Plan<T>* plan = nullptr;
  const Partition<T>* partition = nullptr;
  const std::vector<ClassRefinement<T>>* refinements = nullptr;
  const MongeMap<T>* map = nullptr;
  const std::vector<ClassSlice<T>>* map_slices = nullptr;
  const FaceOptimalityReport<T>* face_report = nullptr;
};

template <typename T>
std::vector<InvariantCheck> invariant_suite(const RunArtifacts<T>& run);

inline bool all_passed(const std::vector<InvariantCheck>& checks) {
  for (const auto& c : checks)
    if (!c.ok) return false;
  return true;
}

struct ResidualSample {
  int n = 0;
  double residual_mass = 0;
  double fixed_mass = 0;
  int classes = 0;
};

struct ResidualScaling {
  std::vector<ResidualSample> samples;
  bool non_increasing = false;
};

/// First-partition residual mass across sample sizes, instances built by `make`.
template <typename T>
ResidualScaling residual_mass_scaling(const std::vector<int>& sizes,
                                      const std::function<TransportInstance<T>(int)>& make,
                                      const PolyhedralCost<T>& cost);

}  // namespace sudakov
