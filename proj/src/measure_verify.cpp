#include "sudakov/measure_verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace sudakov {

namespace {

template <typename T>
bool negligible(const T& x) {
  if constexpr (Num<T>::exact)
    return x == 0;
  else
    return std::fabs(x) <= 1e-9;
}

long long floor_q(const Rational& q) {
  using boost::multiprecision::mpz_int;
  mpz_int n = numerator(q), d = denominator(q);
  mpz_int r = n / d;
  if (n % d != 0 && n < 0) r -= 1;
  return r.convert_to<long long>();
}

long long ceil_q(const Rational& q) { return -floor_q(Rational(-q)); }

std::string entry_text(int i, int j) { return std::to_string(i) + "->" + std::to_string(j); }

}  // namespace

template <typename T>
DisintegrationReport disintegration_report(const TransportInstance<T>& inst,
                                           const std::vector<ClassSlice<T>>& slices,
                                           int resolution) {
  if (slices.empty()) throw InputError("empty decomposition");
  if (resolution < 1) throw InputError("resolution must be positive");
  DisintegrationReport rep;
  rep.resolution = resolution;
  std::vector<char> owned(inst.m(), 0);
  for (int i = 0; i < inst.m(); ++i) rep.total_mass += to_double(inst.mu_weights[i]);

  const double width = 1.0 / resolution;
  for (const auto& sl : slices) {
    ClassHistogram hist;
    hist.label = sl.label;
    hist.h = static_cast<int>(sl.face.directions.size());
    hist.bin_width = width;
    double mass = 0;
    for (int i : sl.members) {
      if (owned[i]) throw InputError("source " + std::to_string(i) + " belongs to two classes");
      owned[i] = 1;
      mass += to_double(inst.mu_weights[i]);
    }
    hist.mass = mass;
    rep.class_mass += mass;
    if (sl.members.empty()) {
      rep.classes.push_back(std::move(hist));
      continue;
    }
    const auto& x0 = inst.mu_points[sl.members[0]];
    for (const auto& v : sub(x0, project_onto(sl.face.directions, x0))) hist.quotient.push_back(to_double(v));
    if (hist.h == 0) {
      rep.classes.push_back(std::move(hist));
      continue;
    }

    std::vector<std::vector<double>> ys;
    for (int i : sl.members) {
      auto c = coordinates_in(sl.face.directions, sub(inst.mu_points[i], x0));
      std::vector<double> y;
      for (const auto& v : c) y.push_back(to_double(v));
      ys.push_back(std::move(y));
    }
    std::vector<long long> first(hist.h), last(hist.h);
    for (int a = 0; a < hist.h; ++a) {
      double lo = ys[0][a], hi = ys[0][a];
      for (const auto& y : ys) {
        lo = std::min(lo, y[a]);
        hi = std::max(hi, y[a]);
      }
      first[a] = static_cast<long long>(std::floor(lo * resolution));
      last[a] = static_cast<long long>(std::floor(hi * resolution));
      hist.lo.push_back(first[a] * width);
      hist.counts.push_back(static_cast<int>(last[a] - first[a] + 1));
    }
    long long total = 1;
    for (int c : hist.counts) {
      total *= c;
      if (total > 50'000'000) throw InputError("histogram too large; lower the resolution");
    }
    hist.bins.assign(total, 0.0);
    for (std::size_t k = 0; k < ys.size(); ++k) {
      long long idx = 0;
      for (int a = 0; a < hist.h; ++a) {
        long long b = static_cast<long long>(std::floor(ys[k][a] * resolution)) - first[a];
        b = std::clamp<long long>(b, 0, hist.counts[a] - 1);
        idx = idx * hist.counts[a] + b;
      }
      hist.bins[idx] += to_double(inst.mu_weights[sl.members[k]]) / mass;
    }
    std::vector<double> occ;
    for (double b : hist.bins)
      if (b > 0) occ.push_back(b);
    hist.occupied = static_cast<int>(occ.size());
    std::sort(occ.begin(), occ.end(), std::greater<>());
    const double volume = std::pow(width, hist.h);
    hist.max_density = occ.front() / volume;
    std::size_t top = occ.size() / 100;
    for (std::size_t k = 0; k < top; ++k) hist.top_share += occ[k];
    hist.concentrated = top > 0 && hist.top_share >= 0.5;
    rep.any_concentrated = rep.any_concentrated || hist.concentrated;
    rep.classes.push_back(std::move(hist));
  }
  for (int i = 0; i < inst.m(); ++i)
    if (!owned[i]) rep.residual_mass += to_double(inst.mu_weights[i]);
  rep.mass_balanced = std::fabs(rep.class_mass + rep.residual_mass - rep.total_mass) <= 1e-9;
  return rep;
}

long long GridSet::size() const {
  return std::count(in_set.begin(), in_set.end(), 1);
}

AreaEstimateReport area_estimate_on_set(const Cone<Rational>& cone, const Vec<Rational>& y_star,
                                        const Rational& t_bar, const Rational& s,
                                        const Rational& eps, const GridSet& set, double slack) {
  const int h = cone.dim - 1;
  if (!(eps > 0 && eps < s && s <= t_bar))
    throw InputError("parameters out of order: need 0 < eps < s <= t_bar");
  if (static_cast<int>(set.counts.size()) != h || static_cast<int>(y_star.size()) != h ||
      static_cast<int>(set.anchor.size()) != h)
    throw InputError("grid set and cone dimensions differ");
  if (set.cell <= 0) throw InputError("grid cell must be positive");

  // rays from (eps, y_star) to the corners of the bounding box of S
  for (int mask = 0; mask < (1 << h); ++mask) {
    Vec<Rational> v{Rational(t_bar - eps)};
    for (int a = 0; a < h; ++a) {
      Rational c = set.anchor[a] + ((mask >> a) & 1 ? Rational(set.cell * set.counts[a]) : Rational(0));
      v.push_back(c - y_star[a]);
    }
    if (!cone.contains(v)) throw InputError("a ray from S to the target point leaves the cone");
  }

  AreaEstimateReport rep;
  rep.h = h;
  rep.t_bar = t_bar;
  rep.s = s;
  rep.eps = eps;
  rep.y_star = y_star;
  rep.slack = slack;
  rep.resolution = h > 0 ? set.counts[0] : 0;
  const Rational rho = (s - eps) / (t_bar - eps);
  rep.bound = std::pow(rho.convert_to<double>(), h);
  rep.set_cells = set.size();

  // per axis: level-s cells whose preimage interval stays inside the box,
  // with the range of S cells the preimage overlaps
  struct Span {
    long long first, last;
  };
  std::vector<std::vector<Span>> spans(h);
  for (int a = 0; a < h; ++a) {
    const Rational& A = set.anchor[a];
    const Rational& c = set.cell;
    Rational lo = y_star[a] + rho * (A - y_star[a]);
    Rational hi = y_star[a] + rho * (A + c * set.counts[a] - y_star[a]);
    for (long long k = floor_q((lo - A) / c); k < ceil_q((hi - A) / c); ++k) {
      Rational plo = y_star[a] + (A + c * k - y_star[a]) / rho;
      Rational phi = y_star[a] + (A + c * (k + 1) - y_star[a]) / rho;
      long long f = floor_q((plo - A) / c), l = ceil_q((phi - A) / c) - 1;
      if (f >= 0 && l < set.counts[a]) spans[a].push_back({f, l});
    }
  }
  const bool full = rep.set_cells == static_cast<long long>(set.in_set.size());
  if (full) {
    rep.image_cells = 1;
    for (const auto& sp : spans) rep.image_cells *= static_cast<long long>(sp.size());
  } else {
    // odometer over the product of axis spans, and over each preimage block
    std::vector<std::size_t> pick(h, 0);
    bool empty = std::any_of(spans.begin(), spans.end(), [](const auto& v) { return v.empty(); });
    while (!empty) {
      std::vector<long long> cur(h);
      for (int a = 0; a < h; ++a) cur[a] = spans[a][pick[a]].first;
      bool inside = true;
      while (inside) {
        long long idx = 0;
        for (int a = 0; a < h; ++a) idx = idx * set.counts[a] + cur[a];
        if (!set.in_set[idx]) inside = false;
        int a = h - 1;
        for (; a >= 0; --a) {
          if (++cur[a] <= spans[a][pick[a]].last) break;
          cur[a] = spans[a][pick[a]].first;
        }
        if (a < 0) break;
      }
      if (inside) ++rep.image_cells;
      int a = h - 1;
      for (; a >= 0; --a) {
        if (++pick[a] < spans[a].size()) break;
        pick[a] = 0;
      }
      if (a < 0) break;
    }
  }
  rep.ratio = rep.set_cells > 0 ? static_cast<double>(rep.image_cells) / rep.set_cells : 0.0;
  rep.ok = rep.ratio >= rep.bound * (1 - slack);
  return rep;
}

AreaEstimateReport area_estimate_check(const Cone<Rational>& cone, const Rational& t_bar,
                                       const Rational& s, const Rational& eps, int resolution,
                                       double slack) {
  if (!(eps > 0 && eps < s && s <= t_bar))
    throw InputError("parameters out of order: need 0 < eps < s <= t_bar");
  if (resolution < 1) throw InputError("resolution must be positive");
  const int h = cone.dim - 1;
  Vec<Rational> u = relint_point(cone);
  if (u[0] <= 0) throw InputError("cone is not transversal to the levels");
  Vec<Rational> ux(h);
  for (int a = 0; a < h; ++a) ux[a] = u[a + 1] / u[0];
  Vec<Rational> y_star = scale(ux, eps);
  Vec<Rational> centre = scale(ux, t_bar);

  Rational alpha = 1;
  bool fits = false;
  for (int tries = 0; tries < 64 && !fits; ++tries) {
    fits = true;
    for (int mask = 0; mask < (1 << h) && fits; ++mask) {
      Vec<Rational> v{Rational(t_bar - eps)};
      for (int a = 0; a < h; ++a)
        v.push_back(centre[a] + ((mask >> a) & 1 ? alpha / 2 : Rational(-alpha / 2)) - y_star[a]);
      fits = cone.contains(v);
    }
    if (!fits) alpha /= 2;
  }
  if (!fits) throw InputError("no box around the inner ray fits in the cone");

  GridSet set;
  set.cell = alpha / resolution;
  for (int a = 0; a < h; ++a) {
    set.anchor.push_back(centre[a] - alpha / 2);
    set.counts.push_back(resolution);
  }
  long long total = 1;
  for (int a = 0; a < h; ++a) {
    total *= resolution;
    if (total > 100'000'000) throw InputError("grid too large");
  }
  set.in_set.assign(total, 1);
  auto rep = area_estimate_on_set(cone, y_star, t_bar, s, eps, set, slack);
  rep.alpha = alpha;
  rep.resolution = resolution;
  return rep;
}

template <typename T>
std::vector<InvariantCheck> invariant_suite(const RunArtifacts<T>& run) {
  std::vector<InvariantCheck> out;
  auto add = [&](std::string name, bool ok, std::string witness = {}) {
    out.push_back({std::move(name), ok, ok ? std::string() : std::move(witness)});
  };
  if (!run.inst || run.inst->m() == 0) return out;
  const auto& inst = *run.inst;

  if (run.plan) {
    const auto& plan = *run.plan;
    T err = marginal_error(inst, plan.entries);
    add("marginals", negligible(err), "max deviation " + format_scalar(err));
    if (plan.phi.size() == static_cast<std::size_t>(inst.m()) &&
        plan.psi.size() == static_cast<std::size_t>(inst.n())) {
      T primal = plan_cost(inst, plan.entries);
      T dual = dual_value(inst, plan.phi, plan.psi);
      add("duality gap", negligible(T(primal - dual)),
          "primal " + format_scalar(primal) + " dual " + format_scalar(dual));
      std::string bad;
      for (int i = 0; i < inst.m() && bad.empty(); ++i)
        for (int j = 0; j < inst.n() && bad.empty(); ++j)
          if (inst.is_allowed(i, j) &&
              Num<T>::sign(T(plan.psi[j] - plan.phi[i] - inst.cost[i][j])) > 0)
            bad = entry_text(i, j);
      add("dual feasibility", bad.empty(), bad);
      bad.clear();
      for (const auto& e : plan.entries)
        if (!approx_eq(T(plan.psi[e.j] - plan.phi[e.i]), inst.cost[e.i][e.j])) {
          bad = entry_text(e.i, e.j);
          break;
        }
      add("complementary slackness", bad.empty(), bad);
    }
    auto cyc = find_monotonicity_violation(inst, plan, 3);
    std::string w;
    if (cyc)
      for (int k : *cyc) w += (w.empty() ? "" : " ") + entry_text(plan.entries[k].i, plan.entries[k].j);
    add("cyclical monotonicity", !cyc, w);
  }

  if (run.partition && run.cost) {
    const auto& part = *run.partition;
    T sum = part.fixed_mass + part.residual_mass;
    for (const auto& c : part.classes) sum += c.mass;
    add("partition mass", negligible(T(sum - T(1))), "total " + format_scalar(sum));
    if (run.plan) {
      std::string bad;
      for (const auto& e : run.plan->entries) {
        int k = part.class_of[e.i];
        if (k < 0) continue;
        if (!face_contains(*run.cost, part.classes[k].face,
                           sub(inst.nu_points[e.j], inst.mu_points[e.i]))) {
          bad = entry_text(e.i, e.j) + " outside " + part.classes[k].label;
          break;
        }
      }
      add("plan in class faces", bad.empty(), bad);
    }
  }

  if (run.refinements && run.partition && run.cost) {
    std::string bad_mass, bad_walk;
    for (const auto& r : *run.refinements) {
      auto it = std::find_if(run.partition->classes.begin(), run.partition->classes.end(),
                             [&](const auto& c) { return c.label == r.label; });
      if (it == run.partition->classes.end()) continue;
      T m = 0;
      for (const auto& sc : r.subclasses) {
        m += sc.mass;
        const auto& w = sc.witness;
        bool ok = w.size() >= 3 && w.front() == w.back();
        for (std::size_t k = 0; ok && k + 1 < w.size(); ++k) {
          if (w[k].target == w[k + 1].target) {
            ok = false;
          } else if (!w[k].target) {
            ok = std::any_of(sc.entries.begin(), sc.entries.end(), [&](const PlanEntry<T>& e) {
              return e.i == w[k].index && e.j == w[k + 1].index;
            });
          } else {
            ok = face_contains(*run.cost, sc.face,
                               sub(inst.nu_points[w[k].index], inst.mu_points[w[k + 1].index]));
          }
        }
        if (!ok && bad_walk.empty()) bad_walk = sc.label;
      }
      if (!negligible(T(m - it->mass)) && bad_mass.empty()) bad_mass = r.label;
    }
    add("refinement mass", bad_mass.empty(), bad_mass);
    add("witness cycles", bad_walk.empty(), bad_walk);
  }

  if (run.map) {
    add("map pushforward", negligible(run.map->pushforward_residual),
        "residual " + format_scalar(run.map->pushforward_residual));
    if (run.map_slices && run.cost) {
      std::vector<int> own(inst.m(), -1);
      for (std::size_t k = 0; k < run.map_slices->size(); ++k)
        for (int i : (*run.map_slices)[k].members) own[i] = static_cast<int>(k);
      std::string bad;
      for (const auto& e : run.map->entries) {
        if (own[e.i] < 0) continue;
        if (!face_contains(*run.cost, (*run.map_slices)[own[e.i]].face,
                           sub(inst.nu_points[e.j], inst.mu_points[e.i]))) {
          bad = entry_text(e.i, e.j);
          break;
        }
      }
      add("map in class faces", bad.empty(), bad);
    }
  }

  if (run.face_report) {
    const auto& fr = *run.face_report;
    std::string w = "gap " + format_scalar(fr.gap);
    if (!fr.violations.empty())
      w += ", " + entry_text(fr.violations[0].i, fr.violations[0].j) + " outside its face";
    add("face optimality", fr.ok, w);
  }
  return out;
}

template <typename T>
ResidualScaling residual_mass_scaling(const std::vector<int>& sizes,
                                      const std::function<TransportInstance<T>(int)>& make,
                                      const PolyhedralCost<T>& cost) {
  ResidualScaling out;
  for (int n : sizes) {
    auto inst = make(n);
    auto plan = solve_primal(inst);
    auto part = first_partition(inst, cost, plan);
    out.samples.push_back({n, to_double(part.residual_mass), to_double(part.fixed_mass),
                           static_cast<int>(part.classes.size())});
  }
  out.non_increasing = true;
  for (std::size_t k = 1; k < out.samples.size(); ++k)
    if (out.samples[k].residual_mass > out.samples[k - 1].residual_mass + 1e-12)
      out.non_increasing = false;
  return out;
}

#define SUDAKOV_INSTANTIATE(T)                                                                    \
  template DisintegrationReport disintegration_report<T>(                                         \
      const TransportInstance<T>&, const std::vector<ClassSlice<T>>&, int);                       \
  template std::vector<InvariantCheck> invariant_suite<T>(const RunArtifacts<T>&);                \
  template ResidualScaling residual_mass_scaling<T>(                                              \
      const std::vector<int>&, const std::function<TransportInstance<T>(int)>&,                   \
      const PolyhedralCost<T>&);

SUDAKOV_INSTANTIATE(double)
SUDAKOV_INSTANTIATE(Rational)

}  // namespace sudakov
