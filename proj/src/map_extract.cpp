#include "sudakov/map_extract.hpp"

#include <map>
#include <set>

namespace sudakov {

namespace {

template <typename T>
bool within(const T& a, const T& b, double rel) {
  if constexpr (Num<T>::exact) {
    (void)rel;
    return a == b;
  } else {
    return std::fabs(a - b) <= rel * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
  }
}

template <typename T>
std::vector<int> owners(int m, const std::vector<ClassSlice<T>>& slices) {
  std::vector<int> own(m, -1);
  for (std::size_t k = 0; k < slices.size(); ++k)
    for (int i : slices[k].members) {
      if (i < 0 || i >= m) throw InputError("class member out of range");
      if (own[i] >= 0) throw InputError("source " + std::to_string(i) + " belongs to two classes");
      own[i] = static_cast<int>(k);
    }
  return own;
}

template <typename T>
T entry_cost(const TransportInstance<T>& inst, const std::vector<PlanEntry<T>>& entries) {
  T s = 0;
  for (const auto& e : entries) s += e.mass * inst.cost[e.i][e.j];
  return s;
}

}  // namespace

template <typename T>
std::vector<ClassSlice<T>> slices_from_partition(const Partition<T>& part) {
  std::vector<ClassSlice<T>> out;
  for (const auto& c : part.classes) out.push_back({c.label, c.face, c.members});
  return out;
}

template <typename T>
std::vector<ClassSlice<T>> slices_from_refinement(const std::vector<ClassRefinement<T>>& refs) {
  std::vector<ClassSlice<T>> out;
  for (const auto& r : refs)
    for (const auto& s : r.subclasses) out.push_back({s.label, s.face, s.members});
  return out;
}

template <typename T>
MongeMap<T> extract_map(const TransportInstance<T>& inst, const PolyhedralCost<T>& cost,
                        const std::vector<ClassSlice<T>>& slices,
                        const std::vector<PlanEntry<T>>& plan) {
  const int m = inst.m();
  auto own = owners(m, slices);
  std::vector<std::vector<PlanEntry<T>>> per(slices.size());
  std::vector<PlanEntry<T>> loose;
  for (const auto& e : plan) (own[e.i] >= 0 ? per[own[e.i]] : loose).push_back(e);

  MongeMap<T> out;
  const auto quadratic = preset_cost<T>("quadratic", inst.dim);
  for (std::size_t k = 0; k < slices.size(); ++k) {
    const auto& sl = slices[k];
    const auto& entries = per[k];
    ClassMap<T> cm;
    cm.label = sl.label;
    cm.members = sl.members;

    std::map<int, T> row, col;
    for (const auto& e : entries) {
      row[e.i] += e.mass;
      col[e.j] += e.mass;
    }
    for (int i : sl.members)
      if (!within(row[i], inst.mu_weights[i], 1e-9))
        throw InputError("class marginal mismatch in " + sl.label + " at source " +
                         std::to_string(i));

    // class sub-instance, secondary quadratic cost on the face mask
    TransportInstance<T> sub_inst;
    sub_inst.dim = inst.dim;
    std::vector<int> tgt;
    for (const auto& [j, w] : col) {
      tgt.push_back(j);
      sub_inst.nu_points.push_back(inst.nu_points[j]);
      sub_inst.nu_weights.push_back(w);
    }
    for (int i : sl.members) {
      sub_inst.mu_points.push_back(inst.mu_points[i]);
      sub_inst.mu_weights.push_back(row[i]);
      cm.mass += row[i];
    }
    if (sl.members.empty()) {
      out.classes.push_back(std::move(cm));
      continue;
    }
    sub_inst.cost.assign(sub_inst.m(), Vec<T>(sub_inst.n(), T(0)));
    sub_inst.allowed.assign(sub_inst.m(), std::vector<char>(sub_inst.n(), 0));
    for (int a = 0; a < sub_inst.m(); ++a)
      for (int b = 0; b < sub_inst.n(); ++b) {
        sub_inst.cost[a][b] = inst.cost[sl.members[a]][tgt[b]];
        sub_inst.allowed[a][b] =
            face_contains(cost, sl.face, sub(sub_inst.nu_points[b], sub_inst.mu_points[a]));
      }
    // float rounding in the column sums must not trip the balance check
    if constexpr (!Num<T>::exact) {
      T sm = 0, sn = 0;
      for (const auto& w : sub_inst.mu_weights) sm += w;
      for (const auto& w : sub_inst.nu_weights) sn += w;
      for (auto& w : sub_inst.nu_weights) w *= sm / sn;
    }
    Plan<T> sec = solve_constrained(sub_inst, quadratic);
    std::vector<int> count(sub_inst.m(), 0);
    for (const auto& e : sec.entries) {
      PlanEntry<T> g{sl.members[e.i], tgt[e.j], e.mass};
      cm.entries.push_back(g);
      ++count[e.i];
      cm.secondary_cost += e.mass * evaluate_cost(quadratic, sub(inst.nu_points[g.j], inst.mu_points[g.i]));
    }
    cm.deterministic = std::all_of(count.begin(), count.end(), [](int c) { return c == 1; });
    cm.primary_cost = entry_cost(inst, cm.entries);
    cm.primary_cost_before = entry_cost(inst, entries);
    cm.pushforward_residual = marginal_error(sub_inst, sec.entries);
    out.classes.push_back(std::move(cm));
  }

  for (const auto& cm : out.classes)
    out.entries.insert(out.entries.end(), cm.entries.begin(), cm.entries.end());
  std::set<int> loose_src;
  for (const auto& e : loose) loose_src.insert(e.i);
  out.unclassified.assign(loose_src.begin(), loose_src.end());
  out.entries.insert(out.entries.end(), loose.begin(), loose.end());
  std::sort(out.entries.begin(), out.entries.end(),
            [](const auto& a, const auto& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });

  out.target.assign(m, -1);
  out.split.assign(m, 0);
  out.image.assign(m, Vec<T>(inst.dim, T(0)));
  std::vector<T> mass(m, T(0));
  std::vector<int> count(m, 0);
  for (const auto& e : out.entries) {
    out.image[e.i] = add(out.image[e.i], scale(inst.nu_points[e.j], e.mass));
    mass[e.i] += e.mass;
    out.target[e.i] = e.j;
    ++count[e.i];
  }
  for (int i = 0; i < m; ++i) {
    if (count[i] == 0) continue;
    out.image[i] = scale(out.image[i], T(T(1) / mass[i]));
    if (count[i] > 1) {
      out.split[i] = 1;
      out.target[i] = -1;
    }
  }
  out.pushforward_residual = marginal_error(inst, out.entries);
  return out;
}

template <typename T>
FaceOptimalityReport<T> verify_face_optimality(const TransportInstance<T>& inst,
                                               const PolyhedralCost<T>& cost,
                                               const std::vector<ClassSlice<T>>& slices,
                                               const std::vector<PlanEntry<T>>& plan) {
  auto own = owners(inst.m(), slices);
  FaceOptimalityReport<T> rep;
  std::vector<Vec<T>> disp(slices.size(), Vec<T>(inst.dim, T(0)));
  rep.classes.resize(slices.size());
  for (std::size_t k = 0; k < slices.size(); ++k) rep.classes[k].label = slices[k].label;
  for (const auto& e : plan) {
    T c = e.mass * inst.cost[e.i][e.j];
    rep.plan_value += c;
    int k = own[e.i];
    if (k < 0) {
      rep.unclassified_mass += e.mass;
      rep.unclassified_cost += c;
      continue;
    }
    Vec<T> q = sub(inst.nu_points[e.j], inst.mu_points[e.i]);
    if (!face_contains(cost, slices[k].face, q)) rep.violations.push_back(e);
    auto& rc = rep.classes[k];
    rc.mass += e.mass;
    rc.direct_cost += c;
    disp[k] = add(disp[k], scale(q, e.mass));
  }
  rep.formula_total = rep.unclassified_cost;
  for (std::size_t k = 0; k < slices.size(); ++k) {
    auto& rc = rep.classes[k];
    const auto& f = slices[k].face;
    // mass * (offset + slope . mean displacement), with the mass folded in
    rc.affine_cost = rc.mass * f.offset + dot(f.slope, disp[k]);
    rep.formula_total += rc.affine_cost;
  }
  rep.gap = rep.formula_total - rep.plan_value;
  rep.ok = rep.violations.empty() && within(rep.formula_total, rep.plan_value, 1e-9);
  return rep;
}

#define SUDAKOV_INSTANTIATE(T)                                                                    \
  template std::vector<ClassSlice<T>> slices_from_partition<T>(const Partition<T>&);              \
  template std::vector<ClassSlice<T>> slices_from_refinement<T>(                                  \
      const std::vector<ClassRefinement<T>>&);                                                    \
  template MongeMap<T> extract_map<T>(const TransportInstance<T>&, const PolyhedralCost<T>&,      \
                                      const std::vector<ClassSlice<T>>&,                          \
                                      const std::vector<PlanEntry<T>>&);                          \
  template FaceOptimalityReport<T> verify_face_optimality<T>(                                     \
      const TransportInstance<T>&, const PolyhedralCost<T>&, const std::vector<ClassSlice<T>>&,   \
      const std::vector<PlanEntry<T>>&);

SUDAKOV_INSTANTIATE(double)
SUDAKOV_INSTANTIATE(Rational)

}  // namespace sudakov
