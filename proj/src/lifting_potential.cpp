#include "sudakov/lifting_potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sudakov {

namespace {

template <typename T>
LiftedPoint<T> offset_point(const LiftedPoint<T>& z, const Vec<T>& u, const T& r) {
  // u has t-component 1
  LiftedPoint<T> out;
  out.t = z.t + r;
  out.x = z.x;
  for (std::size_t k = 0; k < z.x.size(); ++k) out.x[k] += r * u[k + 1];
  return out;
}

template <typename T>
std::optional<T> lifted_between(const PotentialField<T>& f, const LiftedPoint<T>& hi,
                                const LiftedPoint<T>& lo) {
  return evaluate_lifted(f.lifted, T(hi.t - lo.t), sub(hi.x, lo.x));
}

template <typename T>
Vec<T> normalized_direction(const LiftedPoint<T>& hi, const LiftedPoint<T>& lo) {
  T dt = hi.t - lo.t;
  Vec<T> v{T(1)};
  for (std::size_t k = 0; k < hi.x.size(); ++k) v.push_back((hi.x[k] - lo.x[k]) / dt);
  return v;
}

template <typename T>
std::string key_scalar(const T& v) {
  if constexpr (Num<T>::exact) {
    return format_rational(v);
  } else {
    long long q = std::llround(v * 1e7);
    return std::to_string(q == 0 ? 0LL : q);
  }
}

}  // namespace

std::string to_string(PointKind k) {
  switch (k) {
    case PointKind::Fixed: return "fixed";
    case PointKind::BackwardRegular: return "backward_regular";
    case PointKind::ForwardRegular: return "forward_regular";
    case PointKind::Regular: return "regular";
    case PointKind::Residual: return "residual";
  }
  return "residual";
}

template <typename T>
PotentialField<T> make_potential(const PolyhedralCost<T>& cost, Vec<Vec<T>> targets, Vec<T> psi) {
  if (targets.empty()) throw InputError("potential needs at least one target");
  if (targets.size() != psi.size()) throw InputError("one potential value per target required");
  for (const auto& y : targets)
    if (static_cast<int>(y.size()) != cost.dim) throw InputError("target dimension mismatch");
  return {cost, lift_cost(cost), std::move(targets), std::move(psi)};
}

template <typename T>
std::optional<T> lax_extend(const PotentialField<T>& field, const LiftedPoint<T>& z) {
  if (Num<T>::sign(z.t) < 0) throw InputError("lifted points need t >= 0");
  std::optional<T> best;
  for (std::size_t j = 0; j < field.targets.size(); ++j) {
    auto c = evaluate_lifted(field.lifted, z.t, sub(z.x, field.targets[j]));
    if (!c) continue;
    T v = *c - field.psi[j];
    if (!best || v < *best) best = v;
  }
  return best;
}

template <typename T>
std::vector<int> lax_argmin(const PotentialField<T>& field, const LiftedPoint<T>& z) {
  std::vector<std::optional<T>> vals(field.targets.size());
  std::optional<T> best;
  for (std::size_t j = 0; j < field.targets.size(); ++j) {
    auto c = evaluate_lifted(field.lifted, z.t, sub(z.x, field.targets[j]));
    if (!c) continue;
    vals[j] = *c - field.psi[j];
    if (!best || *vals[j] < *best) best = vals[j];
  }
  std::vector<int> out;
  for (std::size_t j = 0; j < vals.size(); ++j)
    if (vals[j] && approx_eq(*vals[j], *best)) out.push_back(static_cast<int>(j));
  return out;
}

template <typename T>
DifferentialPairs<T> subdiff_pairs(const PotentialField<T>& field, const LiftedPoint<T>& z,
                                   const std::vector<LiftedPoint<T>>& candidates) {
  DifferentialPairs<T> out;
  auto vz = lax_extend(field, z);
  if (!vz) return out;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& c = candidates[k];
    if (!approx_less(c.t, z.t)) continue;
    auto vc = lax_extend(field, c);
    auto cost = lifted_between(field, z, c);
    if (!vc || !cost || !approx_eq(T(*vz - *vc), *cost)) continue;
    out.indices.push_back(static_cast<int>(k));
    out.directions.push_back(normalized_direction(z, c));
  }
  return out;
}

template <typename T>
DifferentialPairs<T> superdiff_pairs(const PotentialField<T>& field, const LiftedPoint<T>& z,
                                     const std::vector<LiftedPoint<T>>& candidates) {
  DifferentialPairs<T> out;
  auto vz = lax_extend(field, z);
  if (!vz) return out;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& c = candidates[k];
    if (!approx_less(z.t, c.t)) continue;
    auto vc = lax_extend(field, c);
    auto cost = lifted_between(field, c, z);
    if (!vc || !cost || !approx_eq(T(*vc - *vz), *cost)) continue;
    out.indices.push_back(static_cast<int>(k));
    out.directions.push_back(normalized_direction(c, z));
  }
  return out;
}

template <typename T>
PointClassifier<T>::PointClassifier(const PotentialField<T>& field, ClassifyOptions<T> opts)
    : field_(field), opts_(opts) {
  if (Num<T>::sign(opts_.witness_radius) <= 0) throw InputError("witness radius must be positive");
}

template <typename T>
const Cone<T>& PointClassifier<T>::piece_cone(int i) {
  auto it = piece_cones_.find(i);
  if (it == piece_cones_.end()) it = piece_cones_.emplace(i, lifted_face_cone(field_.cost, std::vector<int>{i})).first;
  return it->second;
}

template <typename T>
Cone<T> PointClassifier<T>::face_cone(const Face<T>& f) {
  if (field_.cost.strictly_convex) return lifted_face_cone(field_.cost, f);
  auto it = face_cones_.find(f.active);
  if (it == face_cones_.end()) it = face_cones_.emplace(f.active, lifted_face_cone(field_.cost, f.active)).first;
  return it->second;
}

// Backward directions (1, -q_j) over the tight targets. Their union of
// minimal faces is convex exactly when one face contains all the others,
// i.e. some active set is contained in every other one.
template <typename T>
typename PointClassifier<T>::Hull PointClassifier<T>::backward_hull(
    const LiftedPoint<T>& z, const std::vector<int>& tight) {
  Hull out;
  out.tight = tight;
  if (tight.empty() || Num<T>::sign(z.t) <= 0) return out;
  const auto& cost = field_.cost;
  std::vector<Vec<T>> qs;
  bool all_zero = true;
  for (int j : tight) {
    Vec<T> q = scale(sub(field_.targets[j], z.x), T(T(1) / z.t));
    if (!vec_is_zero(q)) all_zero = false;
    qs.push_back(std::move(q));
  }
  if (all_zero) {
    out.fixed = true;
    return out;
  }
  if (cost.strictly_convex) {
    for (const auto& q : qs)
      if (!vec_approx_eq(q, qs[0])) return out;
    out.convex = true;
    out.face = minimal_extremal_face(cost, qs[0]);
    out.h = 0;
    return out;
  }
  std::vector<std::vector<int>> act;
  std::size_t best = 0;
  for (std::size_t k = 0; k < qs.size(); ++k) {
    act.push_back(active_set(cost, qs[k]));
    if (act[k].size() < act[best].size()) best = k;
  }
  for (const auto& a : act)
    if (!std::includes(a.begin(), a.end(), act[best].begin(), act[best].end())) return out;
  out.convex = true;
  out.face = face_from_point(cost, act[best], qs[best]);
  out.h = out.face.affine_dim;
  return out;
}

// Forward directions are those sharing an active piece with every tight
// displacement: the union of the piece cones over the active set.
template <typename T>
typename PointClassifier<T>::Forward PointClassifier<T>::forward_hull(const Hull& b) {
  Forward out;
  if (!b.convex) return out;
  if (field_.cost.strictly_convex) {
    out.convex = true;
    out.h = 0;
    return out;
  }
  for (int i0 : b.face.active) {
    const Cone<T>& big = piece_cone(i0);
    bool ok = true;
    for (int i : b.face.active) {
      if (i == i0) continue;
      for (const auto& g : piece_cone(i).generators)
        if (!big.contains(g)) {
          ok = false;
          break;
        }
      if (!ok) break;
    }
    if (ok) {
      out.convex = true;
      out.h = big.dimension() - 1;
      return out;
    }
  }
  return out;
}

template <typename T>
Vec<T> PointClassifier<T>::inner_direction(const Hull& b) {
  Vec<T> u = relint_point(face_cone(b.face));
  return scale(u, T(T(1) / u[0]));
}

template <typename T>
Classification<T> PointClassifier<T>::classify(const LiftedPoint<T>& z) {
  return classify(z, lax_argmin(field_, z));
}

template <typename T>
Classification<T> PointClassifier<T>::classify(const LiftedPoint<T>& z,
                                               const std::vector<int>& tight) {
  Classification<T> rec;
  rec.tight = tight;
  if (tight.empty()) {
    rec.reasons.push_back("no tight target");
    return rec;
  }
  Hull b = backward_hull(z, tight);
  if (b.fixed || Num<T>::sign(z.t) <= 0) {
    rec.kind = PointKind::Fixed;
    return rec;
  }
  rec.backward_convex = b.convex;
  if (!b.convex) {
    rec.reasons.push_back("backward hull not convex");
    return rec;
  }
  rec.h = b.h;
  rec.face = b.face;
  Forward f = forward_hull(b);
  rec.forward_convex = f.convex;
  rec.h_forward = f.h;
  if (!f.convex) rec.reasons.push_back("forward hull not convex");

  const T r = opts_.witness_radius;
  Vec<T> u = inner_direction(b);
  auto vz = lax_extend(field_, z);
  auto step = evaluate_lifted(field_.lifted, r, scale(Vec<T>(u.begin() + 1, u.end()), r));

  // backward witness: continue the inner ray past z
  {
    LiftedPoint<T> zb = offset_point(z, u, r);
    auto vb = lax_extend(field_, zb);
    if (vz && vb && step && approx_eq(T(*vb - *vz), *step)) {
      Hull hb = backward_hull(zb, lax_argmin(field_, zb));
      rec.backward_witness = hb.convex && hb.h == b.h;
    }
    if (!rec.backward_witness) rec.reasons.push_back("no backward witness");
  }
  // forward witness: step back along the inner ray
  if (f.convex) {
    if (approx_less(r, z.t)) {
      LiftedPoint<T> zf = offset_point(z, u, T(-r));
      auto vf = lax_extend(field_, zf);
      if (vz && vf && step && approx_eq(T(*vz - *vf), *step)) {
        Hull hf = backward_hull(zf, lax_argmin(field_, zf));
        Forward ff = forward_hull(hf);
        rec.forward_witness = ff.convex && ff.h == f.h;
      }
    }
    if (!rec.forward_witness) rec.reasons.push_back("no forward witness");
  }

  bool back_ok = rec.backward_convex && rec.backward_witness;
  bool fwd_ok = rec.forward_convex && rec.forward_witness;
  if (back_ok && fwd_ok) {
    if (b.h == f.h) {
      rec.kind = PointKind::Regular;
    } else {
      rec.reasons.push_back("backward and forward dimensions differ");
    }
  } else if (back_ok) {
    rec.kind = PointKind::BackwardRegular;
  } else if (fwd_ok) {
    rec.kind = PointKind::ForwardRegular;
  }
  return rec;
}

template <typename T>
Partition<T> first_partition(const TransportInstance<T>& inst, const PolyhedralCost<T>& cost,
                             const Plan<T>& optimal, const ClassifyOptions<T>& opts) {
  Partition<T> out;
  out.duals = strictly_complementary_duals(inst, optimal);
  out.field = make_potential(cost, inst.nu_points, out.duals.psi);
  PointClassifier<T> clf(out.field, opts);
  const int d = cost.dim;
  std::map<std::string, int> index;
  out.class_of.assign(inst.m(), -1);
  for (int i = 0; i < inst.m(); ++i) {
    LiftedPoint<T> z{T(1), inst.mu_points[i]};
    auto rec = clf.classify(z, out.duals.tight[i]);
    if (rec.kind == PointKind::Fixed) out.fixed_mass += inst.mu_weights[i];
    if (rec.kind != PointKind::Regular) {
      if (rec.kind != PointKind::Fixed) out.residual_mass += inst.mu_weights[i];
      out.records.push_back(std::move(rec));
      continue;
    }
    Mat<T> dirs = canonical_basis(rec.face.directions, d);
    Mat<T> normals = canonical_basis(nullspace(dirs, d), d);
    Vec<T> off;
    for (const auto& w : normals) off.push_back(dot(w, z.x));
    std::ostringstream key;
    key << rec.h << '|';
    for (int a : rec.face.active) key << a << ',';
    key << '|';
    for (const auto& w : normals)
      for (const auto& v : w) key << key_scalar(v) << ',';
    key << '|';
    for (const auto& v : off) key << key_scalar(v) << ',';
    auto [it, fresh] = index.emplace(key.str(), static_cast<int>(out.classes.size()));
    if (fresh) {
      FaceClass<T> fc;
      fc.label = "Z" + std::to_string(rec.h) + "_" + std::to_string(out.classes.size());
      fc.h = rec.h;
      fc.active = rec.face.active;
      fc.face = rec.face;
      fc.cone = clf.face_cone(rec.face);
      fc.directions = dirs;
      fc.normals = normals;
      fc.offset = off;
      out.classes.push_back(std::move(fc));
    }
    auto& fc = out.classes[it->second];
    fc.members.push_back(i);
    fc.mass += inst.mu_weights[i];
    out.class_of[i] = it->second;
    out.records.push_back(std::move(rec));
  }
  return out;
}

#define SUDAKOV_INSTANTIATE(T)                                                                      \
  template PotentialField<T> make_potential<T>(const PolyhedralCost<T>&, Vec<Vec<T>>, Vec<T>);      \
  template std::optional<T> lax_extend<T>(const PotentialField<T>&, const LiftedPoint<T>&);         \
  template std::vector<int> lax_argmin<T>(const PotentialField<T>&, const LiftedPoint<T>&);         \
  template DifferentialPairs<T> subdiff_pairs<T>(const PotentialField<T>&, const LiftedPoint<T>&,   \
                                                 const std::vector<LiftedPoint<T>>&);               \
  template DifferentialPairs<T> superdiff_pairs<T>(const PotentialField<T>&, const LiftedPoint<T>&, \
                                                   const std::vector<LiftedPoint<T>>&);             \
  template class PointClassifier<T>;                                                                \
  template Partition<T> first_partition<T>(const TransportInstance<T>&, const PolyhedralCost<T>&,   \
                                           const Plan<T>&, const ClassifyOptions<T>&);

SUDAKOV_INSTANTIATE(double)
SUDAKOV_INSTANTIATE(Rational)

}  // namespace sudakov
