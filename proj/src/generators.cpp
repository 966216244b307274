#include "sudakov/generators.hpp"

#include <cmath>
#include <map>
#include <random>

namespace sudakov {

namespace {

// Uniform double in [0, 1) built from the top 53 bits; independent of the
// standard library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
T quantized(double x) {
  long long k = std::llround(std::ldexp(x, kSampleBits));
  return Num<T>::from_rational(Rational(k) / Rational(1LL << kSampleBits));
}

template <typename T>
T from_q(const Rational& r) {
  return Num<T>::from_rational(r);
}

}  // namespace

template <typename T>
WeightedPoints<T> disc_samples(const Vec<Rational>& center, const Rational& radius, int count,
                               Sampler sampler, std::uint64_t seed, std::uint64_t stream) {
  if (count <= 0) throw InputError("disc: count must be positive");
  if (radius <= 0) throw InputError("disc: radius must be positive");
  int d = static_cast<int>(center.size());
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  Vec<double> c(d);
  for (int k = 0; k < d; ++k) c[k] = center[k].convert_to<double>();
  double r = radius.convert_to<double>();
  WeightedPoints<T> out;
  auto emit = [&](const Vec<double>& p) {
    Vec<T> q(d);
    for (int k = 0; k < d; ++k) q[k] = quantized<T>(p[k]);
    out.points.push_back(std::move(q));
    out.weights.push_back(T(1));
  };
  if (sampler == Sampler::MonteCarlo) {
    while (static_cast<int>(out.points.size()) < count) {
      Vec<double> u(d);
      double n2 = 0;
      for (int k = 0; k < d; ++k) {
        u[k] = 2 * unit(rng) - 1;
        n2 += u[k] * u[k];
      }
      if (n2 > 1) continue;
      for (int k = 0; k < d; ++k) u[k] = c[k] + r * u[k];
      emit(u);
    }
    return out;
  }
  if (d != 2) throw InputError("disc: stratified sampling needs d = 2");
  int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  for (int a = 0; a < side; ++a)
    for (int b = 0; b < side; ++b) {
      double u = 2 * ((a + unit(rng)) / side) - 1;
      double v = 2 * ((b + unit(rng)) / side) - 1;
      double rho, theta;
      if (u == 0 && v == 0) {
        rho = 0;
        theta = 0;
      } else if (std::fabs(u) > std::fabs(v)) {
        rho = u;
        theta = M_PI / 4 * (v / u);
      } else {
        rho = v;
        theta = M_PI / 2 - M_PI / 4 * (u / v);
      }
      emit({c[0] + r * rho * std::cos(theta), c[1] + r * rho * std::sin(theta)});
    }
  return out;
}

template <typename T>
WeightedPoints<T> lattice_points(const Vec<Rational>& center, const Rational& radius,
                                 const Rational& step) {
  if (step <= 0) throw InputError("lattice: step must be positive");
  if (radius < 0) throw InputError("lattice: radius must be nonnegative");
  int d = static_cast<int>(center.size());
  std::vector<long long> lo(d), hi(d);
  for (int k = 0; k < d; ++k) {
    lo[k] = static_cast<long long>(std::floor(((center[k] - radius) / step).convert_to<double>())) - 1;
    hi[k] = static_cast<long long>(std::ceil(((center[k] + radius) / step).convert_to<double>())) + 1;
  }
  WeightedPoints<T> out;
  std::vector<long long> idx(lo);
  Rational r2 = radius * radius;
  while (true) {
    Vec<Rational> p(d);
    Rational dist = 0;
    for (int k = 0; k < d; ++k) {
      p[k] = step * Rational(idx[k]);
      dist += (p[k] - center[k]) * (p[k] - center[k]);
    }
    if (dist <= r2) {
      Vec<T> q(d);
      for (int k = 0; k < d; ++k) q[k] = from_q<T>(p[k]);
      out.points.push_back(std::move(q));
      out.weights.push_back(T(1));
    }
    int k = d - 1;
    while (k >= 0 && idx[k] == hi[k]) {
      idx[k] = lo[k];
      --k;
    }
    if (k < 0) break;
    ++idx[k];
  }
  return out;
}

template <typename T>
WeightedPoints<T> segment_points(const Vec<Rational>& from, const Vec<Rational>& to, int count,
                                 SegmentDensity density) {
  if (count <= 0) throw InputError("segment: count must be positive");
  if (from.size() != to.size()) throw InputError("segment: endpoint dimensions differ");
  int d = static_cast<int>(from.size());
  WeightedPoints<T> out;
  for (int k = 0; k < count; ++k) {
    Rational u = (Rational(2 * k + 1)) / Rational(2 * count);  // in (0, 1)
    Rational w = 1;
    if (density == SegmentDensity::TwinTent) {
      Rational s = 2 * u - 1;
      Rational as = s < 0 ? Rational(-s) : s;
      Rational dev = as - Rational(1, 2);
      w = Rational(1, 2) - (dev < 0 ? Rational(-dev) : dev);
      if (w <= 0) continue;
    }
    Vec<T> p(d);
    for (int i = 0; i < d; ++i) p[i] = from_q<T>(from[i] + u * (to[i] - from[i]));
    out.points.push_back(std::move(p));
    out.weights.push_back(from_q<T>(w));
  }
  return out;
}

template <typename T>
WeightedPoints<T> grid_points(const Vec<Rational>& lo, const Vec<Rational>& hi,
                              const std::vector<int>& counts) {
  int d = static_cast<int>(lo.size());
  if (static_cast<int>(hi.size()) != d || static_cast<int>(counts.size()) != d)
    throw InputError("grid: dimension mismatch");
  for (int c : counts)
    if (c <= 0) throw InputError("grid: counts must be positive");
  WeightedPoints<T> out;
  std::vector<int> idx(d, 0);
  while (true) {
    Vec<T> p(d);
    for (int k = 0; k < d; ++k)
      p[k] = from_q<T>(lo[k] + (hi[k] - lo[k]) * Rational(2 * idx[k] + 1) / Rational(2 * counts[k]));
    out.points.push_back(std::move(p));
    out.weights.push_back(T(1));
    int k = d - 1;
    while (k >= 0 && idx[k] == counts[k] - 1) {
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
    ++idx[k];
  }
  return out;
}

template <typename T>
WeightedPoints<T> map_points(const WeightedPoints<T>& src, const Mat<Rational>& A,
                             const Vec<Rational>& b) {
  WeightedPoints<T> out;
  std::map<Vec<T>, int> seen;
  for (std::size_t i = 0; i < src.points.size(); ++i) {
    Vec<T> y = affine_image(A, b, src.points[i]);
    auto it = seen.find(y);
    if (it != seen.end()) {
      out.weights[it->second] += src.weights[i];
      continue;
    }
    seen.emplace(y, static_cast<int>(out.points.size()));
    out.points.push_back(std::move(y));
    out.weights.push_back(src.weights[i]);
  }
  return out;
}

template <typename T>
void reflect_points(WeightedPoints<T>& pts, int axis) {
  for (auto& p : pts.points) {
    if (axis < 0 || axis >= static_cast<int>(p.size())) throw InputError("reflect: axis out of range");
    p[axis] = -p[axis];
  }
}

#define SUDAKOV_INSTANTIATE(T)                                                                   \
  template WeightedPoints<T> disc_samples<T>(const Vec<Rational>&, const Rational&, int, Sampler, \
                                             std::uint64_t, std::uint64_t);                      \
  template WeightedPoints<T> lattice_points<T>(const Vec<Rational>&, const Rational&,            \
                                               const Rational&);                                 \
  template WeightedPoints<T> segment_points<T>(const Vec<Rational>&, const Vec<Rational>&, int,  \
                                               SegmentDensity);                                  \
  template WeightedPoints<T> grid_points<T>(const Vec<Rational>&, const Vec<Rational>&,          \
                                            const std::vector<int>&);                            \
  template WeightedPoints<T> map_points<T>(const WeightedPoints<T>&, const Mat<Rational>&,       \
                                           const Vec<Rational>&);                                \
  template void reflect_points<T>(WeightedPoints<T>&, int);

SUDAKOV_INSTANTIATE(double)
SUDAKOV_INSTANTIATE(Rational)

}  // namespace sudakov
