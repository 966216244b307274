#pragma once

#include <cstdint>

#include "sudakov/linalg.hpp"

namespace sudakov {

template <typename T>
struct WeightedPoints {
  Vec<Vec<T>> points;
  Vec<T> weights;

  void append(const WeightedPoints& other) {
    points.insert(points.end(), other.points.begin(), other.points.end());
    weights.insert(weights.end(), other.weights.begin(), other.weights.end());
  }
};

enum class Sampler { MonteCarlo, Stratified };
enum class SegmentDensity { Uniform, TwinTent };

/// Sample coordinates are rounded to multiples of 2^-20 so both arithmetic
/// modes see identical, exactly representable points.
inline constexpr int kSampleBits = 20;

/// Uniform samples of the ball |x - center| <= radius. Stratified sampling
/// (d = 2 only) jitters a k x k grid with k = ceil(sqrt(count)) through the
/// concentric square-to-disc map, so it returns k^2 points.
template <typename T>
WeightedPoints<T> disc_samples(const Vec<Rational>& center, const Rational& radius, int count,
                               Sampler sampler, std::uint64_t seed, std::uint64_t stream);

/// Points of step * Z^d inside the closed ball.
template <typename T>
WeightedPoints<T> lattice_points(const Vec<Rational>& center, const Rational& radius,
                                 const Rational& step);

/// Midpoints of `count` equal pieces of [from, to]. The twin-tent density
/// weighs the point at signed position s in [-1, 1] by 1/2 - ||s| - 1/2|.
template <typename T>
WeightedPoints<T> segment_points(const Vec<Rational>& from, const Vec<Rational>& to, int count,
                                 SegmentDensity density);

/// Cell centers of a regular grid on the box [lo, hi].
template <typename T>
WeightedPoints<T> grid_points(const Vec<Rational>& lo, const Vec<Rational>& hi,
                              const std::vector<int>& counts);

/// A x + b with the matrix converted to T; shared by every pushforward so
/// images compare equal bit for bit in float mode.
template <typename T>
Vec<T> affine_image(const Mat<Rational>& A, const Vec<Rational>& b, const Vec<T>& x) {
  int d = static_cast<int>(x.size());
  if (static_cast<int>(A.size()) != d || static_cast<int>(b.size()) != d)
    throw InputError("map: matrix/offset dimension mismatch");
  Vec<T> y(d);
  for (int r = 0; r < d; ++r) {
    if (static_cast<int>(A[r].size()) != d) throw InputError("map: matrix must be square");
    T s = Num<T>::from_rational(b[r]);
    for (int c = 0; c < d; ++c) s += Num<T>::from_rational(A[r][c]) * x[c];
    y[r] = s;
  }
  return y;
}

/// Image of `src` under x -> A x + b; coincident images are merged.
template <typename T>
WeightedPoints<T> map_points(const WeightedPoints<T>& src, const Mat<Rational>& A,
                             const Vec<Rational>& b);

/// Negates coordinate `axis` (0-based) of every point.
template <typename T>
void reflect_points(WeightedPoints<T>& pts, int axis);

}  // namespace sudakov
