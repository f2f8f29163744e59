#pragma once

// Shared helpers for the test suites: seeded random isometry generators and
// brute-force oracles that deliberately avoid the library's SVD code paths.

#include <cmath>
#include <numbers>
#include <random>

#include "geometry.hpp"

namespace orbistrat::testing {

inline std::mt19937_64 seeded_rng(std::uint64_t seed) {
  return std::mt19937_64{seed};
}

inline Vec random_vec(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

// Random orthogonal matrix via QR of a Gaussian matrix, sign-fixed so the
// distribution is Haar-like; optionally forced into SO(n).
inline Mat random_orthogonal(int n, std::mt19937_64& rng,
                             bool special = false) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = dist(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    if (r(i, i) < 0) q.col(i) *= -1.0;
  }
  if (special && q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

inline Isometry random_isometry(int n, std::mt19937_64& rng) {
  return Isometry{random_orthogonal(n, rng), random_vec(n, rng)};
}

inline Mat rotation2(double angle) {
  Mat a(2, 2);
  a << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return a;
}

// Rodrigues rotation about a unit axis through the origin.
inline Mat rotation3(const Vec& axis, double angle) {
  Mat k(3, 3);
  k << 0, -axis(2), axis(1), axis(2), 0, -axis(0), -axis(1), axis(0), 0;
  return Mat::Identity(3, 3) + std::sin(angle) * k +
         (1.0 - std::cos(angle)) * (k * k);
}

// Screw motion: rotation by `angle` about the axis {p + t d} composed with a
// slide along the axis. Minimal displacement is |slide| by construction.
inline Isometry make_screw(const Vec& axis_point, const Vec& axis_dir,
                           double angle, double slide) {
  Vec d = axis_dir.normalized();
  Mat a = rotation3(d, angle);
  Vec b = axis_point - a * axis_point + slide * d;
  return Isometry{a, b};
}

// Planar glide: reflection across the line {p + t d} plus a slide along it.
inline Isometry make_glide(const Vec& line_point, const Vec& line_dir,
                           double slide) {
  Vec d = line_dir.normalized();
  Mat refl = 2.0 * (d * d.transpose()) - Mat::Identity(2, 2);
  Vec b = line_point - refl * line_point + slide * d;
  return Isometry{refl, b};
}

// ---------------------------------------------------------------------------
// Displacement oracles (plain function evaluation, no linear algebra).

inline double displacement_at(const Isometry& g, const Vec& x) {
  return (g.linear * x + g.translation - x).norm();
}

// Exhaustive grid minimization of |g.x - x| over [lo, hi]^2.
inline double grid_min_displacement_2d(const Isometry& g, double lo, double hi,
                                       double step) {
  double best = std::numeric_limits<double>::infinity();
  Vec x(2);
  for (double u = lo; u <= hi + 0.5 * step; u += step) {
    x(0) = u;
    for (double v = lo; v <= hi + 0.5 * step; v += step) {
      x(1) = v;
      best = std::min(best, displacement_at(g, x));
    }
  }
  return best;
}

// Cyclic coordinate descent with exact convex line searches. |g.x - x| is
// convex, and smooth wherever it is positive, so ternary minimization along
// coordinate lines converges to the global minimum value for isometries with
// positive minimal displacement (the cases the oracle is used for).
inline double descend_min_displacement(const Isometry& g,
                                       double line_radius = 8.0,
                                       int max_sweeps = 400) {
  const int n = g.dimension();
  Vec x = Vec::Zero(n);
  double best = displacement_at(g, x);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double before = best;
    for (int i = 0; i < n; ++i) {
      double lo = x(i) - line_radius;
      double hi = x(i) + line_radius;
      for (int iter = 0; iter < 90; ++iter) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        Vec x1 = x, x2 = x;
        x1(i) = m1;
        x2(i) = m2;
        if (displacement_at(g, x1) <= displacement_at(g, x2)) {
          hi = m2;
        } else {
          lo = m1;
        }
      }
      x(i) = 0.5 * (lo + hi);
      best = std::min(best, displacement_at(g, x));
    }
    if (before - best < 1e-13) break;
  }
  return best;
}

}  // namespace orbistrat::testing
