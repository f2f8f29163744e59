#pragma once

// Rigid motions of R^n, their fixed sets and minimal displacement, affine
// subspaces, and constant-speed geodesic segments. Everything downstream
// (group enumeration, strata, geodesic constructions) reduces to these.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace orbistrat {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One global comparison tolerance (configurable per model) and one absolute
// singular-value cutoff that is the single source of truth for every rank /
// dimension decision.
inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr double kRankCutoff = 1e-9;

// ---------------------------------------------------------------------------
// Isometry x |-> A x + b with A orthogonal.

struct Isometry {
  Mat linear;       // n x n orthogonal
  Vec translation;  // n

  int dimension() const { return static_cast<int>(translation.size()); }
};

Isometry identity_isometry(int n);
Isometry translation_isometry(const Vec& v);

// g.(h.x) == (compose(g, h)).x
Isometry compose(const Isometry& g, const Isometry& h);
Isometry inverse(const Isometry& g);
Vec apply(const Isometry& g, const Vec& x);

bool is_orthogonal(const Mat& a, double tol);
// max-norm on the linear part, Euclidean norm on the translation part.
bool approx_equal(const Isometry& a, const Isometry& b, double tol);

enum class IsometryKind { Identity, Elliptic, Hyperbolic };

// ---------------------------------------------------------------------------
// Affine subspace base + span(basis), basis orthonormal (n x k, k may be 0).

struct AffineSubspace {
  Vec base;
  Mat basis;

  int dim() const { return static_cast<int>(basis.cols()); }
  int ambient_dim() const { return static_cast<int>(base.size()); }

  static AffineSubspace whole_space(int n);
  static AffineSubspace single_point(const Vec& p);

  double distance_to(const Vec& p) const;
  bool contains(const Vec& p, double tol) const;
  Vec project(const Vec& p) const;
  // In-subspace coordinates of an ambient point (its projection).
  Vec local_coordinates(const Vec& p) const;
  // The point of the subspace closest to the origin; canonical base point.
  Vec min_norm_point() const;
};

bool same_subspace(const AffineSubspace& a, const AffineSubspace& b, double tol);
// Image g.S (an affine subspace again; basis re-orthonormalized).
AffineSubspace map_subspace(const Isometry& g, const AffineSubspace& s);
// Intersection, or nullopt when empty (constraint residual above tol).
std::optional<AffineSubspace> intersect(const AffineSubspace& a,
                                        const AffineSubspace& b, double tol);

// ---------------------------------------------------------------------------
// Rank-decision helpers (absolute singular-value cutoff).

// Orthonormal basis of ker(m) as columns.
Mat null_space_basis(const Mat& m, double cutoff = kRankCutoff);
// Min-norm least-squares solution of m x = rhs.
Vec min_norm_solve(const Mat& m, const Vec& rhs, double cutoff = kRankCutoff);

// ---------------------------------------------------------------------------
// Fixed sets and minimal displacement.

// Solutions of g.x == x, or nullopt when g has no fixed point.
std::optional<AffineSubspace> fixed_set(const Isometry& g, double tol);
// Common fixed set of several isometries.
std::optional<AffineSubspace> common_fixed_set(std::span<const Isometry> gs,
                                               double tol);

struct MinDisplacement {
  double value;         // inf_x |g.x - x|
  AffineSubspace axis;  // argmin set (Fix(g) when value == 0)
};

MinDisplacement min_displacement(const Isometry& g, double tol);
IsometryKind classify(const Isometry& g, double tol);

// ---------------------------------------------------------------------------
// Constant-speed geodesic segments c(t) = start + (t - t0) * velocity.

struct GeodesicSegment {
  Vec start;
  Vec velocity;
  double t0 = 0.0;
  double t1 = 1.0;

  Vec evaluate(double t) const { return start + (t - t0) * velocity; }
  Vec end() const { return evaluate(t1); }
  double duration() const { return t1 - t0; }
  double length() const { return velocity.norm() * duration(); }
};

// Same image traversed backwards over the same parameter interval.
GeodesicSegment reverse_segment(const GeodesicSegment& s);
GeodesicSegment translate_segment(const Isometry& g, const GeodesicSegment& s);
// Smooth join (endpoint match + equal velocities); throws otherwise.
GeodesicSegment concatenate(const GeodesicSegment& a, const GeodesicSegment& b,
                            double tol);
// Endpoint match only; merges into one piece when the join is smooth.
std::vector<GeodesicSegment> concatenate_allow_corner(const GeodesicSegment& a,
                                                      const GeodesicSegment& b,
                                                      double tol);

}  // namespace orbistrat
