#include "geometry.hpp"

#include <Eigen/SVD>

#include <cmath>

#include "errors.hpp"

namespace orbistrat {

namespace {

void require_same_dim(int a, int b, const char* where) {
  if (a != b) {
    fail(ErrorKind::Validation,
         std::string(where) + ": inconsistent dimensions (" +
             std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Isometry identity_isometry(int n) {
  return Isometry{Mat::Identity(n, n), Vec::Zero(n)};
}

Isometry translation_isometry(const Vec& v) {
  const int n = static_cast<int>(v.size());
  return Isometry{Mat::Identity(n, n), v};
}

Isometry compose(const Isometry& g, const Isometry& h) {
  require_same_dim(g.dimension(), h.dimension(), "compose");
  return Isometry{g.linear * h.linear, g.linear * h.translation + g.translation};
}

Isometry inverse(const Isometry& g) {
  Mat at = g.linear.transpose();
  return Isometry{at, -(at * g.translation)};
}

Vec apply(const Isometry& g, const Vec& x) {
  require_same_dim(g.dimension(), static_cast<int>(x.size()), "apply");
  return g.linear * x + g.translation;
}

bool is_orthogonal(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  Mat residual = a.transpose() * a - Mat::Identity(a.rows(), a.cols());
  return residual.cwiseAbs().maxCoeff() <= tol;
}

bool approx_equal(const Isometry& a, const Isometry& b, double tol) {
  if (a.dimension() != b.dimension()) return false;
  return (a.linear - b.linear).cwiseAbs().maxCoeff() <= tol &&
         (a.translation - b.translation).norm() <= tol;
}

// ---------------------------------------------------------------------------

AffineSubspace AffineSubspace::whole_space(int n) {
  return AffineSubspace{Vec::Zero(n), Mat::Identity(n, n)};
}

AffineSubspace AffineSubspace::single_point(const Vec& p) {
  return AffineSubspace{p, Mat::Zero(p.size(), 0)};
}

double AffineSubspace::distance_to(const Vec& p) const {
  Vec r = p - base;
  if (basis.cols() > 0) r -= basis * (basis.transpose() * r);
  return r.norm();
}

bool AffineSubspace::contains(const Vec& p, double tol) const {
  return distance_to(p) <= tol;
}

Vec AffineSubspace::project(const Vec& p) const {
  Vec r = p - base;
  if (basis.cols() == 0) return base;
  return base + basis * (basis.transpose() * r);
}

Vec AffineSubspace::local_coordinates(const Vec& p) const {
  return basis.transpose() * (p - base);
}

Vec AffineSubspace::min_norm_point() const {
  return project(Vec::Zero(base.size()));
}

bool same_subspace(const AffineSubspace& a, const AffineSubspace& b,
                   double tol) {
  if (a.dim() != b.dim() || a.ambient_dim() != b.ambient_dim()) return false;
  if (!a.contains(b.base, tol) || !b.contains(a.base, tol)) return false;
  if (a.dim() == 0) return true;
  Mat residual = a.basis - b.basis * (b.basis.transpose() * a.basis);
  return residual.cwiseAbs().maxCoeff() <= tol;
}

AffineSubspace map_subspace(const Isometry& g, const AffineSubspace& s) {
  // g.linear is orthogonal, so the mapped basis stays orthonormal.
  return AffineSubspace{apply(g, s.base), g.linear * s.basis};
}

std::optional<AffineSubspace> intersect(const AffineSubspace& a,
                                        const AffineSubspace& b, double tol) {
  require_same_dim(a.ambient_dim(), b.ambient_dim(), "intersect");
  const int n = a.ambient_dim();
  // Membership in S as a linear constraint: (I - B B^T)(x - base) = 0.
  Mat pa = Mat::Identity(n, n);
  if (a.dim() > 0) pa -= a.basis * a.basis.transpose();
  Mat pb = Mat::Identity(n, n);
  if (b.dim() > 0) pb -= b.basis * b.basis.transpose();

  Mat stacked(2 * n, n);
  stacked.topRows(n) = pa;
  stacked.bottomRows(n) = pb;
  Vec rhs(2 * n);
  rhs.head(n) = pa * a.base;
  rhs.tail(n) = pb * b.base;

  Vec x = min_norm_solve(stacked, rhs);
  if (a.distance_to(x) > tol || b.distance_to(x) > tol) return std::nullopt;
  return AffineSubspace{x, null_space_basis(stacked)};
}

// ---------------------------------------------------------------------------

Mat null_space_basis(const Mat& m, double cutoff) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const int n = static_cast<int>(m.cols());
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > cutoff) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

Vec min_norm_solve(const Mat& m, const Vec& rhs, double cutoff) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vec coeffs = svd.matrixU().transpose() * rhs;
  Vec x = Vec::Zero(m.cols());
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    const double sigma = svd.singularValues()(i);
    if (sigma > cutoff) x += svd.matrixV().col(i) * (coeffs(i) / sigma);
  }
  return x;
}

// ---------------------------------------------------------------------------

std::optional<AffineSubspace> fixed_set(const Isometry& g, double tol) {
  const int n = g.dimension();
  Mat m = g.linear - Mat::Identity(n, n);
  Vec x0 = min_norm_solve(m, -g.translation);
  if ((m * x0 + g.translation).norm() > tol) return std::nullopt;
  return AffineSubspace{x0, null_space_basis(m)};
}

std::optional<AffineSubspace> common_fixed_set(std::span<const Isometry> gs,
                                               double tol) {
  if (gs.empty()) {
    fail(ErrorKind::Validation, "common_fixed_set: empty input");
  }
  const int n = gs[0].dimension();
  Mat stacked(static_cast<int>(gs.size()) * n, n);
  Vec rhs(static_cast<int>(gs.size()) * n);
  for (size_t i = 0; i < gs.size(); ++i) {
    require_same_dim(n, gs[i].dimension(), "common_fixed_set");
    stacked.middleRows(static_cast<int>(i) * n, n) =
        gs[i].linear - Mat::Identity(n, n);
    rhs.segment(static_cast<int>(i) * n, n) = -gs[i].translation;
  }
  Vec x0 = min_norm_solve(stacked, rhs);
  for (const Isometry& g : gs) {
    if ((apply(g, x0) - x0).norm() > tol) return std::nullopt;
  }
  return AffineSubspace{x0, null_space_basis(stacked)};
}

MinDisplacement min_displacement(const Isometry& g, double /*tol*/) {
  // |g.x - x| = |(A - I)x + b| is minimized on x0 + ker(A - I); for
  // orthogonal A the attained minimum is the norm of the projection of b
  // onto ker(A - I).
  const int n = g.dimension();
  Mat m = g.linear - Mat::Identity(n, n);
  Vec x0 = min_norm_solve(m, -g.translation);
  double value = (m * x0 + g.translation).norm();
  return MinDisplacement{value, AffineSubspace{x0, null_space_basis(m)}};
}

IsometryKind classify(const Isometry& g, double tol) {
  if (approx_equal(g, identity_isometry(g.dimension()), tol)) {
    return IsometryKind::Identity;
  }
  return min_displacement(g, tol).value <= tol ? IsometryKind::Elliptic
                                               : IsometryKind::Hyperbolic;
}

// ---------------------------------------------------------------------------

GeodesicSegment reverse_segment(const GeodesicSegment& s) {
  return GeodesicSegment{s.end(), -s.velocity, s.t0, s.t1};
}

GeodesicSegment translate_segment(const Isometry& g, const GeodesicSegment& s) {
  return GeodesicSegment{apply(g, s.start), g.linear * s.velocity, s.t0, s.t1};
}

GeodesicSegment concatenate(const GeodesicSegment& a, const GeodesicSegment& b,
                            double tol) {
  if ((a.end() - b.start).norm() > tol) {
    fail(ErrorKind::StrategyPrecondition,
         "concatenate: endpoint mismatch between pieces");
  }
  if ((a.velocity - b.velocity).norm() > tol) {
    fail(ErrorKind::StrategyPrecondition,
         "concatenate: non-smooth join (velocities differ) without corner flag");
  }
  return GeodesicSegment{a.start, a.velocity, a.t0, a.t1 + b.duration()};
}

std::vector<GeodesicSegment> concatenate_allow_corner(const GeodesicSegment& a,
                                                      const GeodesicSegment& b,
                                                      double tol) {
  if ((a.end() - b.start).norm() > tol) {
    fail(ErrorKind::StrategyPrecondition,
         "concatenate: endpoint mismatch between pieces");
  }
  if ((a.velocity - b.velocity).norm() <= tol) {
    return {GeodesicSegment{a.start, a.velocity, a.t0, a.t1 + b.duration()}};
  }
  GeodesicSegment shifted = b;
  shifted.t0 = a.t1;
  shifted.t1 = a.t1 + b.duration();
  return {a, shifted};
}

}  // namespace orbistrat
