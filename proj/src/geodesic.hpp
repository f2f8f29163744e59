#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strata.hpp"

namespace orbistrat {

// A geodesic in the quotient, represented upstairs: a straight segment
// together with a group element mapping its endpoint back to its start.
// The pair is closed when the element also matches the velocities.
struct GeodesicPair {
  GeodesicSegment segment;
  GroupElement gamma;
};

// A chain of straight pieces, each followed by the element carrying its
// endpoint onto the start of the next piece (the last element carries the
// final endpoint back to the first start).
struct GeodesicPathSequence {
  std::vector<std::pair<GeodesicSegment, GroupElement>> pieces;
};

struct ClosednessReport {
  double position_residual = 0.0;
  double velocity_residual = 0.0;
  bool is_closed = false;
  double length = 0.0;
};

// Measures |gamma(c(b)) - c(a)| and |A_gamma c'(b) - c'(a)|; closed means
// both residuals within tol and positive length.
ClosednessReport is_closed(const GeodesicPair& pair,
                           double tol = kDefaultTolerance);

// Unwinds a chain into a single pair: piece i is translated by the inverse
// of the product of the first i-1 transition elements, the unwound pieces
// must join smoothly (same point, same direction), and the total element is
// the product of the transitions, last on the left. The result is
// parameterized at unit speed.
GeodesicPair reduce(const GeodesicPathSequence& chain,
                    double tol = kDefaultTolerance);

// Searches the enumerated ball for an element d with d(p1) = p2 as
// parameterized curves and d g1 d^-1 = g2. A search radius of zero derives
// one from the start-point separation. Returns false when no witness is
// found within the enumerated region.
bool equivalent(const ModelContext& ctx, const GeodesicPair& p1,
                const GeodesicPair& p2, double search_radius = 0.0);

// Construction from a fixed-point-free element: the segment runs along the
// minimum-displacement axis from its least-norm point, and the element of
// the pair is the inverse of the given one. Length equals the translation
// length of the element.
GeodesicPair from_hyperbolic(const ModelContext& ctx, const GroupElement& g);

// Construction at a point x whose isotropy contains an order-two element
// gamma acting as central inversion at x, using any element delta that
// moves x: the segment runs from delta(x) through x to gamma(delta(x)) and
// closes under delta gamma delta^-1 gamma (or the identity in the degenerate
// case where gamma already fixes delta(x)). Length is 2 |x - delta(x)|.
GeodesicPair from_even_isotropy(const ModelContext& ctx, const Vec& x,
                                const GroupElement& gamma,
                                const GroupElement& delta);

// Picks the data the dispatcher feeds to from_even_isotropy at x: the first
// central-inversion element of the isotropy at x (canonical group order)
// and the enumerated element moving x the least (ties by enumeration
// order). Returns nothing when the isotropy holds no central inversion.
std::optional<std::pair<GroupElement, GroupElement>> even_isotropy_data(
    const ModelContext& ctx, const Vec& x);

// Construction from a one-dimensional stratum component: traces the maximal
// prolongation of the component's line through frontier points (reflecting
// where a stabilizer element reverses the direction, passing straight
// through otherwise, and re-entering the box when the trace leaves the
// indexed region) until the starting state recurs, then reduces the traced
// chain. Covers both the closed-circle case and the reflected double of a
// segment.
GeodesicPair from_sigma1(const ModelContext& ctx, const Stratification& strat,
                         int component);

// Construction from a closed component of positive dimension: the shortest
// nonzero translation of the component's flat induced by elements
// preserving it, as a pair based at the component's base point. A component
// index of -1 selects the full space (empty singular set).
GeodesicPair from_closed_component(const ModelContext& ctx,
                                   const Stratification& strat, int component);

enum class Strategy {
  HyperbolicElement,
  ClosedComponent,
  Sigma1,
  EvenIsotropyPoint,
  OddStratumReduction,
  OpenCase,
};

const char* strategy_name(Strategy s);

struct DispatchOptions {
  std::vector<Strategy> disabled;  // strategies this level must skip; a
                                   // stratum-reduction sub-dispatch starts
                                   // from the full ladder again
  int max_recursion = 4;           // depth budget for stratum reduction
  int hyperbolic_word_length = 4;  // word-length bound for the element search
};

struct ExistenceOutcome {
  Strategy strategy = Strategy::OpenCase;
  std::optional<GeodesicPair> geodesic;
  ClosednessReport report;
  std::string explanation;  // which data produced the geodesic, or why none
  int component = -1;       // stratification component used, when one was
};

// Tries the constructions in a fixed order - fixed-point-free element,
// one-dimensional stratum, closed component, central inversion at an
// isolated point, reduction to the smallest positive-dimensional stratum
// when its dimension is odd (or at least half the ambient dimension with
// odd complement) - and returns the first success. Every non-open outcome
// carries a verified closed geodesic.
ExistenceOutcome existence_dispatch(const ModelContext& ctx,
                                    const Stratification& strat,
                                    const DispatchOptions& opts = {});

}  // namespace orbistrat
