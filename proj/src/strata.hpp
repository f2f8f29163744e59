#pragma once

// Stratification of the singular set of a compact flat orbifold given as a
// box acted on by a discrete group of isometries. Builds the arrangement of
// fixed-point flats, splits each flat into cells, glues cells along the group
// action into quotient components graded by singular dimension, and analyzes
// component frontiers (mirror endpoints vs. continuations) and closures.

#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "group.hpp"

namespace orbistrat {

struct Box {
  Vec lo;
  Vec hi;

  int dimension() const { return static_cast<int>(lo.size()); }
  Vec center() const { return 0.5 * (lo + hi); }
  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Vec& x, double tol) const;
  Vec clamp(const Vec& x) const;
  Box inflated(double factor) const;  // scaled about the center
};

struct OrbifoldModel {
  std::string name;
  GeneratedGroup group;
  Box box;
  double tolerance = kDefaultTolerance;
};

// Validated model: the group is well-formed, the action is certified proper
// over the box, and group images of the box cover a neighborhood of it (so
// the box maps onto the whole quotient).
struct ModelContext {
  OrbifoldModel model;
  GroupIndex index;
  PropernessCertificate properness;
  // Complete ball of radius 2x box diameter about the box center; used for
  // orbit tests, gluing, and flat-stabilizer searches.
  std::vector<GroupElement> glue_ball;
};

ModelContext validate_model(OrbifoldModel model);

// One affine flat of the arrangement (a fixed-point set or an intersection
// of fixed-point sets meeting the inflated box).
struct FlatRecord {
  AffineSubspace space;  // orthonormal direction basis
  int dim = 0;
  // Lines (dim 1): clip interval of the flat against the inflated box and
  // the parameters of arrangement points lying on the line, sorted.
  double t_min = 0.0;
  double t_max = 0.0;
  std::vector<double> cuts;
  // Higher flats (dim >= 2): walls are (dim-1)-subflats in local
  // coordinates, as (unit normal, offset) pairs: {z : normal . z = offset}.
  std::vector<std::pair<Vec, double>> walls;
};

// A connected piece of one flat minus the lower-dimensional flats, clipped
// to the inflated box.
struct CellRecord {
  int flat = -1;
  int dim = 0;
  // dim == 1: the open parameter interval, with flags telling whether each
  // endpoint is a genuine arrangement point (frontier) or a box-clip
  // artifact.
  double t_lo = 0.0;
  double t_hi = 0.0;
  bool lo_frontier = false;
  bool hi_frontier = false;
  // dim >= 2: chamber label (sign per wall) for this flat's wall list.
  std::vector<int> signs;
  Vec sample;                // deterministic generic interior point
  std::vector<Vec> probes;   // extra interior points (gluing tests)
  std::vector<Vec> frontier_points;  // genuine boundary points in the box
};

// One orbit class of frontier points of a component.
struct FrontierClass {
  Vec representative;        // preferred in-box representative
  int isotropy_order = 0;
  // A concrete incidence used for local analysis: the boundary point as it
  // appears on a member cell of the component.
  int cell = -1;
  bool at_high_end = false;  // incidence sits at the cell's upper parameter
  Vec incidence_point;
};

struct StratumComponent {
  int singular_dimension = 0;
  int isotropy_order = 1;
  FiniteGroup isotropy;      // stabilizer of the base point
  Vec base_point;            // generic representative, preferred in-box
  int representative_cell = -1;
  std::vector<int> cells;    // member cell indices
  bool is_closed = true;     // no genuine frontier after gluing
  std::vector<FrontierClass> frontier;
};

struct Stratification {
  int dimension = 0;
  std::vector<FlatRecord> flats;
  std::vector<CellRecord> cells;
  std::vector<StratumComponent> components;  // sorted by (dim, order, base)
  std::vector<int> cell_to_component;        // cell index -> component index
  // The set of nonsingular points is closed iff nothing is singular.
  bool regular_set_closed = true;

  int smallest_positive_dimension() const;  // -1 when no such component
};

Stratification stratify(const ModelContext& ctx);

// Locate a flat of the stratification equal to the given subspace.
int find_flat(const Stratification& strat, const AffineSubspace& space,
              double tol);
// Locate the cell of the given dimension containing the point, if any.
int find_cell(const Stratification& strat, const Vec& point, int dim,
              double tol);

// ---------------------------------------------------------------------------
// Closure analysis of a minimal-dimension component: the closure is itself a
// compact flat quotient of the flat by its setwise stabilizer; its structure
// at a boundary point is the stabilizer of the point acting on the flat,
// modulo the pointwise kernel.

struct EffectiveGroupProbe {
  Vec point;
  int isotropy_order = 1;    // full point stabilizer upstairs
  int effective_order = 1;   // induced transformations of the flat
};

struct ClosedStratumReport {
  int kernel_order = 1;      // pointwise stabilizer of the flat
  bool is_manifold = true;   // every probe acts trivially on the flat
  std::vector<EffectiveGroupProbe> probes;
};

// Precondition: the component's dimension is the smallest positive singular
// dimension present (so no lower positive-dimensional strata interleave).
ClosedStratumReport closed_stratum(const ModelContext& ctx,
                                   const Stratification& strat, int component);

// ---------------------------------------------------------------------------
// Frontier analysis for one-dimensional components: at a frontier point the
// component either terminates (some stabilizer element reverses the line
// direction: a mirror endpoint) or continues through into a singular
// component on the far side (possibly itself).

enum class FrontierKind { End, ExtendsInto };

struct FrontierAnalysis {
  FrontierKind kind = FrontierKind::End;
  Isometry reversing;        // End: stabilizer element with A v = -v
  int target_component = -1; // ExtendsInto: component on the far side
};

FrontierAnalysis analyze_frontier_sigma1(const ModelContext& ctx,
                                         const Stratification& strat,
                                         int component, int frontier_class);

// ---------------------------------------------------------------------------
// Restriction of the setwise stabilizer of a flat to that flat, yielding a
// lower-dimensional model (used for closure analyses and recursion). Each
// restricted generator keeps its ambient preimage.

struct RestrictedModel {
  OrbifoldModel sub;               // dim-of-flat dimensional model
  Mat basis;                       // ambient = base + basis * local
  Vec base;
  std::vector<GroupElement> preimages;  // aligned with sub.group.generators
};

RestrictedModel restrict_to_flat(const ModelContext& ctx,
                                 const AffineSubspace& flat);

}  // namespace orbistrat
