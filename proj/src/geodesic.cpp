#include "geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace orbistrat {
namespace {

// Shared geometric coincidence threshold, scaled by the model where needed.
constexpr double kGeoTouch = 1e-7;

Mat identity_mat(int n) { return Mat::Identity(n, n); }

bool is_translation_matrix(const Mat& a) {
  return (a - identity_mat(static_cast<int>(a.rows()))).norm() <= kGeoTouch;
}

bool is_central_inversion(const Mat& a) {
  return (a + identity_mat(static_cast<int>(a.rows()))).norm() <= kGeoTouch;
}

// Unit-speed representation of a nondegenerate segment.
GeodesicSegment unit_speed(const Vec& from, const Vec& to) {
  const double len = (to - from).norm();
  return GeodesicSegment{from, (to - from) / len, 0.0, len};
}

}  // namespace

ClosednessReport is_closed(const GeodesicPair& pair, double tol) {
  ClosednessReport report;
  const GeodesicSegment& seg = pair.segment;
  report.length = seg.length();
  report.position_residual =
      (apply(pair.gamma.iso, seg.end()) - seg.start).norm();
  report.velocity_residual =
      (pair.gamma.iso.linear * seg.velocity - seg.velocity).norm();
  report.is_closed = report.position_residual <= tol &&
                     report.velocity_residual <= tol && report.length > tol;
  return report;
}

GeodesicPair reduce(const GeodesicPathSequence& chain, double tol) {
  if (chain.pieces.empty()) {
    fail(ErrorKind::Validation, "reduce: empty chain");
  }
  const int n = static_cast<int>(chain.pieces.front().first.start.size());
  Isometry prefix_inv = identity_isometry(n);  // inverse of the prior product
  GroupElement total = identity_element(n);
  std::optional<GeodesicSegment> merged;
  for (const auto& [segment, transition] : chain.pieces) {
    const GeodesicSegment unwound = translate_segment(prefix_inv, segment);
    const double len = unwound.length();
    if (len > tol) {
      const GeodesicSegment unit{unwound.start,
                                 unwound.velocity / unwound.velocity.norm(),
                                 0.0, len};
      merged = merged ? concatenate(*merged, unit, std::max(tol, 1e-9))
                      : unit;
    }
    total = compose_elements(transition, total);
    prefix_inv = compose(prefix_inv, inverse(transition.iso));
  }
  if (!merged) {
    // Every piece was a point: the chain denotes a constant curve.
    return GeodesicPair{
        GeodesicSegment{chain.pieces.front().first.start, Vec::Zero(n), 0.0,
                        1.0},
        total};
  }
  return GeodesicPair{*merged, total};
}

bool equivalent(const ModelContext& ctx, const GeodesicPair& p1,
                const GeodesicPair& p2, double search_radius) {
  const double near = kGeoTouch * (1.0 + ctx.model.box.diameter());
  if (std::abs(p1.segment.length() - p2.segment.length()) > near) {
    return false;
  }
  if (search_radius <= 0.0) {
    search_radius =
        (p2.segment.start - p1.segment.start).norm() + 1e-6;
  }
  const BallEnumeration ball =
      ctx.index.enumerate_ball(p1.segment.start, search_radius);
  const double v1n = p1.segment.velocity.norm();
  const double v2n = p2.segment.velocity.norm();
  for (const GroupElement& d : ball.elements) {
    if ((apply(d.iso, p1.segment.start) - p2.segment.start).norm() > near) {
      continue;
    }
    if (v1n > near || v2n > near) {
      if (v1n <= near || v2n <= near) continue;
      const Vec u1 = p1.segment.velocity / v1n;
      const Vec u2 = p2.segment.velocity / v2n;
      if ((d.iso.linear * u1 - u2).norm() > near) continue;
    }
    const Isometry conj =
        compose(compose(d.iso, p1.gamma.iso), inverse(d.iso));
    if (approx_equal(conj, p2.gamma.iso, near)) {
      return true;
    }
  }
  return false;
}

GeodesicPair from_hyperbolic(const ModelContext& ctx, const GroupElement& g) {
  const double tol = ctx.model.tolerance;
  if (classify(g.iso, tol) != IsometryKind::Hyperbolic) {
    fail(ErrorKind::StrategyPrecondition,
         "from_hyperbolic: element is not fixed-point free");
  }
  const MinDisplacement md = min_displacement(g.iso, tol);
  const Vec x = md.axis.base;  // least-norm point of the displacement axis
  const Vec y = apply(g.iso, x);
  return GeodesicPair{unit_speed(x, y), inverse_element(g)};
}

GeodesicPair from_even_isotropy(const ModelContext& ctx, const Vec& x,
                                const GroupElement& gamma,
                                const GroupElement& delta) {
  const double near = kGeoTouch * (1.0 + ctx.model.box.diameter());
  if ((apply(gamma.iso, x) - x).norm() > near) {
    fail(ErrorKind::StrategyPrecondition,
         "from_even_isotropy: gamma does not fix the base point");
  }
  if (!is_central_inversion(gamma.iso.linear)) {
    fail(ErrorKind::StrategyPrecondition,
         "from_even_isotropy: gamma is not a central inversion at the base "
         "point");
  }
  const Vec z = apply(delta.iso, x);
  if ((z - x).norm() <= near) {
    fail(ErrorKind::StrategyPrecondition,
         "from_even_isotropy: delta must move the base point");
  }
  // The segment from delta(x) through x to gamma(delta(x)): the inversion
  // makes the two halves join smoothly at x.
  const Vec zz = apply(gamma.iso, z);
  const double half = (z - x).norm();
  GeodesicSegment seg{z, (x - z) / half, 0.0, 2.0 * half};
  if ((zz - z).norm() <= near) {
    // Degenerate branch: the far endpoint already equals the start, so the
    // doubled segment closes on its own. (An isometry inverting space about
    // an isolated point cannot fix any other point, so consistent inputs
    // never reach this; kept for completeness on hand-built data.)
    return GeodesicPair{seg, identity_element(ctx.model.box.dimension())};
  }
  const GroupElement lambda = compose_elements(
      delta,
      compose_elements(gamma, compose_elements(inverse_element(delta), gamma)));
  return GeodesicPair{seg, lambda};
}

std::optional<std::pair<GroupElement, GroupElement>> even_isotropy_data(
    const ModelContext& ctx, const Vec& x) {
  const double near = kGeoTouch * (1.0 + ctx.model.box.diameter());
  const FiniteGroup stab = ctx.index.isotropy_at(x);
  const GroupElement* inversion = nullptr;
  for (const GroupElement& e : stab.elements()) {
    if (is_central_inversion(e.iso.linear)) {
      inversion = &e;
      break;
    }
  }
  if (inversion == nullptr) {
    return std::nullopt;
  }
  const GroupElement* mover = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const GroupElement& d : ctx.glue_ball) {
    const double move = (apply(d.iso, x) - x).norm();
    if (move <= near) continue;
    if (move < best - 1e-9) {
      best = move;
      mover = &d;
    }
  }
  if (mover == nullptr) {
    return std::nullopt;
  }
  return std::make_pair(*inversion, *mover);
}

namespace {

// One step of the prolongation trace: from a point heading along a unit
// direction inside the one-skeleton, march to the end of the current cell
// and process the event there. A transition element, when present, carries
// the event point onto the start of the next piece.
struct TraceStep {
  Vec event_point;
  std::optional<GroupElement> transition;
  Vec next_point;
  Vec next_direction;
};

TraceStep advance_trace(const ModelContext& ctx, const Stratification& strat,
                        const Vec& x, const Vec& w, double eps) {
  const double tol = ctx.model.tolerance;
  const double near = kGeoTouch * (1.0 + ctx.model.box.diameter());

  auto rebox = [&](const Vec& point, const Vec& dir) -> TraceStep {
    // Prefer elements mapping the traced line onto itself, so the length of
    // the closed-up trace is the plain period of the line downstairs;
    // otherwise fall back to the first element that re-enters the box.
    std::optional<TraceStep> fallback;
    for (const GroupElement& g : ctx.glue_ball) {
      const Vec image = apply(g.iso, point);
      if (!ctx.model.box.contains(image, near)) continue;
      const Vec turned = g.iso.linear * dir;
      if (find_cell(strat, image + eps * turned, 1, tol) < 0) continue;
      const Vec offset = image - point;
      const Vec perp = offset - offset.dot(dir) * dir;
      const bool same_line =
          perp.norm() <= near && ((turned - dir).norm() <= kGeoTouch ||
                                  (turned + dir).norm() <= kGeoTouch);
      if (same_line) {
        return TraceStep{point, g, image, turned};
      }
      if (!fallback) {
        fallback = TraceStep{point, g, image, turned};
      }
    }
    if (fallback) return *fallback;
    fail(ErrorKind::Enumeration,
         "from_sigma1: prolongation left the indexed region");
  };

  const int ci = find_cell(strat, x + eps * w, 1, tol);
  if (ci < 0) {
    return rebox(x, w);
  }
  const CellRecord& cell = strat.cells[ci];
  const FlatRecord& flat = strat.flats[cell.flat];
  const Vec d = flat.space.basis.col(0);
  const double s = w.dot(d);
  if (std::abs(std::abs(s) - 1.0) > 1e-6) {
    fail(ErrorKind::Internal,
         "from_sigma1: trace direction left the one-skeleton");
  }
  const bool forward = s > 0.0;
  const double t_end = forward ? cell.t_hi : cell.t_lo;
  const bool frontier = forward ? cell.hi_frontier : cell.lo_frontier;
  const Vec y = flat.space.base + t_end * d;
  if (frontier) {
    // Arrangement point. When some stabilizer element reverses the
    // direction, the line folds onto itself in the quotient: doubling back
    // traces the primitive period, while the straight continuation would
    // cover it twice. Without such an element the trace passes straight
    // through the junction.
    const FiniteGroup stab = ctx.index.isotropy_at(y);
    for (const GroupElement& e : stab.elements()) {
      if ((e.iso.linear * w + w).norm() <= kGeoTouch) {
        return TraceStep{y, e, y, -w};
      }
    }
    if (find_cell(strat, y + eps * w, 1, tol) >= 0) {
      return TraceStep{y, std::nullopt, y, w};
    }
    fail(ErrorKind::Enumeration,
         "from_sigma1: stratum endpoint admits no reversal");
  }
  // Clip end of the indexed region: map back into the box.
  return rebox(y, w);
}

}  // namespace

GeodesicPair from_sigma1(const ModelContext& ctx, const Stratification& strat,
                         int component) {
  if (component < 0 ||
      component >= static_cast<int>(strat.components.size())) {
    fail(ErrorKind::Validation, "from_sigma1: unknown component");
  }
  const StratumComponent& comp = strat.components[component];
  if (comp.singular_dimension != 1) {
    fail(ErrorKind::StrategyPrecondition,
         "from_sigma1: component is not one-dimensional");
  }
  const double tol = ctx.model.tolerance;
  const double near = kGeoTouch * (1.0 + ctx.model.box.diameter());

  const CellRecord& c0 = strat.cells[comp.representative_cell];
  const FlatRecord& f0 = strat.flats[c0.flat];
  const Vec p0 = c0.sample;
  const Vec d0 = f0.space.basis.col(0);

  // Step size safely below the shortest cell of the one-skeleton.
  double min_len = std::numeric_limits<double>::infinity();
  long total_cuts = 0;
  for (const CellRecord& cell : strat.cells) {
    if (cell.dim == 1) min_len = std::min(min_len, cell.t_hi - cell.t_lo);
  }
  for (const FlatRecord& flat : strat.flats) {
    total_cuts += static_cast<long>(flat.cuts.size());
  }
  const double eps = std::min(1e-4 * (1.0 + ctx.model.box.diameter()),
                              0.2 * min_len);

  // One piece per march; a pass event carries the identity transition so
  // pieces and pre-march states stay aligned. The loop closes as soon as any
  // earlier (point, direction) state recurs, and the closed-up trace is the
  // chain between the two visits.
  const int n = ctx.model.box.dimension();
  std::vector<std::pair<Vec, Vec>> visited;
  GeodesicPathSequence chain;
  Vec x = p0;
  Vec w = d0;
  const long cap = 8 * (static_cast<long>(strat.cells.size()) + total_cuts) +
                   64;
  for (long iter = 0; iter < cap; ++iter) {
    for (std::size_t k = 0; k < visited.size(); ++k) {
      if ((x - visited[k].first).norm() <= near &&
          (w - visited[k].second).norm() <= kGeoTouch) {
        GeodesicPathSequence loop;
        loop.pieces.assign(chain.pieces.begin() + static_cast<long>(k),
                           chain.pieces.end());
        return reduce(loop, tol);
      }
    }
    visited.emplace_back(x, w);
    const TraceStep step = advance_trace(ctx, strat, x, w, eps);
    const double len = (step.event_point - x).norm();
    const GeodesicSegment piece =
        len > tol ? unit_speed(x, step.event_point)
                  : GeodesicSegment{x, Vec::Zero(n), 0.0, 0.0};
    chain.pieces.emplace_back(
        piece, step.transition ? *step.transition : identity_element(n));
    x = step.next_point;
    w = step.next_direction;
  }
  fail(ErrorKind::Enumeration,
       "from_sigma1: prolongation exceeded the tracing budget");
}

GeodesicPair from_closed_component(const ModelContext& ctx,
                                   const Stratification& strat,
                                   int component) {
  const int n = ctx.model.box.dimension();
  AffineSubspace flat_space = AffineSubspace::whole_space(n);
  Vec base_point = ctx.model.box.center();
  if (component != -1) {
    if (component < 0 ||
        component >= static_cast<int>(strat.components.size())) {
      fail(ErrorKind::Validation, "from_closed_component: unknown component");
    }
    const StratumComponent& comp = strat.components[component];
    if (comp.singular_dimension < 1) {
      fail(ErrorKind::StrategyPrecondition,
           "from_closed_component: component is zero-dimensional");
    }
    if (!comp.is_closed) {
      fail(ErrorKind::StrategyPrecondition,
           "from_closed_component: component is not closed");
    }
    flat_space = strat.flats[strat.cells[comp.representative_cell].flat].space;
    base_point = comp.base_point;
  }
  const RestrictedModel rm = restrict_to_flat(ctx, flat_space);
  int best = -1;
  double best_norm = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(rm.sub.group.generators.size()); ++i) {
    const Isometry& g = rm.sub.group.generators[i];
    if (!is_translation_matrix(g.linear)) continue;
    const double norm = g.translation.norm();
    if (norm <= kGeoTouch) continue;
    if (norm < best_norm - 1e-9) {
      best_norm = norm;
      best = i;
    }
  }
  if (best < 0) {
    fail(ErrorKind::StrategyPrecondition,
         "from_closed_component: no translation preserves the component "
         "within the enumerated ball");
  }
  const GroupElement& up = rm.preimages[best];
  const Vec y = apply(up.iso, base_point);
  return GeodesicPair{unit_speed(base_point, y), inverse_element(up)};
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::HyperbolicElement: return "HyperbolicElement";
    case Strategy::ClosedComponent: return "ClosedComponent";
    case Strategy::Sigma1: return "Sigma1";
    case Strategy::EvenIsotropyPoint: return "EvenIsotropyPoint";
    case Strategy::OddStratumReduction: return "OddStratumReduction";
    case Strategy::OpenCase: return "OpenCase";
  }
  return "OpenCase";
}

ExistenceOutcome existence_dispatch(const ModelContext& ctx,
                                    const Stratification& strat,
                                    const DispatchOptions& opts) {
  const double tol = ctx.model.tolerance;
  const int n = ctx.model.box.dimension();
  auto off = [&](Strategy s) {
    return std::find(opts.disabled.begin(), opts.disabled.end(), s) !=
           opts.disabled.end();
  };
  auto seal = [&](Strategy s, GeodesicPair pair, std::string explanation,
                  int component) {
    ExistenceOutcome out;
    out.strategy = s;
    out.report = is_closed(pair, std::max(tol, kDefaultTolerance));
    if (!out.report.is_closed) {
      fail(ErrorKind::Internal,
           "existence_dispatch: constructed geodesic failed verification");
    }
    out.geodesic = std::move(pair);
    out.explanation = std::move(explanation);
    out.component = component;
    return out;
  };
  std::ostringstream why;

  if (!off(Strategy::HyperbolicElement)) {
    const std::vector<GroupElement> words =
        ctx.index.enumerate_words(opts.hyperbolic_word_length);
    const GroupElement* pick = nullptr;
    double pick_length = std::numeric_limits<double>::infinity();
    for (const GroupElement& g : words) {
      if (classify(g.iso, tol) != IsometryKind::Hyperbolic) continue;
      const double value = min_displacement(g.iso, tol).value;
      if (value < pick_length - 1e-9) {
        pick_length = value;
        pick = &g;
      }
    }
    if (pick != nullptr) {
      std::ostringstream detail;
      detail << "fixed-point-free element of word length "
             << pick->word.size() << " with translation length "
             << pick_length;
      return seal(Strategy::HyperbolicElement, from_hyperbolic(ctx, *pick),
                  detail.str(), -1);
    }
    why << "no fixed-point-free element within word length "
        << opts.hyperbolic_word_length << "; ";
  } else {
    why << "fixed-point-free search disabled; ";
  }

  if (!off(Strategy::Sigma1)) {
    for (int i = 0; i < static_cast<int>(strat.components.size()); ++i) {
      if (strat.components[i].singular_dimension == 1) {
        return seal(Strategy::Sigma1, from_sigma1(ctx, strat, i),
                    "prolongation of a one-dimensional stratum component", i);
      }
    }
    why << "no one-dimensional stratum; ";
  } else {
    why << "one-dimensional stratum search disabled; ";
  }

  if (!off(Strategy::ClosedComponent)) {
    bool found = false;
    for (int i = 0; i < static_cast<int>(strat.components.size()); ++i) {
      const StratumComponent& comp = strat.components[i];
      if (comp.singular_dimension >= 1 && comp.is_closed) {
        found = true;
        return seal(Strategy::ClosedComponent,
                    from_closed_component(ctx, strat, i),
                    "translation along a closed positive-dimensional "
                    "component",
                    i);
      }
    }
    if (!found) why << "no closed positive-dimensional component; ";
  } else {
    why << "closed-component search disabled; ";
  }

  if (!off(Strategy::EvenIsotropyPoint)) {
    bool found = false;
    for (int i = 0; i < static_cast<int>(strat.components.size()); ++i) {
      const StratumComponent& comp = strat.components[i];
      if (comp.singular_dimension != 0 || comp.isotropy_order % 2 != 0) {
        continue;
      }
      const auto data = even_isotropy_data(ctx, comp.base_point);
      if (!data) continue;
      found = true;
      return seal(Strategy::EvenIsotropyPoint,
                  from_even_isotropy(ctx, comp.base_point, data->first,
                                     data->second),
                  "doubled segment through an isolated point with central "
                  "inversion",
                  i);
    }
    if (!found) why << "no isolated point carries a central inversion; ";
  } else {
    why << "central-inversion search disabled; ";
  }

  if (!off(Strategy::OddStratumReduction)) {
    const int k = strat.smallest_positive_dimension();
    const bool parity_gate =
        k >= 1 && (k % 2 == 1 || (2 * k >= n && (n - k) % 2 == 1));
    if (!parity_gate) {
      why << "stratum-reduction parity condition not met; ";
    } else if (opts.max_recursion <= 0) {
      why << "stratum-reduction depth budget exhausted; ";
    } else {
      int comp_index = -1;
      for (int i = 0; i < static_cast<int>(strat.components.size()); ++i) {
        if (strat.components[i].singular_dimension == k) {
          comp_index = i;
          break;
        }
      }
      const StratumComponent& comp = strat.components[comp_index];
      const AffineSubspace& flat =
          strat.flats[strat.cells[comp.representative_cell].flat].space;
      const RestrictedModel rm = restrict_to_flat(ctx, flat);
      const ModelContext sub_ctx = validate_model(rm.sub);
      const Stratification sub_strat = stratify(sub_ctx);
      DispatchOptions sub_opts = opts;
      sub_opts.max_recursion = opts.max_recursion - 1;
      // The disabled list steers only the level it was given to; the
      // reduced problem starts from the full ladder.
      sub_opts.disabled.clear();
      const ExistenceOutcome sub =
          existence_dispatch(sub_ctx, sub_strat, sub_opts);
      if (sub.strategy != Strategy::OpenCase && sub.geodesic) {
        const GeodesicSegment& ls = sub.geodesic->segment;
        GeodesicSegment seg{rm.base + rm.basis * ls.start,
                            rm.basis * ls.velocity, ls.t0, ls.t1};
        GroupElement up = identity_element(n);
        for (const int letter : sub.geodesic->gamma.word) {
          const int idx = std::abs(letter) - 1;
          const GroupElement& gen = rm.preimages[idx];
          up = compose_elements(up,
                                letter > 0 ? gen : inverse_element(gen));
        }
        std::ostringstream detail;
        detail << "reduction to the smallest positive-dimensional stratum "
                  "(dimension "
               << k << "), resolved by " << strategy_name(sub.strategy);
        return seal(Strategy::OddStratumReduction,
                    GeodesicPair{seg, up}, detail.str(), comp_index);
      }
      why << "stratum reduction reached an open sub-case (" << sub.explanation
          << "); ";
    }
  } else {
    why << "stratum reduction disabled; ";
  }

  ExistenceOutcome out;
  out.strategy = Strategy::OpenCase;
  out.explanation = why.str();
  if (out.explanation.size() >= 2 &&
      out.explanation.compare(out.explanation.size() - 2, 2, "; ") == 0) {
    out.explanation.erase(out.explanation.size() - 2);
  }
  return out;
}

}  // namespace orbistrat
