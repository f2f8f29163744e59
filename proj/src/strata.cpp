#include "strata.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "errors.hpp"

namespace orbistrat {

namespace {

// Shared geometric touch threshold for box/flat incidence decisions.
constexpr double kTouch = 1e-7;

std::vector<long long> rounded_key(const Vec& v) {
  std::vector<long long> key(v.size());
  for (int i = 0; i < v.size(); ++i) key[i] = std::llround(v(i) * 1e6);
  return key;
}

bool lex_less(const Vec& a, const Vec& b) {
  return rounded_key(a) < rounded_key(b);
}

// Distance between a flat and a box via alternating projections (both sets
// convex, both projections exact, so the gap converges to the distance).
double flat_box_gap(const AffineSubspace& flat, const Box& box) {
  Vec x = box.clamp(flat.project(box.center()));
  double gap = 0.0;
  for (int iter = 0; iter < 300; ++iter) {
    const Vec on_flat = flat.project(x);
    const Vec in_box = box.clamp(on_flat);
    gap = (on_flat - in_box).norm();
    if ((in_box - x).norm() <= 1e-13) break;
    x = in_box;
  }
  return gap;
}

bool flat_meets_box(const AffineSubspace& flat, const Box& box) {
  return flat_box_gap(flat, box) <= kTouch;
}

// Clip of a line against a box, as a parameter interval along the unit
// direction; nullopt when the clip has no positive length.
std::optional<std::pair<double, double>> line_box_interval(
    const AffineSubspace& line, const Box& box) {
  const Vec& p = line.base;
  const Vec d = line.basis.col(0);
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.size(); ++i) {
    if (std::abs(d(i)) <= 1e-12) {
      if (p(i) < box.lo(i) - kTouch || p(i) > box.hi(i) + kTouch) {
        return std::nullopt;
      }
      continue;
    }
    const double t1 = (box.lo(i) - p(i)) / d(i);
    const double t2 = (box.hi(i) - p(i)) / d(i);
    lo = std::max(lo, std::min(t1, t2));
    hi = std::min(hi, std::max(t1, t2));
  }
  if (!(hi - lo > kTouch)) return std::nullopt;
  return std::make_pair(lo, hi);
}

bool subspace_contained(const AffineSubspace& inner,
                        const AffineSubspace& outer, double tol) {
  if (inner.dim() >= outer.dim()) return false;
  if (!outer.contains(inner.base, tol)) return false;
  for (int j = 0; j < inner.basis.cols(); ++j) {
    const Vec col = inner.basis.col(j);
    const Vec residual =
        col - outer.basis * (outer.basis.transpose() * col);
    if (residual.norm() > tol) return false;
  }
  return true;
}

bool fixes_pointwise(const Isometry& g, const AffineSubspace& flat,
                     double tol) {
  if ((apply(g, flat.base) - flat.base).norm() > tol) return false;
  for (int j = 0; j < flat.basis.cols(); ++j) {
    if ((g.linear * flat.basis.col(j) - flat.basis.col(j)).norm() > tol) {
      return false;
    }
  }
  return true;
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void merge(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

// ---------------------------------------------------------------------------
// Box

bool Box::contains(const Vec& x, double tol) const {
  for (int i = 0; i < lo.size(); ++i) {
    if (x(i) < lo(i) - tol || x(i) > hi(i) + tol) return false;
  }
  return true;
}

Vec Box::clamp(const Vec& x) const {
  Vec out = x;
  for (int i = 0; i < lo.size(); ++i) {
    out(i) = std::clamp(out(i), lo(i), hi(i));
  }
  return out;
}

Box Box::inflated(double factor) const {
  const Vec c = center();
  const Vec half = 0.5 * factor * (hi - lo);
  return Box{c - half, c + half};
}

// ---------------------------------------------------------------------------
// Model validation

ModelContext validate_model(OrbifoldModel model) {
  const int n = model.group.dimension;
  if (model.box.lo.size() != n || model.box.hi.size() != n) {
    fail(ErrorKind::Validation, "box dimension does not match the group");
  }
  for (int i = 0; i < n; ++i) {
    if (!(model.box.hi(i) - model.box.lo(i) > model.tolerance)) {
      fail(ErrorKind::Validation,
           "box must have positive extent along every axis");
    }
  }
  if (!(model.tolerance > 0)) {
    fail(ErrorKind::Validation, "tolerance must be positive");
  }

  GroupIndex index(model.group, model.tolerance);
  PropernessCertificate cert =
      index.properness_check(model.box.lo, model.box.hi);

  // Covering certificate: every point of a strictly larger box must have a
  // group image inside the box; a closed invariant set containing a
  // neighborhood of the box is the whole space.
  const Box shell = model.box.inflated(1.05);
  const Vec center = model.box.center();
  const double diameter = model.box.diameter();
  BallEnumeration cover =
      index.enumerate_ball(center, 1.1 * diameter + model.tolerance);
  if (!cover.complete) {
    fail(ErrorKind::Enumeration,
         "cannot certify box covering: the enumeration budget does not "
         "exhaust the relevant ball");
  }
  constexpr int kGridPerAxis = 9;
  std::vector<int> idx(n, 0);
  for (;;) {
    Vec x(n);
    for (int i = 0; i < n; ++i) {
      x(i) = shell.lo(i) +
             (shell.hi(i) - shell.lo(i)) * idx[i] / (kGridPerAxis - 1);
    }
    bool covered = false;
    for (const GroupElement& e : cover.elements) {
      if (model.box.contains(apply(e.iso, x), kTouch)) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      fail(ErrorKind::Validation,
           "box images under the group do not cover a neighborhood of the "
           "box; the box is not a fundamental region");
    }
    int axis = 0;
    while (axis < n && ++idx[axis] == kGridPerAxis) idx[axis++] = 0;
    if (axis == n) break;
  }

  BallEnumeration glue =
      index.enumerate_ball(center, 2.0 * diameter + model.tolerance);
  if (!glue.complete) {
    fail(ErrorKind::Enumeration,
         "cannot enumerate the gluing ball completely within the budget");
  }

  return ModelContext{std::move(model), std::move(index), std::move(cert),
                      std::move(glue.elements)};
}

// ---------------------------------------------------------------------------
// Stratification

namespace {

// True when y lies in the open cell (interior membership with margin).
bool cell_contains(const Stratification& strat, const CellRecord& cell,
                   const Vec& y) {
  const FlatRecord& flat = strat.flats[cell.flat];
  if (flat.space.distance_to(y) > kTouch) return false;
  if (cell.dim == 0) return true;
  if (cell.dim == 1) {
    const double t = (y - flat.space.base).dot(flat.space.basis.col(0));
    return t > cell.t_lo + kTouch && t < cell.t_hi - kTouch;
  }
  const Vec z = flat.space.local_coordinates(y);
  for (size_t w = 0; w < flat.walls.size(); ++w) {
    const double v = flat.walls[w].first.dot(z) - flat.walls[w].second;
    if (v * cell.signs[w] <= kTouch) return false;
  }
  return true;
}

}  // namespace

int Stratification::smallest_positive_dimension() const {
  int best = -1;
  for (const StratumComponent& c : components) {
    if (c.singular_dimension >= 1 &&
        (best < 0 || c.singular_dimension < best)) {
      best = c.singular_dimension;
    }
  }
  return best;
}

int find_flat(const Stratification& strat, const AffineSubspace& space,
              double tol) {
  for (size_t i = 0; i < strat.flats.size(); ++i) {
    if (strat.flats[i].dim == space.dim() &&
        same_subspace(strat.flats[i].space, space, tol)) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

int find_cell(const Stratification& strat, const Vec& point, int dim,
              double tol) {
  (void)tol;
  for (size_t i = 0; i < strat.cells.size(); ++i) {
    if (strat.cells[i].dim == dim && cell_contains(strat, strat.cells[i], point)) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

Stratification stratify(const ModelContext& ctx) {
  const Box& box = ctx.model.box;
  const double tol = ctx.model.tolerance;
  const int n = box.dimension();
  const Box boxp = box.inflated(1.1);

  Stratification out;
  out.dimension = n;

  // 1. Every element whose fixed set meets the inflated box moves the box
  // center by at most twice the inflated half-diagonal.
  BallEnumeration ball =
      ctx.index.enumerate_ball(box.center(), 1.1 * box.diameter() + tol);
  if (!ball.complete) {
    fail(ErrorKind::Enumeration,
         "cannot enumerate the fixed-set search ball completely");
  }

  auto add_flat = [&](const AffineSubspace& s) -> int {
    if (s.dim() >= n) return -1;
    const int existing = find_flat(out, s, kTouch);
    if (existing >= 0) return existing;
    if (!flat_meets_box(s, boxp)) return -1;
    FlatRecord rec;
    rec.space = s;
    rec.dim = s.dim();
    out.flats.push_back(std::move(rec));
    return static_cast<int>(out.flats.size()) - 1;
  };

  for (const GroupElement& e : ball.elements) {
    if (classify(e.iso, tol) != IsometryKind::Elliptic) continue;
    std::optional<AffineSubspace> fs = fixed_set(e.iso, tol);
    if (!fs) fail(ErrorKind::Internal, "elliptic element without fixed set");
    add_flat(*fs);
  }

  // 2. Close the family under pairwise intersection (the family is finite,
  // and duplicates are absorbed, so this terminates).
  for (size_t i = 0; i < out.flats.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      std::optional<AffineSubspace> h =
          intersect(out.flats[i].space, out.flats[j].space, kTouch);
      if (h) add_flat(*h);
    }
  }

  // Containment relations: contained[i] lists flats strictly inside flat i.
  std::vector<std::vector<int>> contained(out.flats.size());
  for (size_t i = 0; i < out.flats.size(); ++i) {
    for (size_t j = 0; j < out.flats.size(); ++j) {
      if (i != j &&
          subspace_contained(out.flats[j].space, out.flats[i].space, kTouch)) {
        contained[i].push_back(static_cast<int>(j));
      }
    }
  }

  // 3. Cells, in order of increasing flat dimension (higher-dimensional
  // puncture detection reuses the cells of contained flats).
  std::vector<int> order(out.flats.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return out.flats[a].dim < out.flats[b].dim;
  });

  std::mt19937_64 rng(0x57A7AB1Eull);
  const double generic_margin = 1e-5 * (1.0 + box.diameter());

  for (int fi : order) {
    FlatRecord& flat = out.flats[fi];
    const AffineSubspace& space = flat.space;

    if (flat.dim == 0) {
      CellRecord cell;
      cell.flat = fi;
      cell.dim = 0;
      cell.sample = space.base;
      out.cells.push_back(std::move(cell));
      continue;
    }

    if (flat.dim == 1) {
      auto interval = line_box_interval(space, boxp);
      if (!interval) continue;
      flat.t_min = interval->first;
      flat.t_max = interval->second;
      const Vec d = space.basis.col(0);

      std::vector<double> cuts;
      for (int j : contained[fi]) {
        const double t = (out.flats[j].space.base - space.base).dot(d);
        if (t >= flat.t_min - kTouch && t <= flat.t_max + kTouch) {
          cuts.push_back(t);
        }
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end(),
                             [](double a, double b) {
                               return std::abs(a - b) <= 1e-9;
                             }),
                 cuts.end());
      flat.cuts = cuts;

      // Boundary list: box clip ends (frontier only when a cut sits there)
      // plus the interior cuts (always genuine frontier).
      struct Boundary {
        double t;
        bool frontier;
      };
      std::vector<Boundary> bounds;
      bool lo_cut = !cuts.empty() && std::abs(cuts.front() - flat.t_min) <= kTouch;
      bool hi_cut = !cuts.empty() && std::abs(cuts.back() - flat.t_max) <= kTouch;
      bounds.push_back({flat.t_min, lo_cut});
      for (double t : cuts) {
        if (t > flat.t_min + kTouch && t < flat.t_max - kTouch) {
          bounds.push_back({t, true});
        }
      }
      bounds.push_back({flat.t_max, hi_cut});

      for (size_t b = 0; b + 1 < bounds.size(); ++b) {
        if (!(bounds[b + 1].t - bounds[b].t > kTouch)) continue;
        CellRecord cell;
        cell.flat = fi;
        cell.dim = 1;
        cell.t_lo = bounds[b].t;
        cell.t_hi = bounds[b + 1].t;
        cell.lo_frontier = bounds[b].frontier;
        cell.hi_frontier = bounds[b + 1].frontier;
        cell.sample = space.base + 0.5 * (cell.t_lo + cell.t_hi) * d;
        if (cell.lo_frontier) {
          cell.frontier_points.push_back(space.base + cell.t_lo * d);
        }
        if (cell.hi_frontier) {
          cell.frontier_points.push_back(space.base + cell.t_hi * d);
        }
        out.cells.push_back(std::move(cell));
      }
      continue;
    }

    // flat.dim >= 2: walls from contained flats of codimension one.
    const int k = flat.dim;
    for (int j : contained[fi]) {
      if (out.flats[j].dim != k - 1) continue;
      const AffineSubspace& sub = out.flats[j].space;
      Vec z0 = space.local_coordinates(sub.base);
      Mat local_dirs = space.basis.transpose() * sub.basis;  // k x (k-1)
      Mat normal = null_space_basis(local_dirs.transpose());
      if (normal.cols() != 1) {
        fail(ErrorKind::Internal, "wall normal is not one-dimensional");
      }
      Vec u = normal.col(0);
      double c = u.dot(z0);
      for (int i = 0; i < u.size(); ++i) {
        if (std::abs(u(i)) > 1e-9) {
          if (u(i) < 0) {
            u = -u;
            c = -c;
          }
          break;
        }
      }
      bool duplicate = false;
      for (const auto& [wu, wc] : flat.walls) {
        if ((wu - u).norm() <= 1e-7 && std::abs(wc - c) <= 1e-7) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) flat.walls.emplace_back(u, c);
    }

    // Local sampling bounds: shadow of the box corners, slightly inflated.
    Vec z_lo = Vec::Constant(k, std::numeric_limits<double>::infinity());
    Vec z_hi = Vec::Constant(k, -std::numeric_limits<double>::infinity());
    for (int corner = 0; corner < (1 << n); ++corner) {
      Vec x(n);
      for (int i = 0; i < n; ++i) {
        x(i) = (corner >> i & 1) ? boxp.hi(i) : boxp.lo(i);
      }
      const Vec z = space.basis.transpose() * (x - space.base);
      z_lo = z_lo.cwiseMin(z);
      z_hi = z_hi.cwiseMax(z);
    }

    std::map<std::vector<int>, int> chamber_index;  // signs -> cell index
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int attempts = 4000;
    for (int a = 0; a < attempts; ++a) {
      Vec z(k);
      for (int i = 0; i < k; ++i) {
        z(i) = z_lo(i) + (z_hi(i) - z_lo(i)) * unit(rng);
      }
      const Vec x = space.base + space.basis * z;
      if (!boxp.contains(x, 0.0)) continue;
      bool generic = true;
      std::vector<int> signs(flat.walls.size(), 0);
      for (size_t w = 0; w < flat.walls.size() && generic; ++w) {
        const double v = flat.walls[w].first.dot(z) - flat.walls[w].second;
        if (std::abs(v) <= generic_margin) generic = false;
        signs[w] = v > 0 ? 1 : -1;
      }
      for (int j : contained[fi]) {
        if (!generic) break;
        if (out.flats[j].dim <= k - 2 &&
            out.flats[j].space.distance_to(x) <= generic_margin) {
          generic = false;
        }
      }
      if (!generic) continue;
      auto [it, inserted] = chamber_index.try_emplace(
          signs, static_cast<int>(out.cells.size()));
      if (inserted) {
        CellRecord cell;
        cell.flat = fi;
        cell.dim = k;
        cell.signs = signs;
        cell.sample = x;
        out.cells.push_back(std::move(cell));
      } else if (out.cells[it->second].probes.size() < 40) {
        out.cells[it->second].probes.push_back(x);
      }
    }

    // Frontier of each chamber: rays from interior points toward each wall;
    // a ray that reaches the wall inside the box with all other signs intact
    // exhibits a genuine boundary point.
    for (auto& [signs, ci] : chamber_index) {
      CellRecord& cell = out.cells[ci];
      for (size_t w = 0; w < flat.walls.size(); ++w) {
        const Vec& u = flat.walls[w].first;
        const double c = flat.walls[w].second;
        bool touched = false;
        std::vector<Vec> sources = {cell.sample};
        for (const Vec& p : cell.probes) {
          if (sources.size() >= 10) break;
          sources.push_back(p);
        }
        for (const Vec& src : sources) {
          const Vec z_src = space.local_coordinates(src);
          const Vec z_dst = z_src + (c - u.dot(z_src)) * u;  // foot on wall
          auto ok = [&](double s) {
            const Vec z = z_src + s * (z_dst - z_src);
            const Vec x = space.base + space.basis * z;
            if (!boxp.contains(x, 1e-9)) return false;
            for (size_t w2 = 0; w2 < flat.walls.size(); ++w2) {
              if (w2 == w) continue;
              const double v =
                  flat.walls[w2].first.dot(z) - flat.walls[w2].second;
              if (v * cell.signs[w2] <= 0.0) return false;
            }
            return true;
          };
          if (ok(1.0)) {
            cell.frontier_points.push_back(space.base + space.basis * z_dst);
            touched = true;
            break;
          }
        }
        (void)touched;
      }
      // Punctures: contained flats of codimension two or more whose cells
      // sit strictly inside this chamber.
      for (int j : contained[fi]) {
        if (out.flats[j].dim > k - 2) continue;
        for (const CellRecord& lower : out.cells) {
          if (lower.flat != j) continue;
          const Vec z = space.local_coordinates(lower.sample);
          bool inside = true;
          for (size_t w = 0; w < flat.walls.size() && inside; ++w) {
            const double v =
                flat.walls[w].first.dot(z) - flat.walls[w].second;
            if (v * cell.signs[w] <= generic_margin) inside = false;
          }
          if (inside && boxp.contains(lower.sample, 1e-9)) {
            cell.frontier_points.push_back(lower.sample);
          }
        }
      }
    }
  }

  // 4. Glue cells along the group action.
  DisjointSets dsu(static_cast<int>(out.cells.size()));
  std::vector<std::vector<int>> flat_cells(out.flats.size());
  for (size_t c = 0; c < out.cells.size(); ++c) {
    flat_cells[out.cells[c].flat].push_back(static_cast<int>(c));
  }

  for (const GroupElement& e : ctx.glue_ball) {
    // Map each flat once per element.
    std::vector<int> mapped(out.flats.size(), -1);
    for (size_t f = 0; f < out.flats.size(); ++f) {
      const AffineSubspace image = map_subspace(e.iso, out.flats[f].space);
      mapped[f] = find_flat(out, image, kTouch);
    }
    for (size_t c1 = 0; c1 < out.cells.size(); ++c1) {
      const CellRecord& a = out.cells[c1];
      const int f2 = mapped[a.flat];
      if (f2 < 0) continue;
      for (int c2 : flat_cells[f2]) {
        const CellRecord& b = out.cells[c2];
        if (dsu.find(static_cast<int>(c1)) == dsu.find(c2)) continue;
        bool overlap = false;
        if (a.dim == 0) {
          overlap = (apply(e.iso, a.sample) - b.sample).norm() <= kTouch;
        } else if (a.dim == 1) {
          const AffineSubspace& fa = out.flats[a.flat].space;
          const AffineSubspace& fb = out.flats[b.flat].space;
          const Vec da = fa.basis.col(0);
          const Vec db = fb.basis.col(0);
          const double s1 =
              (apply(e.iso, fa.base + a.t_lo * da) - fb.base).dot(db);
          const double s2 =
              (apply(e.iso, fa.base + a.t_hi * da) - fb.base).dot(db);
          const double lo = std::min(s1, s2);
          const double hi = std::max(s1, s2);
          overlap = std::min(hi, b.t_hi) - std::max(lo, b.t_lo) > 1e-6;
        } else {
          std::vector<Vec> sources = {a.sample};
          sources.insert(sources.end(), a.probes.begin(), a.probes.end());
          for (const Vec& p : sources) {
            if (cell_contains(out, b, apply(e.iso, p))) {
              overlap = true;
              break;
            }
          }
        }
        if (overlap) dsu.merge(static_cast<int>(c1), c2);
      }
    }
  }

  // 5. Assemble quotient components.
  auto orbit_equivalent = [&](const Vec& x, const Vec& y) {
    for (const GroupElement& e : ctx.glue_ball) {
      if ((apply(e.iso, x) - y).norm() <= kTouch) return true;
    }
    return false;
  };

  std::map<int, std::vector<int>> groups;
  for (size_t c = 0; c < out.cells.size(); ++c) {
    groups[dsu.find(static_cast<int>(c))].push_back(static_cast<int>(c));
  }

  std::vector<StratumComponent> components;
  std::vector<int> component_root;  // aligned with components
  for (const auto& [root, members] : groups) {
    StratumComponent comp;
    comp.cells = members;
    comp.singular_dimension = out.cells[members.front()].dim;

    // Representative: prefer samples inside the strict box, then smallest.
    int rep = -1;
    for (int c : members) {
      const bool in_box = box.contains(out.cells[c].sample, 1e-9);
      if (rep < 0) {
        rep = c;
        continue;
      }
      const bool rep_in_box = box.contains(out.cells[rep].sample, 1e-9);
      if (in_box != rep_in_box) {
        if (in_box) rep = c;
        continue;
      }
      if (lex_less(out.cells[c].sample, out.cells[rep].sample)) rep = c;
    }
    comp.representative_cell = rep;
    comp.base_point = out.cells[rep].sample;
    comp.isotropy = ctx.index.isotropy_at(comp.base_point);
    comp.isotropy_order = comp.isotropy.order();

    // The stabilizer of a generic point must fix exactly this flat.
    std::vector<Isometry> isos;
    for (const GroupElement& g : comp.isotropy.elements()) isos.push_back(g.iso);
    std::optional<AffineSubspace> fixed = common_fixed_set(isos, tol);
    if (!fixed ||
        !same_subspace(*fixed, out.flats[out.cells[rep].flat].space, kTouch)) {
      fail(ErrorKind::Internal,
           "generic point stabilizer does not pin down its flat");
    }

    // Frontier classes modulo the group.
    struct Incidence {
      Vec point;
      int cell;
      bool at_high;
    };
    std::vector<Incidence> incidences;
    for (int c : members) {
      const CellRecord& cell = out.cells[c];
      if (cell.dim == 1) {
        const AffineSubspace& sp = out.flats[cell.flat].space;
        const Vec d = sp.basis.col(0);
        if (cell.lo_frontier) {
          incidences.push_back({sp.base + cell.t_lo * d, c, false});
        }
        if (cell.hi_frontier) {
          incidences.push_back({sp.base + cell.t_hi * d, c, true});
        }
      } else {
        for (const Vec& p : cell.frontier_points) {
          incidences.push_back({p, c, false});
        }
      }
    }
    for (const Incidence& inc : incidences) {
      FrontierClass* found = nullptr;
      for (FrontierClass& fc : comp.frontier) {
        if (orbit_equivalent(fc.representative, inc.point)) {
          found = &fc;
          break;
        }
      }
      if (!found) {
        FrontierClass fc;
        fc.representative = inc.point;
        fc.cell = inc.cell;
        fc.at_high_end = inc.at_high;
        fc.incidence_point = inc.point;
        comp.frontier.push_back(std::move(fc));
      } else {
        // Prefer an in-box representative, then the lexicographic least.
        const bool in_box = box.contains(inc.point, 1e-9);
        const bool rep_in_box = box.contains(found->representative, 1e-9);
        if ((in_box && !rep_in_box) ||
            (in_box == rep_in_box &&
             lex_less(inc.point, found->representative))) {
          found->representative = inc.point;
        }
      }
    }
    for (FrontierClass& fc : comp.frontier) {
      fc.isotropy_order = ctx.index.isotropy_at(fc.representative).order();
    }
    comp.is_closed = comp.frontier.empty();
    components.push_back(std::move(comp));
    component_root.push_back(root);
  }

  // 6. Deterministic order: dimension, then isotropy order, then base point.
  std::vector<int> comp_order(components.size());
  std::iota(comp_order.begin(), comp_order.end(), 0);
  std::stable_sort(comp_order.begin(), comp_order.end(), [&](int a, int b) {
    const StratumComponent& x = components[a];
    const StratumComponent& y = components[b];
    if (x.singular_dimension != y.singular_dimension) {
      return x.singular_dimension < y.singular_dimension;
    }
    if (x.isotropy_order != y.isotropy_order) {
      return x.isotropy_order < y.isotropy_order;
    }
    return lex_less(x.base_point, y.base_point);
  });

  std::map<int, int> root_to_component;
  for (size_t pos = 0; pos < comp_order.size(); ++pos) {
    out.components.push_back(components[comp_order[pos]]);
    root_to_component[component_root[comp_order[pos]]] =
        static_cast<int>(pos);
  }
  out.cell_to_component.resize(out.cells.size());
  for (size_t c = 0; c < out.cells.size(); ++c) {
    out.cell_to_component[c] =
        root_to_component.at(dsu.find(static_cast<int>(c)));
  }
  out.regular_set_closed = out.components.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Closure analysis

ClosedStratumReport closed_stratum(const ModelContext& ctx,
                                   const Stratification& strat,
                                   int component) {
  const StratumComponent& comp = strat.components.at(component);
  const int k = comp.singular_dimension;
  if (k < 1) {
    fail(ErrorKind::StrategyPrecondition,
         "closure analysis requires a positive-dimensional component");
  }
  if (k != strat.smallest_positive_dimension()) {
    fail(ErrorKind::StrategyPrecondition,
         "closure analysis requires the smallest positive singular "
         "dimension");
  }

  ClosedStratumReport report;

  const AffineSubspace& rep_flat =
      strat.flats[strat.cells[comp.representative_cell].flat].space;
  int kernel = 0;
  for (const GroupElement& e : comp.isotropy.elements()) {
    if (fixes_pointwise(e.iso, rep_flat, kTouch)) ++kernel;
  }
  if (kernel != comp.isotropy.order()) {
    fail(ErrorKind::Internal,
         "generic stabilizer contains an element not fixing the flat");
  }
  report.kernel_order = kernel;

  // Probes: the generic base point plus one point per frontier class. At
  // each, the stabilizer elements preserving the flat act on it; distinct
  // induced transformations beyond the identity make the closure an
  // orbifold point rather than a manifold point.
  struct ProbeSite {
    Vec point;
    const AffineSubspace* flat;
  };
  std::vector<ProbeSite> sites;
  sites.push_back({comp.base_point, &rep_flat});
  for (const FrontierClass& fc : comp.frontier) {
    sites.push_back(
        {fc.incidence_point,
         &strat.flats[strat.cells[fc.cell].flat].space});
  }

  for (const ProbeSite& site : sites) {
    FiniteGroup stab = ctx.index.isotropy_at(site.point);
    const AffineSubspace& flat = *site.flat;
    std::vector<std::vector<long long>> seen;
    for (const GroupElement& e : stab.elements()) {
      if (!same_subspace(map_subspace(e.iso, flat), flat, kTouch)) continue;
      const Mat a = flat.basis.transpose() * e.iso.linear * flat.basis;
      const Vec b =
          flat.basis.transpose() * (apply(e.iso, flat.base) - flat.base);
      std::vector<long long> key;
      for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
          key.push_back(std::llround(a(i, j) * 1e6));
        }
      }
      for (int i = 0; i < b.size(); ++i) {
        key.push_back(std::llround(b(i) * 1e6));
      }
      if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
        seen.push_back(std::move(key));
      }
    }
    EffectiveGroupProbe probe;
    probe.point = site.point;
    probe.isotropy_order = stab.order();
    probe.effective_order = static_cast<int>(seen.size());
    if (probe.effective_order > 1) report.is_manifold = false;
    report.probes.push_back(std::move(probe));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Frontier analysis for one-dimensional components

FrontierAnalysis analyze_frontier_sigma1(const ModelContext& ctx,
                                         const Stratification& strat,
                                         int component, int frontier_class) {
  const StratumComponent& comp = strat.components.at(component);
  if (comp.singular_dimension != 1) {
    fail(ErrorKind::StrategyPrecondition,
         "frontier analysis applies to one-dimensional components");
  }
  const FrontierClass& fc = comp.frontier.at(frontier_class);
  const CellRecord& cell = strat.cells.at(fc.cell);
  const FlatRecord& flat = strat.flats[cell.flat];
  const Vec d = flat.space.basis.col(0);
  const Vec v0 = fc.at_high_end ? Vec(-d) : d;
  const Vec& x = fc.incidence_point;

  FiniteGroup stab = ctx.index.isotropy_at(x);
  for (const GroupElement& e : stab.elements()) {
    if ((e.iso.linear * v0 + v0).norm() <= kTouch) {
      FrontierAnalysis res;
      res.kind = FrontierKind::End;
      res.reversing = e.iso;
      return res;
    }
  }

  FrontierAnalysis res;
  res.kind = FrontierKind::ExtendsInto;

  // The far side of the frontier point, along the same line upstairs.
  const double t_at = fc.at_high_end ? cell.t_hi : cell.t_lo;
  for (size_t c2 = 0; c2 < strat.cells.size(); ++c2) {
    const CellRecord& other = strat.cells[c2];
    if (other.flat != cell.flat || static_cast<int>(c2) == fc.cell) continue;
    const double facing = fc.at_high_end ? other.t_lo : other.t_hi;
    if (std::abs(facing - t_at) <= kTouch) {
      res.target_component = strat.cell_to_component[c2];
      return res;
    }
  }

  // Fallback: step beyond the frontier and relocate via the group.
  const double eps = 1e-4 * (1.0 + ctx.model.box.diameter());
  const Vec beyond = x - eps * v0;
  for (const GroupElement& e : ctx.glue_ball) {
    const int c2 = find_cell(strat, apply(e.iso, beyond), 1, kTouch);
    if (c2 >= 0) {
      res.target_component = strat.cell_to_component[c2];
      return res;
    }
  }
  fail(ErrorKind::Internal,
       "no continuation cell found beyond a non-terminating frontier point");
}

// ---------------------------------------------------------------------------
// Restriction to a flat

RestrictedModel restrict_to_flat(const ModelContext& ctx,
                                 const AffineSubspace& flat) {
  const int k = flat.dim();
  if (k < 1) {
    fail(ErrorKind::StrategyPrecondition,
         "cannot restrict the action to a zero-dimensional flat");
  }
  const Mat& basis = flat.basis;
  const Vec& base = flat.base;

  RestrictedModel out;
  out.basis = basis;
  out.base = base;
  out.sub.name = ctx.model.name + "-restricted";
  out.sub.tolerance = ctx.model.tolerance;
  out.sub.group.dimension = k;
  out.sub.group.max_word_length = ctx.model.group.max_word_length;
  out.sub.group.element_cap = ctx.model.group.element_cap;

  std::vector<std::vector<long long>> seen;
  for (const GroupElement& e : ctx.glue_ball) {
    if (!same_subspace(map_subspace(e.iso, flat), flat, kTouch)) continue;
    Mat a = basis.transpose() * e.iso.linear * basis;
    Vec b = basis.transpose() * (apply(e.iso, base) - base);
    if (!is_orthogonal(a, 1e-7)) {
      fail(ErrorKind::Internal, "restricted linear part is not orthogonal");
    }
    if ((a - Mat::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-9 &&
        b.norm() <= 1e-9) {
      continue;  // identity
    }
    std::vector<long long> key;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) key.push_back(std::llround(a(i, j) * 1e7));
    }
    for (int i = 0; i < k; ++i) key.push_back(std::llround(b(i) * 1e7));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(std::move(key));
    out.sub.group.generators.push_back(Isometry{std::move(a), std::move(b)});
    out.preimages.push_back(e);
  }
  if (out.sub.group.generators.empty()) {
    fail(ErrorKind::StrategyPrecondition,
         "the flat has no nontrivial stabilizer within the search ball");
  }

  // Detect the translation lattice among the restricted elements: shortest
  // independent translation vectors, verified to generate all of them.
  std::vector<Vec> translations;
  for (const Isometry& g : out.sub.group.generators) {
    if ((g.linear - Mat::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-9 &&
        g.translation.norm() > 10 * ctx.model.tolerance) {
      translations.push_back(g.translation);
    }
  }
  std::sort(translations.begin(), translations.end(),
            [](const Vec& a, const Vec& b) {
              if (std::abs(a.norm() - b.norm()) > 1e-12) {
                return a.norm() < b.norm();
              }
              return lex_less(a, b);
            });
  std::vector<Vec> picked;
  for (const Vec& t : translations) {
    if (static_cast<int>(picked.size()) == k) break;
    Mat m(k, static_cast<int>(picked.size()) + 1);
    for (size_t i = 0; i < picked.size(); ++i) m.col(i) = picked[i];
    m.col(static_cast<int>(picked.size())) = t;
    Eigen::JacobiSVD<Mat> svd(m);
    if (svd.singularValues().minCoeff() > kRankCutoff) picked.push_back(t);
  }
  if (static_cast<int>(picked.size()) == k) {
    Mat lattice(k, k);
    for (int i = 0; i < k; ++i) lattice.col(i) = picked[i];
    const Mat inv = lattice.inverse();
    bool integral = true;
    for (const Vec& t : translations) {
      const Vec c = inv * t;
      for (int i = 0; i < k; ++i) {
        if (std::abs(c(i) - std::round(c(i))) > 1e-6) integral = false;
      }
    }
    if (integral) out.sub.group.lattice_basis = picked;
  }

  // Shadow of the box on the flat, inflated.
  const int n = ctx.model.box.dimension();
  Vec z_lo = Vec::Constant(k, std::numeric_limits<double>::infinity());
  Vec z_hi = Vec::Constant(k, -std::numeric_limits<double>::infinity());
  for (int corner = 0; corner < (1 << n); ++corner) {
    Vec x(n);
    for (int i = 0; i < n; ++i) {
      x(i) = (corner >> i & 1) ? ctx.model.box.hi(i) : ctx.model.box.lo(i);
    }
    const Vec z = basis.transpose() * (x - base);
    z_lo = z_lo.cwiseMin(z);
    z_hi = z_hi.cwiseMax(z);
  }
  out.sub.box = Box{z_lo, z_hi}.inflated(1.25);
  return out;
}

}  // namespace orbistrat
