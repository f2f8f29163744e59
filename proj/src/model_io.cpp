#include "model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "json.hpp"

namespace orbistrat {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void parse_fail(const std::string& what) {
  fail(ErrorKind::Parse, "model file: " + what);
}

const ordered_json& require_field(const ordered_json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    parse_fail(std::string("missing field '") + key + "'");
  }
  return *it;
}

double number_of(const ordered_json& j, const std::string& where) {
  if (!j.is_number()) parse_fail(where + " must be a number");
  return j.get<double>();
}

long integer_of(const ordered_json& j, const std::string& where) {
  if (!j.is_number_integer()) parse_fail(where + " must be an integer");
  return j.get<long>();
}

Vec vector_of(const ordered_json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    parse_fail(where + " must be an array of " + std::to_string(n) +
               " numbers");
  }
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = number_of(j[i], where + " entry " + std::to_string(i));
  }
  return v;
}

}  // namespace

OrbifoldModel parse_model_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail(e.what());
  }
  if (!j.is_object()) parse_fail("top level must be an object");

  OrbifoldModel m;
  const ordered_json& label = require_field(j, "label");
  if (!label.is_string()) parse_fail("'label' must be a string");
  m.name = label.get<std::string>();

  const long n_raw = integer_of(require_field(j, "dimension"), "'dimension'");
  if (n_raw < 1 || n_raw > 16) {
    fail(ErrorKind::Validation,
         "model file: 'dimension' must be between 1 and 16");
  }
  const int n = static_cast<int>(n_raw);
  m.group.dimension = n;

  const ordered_json& gens = require_field(j, "generators");
  if (!gens.is_array() || gens.empty()) {
    parse_fail("'generators' must be a non-empty array");
  }
  for (std::size_t gi = 0; gi < gens.size(); ++gi) {
    const std::string where = "generator " + std::to_string(gi);
    const ordered_json& g = gens[gi];
    if (!g.is_object()) parse_fail(where + " must be an object");
    const ordered_json& lin = require_field(g, "linear");
    if (!lin.is_array() || static_cast<int>(lin.size()) != n * n) {
      parse_fail(where + ": 'linear' must be a row-major array of " +
                 std::to_string(n * n) + " numbers");
    }
    Mat a(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        a(r, c) = number_of(lin[r * n + c], where + ": 'linear' entry");
      }
    }
    const Vec b =
        vector_of(require_field(g, "translation"), n, where + ": 'translation'");
    m.group.generators.push_back(Isometry{a, b});
  }

  if (j.contains("lattice_basis")) {
    const ordered_json& lb = j["lattice_basis"];
    if (!lb.is_array() || static_cast<int>(lb.size()) != n) {
      parse_fail("'lattice_basis' must be an array of " + std::to_string(n) +
                 " vectors");
    }
    std::vector<Vec> basis;
    for (int r = 0; r < n; ++r) {
      basis.push_back(
          vector_of(lb[r], n, "'lattice_basis' row " + std::to_string(r)));
    }
    m.group.lattice_basis = std::move(basis);
  }

  const ordered_json& box = require_field(j, "fundamental_box");
  if (!box.is_object()) parse_fail("'fundamental_box' must be an object");
  m.box.lo = vector_of(require_field(box, "min"), n, "'fundamental_box.min'");
  m.box.hi = vector_of(require_field(box, "max"), n, "'fundamental_box.max'");
  for (int i = 0; i < n; ++i) {
    if (!(m.box.lo[i] < m.box.hi[i])) {
      fail(ErrorKind::Validation,
           "model file: fundamental box must have positive extent in every "
           "coordinate");
    }
  }

  if (j.contains("tolerance")) {
    m.tolerance = number_of(j["tolerance"], "'tolerance'");
    if (!(m.tolerance > 0.0)) {
      fail(ErrorKind::Validation, "model file: tolerance must be positive");
    }
  }

  const ordered_json& en = require_field(j, "enumeration");
  if (!en.is_object()) parse_fail("'enumeration' must be an object");
  const long mwl = integer_of(require_field(en, "max_word_length"),
                              "'enumeration.max_word_length'");
  const long cap = integer_of(require_field(en, "element_cap"),
                              "'enumeration.element_cap'");
  if (mwl < 1 || cap < 1) {
    fail(ErrorKind::Validation,
         "model file: enumeration bounds must be positive");
  }
  m.group.max_word_length = static_cast<int>(mwl);
  m.group.element_cap = static_cast<int>(cap);

  // Value-level checks that guard downstream math: every linear part must be
  // an orthogonal matrix at the model's tolerance.
  const double ortho_tol = std::max(m.tolerance, kDefaultTolerance);
  for (std::size_t gi = 0; gi < m.group.generators.size(); ++gi) {
    const Mat& a = m.group.generators[gi].linear;
    const double dev =
        (a.transpose() * a - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
    if (dev > ortho_tol) {
      std::ostringstream msg;
      msg << "model file: generator " << gi
          << " violates the orthogonality invariant (A^T A deviates from the "
             "identity by "
          << dev << ")";
      fail(ErrorKind::Validation, msg.str());
    }
  }
  return m;
}

OrbifoldModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorKind::Io, "cannot read model file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    fail(ErrorKind::Io, "cannot read model file: " + path);
  }
  return parse_model_json(buf.str());
}

namespace {

ordered_json vec_json(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json report_base(const ModelContext& ctx) {
  const OrbifoldModel& m = ctx.model;
  ordered_json j;
  j["schema"] = "orbistrat-report/1";
  j["model"] = {
      {"label", m.name},
      {"dimension", m.box.dimension()},
      {"generator_count", m.group.generators.size()},
      {"tolerance", m.tolerance},
      {"box", {{"min", vec_json(m.box.lo)}, {"max", vec_json(m.box.hi)}}}};
  j["properness"] = {
      {"complete", ctx.properness.complete},
      {"elements_inspected", ctx.properness.elements_inspected},
      {"meeting_elements", ctx.properness.meeting_elements.size()}};
  return j;
}

ordered_json stratification_table(const ModelContext& ctx,
                                  const Stratification& strat) {
  ordered_json rows = ordered_json::array();
  // The regular part first, as the component "-1" row.
  rows.push_back({{"component", -1},
                  {"k", ctx.model.box.dimension()},
                  {"isotropy_order", 1},
                  {"closed", true},
                  {"frontier_count", 0},
                  {"sample", vec_json(ctx.model.box.center())}});
  for (std::size_t i = 0; i < strat.components.size(); ++i) {
    const StratumComponent& comp = strat.components[i];
    rows.push_back({{"component", static_cast<int>(i)},
                    {"k", comp.singular_dimension},
                    {"isotropy_order", comp.isotropy_order},
                    {"closed", comp.is_closed},
                    {"frontier_count", comp.frontier.size()},
                    {"sample", vec_json(comp.base_point)}});
  }
  return ordered_json{{"components", rows}};
}

std::string finish(ordered_json j) { return j.dump(2) + "\n"; }

}  // namespace

std::string model_summary_json(const ModelContext& ctx) {
  return finish(report_base(ctx));
}

std::string stratification_report_json(const ModelContext& ctx,
                                       const Stratification& strat,
                                       double elapsed_seconds) {
  ordered_json j = report_base(ctx);
  j["stratification"] = stratification_table(ctx, strat);
  j["timing_seconds"] = elapsed_seconds;
  return finish(std::move(j));
}

std::string geodesic_report_json(const ModelContext& ctx,
                                 const Stratification& strat,
                                 const ExistenceOutcome& outcome,
                                 double elapsed_seconds) {
  ordered_json j = report_base(ctx);
  j["stratification"] = stratification_table(ctx, strat);
  ordered_json ex;
  ex["strategy"] = strategy_name(outcome.strategy);
  ex["component"] = outcome.component;
  ex["explanation"] = outcome.explanation;
  if (outcome.geodesic) {
    const GeodesicPair& pair = *outcome.geodesic;
    const Mat& a = pair.gamma.iso.linear;
    ordered_json linear = ordered_json::array();
    for (int r = 0; r < a.rows(); ++r) {
      for (int c = 0; c < a.cols(); ++c) linear.push_back(a(r, c));
    }
    ex["geodesic"] = {
        {"start", vec_json(pair.segment.start)},
        {"end", vec_json(pair.segment.end())},
        {"length", outcome.report.length},
        {"gamma",
         {{"linear", linear}, {"translation", vec_json(pair.gamma.iso.translation)}}},
        {"residuals",
         {{"position", outcome.report.position_residual},
          {"velocity", outcome.report.velocity_residual}}},
        {"closed", outcome.report.is_closed}};
  } else {
    ex["geodesic"] = nullptr;
  }
  j["existence"] = ex;
  j["timing_seconds"] = elapsed_seconds;
  return finish(std::move(j));
}

namespace {

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out += buf;
}

void append_csv_row(std::string& out, int component, int k, const Vec& p) {
  out += std::to_string(component);
  out += ',';
  out += std::to_string(k);
  for (int i = 0; i < p.size(); ++i) {
    out += ',';
    append_number(out, p[i]);
  }
  out += '\n';
}

// Intersection of the cell's parameter range with the declared box, so every
// emitted point lies inside it. Returns false when the cell misses the box.
bool clip_to_box(const Box& box, const AffineSubspace& space, double t_lo,
                 double t_hi, double* out_lo, double* out_hi) {
  const Vec d = space.basis.col(0);
  double lo = t_lo;
  double hi = t_hi;
  for (int i = 0; i < d.size(); ++i) {
    const double b = space.base[i];
    const double v = d[i];
    if (std::abs(v) < 1e-12) {
      if (b < box.lo[i] - 1e-9 || b > box.hi[i] + 1e-9) return false;
      continue;
    }
    double a = (box.lo[i] - b) / v;
    double z = (box.hi[i] - b) / v;
    if (a > z) std::swap(a, z);
    lo = std::max(lo, a);
    hi = std::min(hi, z);
  }
  if (lo > hi) return false;
  *out_lo = lo;
  *out_hi = hi;
  return true;
}

}  // namespace

std::string polylines_csv(const ModelContext& ctx,
                          const Stratification& strat) {
  const int n = ctx.model.box.dimension();
  if (n > 3) {
    fail(ErrorKind::StrategyPrecondition,
         "polylines are emitted for dimensions 1 to 3 only");
  }
  std::string out = "component,k,x";
  if (n >= 2) out += ",y";
  if (n >= 3) out += ",z";
  out += '\n';
  const Box& box = ctx.model.box;
  for (std::size_t i = 0; i < strat.components.size(); ++i) {
    const StratumComponent& comp = strat.components[i];
    const int id = static_cast<int>(i);
    if (comp.singular_dimension == 0) {
      append_csv_row(out, id, 0, box.clamp(comp.base_point));
      continue;
    }
    if (comp.singular_dimension == 1) {
      for (const int ci : comp.cells) {
        const CellRecord& cell = strat.cells[ci];
        const AffineSubspace& space = strat.flats[cell.flat].space;
        double lo = 0.0;
        double hi = 0.0;
        if (!clip_to_box(box, space, cell.t_lo, cell.t_hi, &lo, &hi)) continue;
        const Vec d = space.basis.col(0);
        append_csv_row(out, id, 1, space.base + lo * d);
        append_csv_row(out, id, 1, space.base + hi * d);
      }
      continue;
    }
    for (const int ci : comp.cells) {
      for (const Vec& probe : strat.cells[ci].probes) {
        if (box.contains(probe, 1e-9)) {
          append_csv_row(out, id, comp.singular_dimension, probe);
        }
      }
    }
  }
  return out;
}

namespace {

void append_svg_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  out += buf;
}

// SVG y grows downward; flip about the box's horizontal midline so the
// picture matches plane coordinates.
double flip_y(const Box& box, double y) { return box.lo[1] + box.hi[1] - y; }

}  // namespace

std::string stratification_svg(const ModelContext& ctx,
                               const Stratification& strat) {
  if (ctx.model.box.dimension() != 2) {
    fail(ErrorKind::StrategyPrecondition,
         "the overview figure is emitted for two-dimensional models only");
  }
  const Box& box = ctx.model.box;
  const double w = box.hi[0] - box.lo[0];
  const double h = box.hi[1] - box.lo[1];
  const double margin = 0.05 * std::max(w, h);
  const double stroke = 0.01 * std::max(w, h);
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"";
  append_svg_number(out, box.lo[0] - margin);
  out += ' ';
  append_svg_number(out, box.lo[1] - margin);
  out += ' ';
  append_svg_number(out, w + 2 * margin);
  out += ' ';
  append_svg_number(out, h + 2 * margin);
  out += "\">\n<title>";
  out += ctx.model.name;
  out += "</title>\n<rect x=\"";
  append_svg_number(out, box.lo[0]);
  out += "\" y=\"";
  append_svg_number(out, box.lo[1]);
  out += "\" width=\"";
  append_svg_number(out, w);
  out += "\" height=\"";
  append_svg_number(out, h);
  out += "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"";
  append_svg_number(out, stroke);
  out += "\"/>\n";
  for (std::size_t i = 0; i < strat.components.size(); ++i) {
    const StratumComponent& comp = strat.components[i];
    if (comp.singular_dimension == 1) {
      for (const int ci : comp.cells) {
        const CellRecord& cell = strat.cells[ci];
        const AffineSubspace& space = strat.flats[cell.flat].space;
        double lo = 0.0;
        double hi = 0.0;
        if (!clip_to_box(box, space, cell.t_lo, cell.t_hi, &lo, &hi)) continue;
        const Vec d = space.basis.col(0);
        const Vec p = space.base + lo * d;
        const Vec q = space.base + hi * d;
        out += "<line x1=\"";
        append_svg_number(out, p[0]);
        out += "\" y1=\"";
        append_svg_number(out, flip_y(box, p[1]));
        out += "\" x2=\"";
        append_svg_number(out, q[0]);
        out += "\" y2=\"";
        append_svg_number(out, flip_y(box, q[1]));
        out += "\" stroke=\"#1f6fb2\" stroke-width=\"";
        append_svg_number(out, 2 * stroke);
        out += "\"/>\n";
      }
    } else if (comp.singular_dimension == 0) {
      const Vec p = box.clamp(comp.base_point);
      out += "<circle cx=\"";
      append_svg_number(out, p[0]);
      out += "\" cy=\"";
      append_svg_number(out, flip_y(box, p[1]));
      out += "\" r=\"";
      append_svg_number(out, 2 * stroke);
      out += "\" fill=\"#b2341f\"/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace orbistrat
