#pragma once

// Model-file ingestion and serialized outputs: JSON model descriptions in,
// JSON reports, CSV polylines, and SVG overviews out. All writers are
// deterministic functions of their inputs; time is passed in by the caller.

#include <string>

#include "geodesic.hpp"
#include "strata.hpp"

namespace orbistrat {

// Parses a JSON model description:
//   {
//     "label": text,
//     "dimension": n,
//     "generators": [{"linear": [n*n row-major], "translation": [n]}, ...],
//     "lattice_basis": [[n], ... n rows]        (optional),
//     "fundamental_box": {"min": [n], "max": [n]},
//     "tolerance": positive real                (optional, default 1e-9),
//     "enumeration": {"max_word_length": int, "element_cap": int}
//   }
// Shape and type problems raise Parse errors; value-level problems
// (non-orthogonal linear part, empty box, non-positive tolerance or
// enumeration bounds) raise Validation errors naming the violated invariant.
OrbifoldModel parse_model_json(const std::string& text);

// Reads the file and parses it. Unreadable files raise Io errors.
OrbifoldModel load_model_file(const std::string& path);

// Report fragments. Every report carries a versioned "schema" field, a model
// summary, and a properness-certificate summary.
std::string model_summary_json(const ModelContext& ctx);
std::string stratification_report_json(const ModelContext& ctx,
                                       const Stratification& strat,
                                       double elapsed_seconds);
std::string geodesic_report_json(const ModelContext& ctx,
                                 const Stratification& strat,
                                 const ExistenceOutcome& outcome,
                                 double elapsed_seconds);

// Per-component plot data for dimensions <= 3. Columns: component, k, then
// one coordinate column per dimension. Rows for one-dimensional components
// come in entry/exit pairs per cell, clipped to the declared box; isolated
// points give one row each; higher-dimensional components contribute their
// in-box probe points.
std::string polylines_csv(const ModelContext& ctx, const Stratification& strat);

// Two-dimensional overview: the declared box, one-dimensional cells as
// lines, isolated points as circles.
std::string stratification_svg(const ModelContext& ctx,
                               const Stratification& strat);

}  // namespace orbistrat
