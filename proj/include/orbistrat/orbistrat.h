#ifndef ORBISTRAT_ORBISTRAT_H
#define ORBISTRAT_ORBISTRAT_H

/* Public C interface: model loading, stratification and geodesic reports,
 * plot data, and the built-in example catalog.
 *
 * Status codes double as process exit codes for the bundled CLI:
 *   0  success
 *   1  internal failure
 *   2  parse failure (malformed file, unknown name)
 *   3  validation failure (named model invariant violated; this also covers
 *      exceeded enumeration budgets, which are declared in the model file)
 *   4  I/O failure
 *   5  strategy precondition failure
 *   10 verified open case: no strategy produced a geodesic
 *
 * All functions returning char** allocate with malloc; release the strings
 * with os_string_free. On any non-OK status, os_last_error() describes the
 * failure for the calling thread.
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  OS_OK = 0,
  OS_INTERNAL = 1,
  OS_PARSE = 2,
  OS_VALIDATION = 3,
  OS_IO = 4,
  OS_PRECONDITION = 5,
  OS_OPEN_CASE = 10
} os_status;

typedef struct os_model os_model;

/* Loads and validates a model (properness certificate included). If the
 * environment variable ORBISTRAT_TOL is set, it must be a positive real and
 * overrides the file's tolerance. */
os_status os_model_load_file(const char* path, os_model** out);
os_status os_model_load_json(const char* text, os_model** out);
void os_model_free(os_model* model);

/* Model and certificate summary as JSON. */
os_status os_model_summary(os_model* model, char** json_out);

/* Stratification report as JSON (regular row plus one row per component). */
os_status os_stratify(os_model* model, char** report_json_out);

/* Plot data: CSV polylines for dimensions 1-3, SVG overview for dimension 2.
 * Unsupported dimensions yield OS_PRECONDITION. */
os_status os_polylines_csv(os_model* model, char** csv_out);
os_status os_overview_svg(os_model* model, char** svg_out);

/* Existence pipeline. strategy is NULL or "auto" for the full ladder, or one
 * of "hyperbolic", "sigma1", "closed-component", "even-isotropy" to force a
 * single constructor. disabled is NULL or a comma-separated subset of
 * {"hyperbolic", "sigma1", "closed-component", "even-isotropy",
 * "stratum-reduction"} removed from the ladder for this call.
 *
 * Returns OS_OK with a report when a verified geodesic was produced. Under
 * "auto", an exhausted ladder returns OS_OPEN_CASE and still writes the
 * report. A forced strategy that does not apply returns OS_PRECONDITION. */
os_status os_geodesic(os_model* model, const char* strategy,
                      const char* disabled, char** report_json_out);

/* Built-in example catalog. Returned strings are static; do not free. */
int os_example_count(void);
const char* os_example_name(int index);
const char* os_example_content(const char* name);

const char* os_last_error(void);
void os_string_free(char* s);
const char* os_version(void);

#ifdef __cplusplus
}
#endif

#endif /* ORBISTRAT_ORBISTRAT_H */
