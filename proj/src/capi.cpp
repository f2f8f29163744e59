#include "orbistrat/orbistrat.h"

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "examples_catalog.hpp"
#include "geodesic.hpp"
#include "model_io.hpp"
#include "strata.hpp"

namespace {

using namespace orbistrat;

thread_local std::string g_last_error;

os_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
      return OS_PARSE;
    case ErrorKind::Validation:
      return OS_VALIDATION;
    case ErrorKind::Io:
      return OS_IO;
    case ErrorKind::StrategyPrecondition:
      return OS_PRECONDITION;
    case ErrorKind::Enumeration:
      return OS_VALIDATION;
    case ErrorKind::Internal:
      return OS_INTERNAL;
  }
  return OS_INTERNAL;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs the body, translating exceptions into status codes and the
// thread-local error message.
template <class F>
os_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return OS_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return OS_INTERNAL;
  }
}

double seconds_since(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::optional<Strategy> strategy_of(const std::string& name) {
  if (name == "hyperbolic") return Strategy::HyperbolicElement;
  if (name == "sigma1") return Strategy::Sigma1;
  if (name == "closed-component") return Strategy::ClosedComponent;
  if (name == "even-isotropy") return Strategy::EvenIsotropyPoint;
  if (name == "stratum-reduction") return Strategy::OddStratumReduction;
  return std::nullopt;
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> all = {
      Strategy::HyperbolicElement, Strategy::Sigma1,
      Strategy::ClosedComponent, Strategy::EvenIsotropyPoint,
      Strategy::OddStratumReduction};
  return all;
}

}  // namespace

struct os_model {
  ModelContext ctx;
  std::optional<Stratification> strat;

  explicit os_model(ModelContext c) : ctx(std::move(c)) {}

  const Stratification& stratification() {
    if (!strat) strat = stratify(ctx);
    return *strat;
  }
};

namespace {

os_status load_common(OrbifoldModel model, os_model** out) {
  if (const char* env = std::getenv("ORBISTRAT_TOL")) {
    char* end = nullptr;
    const double tol = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(tol > 0.0)) {
      fail(ErrorKind::Validation, "ORBISTRAT_TOL must be a positive real");
    }
    model.tolerance = tol;
  }
  auto handle = std::make_unique<os_model>(validate_model(std::move(model)));
  *out = handle.release();
  return OS_OK;
}

// Records a null-argument misuse so os_last_error() reflects this call
// instead of whatever a previous failure left behind.
os_status usage_error(const char* function) {
  g_last_error = std::string(function) + ": null argument";
  return OS_PARSE;
}

}  // namespace

os_status os_model_load_file(const char* path, os_model** out) {
  if (!path || !out) return usage_error("os_model_load_file");
  *out = nullptr;
  return guarded([&] { return load_common(load_model_file(path), out); });
}

os_status os_model_load_json(const char* text, os_model** out) {
  if (!text || !out) return usage_error("os_model_load_json");
  *out = nullptr;
  return guarded([&] { return load_common(parse_model_json(text), out); });
}

void os_model_free(os_model* model) { delete model; }

os_status os_model_summary(os_model* model, char** json_out) {
  if (!model || !json_out) return usage_error("os_model_summary");
  return guarded([&] {
    *json_out = dup_string(model_summary_json(model->ctx));
    return *json_out ? OS_OK : OS_INTERNAL;
  });
}

os_status os_stratify(os_model* model, char** report_json_out) {
  if (!model || !report_json_out) return usage_error("os_stratify");
  return guarded([&] {
    const auto start = std::chrono::steady_clock::now();
    const Stratification& strat = model->stratification();
    *report_json_out = dup_string(
        stratification_report_json(model->ctx, strat, seconds_since(start)));
    return *report_json_out ? OS_OK : OS_INTERNAL;
  });
}

os_status os_polylines_csv(os_model* model, char** csv_out) {
  if (!model || !csv_out) return usage_error("os_polylines_csv");
  return guarded([&] {
    *csv_out = dup_string(polylines_csv(model->ctx, model->stratification()));
    return *csv_out ? OS_OK : OS_INTERNAL;
  });
}

os_status os_overview_svg(os_model* model, char** svg_out) {
  if (!model || !svg_out) return usage_error("os_overview_svg");
  return guarded([&] {
    *svg_out =
        dup_string(stratification_svg(model->ctx, model->stratification()));
    return *svg_out ? OS_OK : OS_INTERNAL;
  });
}

os_status os_geodesic(os_model* model, const char* strategy,
                      const char* disabled, char** report_json_out) {
  if (!model || !report_json_out) return usage_error("os_geodesic");
  return guarded([&]() -> os_status {
    const auto start = std::chrono::steady_clock::now();
    DispatchOptions opts;

    std::optional<Strategy> forced;
    const std::string strategy_name_arg = strategy ? strategy : "auto";
    if (strategy_name_arg != "auto") {
      forced = strategy_of(strategy_name_arg);
      if (!forced) {
        fail(ErrorKind::Parse,
             "unknown strategy '" + strategy_name_arg + "'");
      }
      for (const Strategy s : all_strategies()) {
        if (s != *forced) opts.disabled.push_back(s);
      }
    }
    if (disabled && *disabled) {
      std::string list = disabled;
      std::size_t pos = 0;
      while (pos <= list.size()) {
        const std::size_t comma = list.find(',', pos);
        const std::string item =
            list.substr(pos, comma == std::string::npos ? std::string::npos
                                                        : comma - pos);
        if (!item.empty()) {
          const auto s = strategy_of(item);
          if (!s) fail(ErrorKind::Parse, "unknown strategy '" + item + "'");
          opts.disabled.push_back(*s);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }

    const Stratification& strat = model->stratification();
    const ExistenceOutcome outcome = existence_dispatch(model->ctx, strat, opts);
    if (forced && outcome.strategy != *forced) {
      fail(ErrorKind::StrategyPrecondition,
           "strategy '" + strategy_name_arg +
               "' does not apply to this model (" + outcome.explanation + ")");
    }
    *report_json_out = dup_string(geodesic_report_json(
        model->ctx, strat, outcome, seconds_since(start)));
    if (!*report_json_out) return OS_INTERNAL;
    return outcome.strategy == Strategy::OpenCase ? OS_OPEN_CASE : OS_OK;
  });
}

int os_example_count(void) {
  return static_cast<int>(example_catalog().size());
}

const char* os_example_name(int index) {
  const auto& catalog = example_catalog();
  if (index < 0 || index >= static_cast<int>(catalog.size())) return nullptr;
  return catalog[static_cast<std::size_t>(index)].name;
}

const char* os_example_content(const char* name) {
  if (!name) return nullptr;
  return example_content(name);
}

const char* os_last_error(void) { return g_last_error.c_str(); }

void os_string_free(char* s) { std::free(s); }

const char* os_version(void) { return "orbistrat 1.0.0"; }
