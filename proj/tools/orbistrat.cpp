// Command-line front end. Talks to the library exclusively through the
// public C interface; exit codes follow the os_status contract.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orbistrat/orbistrat.h"

namespace {

int report_failure(os_status status) {
  std::fprintf(stderr, "orbistrat: %s\n", os_last_error());
  return static_cast<int>(status);
}

// Owns a loaded model handle for the duration of one subcommand.
struct ModelGuard {
  os_model* handle = nullptr;
  ~ModelGuard() { os_model_free(handle); }
};

// Owns one C string from the library.
struct StringGuard {
  char* value = nullptr;
  ~StringGuard() { os_string_free(value); }
};

bool write_file(const std::string& path, const char* content) {
  std::error_code ec;
  const std::filesystem::path parent =
      std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  out.flush();
  return static_cast<bool>(out);
}

int run_validate(const std::string& path) {
  ModelGuard model;
  os_status status = os_model_load_file(path.c_str(), &model.handle);
  if (status != OS_OK) return report_failure(status);
  StringGuard summary;
  status = os_model_summary(model.handle, &summary.value);
  if (status != OS_OK) return report_failure(status);
  std::fputs(summary.value, stdout);
  return 0;
}

int run_stratify(const std::string& path, const std::string& out_dir,
                 bool svg) {
  if (svg && out_dir.empty()) {
    std::fprintf(stderr, "orbistrat: --svg requires --out\n");
    return static_cast<int>(OS_PARSE);
  }
  ModelGuard model;
  os_status status = os_model_load_file(path.c_str(), &model.handle);
  if (status != OS_OK) return report_failure(status);
  StringGuard report;
  status = os_stratify(model.handle, &report.value);
  if (status != OS_OK) return report_failure(status);
  if (!out_dir.empty()) {
    if (!write_file(out_dir + "/report.json", report.value)) {
      std::fprintf(stderr, "orbistrat: cannot write to %s\n",
                   out_dir.c_str());
      return static_cast<int>(OS_IO);
    }
    StringGuard csv;
    const os_status csv_status = os_polylines_csv(model.handle, &csv.value);
    if (csv_status == OS_OK) {
      if (!write_file(out_dir + "/polylines.csv", csv.value)) {
        std::fprintf(stderr, "orbistrat: cannot write to %s\n",
                     out_dir.c_str());
        return static_cast<int>(OS_IO);
      }
    } else if (csv_status != OS_PRECONDITION) {
      return report_failure(csv_status);
    }
    if (svg) {
      StringGuard figure;
      const os_status svg_status =
          os_overview_svg(model.handle, &figure.value);
      if (svg_status != OS_OK) return report_failure(svg_status);
      if (!write_file(out_dir + "/overview.svg", figure.value)) {
        std::fprintf(stderr, "orbistrat: cannot write to %s\n",
                     out_dir.c_str());
        return static_cast<int>(OS_IO);
      }
    }
  }
  std::fputs(report.value, stdout);
  return 0;
}

int run_geodesic(const std::string& path, const std::string& strategy,
                 const std::vector<std::string>& disabled,
                 const std::string& out_dir) {
  ModelGuard model;
  os_status status = os_model_load_file(path.c_str(), &model.handle);
  if (status != OS_OK) return report_failure(status);
  std::string disabled_csv;
  for (const std::string& item : disabled) {
    if (!disabled_csv.empty()) disabled_csv += ',';
    disabled_csv += item;
  }
  StringGuard report;
  status = os_geodesic(model.handle, strategy.c_str(),
                       disabled_csv.empty() ? nullptr : disabled_csv.c_str(),
                       &report.value);
  if (status != OS_OK && status != OS_OPEN_CASE) {
    return report_failure(status);
  }
  if (!out_dir.empty() &&
      !write_file(out_dir + "/report.json", report.value)) {
    std::fprintf(stderr, "orbistrat: cannot write to %s\n", out_dir.c_str());
    return static_cast<int>(OS_IO);
  }
  std::fputs(report.value, stdout);
  return static_cast<int>(status);
}

int run_examples_list() {
  const int count = os_example_count();
  for (int i = 0; i < count; ++i) {
    std::printf("%s\n", os_example_name(i));
  }
  return 0;
}

int run_examples_emit(const std::string& name) {
  const char* content = os_example_content(name.c_str());
  if (!content) {
    std::fprintf(stderr, "orbistrat: unknown example '%s'\n", name.c_str());
    return static_cast<int>(OS_PARSE);
  }
  std::fputs(content, stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flat-orbifold stratification and closed-geodesic toolkit"};
  app.require_subcommand(1);

  std::string model_path;
  std::string out_dir;
  bool svg = false;
  std::string strategy = "auto";
  std::vector<std::string> disabled;
  std::string example_name;

  CLI::App* validate =
      app.add_subcommand("validate", "Load a model file and print a summary");
  validate->add_option("model", model_path, "model file")->required();

  CLI::App* stratify = app.add_subcommand(
      "stratify", "Compute the singular-locus stratification");
  stratify->add_option("model", model_path, "model file")->required();
  stratify->add_option("--out", out_dir, "directory for report and plot data");
  stratify->add_flag("--svg", svg, "also write an SVG overview (2D models)");

  CLI::App* geodesic = app.add_subcommand(
      "geodesic", "Construct and verify a closed geodesic");
  geodesic->add_option("model", model_path, "model file")->required();
  geodesic
      ->add_option("--strategy", strategy,
                   "auto|hyperbolic|sigma1|closed-component|even-isotropy")
      ->capture_default_str();
  geodesic->add_option(
      "--disable", disabled,
      "remove a strategy from the ladder (repeatable): hyperbolic, sigma1, "
      "closed-component, even-isotropy, stratum-reduction");
  geodesic->add_option("--out", out_dir, "directory for the report");

  CLI::App* examples =
      app.add_subcommand("examples", "Built-in example models");
  examples->require_subcommand(1);
  examples->add_subcommand("list", "List the example names");
  CLI::App* emit =
      examples->add_subcommand("emit", "Print an example model file");
  emit->add_option("name", example_name, "example name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(OS_PARSE);
  }

  if (validate->parsed()) return run_validate(model_path);
  if (stratify->parsed()) return run_stratify(model_path, out_dir, svg);
  if (geodesic->parsed()) {
    return run_geodesic(model_path, strategy, disabled, out_dir);
  }
  if (examples->parsed()) {
    if (examples->get_subcommand("list")->parsed()) return run_examples_list();
    return run_examples_emit(example_name);
  }
  return static_cast<int>(OS_PARSE);
}
