#include "examples_catalog.hpp"

namespace orbistrat {

namespace {

// Irrational entries are written as 17-significant-digit decimals so every
// platform parses the identical double.

constexpr const char* kTorus2 = R"({
  "label": "torus2",
  "dimension": 2,
  "generators": [
    {"linear": [1, 0, 0, 1], "translation": [1, 0]},
    {"linear": [1, 0, 0, 1], "translation": [0, 1]}
  ],
  "lattice_basis": [[1, 0], [0, 1]],
  "fundamental_box": {"min": [0, 0], "max": [1, 1]},
  "tolerance": 1e-9,
  "enumeration": {"max_word_length": 8, "element_cap": 10000}
}
)";

constexpr const char* kPillowcase = R"({
  "label": "pillowcase_p2",
  "dimension": 2,
  "generators": [
    {"linear": [1, 0, 0, 1], "translation": [1, 0]},
    {"linear": [1, 0, 0, 1], "translation": [0, 1]},
    {"linear": [-1, 0, 0, -1], "translation": [0, 0]}
  ],
  "lattice_basis": [[1, 0], [0, 1]],
  "fundamental_box": {"min": [0, 0], "max": [1, 1]},
  "tolerance": 1e-9,
  "enumeration": {"max_word_length": 8, "element_cap": 10000}
}
)";

constexpr const char* kWallpaperP4 = R"({
  "label": "wallpaper_p4",
  "dimension": 2,
  "generators": [
    {"linear": [1, 0, 0, 1], "translation": [1, 0]},
    {"linear": [1, 0, 0, 1], "translation": [0, 1]},
    {"linear": [0, -1, 1, 0], "translation": [0, 0]}
  ],
  "lattice_basis": [[1, 0], [0, 1]],
  "fundamental_box": {"min": [0, 0], "max": [1, 1]},
  "tolerance": 1e-9,
  "enumeration": {"max_word_length": 8, "element_cap": 10000}
}
)";

constexpr const char* kHexagonal3dD3 = R"({
  "label": "hexagonal3d_d3",
  "dimension": 3,
  "generators": [
    {"linear": [1, 0, 0, 0, 1, 0, 0, 0, 1], "translation": [1, 0, 0]},
    {"linear": [1, 0, 0, 0, 1, 0, 0, 0, 1], "translation": [-0.5, 0.86602540378443865, 0]},
    {"linear": [1, 0, 0, 0, 1, 0, 0, 0, 1], "translation": [0, 0, 1]},
    {"linear": [-0.5, -0.86602540378443865, 0, 0.86602540378443865, -0.5, 0, 0, 0, 1], "translation": [0, 0, 0]},
    {"linear": [1, 0, 0, 0, -1, 0, 0, 0, -1], "translation": [0, 0, 0]}
  ],
  "lattice_basis": [[1, 0, 0], [-0.5, 0.86602540378443865, 0], [0, 0, 1]],
  "fundamental_box": {"min": [-0.5, 0, 0], "max": [1, 0.86602540378443865, 1]},
  "tolerance": 1e-9,
  "enumeration": {"max_word_length": 8, "element_cap": 10000}
}
)";

constexpr const char* kKleinFour3d = R"({
  "label": "kleinfour3d",
  "dimension": 3,
  "generators": [
    {"linear": [1, 0, 0, 0, 1, 0, 0, 0, 1], "translation": [1, 0, 0]},
    {"linear": [1, 0, 0, 0, 1, 0, 0, 0, 1], "translation": [0, 1, 0]},
    {"linear": [1, 0, 0, 0, 1, 0, 0, 0, 1], "translation": [0, 0, 1]},
    {"linear": [1, 0, 0, 0, -1, 0, 0, 0, -1], "translation": [0, 0, 0]},
    {"linear": [-1, 0, 0, 0, 1, 0, 0, 0, -1], "translation": [0, 0, 0]},
    {"linear": [-1, 0, 0, 0, -1, 0, 0, 0, 1], "translation": [0, 0, 0]}
  ],
  "lattice_basis": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
  "fundamental_box": {"min": [0, 0, 0], "max": [1, 1, 1]},
  "tolerance": 1e-9,
  "enumeration": {"max_word_length": 8, "element_cap": 10000}
}
)";

}  // namespace

const std::vector<ExampleEntry>& example_catalog() {
  static const std::vector<ExampleEntry> catalog = {
      {"torus2", kTorus2},
      {"pillowcase_p2", kPillowcase},
      {"wallpaper_p4", kWallpaperP4},
      {"hexagonal3d_d3", kHexagonal3dD3},
      {"kleinfour3d", kKleinFour3d},
  };
  return catalog;
}

const char* example_content(const std::string& name) {
  for (const ExampleEntry& e : example_catalog()) {
    if (name == e.name) return e.content;
  }
  return nullptr;
}

}  // namespace orbistrat
