#pragma once

// Built-in model files. Contents are fixed byte-for-byte: `emit` writes them
// verbatim, and the loaders parse them like any user-supplied file.

#include <string>
#include <vector>

namespace orbistrat {

struct ExampleEntry {
  const char* name;
  const char* content;
};

const std::vector<ExampleEntry>& example_catalog();

// The file body for a catalog name, or nullptr when the name is unknown.
const char* example_content(const std::string& name);

}  // namespace orbistrat
