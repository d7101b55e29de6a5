#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloudadl/ast.hpp"
#include "cloudadl/diagnostic.hpp"

namespace cloudadl {

// Exactly one of `model` and `diagnostics` is populated.
struct ModelResult {
  std::optional<ArchitectureModel> model;
  Diagnostics diagnostics;

  bool ok() const { return model.has_value(); }
};

/// Parses one `.arc` source. Errors: E_SYNTAX for the first unparseable
/// token, E_DUPLICATE for a name defined twice within the source (types,
/// fields, ports, subcomponents, contexts, or a second behavior clause).
ModelResult parse_model(std::string_view source, std::string_view origin);

/// Canonical text for a model: two-space indentation, one declaration per
/// line, categories in a fixed order, declaration order within a category.
std::string pretty_print(const ArchitectureModel& model);

/// Parses every file and merges the definitions. An empty list yields an
/// empty model. Cross-file duplicates are E_DUPLICATE, unreadable files E_IO.
ModelResult load_files(const std::vector<std::filesystem::path>& paths);

// Merges `fragment` into `into`, reporting names that already exist.
Diagnostics merge_into(ArchitectureModel& into, ArchitectureModel fragment);

}  // namespace cloudadl
