#pragma once

#include <span>
#include <string>
#include <string_view>

#include "scenario_file.hpp"

namespace metallab::cli {

struct BuiltinInfo {
  std::string_view name;
  std::string_view summary;
};

std::span<const BuiltinInfo> builtin_list();
bool is_builtin(std::string_view name);
/// Throws ScenarioError for an unknown name.
LoadedScenario load_builtin(std::string_view name);

/// Scenario text of the planar-frame hemi-slant surface in R^4 for arbitrary
/// (p, q) and angle expression t.
std::string surface_r4_text(int p, int q, std::string_view t_expr);
/// Scenario text of the hemi-slant 3-fold in R^7.
std::string threefold_r7_text(int p, int q, std::string_view t_expr);

}  // namespace metallab::cli
