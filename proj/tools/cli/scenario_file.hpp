#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "metallab/errors.hpp"
#include "metallab/geometry.hpp"
#include "metallab/propcheck.hpp"
#include "toml_lite.hpp"

namespace metallab::cli {

/// Invalid scenario content; the message names the section and key.
class ScenarioError : public Error {
public:
  using Error::Error;
};

/// Closed-form expression for the cos theta of D1, evaluated at load time.
struct Reference {
  std::string name;
  std::string source;
  double value = 0.0;
};

struct ConstDomain {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

struct LoadedScenario {
  ImmersionScenario scenario;
  std::string description;
  std::string structure_name = "default";
  std::vector<Reference> references;
  std::vector<CheckId> checks;
  std::vector<ConstDomain> const_domains;
  std::vector<std::string> alternative_structures;
  Document source;

  const ConstDomain* const_domain(std::string_view name) const;
};

/// Constant overrides applied in place of the file's values.
using ConstOverrides = std::map<std::string, double, std::less<>>;

LoadedScenario load_scenario_text(std::string_view text, std::string_view fallback_name = "scenario");
LoadedScenario load_scenario_file(const std::filesystem::path& path);

/// Rebuilds from the parsed document with the given constants and structure.
/// `structure` is "default" or a name under [structures].
LoadedScenario rebuild(const LoadedScenario& base, const ConstOverrides& overrides, std::string_view structure);

}  // namespace metallab::cli
