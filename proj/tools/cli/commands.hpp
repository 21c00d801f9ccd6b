#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "scenario_file.hpp"

namespace metallab::cli {

enum class Format { Text, Json, Csv };

struct RunOptions {
  Format format = Format::Text;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::string checks;  // empty: the scenario's list
  std::string var;
  std::string grid;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;

/// Seed precedence: --seed, then METALLIC_LAB_SEED, then the scenario file.
/// Throws ScenarioError on a malformed environment value.
std::uint64_t resolve_seed(const RunOptions& opt, std::uint64_t scenario_seed);

int cmd_analyze(const LoadedScenario& ls, const RunOptions& opt, std::ostream& out);
int cmd_verify(const LoadedScenario& ls, const RunOptions& opt, std::ostream& out);
int cmd_angle_sweep(const LoadedScenario& ls, const RunOptions& opt, std::ostream& out);
int cmd_builtin_list(const RunOptions& opt, std::ostream& out);

/// Full command line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace metallab::cli
