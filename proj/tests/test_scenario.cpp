#include <doctest.h>

#include <cmath>
#include <string>

#include "builtins.hpp"
#include "scenario_file.hpp"
#include "toml_lite.hpp"

using namespace metallab;
using namespace metallab::cli;

namespace {

std::string data(const char* name) { return std::string(METALLAB_TEST_DATA) + "/" + name; }

std::string error_of(std::string_view text) {
  try {
    load_scenario_text(text);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return {};
}

const std::string kMinimal = R"(name = "mini"
[ambient]
dim = 3
p = 1
q = 2
pattern = ["sigma", "sigma_bar", "sigma"]
[immersion]
params = ["u"]
components = ["u", "u^2", "0"]
domain = [[-1, 1]]
)";

}  // namespace

TEST_SUITE("toml") {

TEST_CASE("values and tables") {
  const auto doc = parse_toml(R"(# comment
a = 1
b = -2.5e-1   # trailing
"quoted key" = "x\tyé"
flag = true
list = [1, "two",
        [3.0, 4],]
inline = { x = 1, y.z = "deep" }
[t.sub]
k = "esc\\n"
)");
  CHECK(doc["a"] == 1);
  CHECK(doc["b"].get<double>() == -0.25);
  CHECK(doc["quoted key"] == "x\ty\xc3\xa9");
  CHECK(doc["flag"] == true);
  CHECK(doc["list"].size() == 3);
  CHECK(doc["list"][2][1] == 4);
  CHECK(doc["inline"]["y"]["z"] == "deep");
  CHECK(doc["t"]["sub"]["k"] == "esc\\n");
}

TEST_CASE("errors carry line and column") {
  try {
    parse_toml("a = 1\nb = [1, 2\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  try {
    parse_toml("a = 1\n  b = @\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 7);
  }
  CHECK_THROWS_AS(parse_toml("a = 1\na = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_toml("[t]\n[t]\n"), ParseError);
  CHECK_THROWS_AS(parse_toml("a = \"open\n"), ParseError);
}

}

TEST_SUITE("scenario") {

TEST_CASE("builtins load with the documented dimensions") {
  const auto e1 = load_builtin("example1");
  CHECK(e1.scenario.ambient_dim() == 4);
  CHECK(e1.scenario.dim() == 2);
  CHECK(e1.scenario.extra_consts.at("t") == doctest::Approx(std::atan(1.0)));
  const auto e2 = load_builtin("example2");
  CHECK(e2.scenario.ambient_dim() == 7);
  CHECK(e2.scenario.dim() == 3);
  CHECK(load_builtin("example1-jbar").structure_name == "jbar");
  CHECK_THROWS_AS(load_builtin("nope"), ScenarioError);
  for (const auto& b : builtin_list()) CHECK_NOTHROW(load_builtin(b.name));
}

TEST_CASE("minimal scenario") {
  const auto ls = load_scenario_text(kMinimal);
  CHECK(ls.scenario.name == "mini");
  CHECK(ls.scenario.structure.params().q == 2);
  CHECK(ls.scenario.distributions.empty());
  CHECK(ls.checks.size() == 29);
}

TEST_CASE("files") {
  const auto ls = load_scenario_file(data("tilted_plane.toml"));
  CHECK(ls.scenario.name == "tilted-plane");
  CHECK(ls.checks.size() == 3);
  CHECK(ls.scenario.sampling.count == 64);
  CHECK_THROWS_AS(load_scenario_file(data("broken.toml")), ParseError);
  CHECK_THROWS_AS(load_scenario_file(data("missing.toml")), ScenarioError);
  try {
    load_scenario_file(data("pattern_mismatch.toml"));
    FAIL("expected a validation error");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("[ambient] pattern") != std::string::npos);
  }
}

TEST_CASE("validation names the section and key") {
  auto with = [](std::string from, std::string to) {
    std::string s = kMinimal;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  CHECK(error_of(with("dim = 3", "dim = 3\ncolour = 1")).find("[ambient] colour: unknown key") == 0);
  CHECK(error_of(with("name = \"mini\"", "name = \"mini\"\nextra = 1")).find("[top level] extra") == 0);
  CHECK(error_of(with("q = 2", "q = 0")).find("[ambient] q") == 0);
  CHECK(error_of(with("\"u^2\"", "\"w^2\"")).find("[immersion] components") == 0);
  CHECK(error_of(with("[[-1, 1]]", "[[1, -1]]")) != "");
  CHECK(error_of(with("pattern = [\"sigma\", \"sigma_bar\", \"sigma\"]", "matrix = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]"))
            .find("[ambient]: matrix is not a metallic structure") == 0);
  CHECK(error_of(with("pattern = [\"sigma\", \"sigma_bar\", \"sigma\"]",
                      "product = { matrix = [[1, 0, 0], [0, 1, 0], [0, 0, 2]], sign = \"+\" }")) != "");
  CHECK(error_of(with("pattern = [\"sigma\", \"sigma_bar\", \"sigma\"]", "pattern = [\"sigma\", \"sigmaa\", \"sigma\"]"))
            .find("[ambient] pattern") == 0);
}

TEST_CASE("structures and constant overrides") {
  const auto base = load_builtin("example1");
  CHECK(base.alternative_structures == std::vector<std::string>{"jbar"});
  const auto jbar = rebuild(base, {}, "jbar");
  CHECK(jbar.scenario.structure.matrix()(1, 1) == doctest::Approx(jbar.scenario.structure.params().sigma));
  CHECK(jbar.references.empty());
  CHECK_THROWS_AS(rebuild(base, {}, "other"), ScenarioError);
  const auto moved = rebuild(base, {{"t", 0.5}}, "default");
  CHECK(moved.scenario.extra_consts.at("t") == 0.5);
  CHECK(moved.references.at(0).value != base.references.at(0).value);
  CHECK_THROWS_AS(rebuild(base, {{"nope", 1.0}}, "default"), ScenarioError);
}

}
