#include "builtins.hpp"

#include <algorithm>

namespace metallab::cli {

namespace {

constexpr BuiltinInfo kBuiltins[] = {
    {"example1", "surface in R^4, diagonal metallic J, p=q=1, t=pi/4: proper hemi-slant"},
    {"example1-jbar", "example1 with the sigma,sigma,sigma,sigma_bar structure: semi-invariant"},
    {"example1-golden", "example1 written with the Golden number phi and an explicit matrix"},
    {"example2", "3-fold in R^7, diagonal metallic J, p=q=1, t=pi/4: proper hemi-slant"},
    {"example2-jbar", "example2 with the alternative diagonal structure: semi-invariant"},
    {"paraboloid", "z = u^2 + v^2 in R^4 with a product-induced J, p=2, q=1 (curved)"},
};

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string fill(std::string_view tmpl, int p, int q, std::string_view t_expr) {
  std::string s(tmpl);
  s = replace_all(s, "@P@", std::to_string(p));
  s = replace_all(s, "@Q@", std::to_string(q));
  s = replace_all(s, "@T@", t_expr);
  return s;
}

constexpr std::string_view kSurfaceR4 = R"toml(name = "example1"
description = "f(u,v) = (u cos t, u sin t, v, sigma v / sqrt(q)) in R^4"

[ambient]
dim = 4
p = @P@
q = @Q@
pattern = ["sigma", "sigma_bar", "sigma", "sigma_bar"]

[structures.jbar]
pattern = ["sigma", "sigma", "sigma", "sigma_bar"]

[immersion]
params = ["u", "v"]
components = ["u*cos(t)", "u*sin(t)", "v", "sigma/sqrt(q)*v"]
domain = [[0.1, 3.0], [-2.0, 2.0]]

[immersion.consts]
t = "@T@"

[const_domains]
t = [0.0, "pi/2"]

[distributions]
D1 = [["1", "0"]]
D2 = [["0", "1"]]

[sampling]
count = 200
seed = 42

[references]
general = "(sigma*cos(t)^2 + sigma_bar*sin(t)^2)/sqrt(sigma^2*cos(t)^2 + sigma_bar^2*sin(t)^2)"
specialized_pi_4 = "(sigma + sigma_bar)/sqrt(sigma^2 + sigma_bar^2)"
)toml";

constexpr std::string_view kGoldenR4 = R"toml(name = "example1-golden"
description = "f(u,v) = (u cos t, u sin t, v, phi v) in R^4 with the Golden structure"

[ambient]
dim = 4
p = 1
q = 1
matrix = [["phi", 0, 0, 0], [0, "1 - phi", 0, 0], [0, 0, "phi", 0], [0, 0, 0, "1 - phi"]]

[structures.jbar]
matrix = [["phi", 0, 0, 0], [0, "phi", 0, 0], [0, 0, "phi", 0], [0, 0, 0, "1 - phi"]]

[immersion]
params = ["u", "v"]
components = ["u*cos(t)", "u*sin(t)", "v", "phi*v"]
domain = [[0.1, 3.0], [-2.0, 2.0]]

[immersion.consts]
t = "pi/4"
phi = "(1 + sqrt(5))/2"

[const_domains]
t = [0.0, "pi/2"]

[distributions]
D1 = [["1", "0"]]
D2 = [["0", "1"]]

[sampling]
count = 200
seed = 42

[references]
general = "(phi*cos(t)^2 + (1 - phi)*sin(t)^2)/sqrt((phi*cos(t)^2 + (1 - phi)*sin(t)^2) + 1)"
)toml";

constexpr std::string_view kThreefoldR7 = R"toml(name = "example2"
description = "f(u,v,w) = (u cos t/sqrt3, u sin t/sqrt3, v, sigma v/sqrt q, sqrt q w/sigma, w, sqrt(2/3) u) in R^7"

[ambient]
dim = 7
p = @P@
q = @Q@
pattern = ["sigma", "sigma_bar", "sigma", "sigma_bar", "sigma", "sigma_bar", "sigma"]

[structures.jbar]
pattern = ["sigma", "sigma", "sigma", "sigma_bar", "sigma", "sigma_bar", "sigma"]

[immersion]
params = ["u", "v", "w"]
components = ["u*cos(t)/sqrt(3)", "u*sin(t)/sqrt(3)", "v", "sigma/sqrt(q)*v", "sqrt(q)/sigma*w", "w", "sqrt(2)/sqrt(3)*u"]
domain = [[0.1, 3.0], [-2.0, 2.0], [-2.0, 2.0]]

[immersion.consts]
t = "@T@"

[const_domains]
t = [0.0, "pi/2"]

[distributions]
D1 = [["1", "0", "0"]]
D2 = [["0", "1", "0"], ["0", "0", "1"]]

[sampling]
count = 200
seed = 42

[references]
general = "(sigma*(cos(t)^2 + 2) + sigma_bar*sin(t)^2)/sqrt(3*(sigma^2*(cos(t)^2 + 2) + sigma_bar^2*sin(t)^2))"
specialized_pi_4 = "(5*sigma + sigma_bar)/sqrt(3*(5*sigma^2 + sigma_bar^2))"
specialized_pi_4_sqrt6 = "(5*sigma + sigma_bar)/sqrt(6*(5*sigma^2 + sigma_bar^2))"
)toml";

constexpr std::string_view kParaboloid = R"toml(name = "paraboloid"
description = "f(u,v) = (u, v, u^2 + v^2, 0) in R^4; J induced by the swap x1<->x3, x2<->x4"

[ambient]
dim = 4
p = 2
q = 1
product = { matrix = [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]], sign = "-" }

[immersion]
params = ["u", "v"]
components = ["u", "v", "u^2 + v^2", "0"]
domain = [[-1.0, 1.0], [-1.0, 1.0]]

[sampling]
count = 200
seed = 42
)toml";

}  // namespace

std::span<const BuiltinInfo> builtin_list() { return kBuiltins; }

bool is_builtin(std::string_view name) {
  return std::any_of(std::begin(kBuiltins), std::end(kBuiltins), [&](const auto& b) { return b.name == name; });
}

std::string surface_r4_text(int p, int q, std::string_view t_expr) { return fill(kSurfaceR4, p, q, t_expr); }

std::string threefold_r7_text(int p, int q, std::string_view t_expr) { return fill(kThreefoldR7, p, q, t_expr); }

LoadedScenario load_builtin(std::string_view name) {
  auto with_structure = [](LoadedScenario base, std::string_view structure, std::string_view new_name) {
    LoadedScenario out = rebuild(base, {}, structure);
    out.scenario.name = std::string(new_name);
    return out;
  };
  if (name == "example1") return load_scenario_text(surface_r4_text(1, 1, "pi/4"));
  if (name == "example1-jbar")
    return with_structure(load_scenario_text(surface_r4_text(1, 1, "pi/4")), "jbar", name);
  if (name == "example1-golden") return load_scenario_text(kGoldenR4);
  if (name == "example2") return load_scenario_text(threefold_r7_text(1, 1, "pi/4"));
  if (name == "example2-jbar")
    return with_structure(load_scenario_text(threefold_r7_text(1, 1, "pi/4")), "jbar", name);
  if (name == "paraboloid") return load_scenario_text(kParaboloid);
  throw ScenarioError("unknown builtin '" + std::string(name) + "'");
}

}  // namespace metallab::cli
