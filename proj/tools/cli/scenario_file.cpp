#include "scenario_file.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace metallab::cli {

namespace {

[[noreturn]] void bad(std::string_view section, std::string_view key, const std::string& msg) {
  std::string where = "[" + std::string(section) + "]";
  if (!key.empty()) where += " " + std::string(key);
  throw ScenarioError(where + ": " + msg);
}

void only_keys(const Document& tbl, std::string_view section, std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : tbl.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) bad(section, k, "unknown key");
  }
}

const Document& require(const Document& tbl, std::string_view section, const char* key) {
  auto it = tbl.find(key);
  if (it == tbl.end()) bad(section, key, "missing required key");
  return *it;
}

const Document& table(const Document& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) bad(name, "", "missing section");
  if (!it->is_object()) bad(name, "", "must be a table");
  return *it;
}

long long integer(const Document& v, std::string_view section, std::string_view key) {
  if (!v.is_number_integer()) bad(section, key, "must be an integer");
  return v.get<long long>();
}

std::string text(const Document& v, std::string_view section, std::string_view key) {
  if (!v.is_string()) bad(section, key, "must be a string");
  return v.get<std::string>();
}

class Builder {
public:
  Builder(const Document& doc, const ConstOverrides& overrides, std::string_view structure, std::string fallback)
      : doc_(doc), overrides_(overrides), structure_(structure), fallback_(std::move(fallback)) {}

  LoadedScenario build() {
    if (!doc_.is_object()) throw ScenarioError("scenario must be a table");
    only_keys(doc_, "top level",
              {"name", "description", "ambient", "structures", "immersion", "distributions", "sampling", "checks",
               "references", "const_domains"});
    LoadedScenario out;
    out.source = doc_;
    auto& scn = out.scenario;
    scn.name = doc_.contains("name") ? text(doc_["name"], "top level", "name") : fallback_;
    if (doc_.contains("description")) out.description = text(doc_["description"], "top level", "description");

    const Document& amb = table(doc_, "ambient");
    only_keys(amb, "ambient", {"dim", "p", "q", "pattern", "matrix", "product"});
    const long long dim = integer(require(amb, "ambient", "dim"), "ambient", "dim");
    const long long p = integer(require(amb, "ambient", "p"), "ambient", "p");
    const long long q = integer(require(amb, "ambient", "q"), "ambient", "q");
    if (dim < 2) bad("ambient", "dim", "must be at least 2");
    if (p < 1 || p > 1000) bad("ambient", "p", "must be a positive integer");
    if (q < 1 || q > 1000) bad("ambient", "q", "must be a positive integer");
    params_ = metallic_number(static_cast<int>(p), static_cast<int>(q));
    dim_ = static_cast<std::size_t>(dim);

    consts_["p"] = params_.p;
    consts_["q"] = params_.q;
    consts_["sigma"] = params_.sigma;
    consts_["sigma_bar"] = params_.sigma_bar;

    const Document& imm = table(doc_, "immersion");
    only_keys(imm, "immersion", {"params", "consts", "components", "domain"});
    read_consts(imm);
    for (const auto& [name, v] : user_consts_) scn.extra_consts[name] = v;

    if (doc_.contains("structures")) {
      const Document& alts = table(doc_, "structures");
      for (const auto& [name, v] : alts.items()) out.alternative_structures.push_back(name);
    }
    if (structure_ == "default") {
      scn.structure = read_structure(amb, "ambient");
      out.structure_name = "default";
    } else {
      const auto it = doc_.find("structures");
      if (it == doc_.end() || !it->contains(structure_)) {
        throw ScenarioError("unknown structure '" + std::string(structure_) + "'");
      }
      const std::string sect = "structures." + std::string(structure_);
      const Document& alt = (*it)[std::string(structure_)];
      if (!alt.is_object()) bad(sect, "", "must be a table");
      only_keys(alt, sect, {"pattern", "matrix", "product"});
      scn.structure = read_structure(alt, sect);
      out.structure_name = std::string(structure_);
    }

    read_immersion(imm, scn);
    if (doc_.contains("distributions")) read_distributions(table(doc_, "distributions"), scn);
    if (doc_.contains("sampling")) {
      const Document& s = table(doc_, "sampling");
      only_keys(s, "sampling", {"count", "seed"});
      if (s.contains("count")) {
        const long long c = integer(s["count"], "sampling", "count");
        if (c < 1) bad("sampling", "count", "must be positive");
        scn.sampling.count = static_cast<std::size_t>(c);
      }
      if (s.contains("seed")) {
        const long long sd = integer(s["seed"], "sampling", "seed");
        if (sd < 0) bad("sampling", "seed", "must be nonnegative");
        scn.sampling.seed = static_cast<std::uint64_t>(sd);
      }
    }
    out.checks = read_checks();
    // Reference closed forms describe the default structure only.
    if (doc_.contains("references") && structure_ == "default") out.references = read_references(table(doc_, "references"));
    if (doc_.contains("const_domains")) out.const_domains = read_const_domains(table(doc_, "const_domains"));

    try {
      scn.validate();
    } catch (const Error& e) {
      throw ScenarioError(e.what());
    }
    const CheckReport sr = verify_structure(scn.structure, 32, 1);
    if (!sr.passed()) throw ScenarioError("structure is not metallic for (p,q): " + sr.note);
    return out;
  }

private:
  std::vector<std::string> const_names() const {
    std::vector<std::string> names{"p", "q"};
    for (const auto& [n, v] : user_consts_) names.push_back(n);
    return names;
  }

  double number(const Document& v, std::string_view section, std::string_view key) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) bad(section, key, "must be a number or an expression string");
    const std::vector<std::string> names = const_names();
    try {
      const Expr e = parse(v.get<std::string>(), {}, names);
      return eval_value(e, consts_);
    } catch (const Error& err) {
      bad(section, key, err.what());
    }
  }

  void read_consts(const Document& imm) {
    if (!imm.contains("consts")) return;
    const Document& c = imm["consts"];
    if (!c.is_object()) bad("immersion", "consts", "must be a table");
    for (const auto& [name, v] : c.items()) {
      if (name == "p" || name == "q" || name == "sigma" || name == "sigma_bar" || name == "pi")
        bad("immersion.consts", name, "reserved name");
      double value = number(v, "immersion.consts", name);
      if (auto it = overrides_.find(name); it != overrides_.end()) value = it->second;
      user_consts_.emplace_back(name, value);
      consts_[name] = value;
    }
    for (const auto& [name, v] : overrides_) {
      if (!consts_.contains(name)) throw ScenarioError("unknown constant '" + name + "'");
    }
  }

  Mat read_matrix(const Document& m, std::string_view section, std::string_view key) {
    if (!m.is_array() || m.size() != dim_) bad(section, key, "must be a " + std::to_string(dim_) + "x" + std::to_string(dim_) + " array");
    Mat out(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      if (!m[i].is_array() || m[i].size() != dim_) bad(section, key, "row " + std::to_string(i) + " has wrong length");
      for (std::size_t jj = 0; jj < dim_; ++jj) out(i, jj) = number(m[i][jj], section, key);
    }
    return out;
  }

  StructureOp read_structure(const Document& tbl, const std::string& section) {
    const int kinds = static_cast<int>(tbl.contains("pattern")) + static_cast<int>(tbl.contains("matrix")) +
                      static_cast<int>(tbl.contains("product"));
    if (kinds != 1) bad(section, "", "declare exactly one of pattern, matrix, product");
    try {
      if (tbl.contains("pattern")) {
        const Document& pat = tbl["pattern"];
        if (!pat.is_array()) bad(section, "pattern", "must be an array");
        if (pat.size() != dim_)
          bad(section, "pattern", "has length " + std::to_string(pat.size()) + ", ambient dim is " + std::to_string(dim_));
        std::vector<AxisValue> axes;
        for (const auto& a : pat) {
          const std::string s = text(a, section, "pattern");
          if (s == "sigma") {
            axes.push_back(AxisValue::Sigma);
          } else if (s == "sigma_bar") {
            axes.push_back(AxisValue::SigmaBar);
          } else {
            bad(section, "pattern", "entries must be \"sigma\" or \"sigma_bar\", got \"" + s + "\"");
          }
        }
        return diagonal_structure(axes, params_);
      }
      if (tbl.contains("matrix")) return validated_structure(read_matrix(tbl["matrix"], section, "matrix"), params_);
      const Document& prod = tbl["product"];
      if (!prod.is_object()) bad(section, "product", "must be an inline table {matrix = ..., sign = ...}");
      only_keys(prod, section + ".product", {"matrix", "sign"});
      const Mat f = read_matrix(require(prod, section + ".product", "matrix"), section, "product.matrix");
      ProductSign sign = ProductSign::Plus;
      if (prod.contains("sign")) {
        const std::string s = text(prod["sign"], section, "product.sign");
        if (s == "-") {
          sign = ProductSign::Minus;
        } else if (s != "+") {
          bad(section, "product.sign", "must be \"+\" or \"-\"");
        }
      }
      return from_product(ProductStructure{f}, params_, sign);
    } catch (const ScenarioError&) {
      throw;
    } catch (const Error& e) {
      bad(section, "", e.what());
    }
  }

  Expr expression(const Document& v, const std::vector<std::string>& vars, std::string_view section,
                  const std::string& key) {
    std::string src;
    if (v.is_number()) {
      std::ostringstream os;
      os.precision(17);
      os << v.get<double>();
      src = os.str();
    } else if (v.is_string()) {
      src = v.get<std::string>();
    } else {
      bad(section, key, "must be an expression string");
    }
    try {
      return parse(src, vars, const_names());
    } catch (const Error& e) {
      bad(section, key, e.what());
    }
  }

  void read_immersion(const Document& imm, ImmersionScenario& scn) {
    const Document& params = require(imm, "immersion", "params");
    if (!params.is_array() || params.empty()) bad("immersion", "params", "must be a nonempty array of names");
    for (const auto& p : params) {
      const std::string name = text(p, "immersion", "params");
      if (consts_.contains(name)) bad("immersion", "params", "'" + name + "' is also a constant");
      scn.param_names.push_back(name);
    }
    const Document& comps = require(imm, "immersion", "components");
    if (!comps.is_array()) bad("immersion", "components", "must be an array");
    if (comps.size() != dim_) {
      bad("immersion", "components",
          "has " + std::to_string(comps.size()) + " entries, ambient dim is " + std::to_string(dim_));
    }
    for (std::size_t i = 0; i < comps.size(); ++i)
      scn.components.push_back(expression(comps[i], scn.param_names, "immersion", "components[" + std::to_string(i) + "]"));

    const Document& dom = require(imm, "immersion", "domain");
    if (!dom.is_array() || dom.size() != scn.param_names.size())
      bad("immersion", "domain", "needs one [lo, hi] interval per parameter");
    for (const auto& iv : dom) {
      if (!iv.is_array() || iv.size() != 2) bad("immersion", "domain", "intervals must be [lo, hi]");
      Interval in{number(iv[0], "immersion", "domain"), number(iv[1], "immersion", "domain")};
      if (!(in.lo < in.hi)) bad("immersion", "domain", "interval lower bound must be below upper bound");
      scn.domain.push_back(in);
    }
  }

  void read_distributions(const Document& tbl, ImmersionScenario& scn) {
    for (const auto& [name, fields] : tbl.items()) {
      const std::string sect = "distributions";
      if (!fields.is_array()) bad(sect, name, "must be an array of coefficient vectors");
      DistributionSpec d;
      d.name = name;
      for (std::size_t f = 0; f < fields.size(); ++f) {
        const Document& vec = fields[f];
        if (!vec.is_array() || vec.size() != scn.param_names.size()) {
          bad(sect, name, "field " + std::to_string(f) + " needs " + std::to_string(scn.param_names.size()) +
                              " coefficients");
        }
        VectorField vf;
        for (std::size_t c = 0; c < vec.size(); ++c)
          vf.push_back(expression(vec[c], scn.param_names, sect, name + "[" + std::to_string(f) + "]"));
        d.fields.push_back(std::move(vf));
      }
      scn.distributions.push_back(std::move(d));
    }
  }

  std::vector<CheckId> read_checks() {
    if (!doc_.contains("checks")) return parse_check_list("all");
    const Document& c = doc_["checks"];
    try {
      if (c.is_string()) return parse_check_list(c.get<std::string>());
      if (!c.is_array()) bad("top level", "checks", "must be \"all\" or an array of check ids");
      std::vector<CheckId> ids;
      for (const auto& v : c) {
        const auto id = parse_check_id(text(v, "top level", "checks"));
        if (!id) bad("top level", "checks", "unknown check id '" + v.get<std::string>() + "'");
        ids.push_back(*id);
      }
      return ids;
    } catch (const ScenarioError&) {
      throw;
    } catch (const Error& e) {
      bad("top level", "checks", e.what());
    }
  }

  std::vector<Reference> read_references(const Document& tbl) {
    std::vector<Reference> refs;
    for (const auto& [name, v] : tbl.items()) {
      Reference r;
      r.name = name;
      r.source = text(v, "references", name);
      r.value = number(v, "references", name);
      refs.push_back(std::move(r));
    }
    return refs;
  }

  std::vector<ConstDomain> read_const_domains(const Document& tbl) {
    std::vector<ConstDomain> out;
    for (const auto& [name, v] : tbl.items()) {
      if (!consts_.contains(name) || name == "p" || name == "q" || name == "sigma" || name == "sigma_bar")
        bad("const_domains", name, "not a declared constant");
      if (!v.is_array() || v.size() != 2) bad("const_domains", name, "must be [lo, hi]");
      ConstDomain d{name, number(v[0], "const_domains", name), number(v[1], "const_domains", name)};
      if (!(d.lo <= d.hi)) bad("const_domains", name, "lower bound exceeds upper bound");
      out.push_back(d);
    }
    return out;
  }

  const Document& doc_;
  const ConstOverrides& overrides_;
  std::string_view structure_;
  std::string fallback_;
  MetallicParams params_;
  std::size_t dim_ = 0;
  Constants consts_;
  std::vector<std::pair<std::string, double>> user_consts_;
};

}  // namespace

const ConstDomain* LoadedScenario::const_domain(std::string_view name) const {
  for (const auto& d : const_domains) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

LoadedScenario load_scenario_text(std::string_view text, std::string_view fallback_name) {
  const Document doc = parse_toml(text);
  const ConstOverrides none;
  return Builder(doc, none, "default", std::string(fallback_name)).build();
}

LoadedScenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario_text(ss.str(), path.stem().string());
}

LoadedScenario rebuild(const LoadedScenario& base, const ConstOverrides& overrides, std::string_view structure) {
  LoadedScenario out = Builder(base.source, overrides, structure, base.scenario.name).build();
  out.scenario.name = base.scenario.name;
  out.description = base.description;
  return out;
}

}  // namespace metallab::cli
