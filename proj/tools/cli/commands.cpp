#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "builtins.hpp"
#include "metallab/slant.hpp"

#ifndef METALLAB_VERSION
#define METALLAB_VERSION "0.0.0"
#endif

namespace metallab::cli {

namespace {

constexpr double kReferenceTol = 1e-10;

/// 17 significant digits, as used in CSV and text tables.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Document json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Document json_vec(const Vec& v) {
  Document a = Document::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

Document json_mat(const Mat& m) {
  Document a = Document::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(json_vec(m.row(i)));
  return a;
}

std::string kind_name(StructureKind k) {
  switch (k) {
    case StructureKind::DiagonalPattern: return "pattern";
    case StructureKind::ProductInduced: return "product";
    case StructureKind::Custom: return "matrix";
  }
  return "?";
}

ImmersionScenario with_sampling(const LoadedScenario& ls, const RunOptions& opt) {
  ImmersionScenario scn = ls.scenario;
  scn.sampling.seed = resolve_seed(opt, scn.sampling.seed);
  if (opt.samples) scn.sampling.count = *opt.samples;
  return scn;
}

Document header(const std::string& command, const LoadedScenario& ls, const ImmersionScenario& scn) {
  const auto& prm = scn.structure.params();
  Document d = Document::object();
  d["engine"] = {{"name", "metallic-lab"}, {"version", METALLAB_VERSION}};
  d["command"] = command;
  Document s = Document::object();
  s["name"] = scn.name;
  s["description"] = ls.description;
  s["dim"] = scn.dim();
  s["ambient_dim"] = scn.ambient_dim();
  s["params"] = scn.param_names;
  Document consts = Document::object();
  for (const auto& [k, v] : scn.extra_consts) consts[k] = json_number(v);
  s["consts"] = consts;
  s["structure"] = {{"name", ls.structure_name},
                    {"kind", kind_name(scn.structure.kind())},
                    {"p", prm.p},
                    {"q", prm.q},
                    {"sigma", prm.sigma},
                    {"sigma_bar", prm.sigma_bar}};
  d["scenario"] = s;
  d["seed"] = scn.sampling.seed;
  d["samples"] = scn.sampling.count;
  return d;
}

Document slant_json(const SlantReport& r) {
  return {{"distribution", r.distribution},
          {"rank", r.rank},
          {"verdict", to_string(r.verdict)},
          {"mean_theta", json_number(r.mean_theta)},
          {"mean_cos_theta", json_number(r.mean_cos_theta)},
          {"max_deviation", json_number(r.max_deviation)},
          {"lambda_fit", json_number(r.lambda_fit)},
          {"lambda_residual", json_number(r.lambda_residual)},
          {"directions", r.samples.size()},
          {"diagnostic", r.diagnostic}};
}

std::string dims_text(const HemiSlantDims& d) {
  return "(" + std::to_string(d.slant) + "," + std::to_string(d.perp) + "," + std::to_string(d.mu) + ")";
}

}  // namespace

std::uint64_t resolve_seed(const RunOptions& opt, std::uint64_t scenario_seed) {
  if (opt.seed) return *opt.seed;
  if (const char* env = std::getenv("METALLIC_LAB_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || env[0] == '-') throw ScenarioError("METALLIC_LAB_SEED must be a nonnegative integer");
    return v;
  }
  return scenario_seed;
}

int cmd_analyze(const LoadedScenario& ls, const RunOptions& opt, std::ostream& out) {
  const ImmersionScenario scn = with_sampling(ls, opt);
  const HemiSlantVerdict verdict = classify(scn);

  std::vector<SlantReport> reports = verdict.reports;
  for (const auto& d : scn.distributions) {
    if (d.name != "D1" && d.name != "D2") reports.push_back(slant_report(scn, d));
  }

  const Vec ref_point = scn.sample_points(1, scn.sampling.seed).front();
  const PointGeometry geom = frame_at(scn, ref_point);
  std::optional<NormalSplit> split;
  if (const auto* d1 = scn.distribution("D1"); d1 != nullptr) {
    if (const auto* d2 = scn.distribution("D2"); d2 != nullptr) {
      const InducedOps ops = induced_ops(geom, scn.structure);
      const DistributionFrame f1(geom, distribution_vectors(scn, *d1, ref_point));
      const DistributionFrame f2(geom, distribution_vectors(scn, *d2, ref_point));
      split = normal_split(geom, ops, f1, f2);
    }
  }
  const double computed_cos = !verdict.reports.empty() ? verdict.reports.front().mean_cos_theta : std::nan("");

  const int code = verdict.classification == Classification::Unclassified ? kExitFailure : kExitOk;
  const std::string cls = to_string(verdict.classification);

  if (opt.format == Format::Json) {
    Document d = header("analyze", ls, scn);
    Document v = Document::object();
    v["classification"] = cls;
    v["theta"] = verdict.theta ? json_number(*verdict.theta) : Document(nullptr);
    v["cos_theta"] = verdict.theta ? json_number(std::cos(*verdict.theta)) : Document(nullptr);
    if (verdict.theta_second) v["theta_second"] = json_number(*verdict.theta_second);
    v["dims"] = {verdict.dims.slant, verdict.dims.perp, verdict.dims.mu};
    v["orthogonality_residual"] = json_number(verdict.orthogonality_residual);
    v["anti_invariance_residual"] = json_number(verdict.anti_invariance_residual);
    v["diagnostics"] = verdict.diagnostics;
    d["verdict"] = v;
    Document sl = Document::array();
    for (const auto& r : reports) sl.push_back(slant_json(r));
    d["slant"] = sl;
    Document gm = Document::object();
    gm["point"] = json_vec(ref_point);
    gm["induced_metric"] = json_mat(geom.induced_metric);
    Vec norms;
    for (std::size_t i = 0; i < geom.dim(); ++i) norms.push_back(geom.induced_metric(i, i));
    gm["frame_norms_sq"] = json_vec(norms);
    d["geometry"] = gm;
    if (split) {
      d["normal_split"] = {{"dim_n_slant", split->dim_n_slant},
                           {"dim_n_perp", split->dim_n_perp},
                           {"dim_mu", split->dim_mu},
                           {"orthogonality_residual", json_number(split->orthogonality_residual)},
                           {"mu_invariance_residual", json_number(split->mu_invariance_residual)}};
    }
    Document refs = Document::array();
    for (const auto& r : ls.references) {
      const double dev = computed_cos - std::fabs(r.value);
      refs.push_back({{"name", r.name},
                      {"expression", r.source},
                      {"value", json_number(r.value)},
                      {"computed", json_number(computed_cos)},
                      {"deviation", json_number(dev)},
                      {"matches", std::fabs(dev) < kReferenceTol}});
    }
    d["references"] = refs;
    out << d.dump(2) << '\n';
    return code;
  }

  if (opt.format == Format::Csv) {
    out << "key,value\n";
    out << "scenario," << csv_field(scn.name) << '\n';
    out << "classification," << csv_field(cls) << '\n';
    out << "theta," << (verdict.theta ? num(*verdict.theta) : "") << '\n';
    out << "cos_theta," << (verdict.theta ? num(std::cos(*verdict.theta)) : "") << '\n';
    out << "dim_slant," << verdict.dims.slant << '\n';
    out << "dim_perp," << verdict.dims.perp << '\n';
    out << "dim_mu," << verdict.dims.mu << '\n';
    for (std::size_t i = 0; i < geom.dim(); ++i)
      for (std::size_t j = 0; j < geom.dim(); ++j)
        out << "g_" << i << j << ',' << num(geom.induced_metric(i, j)) << '\n';
    for (const auto& r : reports) {
      out << r.distribution << ".verdict," << to_string(r.verdict) << '\n';
      out << r.distribution << ".mean_theta," << num(r.mean_theta) << '\n';
      out << r.distribution << ".mean_cos_theta," << num(r.mean_cos_theta) << '\n';
      out << r.distribution << ".lambda_fit," << num(r.lambda_fit) << '\n';
    }
    for (const auto& r : ls.references) {
      out << "reference." << r.name << ',' << num(r.value) << '\n';
      out << "reference." << r.name << ".deviation," << num(computed_cos - std::fabs(r.value)) << '\n';
    }
    return code;
  }

  const auto& prm = scn.structure.params();
  out << "scenario " << scn.name << " (structure " << ls.structure_name << ", p=" << prm.p << ", q=" << prm.q
      << ")\n";
  out << "classification: " << cls;
  if (verdict.theta) out << ", theta = " << short_num(*verdict.theta) << " rad (cos " << short_num(std::cos(*verdict.theta)) << ")";
  if (verdict.theta_second) out << ", second angle " << short_num(*verdict.theta_second) << " rad";
  out << ", dims " << dims_text(verdict.dims) << '\n';
  for (const auto& dg : verdict.diagnostics) out << "  note: " << dg << '\n';
  out << "induced metric at " << json_vec(ref_point).dump() << ": " << json_mat(geom.induced_metric).dump() << '\n';
  for (const auto& r : reports) {
    out << r.distribution << ": rank " << r.rank << ", " << to_string(r.verdict);
    if (r.verdict != SlantKind::Empty) {
      out << ", theta " << short_num(r.mean_theta) << " (spread " << short_num(r.max_deviation) << "), lambda "
          << short_num(r.lambda_fit) << " (residual " << short_num(r.lambda_residual) << ")";
    }
    out << '\n';
  }
  if (split) {
    out << "normal split: N(D1) " << split->dim_n_slant << ", N(D2) " << split->dim_n_perp << ", mu "
        << split->dim_mu << " (orthogonality " << short_num(split->orthogonality_residual) << ", mu invariance "
        << short_num(split->mu_invariance_residual) << ")\n";
  }
  for (const auto& r : ls.references) {
    const double dev = computed_cos - std::fabs(r.value);
    out << "reference " << r.name << " = " << short_num(r.value) << ", deviation " << short_num(dev)
        << (std::fabs(dev) < kReferenceTol ? " (matches)" : " (DIFFERS)") << '\n';
  }
  return code;
}

int cmd_verify(const LoadedScenario& ls, const RunOptions& opt, std::ostream& out) {
  const ImmersionScenario scn = with_sampling(ls, opt);
  const std::vector<CheckId> ids = opt.checks.empty() ? ls.checks : parse_check_list(opt.checks);
  const std::vector<CheckReport> reports = run_suite(scn, ids, scn.sampling.count, scn.sampling.seed);

  std::size_t passed = 0, failed = 0, skipped = 0;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::Pass) ++passed;
    if (r.verdict == Verdict::Fail) ++failed;
    if (r.verdict == Verdict::Skipped) ++skipped;
  }
  const int code = failed > 0 ? kExitFailure : kExitOk;

  if (opt.format == Format::Json) {
    Document d = header("verify", ls, scn);
    Document arr = Document::array();
    for (const auto& r : reports) {
      const auto id = parse_check_id(r.check_id);
      Document c = {{"id", r.check_id},
                    {"formula", id ? std::string(check_info(*id).formula) : std::string()},
                    {"verdict", to_string(r.verdict)},
                    {"samples", r.samples},
                    {"applicable", r.applicable},
                    {"max_residual", json_number(r.max_residual)},
                    {"mean_residual", json_number(r.mean_residual)},
                    {"tolerance", r.tolerance},
                    {"note", r.note}};
      if (r.worst) {
        c["worst"] = {{"sample", r.worst->sample_index}, {"point", json_vec(r.worst->point)}, {"detail", r.worst->detail}};
      }
      arr.push_back(std::move(c));
    }
    d["checks"] = arr;
    d["summary"] = {{"passed", passed}, {"failed", failed}, {"skipped", skipped}};
    out << d.dump(2) << '\n';
    return code;
  }

  if (opt.format == Format::Csv) {
    out << "check_id,verdict,samples,applicable,max_residual,mean_residual,tolerance,note\n";
    for (const auto& r : reports) {
      out << r.check_id << ',' << to_string(r.verdict) << ',' << r.samples << ',' << r.applicable << ','
          << num(r.max_residual) << ',' << num(r.mean_residual) << ',' << num(r.tolerance) << ','
          << csv_field(r.note) << '\n';
    }
    return code;
  }

  out << "scenario " << scn.name << ": " << reports.size() << " checks, " << scn.sampling.count
      << " samples, seed " << scn.sampling.seed << '\n';
  for (const auto& r : reports) {
    char line[200];
    std::snprintf(line, sizeof line, "  %-24s %-7s max %-12s tol %-8s %zu/%zu", r.check_id.c_str(),
                  to_string(r.verdict).c_str(), short_num(r.max_residual).c_str(), short_num(r.tolerance).c_str(),
                  r.applicable, r.samples);
    out << line;
    if (!r.note.empty()) out << "  " << r.note;
    out << '\n';
    if (r.verdict == Verdict::Fail && r.worst) {
      out << "      worst sample " << r.worst->sample_index << " at " << json_vec(r.worst->point).dump() << ": "
          << r.worst->detail << '\n';
    }
  }
  out << "passed " << passed << ", failed " << failed << ", skipped " << skipped << '\n';
  return code;
}

int cmd_angle_sweep(const LoadedScenario& ls, const RunOptions& opt, std::ostream& out) {
  if (opt.var.empty()) throw ScenarioError("angle-sweep needs --var");
  if (!ls.scenario.extra_consts.contains(opt.var))
    throw ScenarioError("'" + opt.var + "' is not a declared constant of " + ls.scenario.name);
  if (ls.scenario.distribution("D1") == nullptr) throw ScenarioError("angle-sweep needs a distribution D1");

  const std::string grid = opt.grid.empty() ? "" : opt.grid;
  std::vector<double> values;
  if (grid.empty()) {
    values.push_back(ls.scenario.extra_consts.find(opt.var)->second);
  } else {
    std::vector<std::string> parts;
    std::stringstream ss(grid);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw ScenarioError("--grid must be LO:HI:COUNT");
    Constants c = ls.scenario.constants();
    std::vector<std::string> names;
    for (const auto& [k, v] : c) names.push_back(k);
    auto value_of = [&](const std::string& s) {
      try {
        return eval_value(parse(s, {}, names), c);
      } catch (const Error& e) {
        throw ScenarioError("--grid: " + std::string(e.what()));
      }
    };
    const double lo = value_of(parts[0]);
    const double hi = value_of(parts[1]);
    char* end = nullptr;
    const long n = std::strtol(parts[2].c_str(), &end, 10);
    if (*end != '\0' || n < 1) throw ScenarioError("--grid COUNT must be a positive integer");
    for (long i = 0; i < n; ++i) values.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  }
  if (const ConstDomain* dom = ls.const_domain(opt.var)) {
    for (double v : values) {
      if (v < dom->lo - 1e-12 || v > dom->hi + 1e-12) {
        throw ScenarioError("grid value " + num(v) + " outside the domain of " + opt.var + " [" + num(dom->lo) +
                            ", " + num(dom->hi) + "]");
      }
    }
  }

  struct Row {
    double var, cos_theta, theta;
    std::vector<Reference> refs;
  };
  std::vector<Row> rows;
  for (double v : values) {
    const LoadedScenario at = rebuild(ls, {{opt.var, v}}, ls.structure_name);
    ImmersionScenario scn = with_sampling(at, opt);
    const std::size_t count = opt.samples ? *opt.samples : std::min<std::size_t>(scn.sampling.count, 16);
    const SlantReport r = slant_report(scn, *scn.distribution("D1"), scn.sample_points(count, scn.sampling.seed));
    rows.push_back({v, r.mean_cos_theta, r.mean_theta, at.references});
  }

  if (opt.format == Format::Json) {
    ImmersionScenario scn = with_sampling(ls, opt);
    Document d = header("angle-sweep", ls, scn);
    d["var"] = opt.var;
    Document arr = Document::array();
    for (const auto& r : rows) {
      Document row = {{opt.var, r.var}, {"cos_theta", json_number(r.cos_theta)}, {"theta", json_number(r.theta)}};
      Document refs = Document::object();
      for (const auto& ref : r.refs) refs[ref.name] = json_number(ref.value);
      row["references"] = refs;
      arr.push_back(std::move(row));
    }
    d["rows"] = arr;
    out << d.dump(2) << '\n';
    return kExitOk;
  }
  if (opt.format == Format::Csv) {
    out << opt.var << ",cos_theta,theta\n";
    for (const auto& r : rows) out << num(r.var) << ',' << num(r.cos_theta) << ',' << num(r.theta) << '\n';
    return kExitOk;
  }
  out << opt.var << "  cos_theta  theta\n";
  for (const auto& r : rows) {
    out << short_num(r.var) << "  " << short_num(r.cos_theta) << "  " << short_num(r.theta);
    for (const auto& ref : r.refs) out << "  " << ref.name << "=" << short_num(ref.value);
    out << '\n';
  }
  return kExitOk;
}

int cmd_builtin_list(const RunOptions& opt, std::ostream& out) {
  if (opt.format == Format::Json) {
    Document arr = Document::array();
    for (const auto& b : builtin_list()) arr.push_back({{"name", b.name}, {"summary", b.summary}});
    out << arr.dump(2) << '\n';
  } else if (opt.format == Format::Csv) {
    out << "name,summary\n";
    for (const auto& b : builtin_list()) out << b.name << ',' << csv_field(std::string(b.summary)) << '\n';
  } else {
    for (const auto& b : builtin_list()) out << b.name << "  " << b.summary << '\n';
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hemi-slant submanifolds of metallic Riemannian manifolds: analysis and identity checks",
               "metallic-lab"};
  app.set_version_flag("--version", METALLAB_VERSION);
  app.require_subcommand(1, 1);

  std::string target, scenario_path, builtin_name, format = "text", structure;
  std::string checks, var, grid;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;

  auto add_source = [&](CLI::App* sc) {
    sc->add_option("target", target, "Builtin name or scenario file");
    sc->add_option("--scenario", scenario_path, "Scenario file");
    sc->add_option("--builtin", builtin_name, "Builtin scenario name");
    sc->add_option("--structure", structure, "Structure: default or a name under [structures]");
    sc->add_option("--seed", seed, "Sampling seed");
    sc->add_option("--samples", samples, "Sample count")->check(CLI::PositiveNumber);
  };
  auto add_format = [&](CLI::App* sc) {
    sc->add_option("--format", format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));
  };

  CLI::App* analyze = app.add_subcommand("analyze", "Classify the scenario and report slant angles");
  add_source(analyze);
  add_format(analyze);
  CLI::App* verify = app.add_subcommand("verify", "Run identity checks");
  add_source(verify);
  add_format(verify);
  verify->add_option("--checks", checks, "Comma-separated check ids or 'all'");
  CLI::App* sweep = app.add_subcommand("angle-sweep", "Slant angle of D1 over a grid of a constant");
  add_source(sweep);
  add_format(sweep);
  sweep->add_option("--var", var, "Constant to vary")->required();
  sweep->add_option("--grid", grid, "LO:HI:COUNT");
  CLI::App* list = app.add_subcommand("builtin-list", "List builtin scenarios");
  add_format(list);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  RunOptions opt;
  opt.format = format == "json" ? Format::Json : format == "csv" ? Format::Csv : Format::Text;
  opt.samples = samples;
  opt.seed = seed;
  opt.checks = checks;
  opt.var = var;
  opt.grid = grid;

  try {
    if (list->parsed()) return cmd_builtin_list(opt, out);

    const int sources = !target.empty() + !scenario_path.empty() + !builtin_name.empty();
    if (sources != 1) throw ScenarioError("give exactly one of NAME, --scenario PATH, --builtin NAME");
    LoadedScenario ls;
    if (!builtin_name.empty()) {
      ls = load_builtin(builtin_name);
    } else if (!scenario_path.empty()) {
      ls = load_scenario_file(scenario_path);
    } else if (is_builtin(target)) {
      ls = load_builtin(target);
    } else {
      ls = load_scenario_file(target);
    }
    if (!structure.empty() && structure != ls.structure_name) ls = rebuild(ls, {}, structure);
    // Resolve early so a malformed environment seed is an input error.
    (void)resolve_seed(opt, ls.scenario.sampling.seed);
    if (!opt.checks.empty()) (void)parse_check_list(opt.checks);

    if (analyze->parsed()) return cmd_analyze(ls, opt, out);
    if (verify->parsed()) return cmd_verify(ls, opt, out);
    return cmd_angle_sweep(ls, opt, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace metallab::cli
