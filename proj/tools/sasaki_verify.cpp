// sasaki-verify: command-line front end for the verification suites.
//
// Exit codes: 0 all checks pass, 1 some check failed (report still written),
// 2 usage, parameter or parse error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sasaki/suites.hpp"

namespace fs = std::filesystem;
using namespace sasaki;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

const char* kCsvHelp = R"(Outputs (written to --out-dir, default $SASAKI_OUT_DIR or .):
  <name>.json              report: schema_version, name, config, checks[{name,
                           max_residual, mean_residual, tolerance, pass, note?}],
                           measurements?, seed, pass, caveats?, timing_seconds
  <name>_surface.csv       u,v,K,H_norm,a,pmc,gauss,codazzi,ricci
  <name>_q.csv             u,v,re_q1,im_q1,re_q2,im_q2,abs_dbar_q1,abs_dbar_q2
                           (d-bar empty on boundary nodes)
  <name>_gamma1.csv,       s,x1..xd,kappa1..kappaK,eta   (eta = eta(gamma'))
  <name>_gamma2.csv, helix_curve.csv
  theorem5_scan.csv        c,t,P
Every subcommand accepts --config FILE.json whose keys are long option names
without dashes; flags on the command line take precedence.)";

const std::vector<std::string> kModelNames{"standard_sphere", "deformed_sphere", "heisenberg", "ball_times_line"};

struct Common {
  std::string out_dir = ".";
  std::string report;  // explicit report path
  std::string config;  // consumed before parsing
  bool no_timing = false;
  bool no_csv = false;
};

struct ModelOptions {
  std::string kind = "heisenberg";
  int n = 1;
  double a = 1.0;
  double k = -4.0;
  double perturb = 0.0;

  ModelSelection selection() const {
    ModelSelection s;
    s.kind = parse_model_kind(kind);
    s.n = n;
    s.params.a = a;
    s.params.k = k;
    s.params.perturbation = perturb;
    return s;
  }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out-dir", c.out_dir, "output directory")->envname("SASAKI_OUT_DIR");
  sub->add_option("--report", c.report, "report path (default <out-dir>/<name>.json)");
  sub->add_option("--config", c.config, "JSON scenario config");
  sub->add_flag("--no-timing", c.no_timing, "omit timing_seconds (byte-identical reports)");
  sub->add_flag("--no-csv", c.no_csv, "skip CSV grids");
}

void add_model(CLI::App* sub, ModelOptions& m, bool perturb) {
  sub->add_option("--model", m.kind, "model kind")->check(CLI::IsMember(kModelNames))->capture_default_str();
  sub->add_option("--n", m.n, "complex dimension (model is 2n+1 dimensional)")->check(CLI::Range(1, 7))
      ->capture_default_str();
  sub->add_option("--a", m.a, "deformed_sphere parameter, c = 4/a - 3")->capture_default_str();
  sub->add_option("--k", m.k, "ball_times_line curvature, c = k - 3")->capture_default_str();
  if (perturb) sub->add_option("--perturb", m.perturb, "metric bump amplitude (detector runs)");
}

std::string path_in(const Common& c, const std::string& file) { return (fs::path(c.out_dir) / file).string(); }

int finish(const VerificationReport& R, const Common& c, const std::string& name) {
  const std::string path = c.report.empty() ? path_in(c, name + ".json") : c.report;
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << to_json(R, !c.no_timing).dump(2) << '\n';
  std::cout << R.name << ": " << (R.all_pass() ? "PASS" : "FAIL") << " (" << R.checks.size() << " checks)";
  const auto failed = R.failures();
  if (!failed.empty()) {
    std::cout << ", failed:";
    for (const auto& f : failed) std::cout << ' ' << f;
  }
  std::cout << "\nreport: " << path << '\n';
  for (const auto& cv : R.caveats) std::cout << "caveat: " << cv << '\n';
  return R.all_pass() ? kPass : kFail;
}

void prepare_out_dir(const Common& c) { fs::create_directories(c.out_dir); }

/// Scalar JSON values as command-line tokens; arrays are comma-joined.
std::string json_token(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : ",") + json_token(e);
    return s;
  }
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  return v.dump();
}

/// Splices `--config FILE` keys into argv for options not given explicitly.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) file = args[i].substr(9);
  }
  if (file.empty()) return args;
  std::ifstream is(file);
  if (!is) throw ParameterError("cannot read config " + file);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError("config " + file + ": " + e.what());
  }
  if (!j.is_object()) throw ParameterError("config " + file + " must be a JSON object");
  auto given = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  for (const auto& [key, value] : j.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    args.push_back(flag);
    args.push_back(json_token(value));
  }
  return args;
}

std::string caret_line(const std::string& text, std::size_t pos) {
  return "  " + text + "\n  " + std::string(std::min(pos, text.size()), ' ') + "^";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of pmc surfaces in Sasakian space forms", "sasaki-verify"};
  app.footer(kCsvHelp);
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // verify-model
  Common c_model;
  ModelOptions m_model;
  ModelSuiteConfig model_cfg;
  auto* verify_model_cmd = app.add_subcommand("verify-model", "structure, curvature and phi-symmetry residuals");
  add_common(verify_model_cmd, c_model);
  add_model(verify_model_cmd, m_model, true);
  verify_model_cmd->add_option("--points", model_cfg.points, "random sample points")->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify_model_cmd->add_option("--phi-points", model_cfg.phi_symmetry_points, "points for the phi-symmetry check")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  verify_model_cmd->add_option("--directions", model_cfg.directions, "horizontal directions per point")
      ->check(CLI::Range(2, 1000))->capture_default_str();
  verify_model_cmd->add_option("--seed", model_cfg.seed)->capture_default_str();
  verify_model_cmd->add_option("--structure-tol", model_cfg.structure_tol)->capture_default_str();
  verify_model_cmd->add_option("--curvature-tol", model_cfg.curvature_tol)->capture_default_str();
  verify_model_cmd->add_option("--phi-symmetry-tol", model_cfg.phi_symmetry_tol)->capture_default_str();
  verify_model_cmd->add_option("--sectional-tol", model_cfg.sectional_tol)->capture_default_str();

  // theorem2
  Common c_t2;
  Theorem2Config t2;
  t2.grid = 64;
  auto* t2_cmd = app.add_subcommand("theorem2", "flat pmc product surface in a 7-dimensional space form");
  t2_cmd->set_help_flag("--help", "Print this help message and exit");  // --h is the mean curvature
  add_common(t2_cmd, c_t2);
  t2_cmd->add_option("--c", t2.c, "phi-sectional curvature")->capture_default_str();
  t2_cmd->add_option("--h", t2.h, "|H| > 0")->check(CLI::PositiveNumber)->capture_default_str();
  t2_cmd->add_option("--grid", t2.grid, "nodes per axis")->check(CLI::Range(3, 4096))->capture_default_str();
  t2_cmd->add_option("--extent", t2.extent, "patch side length")->check(CLI::PositiveNumber)->capture_default_str();
  t2_cmd->add_option("--substeps", t2.substeps, "RK4 steps per cell, 0 = automatic")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  t2_cmd->add_option("--max-step", t2.max_step, "RK4 step bound when automatic")->check(CLI::PositiveNumber)
      ->capture_default_str();
  t2_cmd->add_option("--a-scale", t2.a_scale, "scale a in the u-equations (detector runs)")->capture_default_str();
  t2_cmd->add_option("--holomorphicity", t2.holomorphicity_grids, "extra grids for the d-bar study, e.g. 32,64,128")
      ->delimiter(',');
  t2_cmd->add_option("--grid-tol", t2.grid_tol)->capture_default_str();
  t2_cmd->add_option("--point-tol", t2.point_tol)->capture_default_str();
  t2_cmd->add_option("--curvature-tol", t2.curvature_tol)->capture_default_str();
  t2_cmd->add_option("--dbar-tol", t2.dbar_tol)->capture_default_str();
  t2_cmd->add_option("--seed", t2.seed)->capture_default_str();

  // hopf-cylinder
  Common c_hopf;
  ModelOptions m_hopf;
  HopfSuiteConfig hopf;
  auto* hopf_cmd = app.add_subcommand("hopf-cylinder", "preimage of a base Frenet curve under the fibration");
  add_common(hopf_cmd, c_hopf);
  add_model(hopf_cmd, m_hopf, false);
  hopf_cmd->add_option("--kappa", hopf.kappa, "base curvature")->check(CLI::NonNegativeNumber)->capture_default_str();
  hopf_cmd->add_option("--tau", hopf.tau, "complex torsion of the base curve")->check(CLI::IsMember({-1, 0, 1}))
      ->capture_default_str();
  hopf_cmd->add_option("--amplitude", hopf.amplitude, "kappa(s) = kappa + amplitude sin(s)")->capture_default_str();
  hopf_cmd->add_option("--grid", hopf.grid)->check(CLI::Range(3, 1024))->capture_default_str();
  hopf_cmd->add_option("--extent", hopf.extent)->check(CLI::PositiveNumber)->capture_default_str();
  hopf_cmd->add_option("--substeps", hopf.substeps)->check(CLI::PositiveNumber)->capture_default_str();

  // helix
  Common c_helix;
  ModelOptions m_helix;
  m_helix.n = 2;
  HelixConfig helix;
  auto* helix_cmd = app.add_subcommand("helix", "Frenet curve synthesis and curvature recovery");
  add_common(helix_cmd, c_helix);
  add_model(helix_cmd, m_helix, false);
  helix_cmd->add_option("--curvatures", helix.curvatures, "kappa_1,...,kappa_{r-1}")->delimiter(',')
      ->capture_default_str();
  helix_cmd->add_option("--length", helix.length)->check(CLI::PositiveNumber)->capture_default_str();
  helix_cmd->add_option("--steps-per-unit", helix.steps_per_unit)->check(CLI::Range(1000, 1000000))
      ->capture_default_str();
  helix_cmd->add_option("--tol", helix.tol)->capture_default_str();

  // theorem5-scan
  Common c_t5;
  double c_min = -50.0, c_max = 0.999;
  int c_steps = 100, t_steps = 100;
  double max_tol = -14.0;
  auto* t5_cmd = app.add_subcommand("theorem5-scan", "sign of (1-c)t^4 + (c-5)t^2 - 16 for c < 1, t in (0,1)");
  add_common(t5_cmd, c_t5);
  t5_cmd->add_option("--c-min", c_min)->capture_default_str();
  t5_cmd->add_option("--c-max", c_max)->capture_default_str();
  t5_cmd->add_option("--c-steps", c_steps)->check(CLI::PositiveNumber)->capture_default_str();
  t5_cmd->add_option("--t-steps", t_steps)->check(CLI::PositiveNumber)->capture_default_str();
  t5_cmd->add_option("--max-tol", max_tol, "grid maximum must stay below this")->capture_default_str();

  // surface
  Common c_surf;
  ModelOptions m_surf;
  SurfaceSuiteConfig surf;
  std::vector<double> u_range{0.0, 1.0}, v_range{0.0, 1.0};
  auto* surf_cmd = app.add_subcommand("surface", "user immersion (u, v) -> chart coordinates");
  add_common(surf_cmd, c_surf);
  add_model(surf_cmd, m_surf, false);
  surf_cmd->add_option("--immersion", surf.immersion,
                       "';'-separated expressions in u, v with + - * / ^, sin cos tan exp log sqrt, pi")
      ->required();
  surf_cmd->add_option("--u-range", u_range, "u0,u1")->delimiter(',')->expected(2)->capture_default_str();
  surf_cmd->add_option("--v-range", v_range, "v0,v1")->delimiter(',')->expected(2)->capture_default_str();
  surf_cmd->add_option("--grid", surf.grid)->check(CLI::Range(2, 1024))->capture_default_str();
  surf_cmd->add_option("--expect", surf.expect, "properties to check: integral,anti_invariant,pmc,pseudo_umbilical,minimal")
      ->delimiter(',')->check(CLI::IsMember(surface_properties()));

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*verify_model_cmd) {
      prepare_out_dir(c_model);
      const ModelSelection sel = m_model.selection();
      auto R = verify_model(sel.make(), model_cfg);
      R.config = [&] {
        auto j = sel.to_json();
        for (const auto& [k, v] : R.config.items())
          if (!j.contains(k)) j[k] = v;
        return j;
      }();
      return finish(R, c_model, "verify_model");
    }
    if (*t2_cmd) {
      prepare_out_dir(c_t2);
      theorem2_curvatures(t2.c, t2.h);  // feasibility before any work
      Theorem2Artifacts art;
      const auto R = verify_theorem2(t2, &art);
      if (!c_t2.no_csv) {
        if (art.geometry) write_surface_csv(*art.geometry, path_in(c_t2, "theorem2_surface.csv"));
        if (art.q && art.patch) write_q_csv(*art.q, *art.patch, path_in(c_t2, "theorem2_q.csv"));
        const ModelSpace m = theorem2_model(t2.c);
        if (art.gamma1) write_curve_csv(*art.gamma1, m, path_in(c_t2, "theorem2_gamma1.csv"));
        if (art.gamma2) write_curve_csv(*art.gamma2, m, path_in(c_t2, "theorem2_gamma2.csv"));
      }
      return finish(R, c_t2, "theorem2");
    }
    if (*hopf_cmd) {
      prepare_out_dir(c_hopf);
      HopfArtifacts art;
      const auto R = verify_hopf_cylinder(m_hopf.selection().make(), hopf, &art);
      if (!c_hopf.no_csv) {
        if (art.geometry) write_surface_csv(*art.geometry, path_in(c_hopf, "hopf_cylinder_surface.csv"));
        if (art.q && art.patch) write_q_csv(*art.q, *art.patch, path_in(c_hopf, "hopf_cylinder_q.csv"));
      }
      return finish(R, c_hopf, "hopf_cylinder");
    }
    if (*helix_cmd) {
      prepare_out_dir(c_helix);
      const ModelSpace m = m_helix.selection().make();
      CurveSample curve;
      const auto R = verify_helix(m, helix, &curve);
      if (!c_helix.no_csv) write_curve_csv(curve, m, path_in(c_helix, "helix_curve.csv"));
      return finish(R, c_helix, "helix");
    }
    if (*t5_cmd) {
      prepare_out_dir(c_t5);
      const auto R = verify_theorem5_scan(c_min, c_max, c_steps, t_steps, max_tol);
      if (!c_t5.no_csv) {
        std::ofstream os(path_in(c_t5, "theorem5_scan.csv"));
        if (!os) throw Error("cannot write theorem5_scan.csv");
        os.precision(17);
        os << "c,t,P\n";
        for (int i = 0; i < c_steps; ++i) {
          const double c = c_steps == 1 ? c_min : c_min + (c_max - c_min) * i / (c_steps - 1);
          for (int j = 1; j <= t_steps; ++j) {
            const double t = static_cast<double>(j) / (t_steps + 1);
            os << c << ',' << t << ',' << theorem5_polynomial(c, t) << '\n';
          }
        }
      }
      return finish(R, c_t5, "theorem5_scan");
    }
    if (*surf_cmd) {
      prepare_out_dir(c_surf);
      surf.u0 = u_range[0];
      surf.u1 = u_range[1];
      surf.v0 = v_range[0];
      surf.v1 = v_range[1];
      std::optional<SurfaceGeometry> G;
      std::shared_ptr<const SurfacePatch> patch;
      const auto R = verify_surface(m_surf.selection().make(), surf, &G, &patch);
      if (!c_surf.no_csv && G) write_surface_csv(*G, path_in(c_surf, "surface_surface.csv"));
      return finish(R, c_surf, "surface");
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n' << caret_line(surf.immersion, e.position()) << '\n';
    return kUsage;
  } catch (const InfeasibleBranchError& e) {
    std::cerr << "infeasible parameters: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
