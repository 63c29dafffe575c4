#include "dslab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "dslab/error.hpp"
#include "dslab/flow.hpp"
#include "dslab/hadamard.hpp"
#include "dslab/operator.hpp"
#include "dslab/powers.hpp"

namespace dslab {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump_rec(const json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(indent * (depth + 1), ' ') : "";
  const std::string pad_end = indent > 0 ? std::string(indent * depth, ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_rec(it.value(), indent, depth + 1, out);
      }
      out += nl + pad_end + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) {
          out += ",";
          out += nl;
        }
        out += pad;
        dump_rec(j[i], indent, depth + 1, out);
      }
      out += nl + pad_end + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt(v) : "null";
      return;
    }
    default: out += j.dump();
  }
}

json cjson(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

std::string csv_join(const std::vector<std::string>& cols) {
  std::string s;
  for (size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
  return s + "\n";
}

std::string end_name(End e) { return e == End::Future ? "future" : "past"; }

FlowParams flow_params(const RunConfig& cfg) {
  FlowParams prm;
  prm.omega_R = cfg.omega_r;
  prm.lambda = cplx(cfg.lambda_re, cfg.lambda_im);
  return prm;
}

TransportParams transport_params(const RunConfig& cfg) {
  TransportParams tp;
  tp.radius = cfg.radius;
  tp.rays = cfg.rays;
  tp.samples = cfg.samples;
  tp.full_grid = cfg.grid_csv;
  tp.seed = cfg.seed;
  return tp;
}

}  // namespace

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  return out + "\n";
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, p);
}

json run_flow(const RunConfig& cfg, Artifacts& art) {
  const SpacetimeModel m = cfg.spacetime_model();
  const SymbolVariant v = parse_variant(cfg.variant);
  const FlowParams prm = flow_params(cfg);
  const auto starts = random_characteristic_states(m, v, prm, cfg.ensemble, cfg.seed);

  std::vector<std::string> head{"id", "x0"};
  for (int i = 1; i <= m.n; ++i) head.push_back("x_prime_" + std::to_string(i));
  head.insert(head.end(), {"rho", "xi_hat0"});
  for (int i = 1; i <= m.n; ++i) head.push_back("xi_hat_prime_" + std::to_string(i));
  head.insert(head.end(), {"end", "component", "forward_label", "forward_time", "forward_min_x0", "backward_label",
                           "backward_time", "backward_min_x0"});
  std::string csv = csv_join(head);

  std::map<std::string, int> fwd_counts, bwd_counts;
  int max_time = 0, escaped_fwd = 0, escaped_bwd = 0;
  double max_constraint = 0.0, min_x0_fwd = 1e300, min_x0_bwd = 1e300;
  std::string plot;
  for (size_t id = 0; id < starts.size(); ++id) {
    const PhaseState& s = starts[id];
    const Trajectory f = integrate_bicharacteristic(m, s, v, prm, cfg.t_max, cfg.flow_tol);
    const Trajectory b = integrate_bicharacteristic(m, s, v, prm, -cfg.t_max, cfg.flow_tol);
    ++fwd_counts[f.terminal.name()];
    ++bwd_counts[b.terminal.name()];
    for (const Trajectory* t : {&f, &b}) {
      if (t->terminal.kind == FlowTerminal::MaxTime) ++max_time;
      max_constraint = std::max(max_constraint, t->max_constraint);
    }
    escaped_fwd += f.terminal.kind == FlowTerminal::Escaped;
    escaped_bwd += b.terminal.kind == FlowTerminal::Escaped;
    min_x0_fwd = std::min(min_x0_fwd, f.min_x0);
    min_x0_bwd = std::min(min_x0_bwd, b.min_x0);

    std::vector<std::string> row{std::to_string(id), fmt(s.x0)};
    for (double x : s.x_prime) row.push_back(fmt(x));
    row.push_back(fmt(s.rho));
    row.push_back(fmt(s.xi_hat0));
    for (double x : s.xi_hat_prime) row.push_back(fmt(x));
    row.insert(row.end(), {end_name(s.end), std::to_string(f.component), f.terminal.name(), fmt(f.time),
                           fmt(f.min_x0), b.terminal.name(), fmt(b.time), fmt(b.min_x0)});
    csv += csv_join(row);
    if (id == 0) {
      for (auto it = b.samples.rbegin(); it != b.samples.rend(); ++it) plot += fmt(it->t) + " " + fmt(it->state.x0) + "\n";
      for (const auto& smp : f.samples) plot += fmt(smp.t) + " " + fmt(smp.state.x0) + "\n";
    }
  }
  art.add("flow.csv", csv);
  if (cfg.emit_gnuplot) art.add("flow_x0.dat", "# t x0 (first start, backward then forward)\n" + plot);

  json j;
  j["trajectories"] = static_cast<int>(starts.size());
  j["forward_labels"] = fwd_counts;
  j["backward_labels"] = bwd_counts;
  j["max_time_count"] = max_time;
  j["escaped_forward"] = escaped_fwd;
  j["escaped_backward"] = escaped_bwd;
  j["max_constraint"] = max_constraint;
  j["min_x0_forward"] = min_x0_fwd;
  j["min_x0_backward"] = min_x0_bwd;
  j["csv"] = "flow.csv";
  return j;
}

json run_transport(const RunConfig& cfg, Artifacts& art) {
  const SpacetimeModel m = cfg.spacetime_model();
  const ChartPoint base = cfg.base_point();
  const TransportSolution sol = solve_transport(m, base, cfg.order, transport_params(cfg));
  const double R = scalar_curvature(m, base);
  json j;
  j["u_diag"] = sol.u_diag;
  j["convergence"] = {{"u_diag_coarse", sol.convergence.u_diag_coarse},
                      {"max_relative_drift", sol.convergence.max_relative_drift}};
  j["scalar_curvature"] = R;
  if (cfg.order >= 1) j["minus_R_over_6"] = -R / 6.0;
  j["rays"] = static_cast<int>(sol.chart.ray_directions.size());
  j["samples"] = sol.chart.samples_per_ray;
  if (cfg.grid_csv) {
    std::string csv = "k,ray,sample,t,u\n";
    for (size_t k = 0; k < sol.u.size(); ++k)
      for (size_t r = 0; r < sol.u[k].size(); ++r)
        for (size_t s = 0; s < sol.u[k][r].size(); ++s)
          csv += std::to_string(k) + "," + std::to_string(r) + "," + std::to_string(s) + "," +
                 fmt(s * sol.chart.step()) + "," + fmt(sol.u[k][r][s]) + "\n";
    art.add("transport_grid.csv", csv);
    j["grid_csv"] = "transport_grid.csv";
  }
  if (cfg.emit_gnuplot) {
    std::string plot = "# t u0 along the first ray\n";
    for (size_t s = 0; s < sol.u[0][0].size(); ++s) plot += fmt(s * sol.chart.step()) + " " + fmt(sol.u[0][0][s]) + "\n";
    art.add("transport_u0.dat", plot);
  }
  return j;
}

json run_residue(const RunConfig& cfg, Artifacts& art) {
  const SpacetimeModel m = cfg.spacetime_model();
  ResidueOptions opt;
  opt.m = cfg.m;
  opt.mu = cfg.mu;
  opt.sign = cfg.sign;
  opt.transport = transport_params(cfg);
  opt.transport.full_grid = false;
  const ResidueReport r = spectral_action_residue(m, cfg.base_point(), cfg.eps, opt);
  json j;
  j["residue_re"] = r.extrapolated.real();
  j["residue_im"] = r.extrapolated.imag();
  j["oracle_value"] = cjson(r.curvature_oracle);
  j["rel_err"] = r.rel_err;
  j["eps_sequence"] = r.eps_sequence;
  json per = json::array();
  for (size_t i = 0; i < r.residues.size(); ++i)
    per.push_back({{"eps", r.eps_sequence[i]}, {"re", r.residues[i].real()}, {"im", r.residues[i].imag()}});
  j["residues"] = per;
  j["extrapolation_error"] = r.extrapolation_error;
  j["alpha0"] = r.alpha0;
  j["m"] = r.m;
  j["sign"] = r.sign;
  j["u_diag"] = r.u_diag;
  j["scalar_curvature"] = r.scalar_curvature;
  j["transport_oracle"] = cjson(r.transport_oracle);
  j["transport_rel_err"] = r.transport_rel_err;
  j["sign_vs_curvature_form"] = r.sign_vs_curvature;
  j["sign_vs_transport_form"] = r.sign_vs_transport;
  j["branch"] = "(z - i eps)^(-alpha) with arg in (-3pi/2, pi/2]";
  if (cfg.emit_gnuplot) {
    std::string plot = "# eps Im(residue)\n";
    for (size_t i = 0; i < r.residues.size(); ++i) plot += fmt(r.eps_sequence[i]) + " " + fmt(r.residues[i].imag()) + "\n";
    art.add("residue_eps.dat", plot);
  }
  return j;
}

json run_contour(const RunConfig& cfg, Artifacts& art) {
  const ContourSpec spec = build_contour(cfg.epsilon, cfg.eta, cfg.C, cfg.c, cfg.quad_tol, cfg.n, cfg.x_right);
  json j;
  j["nodes"] = static_cast<int>(spec.z.size());
  j["t_cut"] = spec.t_cut;
  j["gauss_order"] = spec.order;
  j["cap_min_abs_imag"] = spec.cap_min_abs_imag();
  j["cap_min_distance_to_pole"] = spec.cap_min_distance_to_pole();
  j["cap_real_axis_crossing"] = spec.x_right;
  j["tail_envelope_ratio"] = spec.tail_envelope_ratio();
  const double zc = spec.x_right + 5.0;
  j["closed_loop_residual"] = std::abs(closed_loop_integral(spec, [zc](cplx z) { return 1.0 / ((z - zc) * (z - zc)); }));

  auto fail_entry = [](const Error& e) { return json{{"error", e.what()}}; };
  json grid = json::array();
  double max_err = 0.0;
  for (double a : cfg.alpha)
    for (double q : cfg.q) {
      try {
        const cplx v = scalar_power_via_contour(q, a, spec);
        const double e = std::abs(v - std::pow(cplx(q, -cfg.epsilon), -a));
        max_err = std::max(max_err, e);
        grid.push_back({{"alpha", a}, {"q", q}, {"value", cjson(v)}, {"error", e}});
      } catch (const Error& e) {
        grid.push_back(fail_entry(e));
      }
    }
  j["scalar_power"] = {{"max_error", max_err}, {"entries", grid}};

  json fk = json::array();
  double fk_err = 0.0;
  const double qk = 3.0;
  for (double a : {1.5, 2.3, 3.0})
    for (int k = 0; k <= 2; ++k) {
      const cplx lhs = scalar_power_via_contour(qk - cfg.mu, a, spec, k);
      const cplx rhs = fk_contour_coefficient(a, k) * complex_gamma(a + k) * std::pow(cplx(qk - cfg.mu, -cfg.epsilon), -a - k);
      fk_err = std::max(fk_err, std::abs(lhs - rhs));
      fk.push_back({{"alpha", a}, {"k", k}, {"coefficient", cjson(fk_contour_coefficient(a, k))}, {"error", std::abs(lhs - rhs)}});
    }
  j["fk_identity"] = {{"q", qk}, {"mu", cfg.mu}, {"max_error", fk_err}, {"entries", fk}};

  const ContourSpec alt =
      build_contour(cfg.epsilon, cfg.eta + 2.0, cfg.C + 1.0, 0.5 * cfg.c, 0.1 * cfg.quad_tol, cfg.n, cfg.x_right + 10.0);
  double dmax = 0.0;
  for (double q : cfg.q) dmax = std::max(dmax, std::abs(scalar_power_via_contour(q, 1.5, spec) - scalar_power_via_contour(q, 1.5, alt)));
  j["deformation_max_diff"] = dmax;

  const cplx closed = flat_diag_F(3.0, cplx(0.0, 1.0), 2);
  const cplx oracle = flat_diag_F_oracle_n2(3.0, cplx(0.0, 1.0));
  j["flat_gate"] = {{"beta", 3.0}, {"z", cjson(cplx(0.0, 1.0))}, {"closed_form", cjson(closed)},
                    {"oracle", cjson(oracle)}, {"abs_diff", std::abs(closed - oracle)}};

  if (cfg.emit_gnuplot) {
    std::string plot = "# Re z Im z (nodes with |z| < 60)\n";
    for (const cplx& z : spec.z)
      if (std::abs(z) < 60.0) plot += fmt(z.real()) + " " + fmt(z.imag()) + "\n";
    art.add("contour_nodes.dat", plot);
  }
  return j;
}

json run_symbol_check(const RunConfig& cfg, Artifacts& art) {
  const SymbolCheckReport r = run_symbol_checks(cfg.spacetime_model(), cfg.n_samples, cfg.seed, cfg.residual_tol);
  json j;
  j["n_samples"] = r.n_samples;
  j["max_residual"] = r.max_residual;
  j["mean_residual"] = r.mean_residual;
  j["max_branch_diff"] = r.max_branch_diff;
  j["max_adjoint"] = r.max_adjoint;
  json f = json::array();
  for (const auto& e : r.failures)
    f.push_back({{"check", e.check}, {"point", e.point}, {"xi", e.xi}, {"omega_R", e.omega_R}, {"omega_I", e.omega_I},
                 {"residual", e.residual}});
  j["failures"] = f;
  if (cfg.emit_gnuplot) art.add("symbol_check.dat", "# max_residual mean_residual\n" + fmt(r.max_residual) + " " + fmt(r.mean_residual) + "\n");
  return j;
}

json run_curvature(const RunConfig& cfg, Artifacts& art) {
  const SpacetimeModel m = cfg.spacetime_model();
  const ChartPoint base = cfg.base_point();
  json j;
  j["base_R"] = scalar_curvature(m, base);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  json pts = json::array();
  double lo = 1e300, hi = -1e300;
  std::string plot = "# h R\n";
  for (int s = 0; s < cfg.n_samples; ++s) {
    std::vector<double> x(m.n);
    x[0] = 1.5 * U(rng);
    for (int i = 1; i < m.n; ++i) x[i] = U(rng);
    const double R = scalar_curvature(m, ChartPoint::interior(x));
    lo = std::min(lo, R);
    hi = std::max(hi, R);
    pts.push_back({{"point", x}, {"R", R}});
    plot += fmt(x[0]) + " " + fmt(R) + "\n";
  }
  j["samples"] = pts;
  j["min_R"] = lo;
  j["max_R"] = hi;
  if (m.kind == ModelKind::ExactDS) j["constant_curvature_reference"] = -double(m.n) * (m.n - 1);
  if (m.kind == ModelKind::Flat) j["constant_curvature_reference"] = 0.0;
  if (cfg.emit_gnuplot) art.add("curvature.dat", plot);
  return j;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"dslab: asymptotically de Sitter spectral laboratory"};
  app.require_subcommand(1);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "key = value file; subcommand keys go in a [subcommand] section");

  auto both = [](const std::string& name) {
    std::string u = name;
    std::replace(u.begin(), u.end(), '-', '_');
    return u == name ? "--" + name : "--" + name + ",--" + u;
  };
  app.add_option(both("model"), cfg.model, "flat | exact-ds | perturbed-ds");
  app.add_option(both("n"), cfg.n, "spacetime dimension (even)");
  app.add_option(both("delta"), cfg.delta, "perturbation amplitude (perturbed-ds)");
  app.add_option(both("bump-center"), cfg.bump_center, "bump center in x0");
  app.add_option(both("bump-width"), cfg.bump_width, "bump width in x0");
  app.add_option(both("fd-step"), cfg.fd_step, "finite-difference step");
  app.add_option(both("seed"), cfg.seed, "random seed");
  app.add_option(both("out-dir"), cfg.out_dir, "output directory");
  app.add_flag(both("emit-gnuplot"), cfg.emit_gnuplot, "write two-column .dat files");
  app.add_option(both("base"), cfg.base, "interior base point h,u1,..")->delimiter(',');

  CLI::App* flow = app.add_subcommand("flow", "bicharacteristic ensembles");
  flow->add_option(both("variant"), cfg.variant, "microlocal | semiclassical");
  flow->add_option(both("omega-r"), cfg.omega_r, "semiclassical omega_R");
  flow->add_option(both("lambda-re"), cfg.lambda_re, "Re lambda");
  flow->add_option(both("lambda-im"), cfg.lambda_im, "Im lambda");
  flow->add_option(both("ensemble"), cfg.ensemble, "number of starts");
  flow->add_option(both("t-max"), cfg.t_max, "integration time in each direction");
  flow->add_option(both("tol"), cfg.flow_tol, "integrator tolerance");

  CLI::App* transport = app.add_subcommand("transport", "Hadamard transport hierarchy");
  CLI::App* residue = app.add_subcommand("residue", "spectral-action residue");
  transport->add_option(both("order"), cfg.order, "highest transport order N");
  for (CLI::App* s : {transport, residue}) {
    s->add_option(both("rays"), cfg.rays, "ray count (0: minimal fan)");
    s->add_option(both("samples"), cfg.samples, "samples per ray");
    s->add_option(both("radius"), cfg.radius, "normal chart radius");
  }
  transport->add_flag(both("grid-csv"), cfg.grid_csv, "write the full u_k grid");
  residue->add_option(both("eps"), cfg.eps, "decreasing eps sequence")->delimiter(',');
  residue->add_option(both("sign"), cfg.sign, "+1 for +i eps, -1 for -i eps");
  residue->add_option(both("m"), cfg.m, "residue at alpha = n/2 - m");
  residue->add_option(both("mu"), cfg.mu, "spectral shift");

  CLI::App* contour = app.add_subcommand("contour", "contour identities");
  contour->add_option(both("epsilon"), cfg.epsilon, "eps");
  contour->add_option(both("eta"), cfg.eta, "cap parameter eta");
  contour->add_option("--C", cfg.C, "upper branch offset C");
  contour->add_option("--c", cfg.c, "lower branch offset c");
  contour->add_option(both("quad-tol"), cfg.quad_tol, "quadrature tolerance");
  contour->add_option(both("x-right"), cfg.x_right, "real-axis crossing of the cap");
  contour->add_option(both("alpha"), cfg.alpha, "alpha grid")->delimiter(',');
  contour->add_option(both("q"), cfg.q, "q grid")->delimiter(',');
  contour->add_option(both("mu"), cfg.mu, "spectral shift in the F_k identity");

  CLI::App* symbol = app.add_subcommand("symbol-check", "symbol identities on random samples");
  CLI::App* curvature = app.add_subcommand("curvature", "finite-difference scalar curvature");
  for (CLI::App* s : {symbol, curvature}) {
    s->add_option(both("n-samples"), cfg.n_samples, "number of random samples");
  }
  symbol->add_option(both("tol"), cfg.residual_tol, "failure threshold for the Im identity");

  for (CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; })) s->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ConfigError: " << e.what() << "\n";
    return 2;
  }
  for (CLI::App* s : app.get_subcommands()) cfg.subcommand = s->get_name();

  try {
    cfg.validate();
    cfg.spacetime_model().validate();
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  }

  const std::string json_path = (std::filesystem::path(cfg.out_dir) / (cfg.subcommand + ".json")).string();
  json env;
  env["spec_version"] = kSpecVersion;
  env["subcommand"] = cfg.subcommand;
  env["config"] = cfg.to_json();
  Artifacts art;
  try {
    json result;
    if (cfg.subcommand == "flow") result = run_flow(cfg, art);
    else if (cfg.subcommand == "transport") result = run_transport(cfg, art);
    else if (cfg.subcommand == "residue") result = run_residue(cfg, art);
    else if (cfg.subcommand == "contour") result = run_contour(cfg, art);
    else if (cfg.subcommand == "symbol-check") result = run_symbol_check(cfg, art);
    else result = run_curvature(cfg, art);
    env["status"] = "ok";
    env["result"] = result;
  } catch (const Error& e) {
    env["status"] = "error";
    env["error"] = {{"code", error_name(e.code())}, {"message", e.what()}};
    err << e.what() << "\n";
    try {
      write_atomic(json_path, dump_json(env));
    } catch (const std::exception&) {
    }
    return e.code() == ErrorCode::ConfigError ? 2 : 3;
  } catch (const std::exception& e) {
    env["status"] = "error";
    env["error"] = {{"code", "NumericalFailure"}, {"message", e.what()}};
    err << e.what() << "\n";
    return 3;
  }

  const std::string text = dump_json(env);
  try {
    for (const auto& [name, content] : art.files)
      write_atomic((std::filesystem::path(cfg.out_dir) / name).string(), content);
    write_atomic(json_path, text);
  } catch (const std::exception& e) {
    err << "ConfigError: " << e.what() << "\n";
    return 2;
  }
  out << text;
  return 0;
}

}  // namespace dslab
