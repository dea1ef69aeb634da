// magtrace: command-line front end.
//
//   magtrace spectrum --model sphere --N 3 --cutoff 3
//   magtrace density  --model torus2 --N 1..40 --probe gaussian:mu=6.2832,sigma=1
//   magtrace f0       --model torus3 --probe gaussian:mu=0,sigma=6
//   magtrace pairing  --c 1,2 --ell 0.5 --probe gaussian:mu=4,sigma=1
//   magtrace weyl     --model torus3 --N 100,400 --lambda 30
//   magtrace flow     --a 1,3 --t 0.4 --tmax 3
//   magtrace lattice  --n 48 --N 2 --field const --k 8 --report
//   magtrace fit      --in density.csv --powers 1,0
//
// Exit status: 0 success, 2 usage error, 3 numerical failure (JSON error body on stdout).

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "magtrace/cli.hpp"
#include "magtrace/magtrace.hpp"

using json = nlohmann::ordered_json;
using namespace magtrace;
using cli::format_double;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct ModelOptions {
  std::string model = "torus2";
  double radius = 1.0;
  int genus = 2;

  void attach(CLI::App* app) {
    app->add_option("--model", model, "torus2 | torus3 | sphere | hyperbolic")
        ->check(CLI::IsMember({"torus2", "torus3", "sphere", "hyperbolic"}));
    app->add_option("--R", radius, "radius (sphere, hyperbolic)");
    app->add_option("--genus", genus, "genus (hyperbolic)");
  }

  ModelSystem build() const { return cli::parse_model(model, radius, genus); }
};

struct Output {
  std::string path;
  std::string format = "csv";

  void attach(CLI::App* app, const std::string& default_format) {
    format = default_format;
    app->add_option("--out", path, "output file (default: stdout)");
    app->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  }

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file '" + path + "'");
    f << text;
  }
};

json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json probe_json(const TestFunction& phi) {
  json j{{"kind", phi.kind() == ProbeKind::gaussian ? "gaussian" : "hermite_gaussian"},
         {"mu", phi.center()},
         {"sigma", phi.width()}};
  if (phi.kind() == ProbeKind::hermite_gaussian) j["degree"] = phi.hermite_degree();
  return j;
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  return out.str();
}

std::string table(const Output& out, const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows, const json& records) {
  if (out.format == "json") return records.dump(2) + "\n";
  return csv(header, rows);
}

ManifoldQuadrature model_quadrature(const ModelSystem& model, int n_theta, int n_phi) {
  switch (model.kind) {
    case ModelKind::torus2: return flat_torus_quadrature(2, 1, constant_field());
    case ModelKind::torus3: return flat_torus_quadrature(3, 1, constant_field());
    case ModelKind::sphere: return sphere_quadrature(model.radius, n_theta, n_phi);
    case ModelKind::hyperbolic: return hyperbolic_quadrature(model.radius, model.genus);
  }
  throw std::invalid_argument("unknown model");
}

std::vector<std::pair<double, double>> read_density_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file '" + path + "'");
  std::vector<std::pair<double, double>> samples;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = cli::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == 'N') continue;
    const auto cells = cli::split(t, ',');
    if (cells.size() < 2) throw std::invalid_argument("density csv row needs N and Y_N: '" + t + "'");
    samples.emplace_back(cli::parse_double(cells[0]), cli::parse_double(cells[1]));
  }
  return samples;
}

// CLI11 only reads config files attached to the root app, so subcommand
// files are applied here. Options given on the command line take precedence.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  for (const auto& item : CLI::ConfigINI().from_config(in)) {
    const bool flat = item.parents.empty() || (item.parents.size() == 1 && item.parents[0] == "default");
    CLI::Option* opt = flat && item.name != "config" ? sub->get_option_no_throw("--" + item.name) : nullptr;
    if (opt == nullptr) throw CLI::ConfigError::Extras(item.fullname());
    if (opt->count() > 0) continue;
    // The INI reader splits on commas; every option here takes one string.
    opt->add_result(CLI::detail::join(item.inputs, ","));
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magtrace: smoothed spectral densities and trace-formula coefficients of magnetic Laplacians"};
  app.require_subcommand(1);
  app.allow_extras(false);

  std::vector<std::unique_ptr<Output>> outputs;
  std::vector<std::pair<CLI::App*, std::unique_ptr<std::string>>> configs;
  auto add_command = [&](const std::string& name, const std::string& help, const std::string& fmt) {
    CLI::App* sub = app.add_subcommand(name, help);
    configs.emplace_back(sub, std::make_unique<std::string>());
    sub->add_option("--config", *configs.back().second, "flat key=value file with option values")
        ->check(CLI::ExistingFile);
    outputs.push_back(std::make_unique<Output>());
    outputs.back()->attach(sub, fmt);
    return std::pair<CLI::App*, Output*>{sub, outputs.back().get()};
  };

  // spectrum
  ModelOptions spec_model;
  int spec_N = 1;
  double spec_cutoff = 10.0;
  auto [spectrum_cmd, spectrum_out] = add_command("spectrum", "exact eigenvalues of a model system", "csv");
  spec_model.attach(spectrum_cmd);
  spectrum_cmd->add_option("--N", spec_N, "flux integer N")->check(CLI::PositiveNumber);
  spectrum_cmd->add_option("--cutoff", spec_cutoff, "keep lines with nu/N <= cutoff");

  // density
  ModelOptions dens_model;
  std::string dens_N = "1..10";
  std::string dens_probe = "gaussian:mu=6.283185307179586,sigma=1";
  double dens_tol = 1e-12;
  auto [density_cmd, density_out] = add_command("density", "smoothed spectral density Y_N(phi)", "csv");
  dens_model.attach(density_cmd);
  density_cmd->add_option("--N", dens_N, "N values: a..b or a,b,c");
  density_cmd->add_option("--probe", dens_probe, "kind:key=val,...");
  density_cmd->add_option("--tol", dens_tol, "truncation tolerance");

  // f0
  ModelOptions f0_model;
  std::string f0_probe = "gaussian:mu=6.283185307179586,sigma=1";
  std::string f0_quad;
  double f0_tol = 1e-14;
  int f0_ntheta = 16;
  int f0_nphi = 4;
  auto [f0_cmd, f0_out] = add_command("f0", "leading coefficient f0 from the local density", "json");
  f0_model.attach(f0_cmd);
  f0_cmd->add_option("--probe", f0_probe, "kind:key=val,...");
  f0_cmd->add_option("--quadrature", f0_quad, "quadrature CSV (d, g, F, V, weight); overrides --model")
      ->check(CLI::ExistingFile);
  f0_cmd->add_option("--tol", f0_tol, "truncation tolerance");
  f0_cmd->add_option("--ntheta", f0_ntheta, "sphere Gauss-Legendre nodes in cos(theta)");
  f0_cmd->add_option("--nphi", f0_nphi, "sphere nodes in phi");

  // pairing
  std::string pair_c = "6.283185307179586";
  double pair_ell = 0.0;
  double pair_shift = 0.0;
  std::string pair_probe = "gaussian:mu=6.283185307179586,sigma=1";
  std::string pair_eps;
  double pair_tol = 1e-14;
  auto [pairing_cmd, pairing_out] = add_command("pairing", "closed-form vs regularized distribution pairing", "json");
  pairing_cmd->add_option("--c", pair_c, "sin frequencies c_j (comma separated)");
  pairing_cmd->add_option("--ell", pair_ell, "power of (t + i0), a half-integer >= 0");
  pairing_cmd->add_option("--shift", pair_shift, "phase shift V");
  pairing_cmd->add_option("--probe", pair_probe, "kind:key=val,...");
  pairing_cmd->add_option("--eps", pair_eps, "descending eps schedule (comma separated)");
  pairing_cmd->add_option("--tol", pair_tol, "closed-form truncation tolerance");

  // weyl
  ModelOptions weyl_model;
  std::string weyl_N = "1..10";
  double weyl_lambda = 13.0;
  auto [weyl_cmd, weyl_out] = add_command("weyl", "eigenvalue counting vs Demailly's limit", "csv");
  weyl_model.attach(weyl_cmd);
  weyl_cmd->add_option("--N", weyl_N, "N values: a..b or a,b,c");
  weyl_cmd->add_option("--lambda", weyl_lambda, "rescaled energy lambda");

  // flow
  std::string flow_a = "1";
  double flow_t = 0.5;
  double flow_tmax = 3.141592653589793;
  auto [flow_cmd, flow_out] = add_command("flow", "linearized flow, periods and determinant identity", "json");
  flow_cmd->add_option("--a", flow_a, "frequencies a_k (comma separated)");
  flow_cmd->add_option("--t", flow_t, "time");
  flow_cmd->add_option("--tmax", flow_tmax, "period search range");

  // lattice
  int lat_n = 32;
  int lat_N = 1;
  std::string lat_field = "const";
  int lat_k = 4;
  bool lat_report = false;
  double lat_tol = 1e-8;
  std::string lat_method = "auto";
  std::string lat_dump;
  auto [lattice_cmd, lattice_out] = add_command("lattice", "lattice magnetic Laplacian eigenvalues", "json");
  lattice_cmd->add_option("--n", lat_n, "grid size (n x n sites)");
  lattice_cmd->add_option("--N", lat_N, "flux integer");
  lattice_cmd->add_option("--field", lat_field, "const[:value] | cosx:amplitude");
  lattice_cmd->add_option("--k", lat_k, "number of eigenvalues");
  lattice_cmd->add_flag("--report", lat_report, "Landau cluster report");
  lattice_cmd->add_option("--tol", lat_tol, "residual tolerance relative to ||H||");
  lattice_cmd->add_option("--method", lat_method, "auto | dense | lanczos")
      ->check(CLI::IsMember({"auto", "dense", "lanczos"}));
  lattice_cmd->add_option("--dump", lat_dump, "write link phases and potential as CSV");

  // fit
  std::string fit_in;
  std::string fit_powers = "1,0";
  auto [fit_cmd, fit_out] = add_command("fit", "fit expansion coefficients to density output", "json");
  fit_cmd->add_option("--in", fit_in, "CSV produced by `density`")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--powers", fit_powers, "exponents p_r (comma separated)");

  try {
    app.parse(argc, argv);
    for (const auto& [sub, path] : configs)
      if (*sub && !path->empty()) apply_config(sub, *path);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*spectrum_cmd) {
      const ModelSystem model = spec_model.build();
      const Spectrum s = spectrum(model, spec_N, spec_cutoff);
      std::vector<std::vector<std::string>> rows;
      json records = json::array();
      for (const auto& line : s.lines) {
        rows.push_back({format_double(line.eigenvalue), std::to_string(line.multiplicity),
                        format_double(line.eigenvalue / spec_N)});
        records.push_back({{"nu", line.eigenvalue},
                           {"multiplicity", line.multiplicity},
                           {"nu_over_N", line.eigenvalue / spec_N}});
      }
      spectrum_out->write(table(*spectrum_out, {"nu", "multiplicity", "nu_over_N"}, rows, records));
    } else if (*density_cmd) {
      const ModelSystem model = dens_model.build();
      const TestFunction phi = cli::parse_probe(dens_probe);
      std::vector<int> Ns = cli::parse_range(dens_N);
      std::sort(Ns.begin(), Ns.end());
      std::vector<std::vector<std::string>> rows;
      json records = json::array();
      for (const auto& d : density_curve(model, phi, Ns, dens_tol)) {
        rows.push_back({std::to_string(d.N), format_double(d.value), format_double(d.tail_bound),
                        format_double(d.continuous_part_bound)});
        records.push_back({{"N", d.N},
                           {"Y_N", d.value},
                           {"tail_bound", d.tail_bound},
                           {"continuous_part_bound", d.continuous_part_bound}});
      }
      density_out->write(
          table(*density_out, {"N", "Y_N", "tail_bound", "continuous_part_bound"}, rows, records));
    } else if (*f0_cmd) {
      const TestFunction phi = cli::parse_probe(f0_probe);
      ManifoldQuadrature q;
      json j;
      if (!f0_quad.empty()) {
        std::ifstream in(f0_quad);
        q = read_quadrature_csv(in);
        j["quadrature"] = f0_quad;
      } else {
        const ModelSystem model = f0_model.build();
        q = model_quadrature(model, f0_ntheta, f0_nphi);
        j["model"] = model.name();
      }
      j["probe"] = probe_json(phi);
      j["nodes"] = q.nodes.size();
      j["total_volume"] = q.total_volume;
      j["f0"] = integrate_f0(q, phi, f0_tol);
      if (!q.nodes.empty()) {
        const auto& p = q.nodes.front().point;
        const auto freqs = magnetic_frequencies(p);
        j["first_node"] = {{"a", freqs.a},
                           {"rank", freqs.rank},
                           {"near_degenerate", freqs.near_degenerate},
                           {"f0_local", local_density_f0(p, phi, f0_tol)},
                           {"f0_pairing", complex_json(f0_from_pairing(freqs, p.potential, p.dim(), phi, f0_tol))}};
      }
      if (f0_out->format == "csv") {
        f0_out->write(csv({"f0", "total_volume"}, {{format_double(j["f0"].get<double>()),
                                                     format_double(q.total_volume)}}));
      } else {
        f0_out->write(j.dump(2) + "\n");
      }
    } else if (*pairing_cmd) {
      const TestFunction phi = cli::parse_probe(pair_probe);
      PairingSpec spec{cli::parse_list(pair_c), pair_ell, pair_shift};
      const std::vector<double> schedule = pair_eps.empty() ? default_eps_schedule(phi, pair_shift) : cli::parse_list(pair_eps);
      const cplx closed = closed_form_pairing(spec, phi, pair_tol);
      json j{{"spec", {{"c", spec.c}, {"ell", spec.ell}, {"shift", spec.shift}}},
             {"probe", probe_json(phi)},
             {"sum_form", complex_json(closed)}};
      try {
        const auto reg = regularized_pairing(spec, phi, schedule);
        j["integral_form"] = complex_json(reg.value);
        j["extrapolation_error"] = reg.error_estimate;
        j["discrepancy"] = std::abs(reg.value - closed);
        json table = json::array();
        for (const auto& [eps, v] : reg.table) table.push_back({{"eps", eps}, {"value", complex_json(v)}});
        j["eps_table"] = table;
      } catch (const ExtrapolationError& e) {
        json table = json::array();
        for (const auto& [eps, v] : e.table()) table.push_back({{"eps", eps}, {"value", complex_json(v)}});
        json err{{"error", "numerical"}, {"message", e.what()}, {"eps_table", table}};
        std::cout << err.dump(2) << "\n";
        return kExitNumerical;
      }
      pairing_out->write(j.dump(2) + "\n");
    } else if (*weyl_cmd) {
      const ModelSystem model = weyl_model.build();
      std::vector<int> Ns = cli::parse_range(weyl_N);
      std::sort(Ns.begin(), Ns.end());
      const auto limit = demailly_limit(model_quadrature(model, 16, 4), weyl_lambda, model.dim());
      std::vector<std::vector<std::string>> rows;
      json records = json::array();
      for (int N : Ns) {
        const auto c = counting_function(model, N, weyl_lambda);
        const double rel = limit.value != 0.0 ? std::abs(c.scaled - limit.value) / limit.value : 0.0;
        rows.push_back({std::to_string(N), format_double(weyl_lambda), std::to_string(c.count),
                        format_double(c.scaled), format_double(limit.value), format_double(rel)});
        records.push_back({{"N", N},
                           {"lambda", weyl_lambda},
                           {"count", c.count},
                           {"scaled", c.scaled},
                           {"demailly_limit", limit.value},
                           {"rel_error", rel},
                           {"near_jump", limit.near_jump}});
      }
      if (limit.near_jump) std::cerr << "warning: lambda is within 1e-9 of a Landau level\n";
      weyl_out->write(
          table(*weyl_out, {"N", "lambda", "count", "scaled", "demailly_limit", "rel_error"}, rows, records));
    } else if (*flow_cmd) {
      const std::vector<double> a = cli::parse_list(flow_a);
      const FlowMatrix M = flow_matrix(a, flow_t);
      json matrix = json::array();
      for (Eigen::Index r = 0; r < M.matrix.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.matrix.cols(); ++c) row.push_back(M.matrix(r, c));
        matrix.push_back(row);
      }
      json j{{"a", a}, {"t", flow_t}, {"matrix", matrix}, {"periods", periods(a, flow_tmax)}};
      try {
        const auto det = det_identity(a, flow_t);
        j["det_check"] = {{"lhs", det.lhs}, {"rhs", det.rhs}, {"difference", std::abs(det.lhs - det.rhs)}};
      } catch (const std::invalid_argument& e) {
        j["det_check"] = {{"error", e.what()}};
      }
      flow_out->write(j.dump(2) + "\n");
    } else if (*lattice_cmd) {
      const LatticeOperator op = build_operator(lat_n, lat_N, cli::parse_field(lat_field));
      EigenOptions opts;
      opts.method = lat_method == "dense" ? EigenMethod::dense
                    : lat_method == "lanczos" ? EigenMethod::lanczos
                                              : EigenMethod::automatic;
      json j{{"n", lat_n},
             {"N", lat_N},
             {"field", lat_field},
             {"total_flux", op.total_flux()},
             {"gauge_defect", op.gauge_defect()},
             {"hermiticity_defect", op.hermiticity_defect()}};
      if (lat_report) {
        const auto rep = landau_report(op, lat_N, 2.0 * std::numbers::pi, lat_tol, opts);
        j["report"] = {{"cluster_count", rep.cluster_count},
                       {"cluster_mean", rep.cluster_mean},
                       {"cluster_spread", rep.cluster_spread},
                       {"midgap_threshold", rep.midgap_threshold}};
        j["eigenvalues"] = rep.eigenvalues;
      } else {
        j["eigenvalues"] = lowest_eigenvalues(op, lat_k, lat_tol, opts);
      }
      if (!lat_dump.empty()) {
        std::ofstream dump(lat_dump, std::ios::binary);
        if (!dump) throw std::invalid_argument("cannot open dump file '" + lat_dump + "'");
        op.write_csv(dump);
      }
      lattice_out->write(j.dump(2) + "\n");
    } else if (*fit_cmd) {
      const auto samples = read_density_csv(fit_in);
      const auto powers = cli::parse_list(fit_powers);
      const ExpansionFit fit = fit_expansion(samples, powers);
      json j{{"powers", fit.powers},
             {"coefficients", fit.coefficients},
             {"residual_rms", fit.residual_rms},
             {"condition", fit.condition_estimate}};
      fit_out->write(j.dump(2) + "\n");
    }
  } catch (const NumericalError& e) {
    std::cout << json{{"error", "numerical"}, {"message", e.what()}}.dump(2) << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cout << json{{"error", "usage"}, {"message", e.what()}}.dump(2) << "\n";
    return kExitUsage;
  }
  return 0;
}
