#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "breakdate/csv.hpp"
#include "breakdate/errors.hpp"
#include "breakdate/fit.hpp"
#include "breakdate/intervals.hpp"
#include "breakdate/quantile.hpp"
#include "breakdate/scan.hpp"
#include "breakdate/sim.hpp"
#include "breakdate/xi_dist.hpp"

namespace {

using breakdate::InvalidInput;
using nlohmann::json;

json fit_to_json(const breakdate::ChangePointFit& f) {
  return json{{"k_hat", f.k_hat},
              {"tau_hat", f.tau_hat},
              {"delta_sq_hat", f.delta_sq_hat},
              {"delta_sq_raw", f.delta_sq_raw},
              {"frob_sq_hat", f.frob_sq_hat},
              {"a_n_hat", f.a_n_hat},
              {"regime", breakdate::regime_name(f.regime)},
              {"log_n_over_a_n", f.log_n_over_a_n}};
}

json interval_to_json(const breakdate::IntervalResult& r) {
  json aux(r.diagnostics);
  return json{{"method", breakdate::ci_method_name(r.method)},
              {"lo", r.lo},
              {"hi", r.hi},
              {"level", r.level},
              {"B", r.B},
              {"aux", std::move(aux)}};
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"High-dimensional mean break dating and confidence intervals"};
  app.require_subcommand(1);

  // ---- estimate ----
  auto* estimate = app.add_subcommand(
      "estimate", "Fit the break location and nuisance quantities");
  std::string est_input, est_out, est_profile_csv;
  estimate->add_option("--input", est_input, "panel CSV")->required();
  estimate->add_option("--out", est_out, "fit summary JSON (default stdout)");
  estimate->add_option("--profile-csv", est_profile_csv,
                       "write the objective profile (columns k,value)");

  // ---- ci ----
  auto* ci = app.add_subcommand("ci", "Construct confidence intervals");
  std::string ci_input, ci_out, ci_methods = "u2,u4,u5", ci_cov = "rothman";
  double ci_level = 0.95, ci_cstar = 0.05;
  int ci_B = 200, ci_threads = 1;
  std::uint64_t ci_seed = 0;
  std::string ci_delta_shape = "uniform";
  double ci_oracle_a_n = -1.0;
  ci->add_option("--input", ci_input, "panel CSV")->required();
  ci->add_option("--methods", ci_methods,
                 "comma list from u1,u2,u3,u4,u5,ls1,ls2");
  ci->add_option("--level", ci_level, "confidence level (default 0.95)");
  ci->add_option("--B", ci_B, "bootstrap replicates (default 200)");
  ci->add_option("--seed", ci_seed, "bootstrap seed");
  ci->add_option("--cov", ci_cov, "rothman|diag|shrink|pooled");
  ci->add_option("--c-star", ci_cstar, "LS2 trimming fraction");
  ci->add_option("--delta-shape", ci_delta_shape,
                 "uniform|sparse5 bootstrap shift shape");
  ci->add_option("--threads", ci_threads, "bootstrap worker threads");
  ci->add_option("--oracle-a-n", ci_oracle_a_n,
                 "true rate a_n for the u1 interval (simulation use)");
  ci->add_option("--out", ci_out, "result JSON (default stdout)");

  // ---- simulate ----
  auto* simulate =
      app.add_subcommand("simulate", "Generate one synthetic panel CSV");
  std::size_t sim_n = 200, sim_p = 50;
  double sim_tau0 = 0.5;
  std::string sim_sigma = "id", sim_delta = "dense", sim_out;
  std::uint64_t sim_seed = 0;
  simulate->add_option("--n", sim_n, "time points");
  simulate->add_option("--p", sim_p, "dimensions");
  simulate->add_option("--tau0", sim_tau0, "break fraction");
  simulate->add_option("--sigma", sim_sigma, "id|ar|bd|cs|int");
  simulate->add_option("--delta", sim_delta,
                       "dense|sparse|weak|moderate|strong");
  simulate->add_option("--seed", sim_seed, "seed");
  simulate->add_option("--out", sim_out, "panel CSV path")->required();

  // ---- limit-dist ----
  auto* limit = app.add_subcommand(
      "limit-dist", "Quantiles of the limiting argmin distribution");
  double ld_tau0 = 0.5, ld_alpha = 0.975;
  std::string ld_method = "density", ld_table_out, ld_alphas = "0.025,0.975";
  std::size_t ld_reps = 100000;
  std::uint64_t ld_seed = 0;
  int ld_threads = 1;
  double ld_tau_step = 0.01;
  limit->add_option("--tau0", ld_tau0, "break fraction");
  limit->add_option("--alpha", ld_alpha, "quantile level");
  limit->add_option("--method", ld_method, "density|mc");
  limit->add_option("--reps", ld_reps, "MC replicates");
  limit->add_option("--seed", ld_seed, "MC seed");
  limit->add_option("--threads", ld_threads, "MC worker threads");
  limit->add_option("--table-out", ld_table_out,
                    "write a quantile table CSV over the tau grid");
  limit->add_option("--alphas", ld_alphas, "table quantile levels");
  limit->add_option("--tau-step", ld_tau_step, "table tau grid step");

  // ---- reproduce-table ----
  auto* rep = app.add_subcommand("reproduce-table",
                                 "Monte-Carlo tables of the simulation study");
  std::string rt_table, rt_scale = "desk", rt_out, rt_methods;
  std::size_t rt_reps = 0;
  int rt_B = 200, rt_threads = 1;
  std::uint64_t rt_seed = 20240817;
  rep->add_option("--table", rt_table, "1|2|3|4|5|6|int")->required();
  rep->add_option("--scale", rt_scale, "desk|full");
  rep->add_option("--reps", rt_reps, "override replicate count");
  rep->add_option("--B", rt_B, "bootstrap replicates");
  rep->add_option("--seed", rt_seed, "master seed");
  rep->add_option("--threads", rt_threads, "worker threads");
  rep->add_option("--methods", rt_methods,
                  "comma list of interval methods (default all)");
  rep->add_option("--out", rt_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (*estimate) {
    const breakdate::Panel panel = breakdate::load_panel_csv(est_input);
    const breakdate::ChangePointFit f = breakdate::fit(panel);
    if (!est_profile_csv.empty()) {
      breakdate::write_profile_csv(est_profile_csv,
                                   breakdate::scan_ustat(panel));
    }
    write_or_print(est_out, fit_to_json(f).dump(2));
    return 0;
  }

  if (*ci) {
    const breakdate::Panel panel = breakdate::load_panel_csv(ci_input);
    breakdate::BootstrapConfig config;
    config.B = ci_B;
    config.seed = ci_seed;
    config.level = ci_level;
    config.cov_method = breakdate::cov_method_from_name(ci_cov);
    config.c_star = ci_cstar;
    config.threads = ci_threads;
    if (ci_delta_shape == "uniform") {
      config.delta_shape = breakdate::DeltaShape::UniformVector;
    } else if (ci_delta_shape == "sparse5") {
      config.delta_shape = breakdate::DeltaShape::SparseFive;
    } else {
      throw InvalidInput("unknown delta shape '" + ci_delta_shape + "'");
    }
    std::optional<double> oracle;
    if (ci_oracle_a_n > 0.0) oracle = ci_oracle_a_n;

    json results = json::array();
    for (const std::string& name : split_list(ci_methods)) {
      const breakdate::CiMethod method = breakdate::ci_method_from_name(name);
      results.push_back(interval_to_json(
          breakdate::construct_interval(method, panel, config, oracle)));
    }
    write_or_print(ci_out, results.dump(2));
    return 0;
  }

  if (*simulate) {
    breakdate::Cp1Spec spec;
    spec.n = sim_n;
    spec.p = sim_p;
    spec.tau0 = sim_tau0;
    spec.sigma.model = breakdate::sigma_model_from_name(sim_sigma);
    spec.delta = breakdate::build_delta(
        breakdate::delta_kind_from_name(sim_delta), sim_n, sim_p, sim_seed);
    breakdate::write_panel_csv(sim_out,
                               breakdate::generate_panel(spec, sim_seed));
    return 0;
  }

  if (*limit) {
    const bool mc = ld_method == "mc";
    if (!mc && ld_method != "density") {
      throw InvalidInput("method must be density or mc");
    }
    if (!ld_table_out.empty()) {
      std::vector<double> alphas;
      for (const std::string& a : split_list(ld_alphas)) {
        alphas.push_back(std::stod(a));
      }
      std::vector<double> taus;
      for (double t = ld_tau_step; t < 0.5 + 1e-12; t += ld_tau_step) {
        taus.push_back(t);
      }
      const breakdate::QuantileTable table = breakdate::build_quantile_table(
          alphas, taus,
          mc ? breakdate::QuantileMethod::MonteCarlo
             : breakdate::QuantileMethod::DensityInversion,
          ld_reps, ld_seed, ld_threads);
      breakdate::write_quantile_table_csv(ld_table_out, table);
      return 0;
    }
    double q;
    if (mc) {
      breakdate::XiMcOptions options;
      options.threads = ld_threads;
      std::vector<double> samples =
          breakdate::xi_sample_mc(ld_tau0, ld_reps, ld_seed, options);
      std::sort(samples.begin(), samples.end());
      q = breakdate::quantile_type7_sorted(samples, ld_alpha);
    } else {
      q = breakdate::xi_quantile(ld_alpha, ld_tau0);
    }
    std::printf("%.10g\n", q);
    return 0;
  }

  if (*rep) {
    breakdate::TableOptions options;
    options.scale = rt_scale;
    options.reps = rt_reps;
    options.B = rt_B;
    options.seed = rt_seed;
    options.threads = rt_threads;
    for (const std::string& name : split_list(rt_methods)) {
      options.methods.push_back(breakdate::ci_method_from_name(name));
    }
    breakdate::reproduce_table(rt_table, options, rt_out);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const breakdate::InvalidInput& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const breakdate::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
