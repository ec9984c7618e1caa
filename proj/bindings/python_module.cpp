#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "breakdate/cov.hpp"
#include "breakdate/csv.hpp"
#include "breakdate/errors.hpp"
#include "breakdate/fit.hpp"
#include "breakdate/intervals.hpp"
#include "breakdate/panel.hpp"
#include "breakdate/quantile.hpp"
#include "breakdate/scan.hpp"
#include "breakdate/sim.hpp"
#include "breakdate/xi_dist.hpp"

namespace py = pybind11;

namespace {

using breakdate::Panel;

Panel panel_from_array(const py::array_t<double, py::array::c_style |
                                                      py::array::forcecast>& x) {
  if (x.ndim() != 2) {
    throw breakdate::InvalidInput("panel array must be 2-dimensional");
  }
  const auto n = static_cast<std::size_t>(x.shape(0));
  const auto p = static_cast<std::size_t>(x.shape(1));
  std::vector<double> values(x.data(), x.data() + n * p);
  return Panel(n, p, std::move(values));
}

py::array_t<double> panel_to_array(const Panel& panel) {
  py::array_t<double> out({panel.n(), panel.p()});
  std::copy(panel.values().begin(), panel.values().end(),
            out.mutable_data());
  return out;
}

py::dict profile_to_dict(const breakdate::ObjectiveProfile& profile) {
  py::dict d;
  d["kind"] = profile.kind == breakdate::ObjectiveKind::UStat ? "ustat" : "ssr";
  d["k_min"] = profile.k_min;
  d["k_max"] = profile.k_max;
  d["values"] = py::array_t<double>(profile.values.size(), profile.values.data());
  d["k_hat"] = profile.arg_k;
  d["tau_hat"] = profile.arg_tau;
  d["value_at_k_hat"] = profile.optimum_value();
  return d;
}

py::dict fit_to_dict(const breakdate::ChangePointFit& f) {
  py::dict d;
  d["k_hat"] = f.k_hat;
  d["tau_hat"] = f.tau_hat;
  d["delta_sq_hat"] = f.delta_sq_hat;
  d["delta_sq_raw"] = f.delta_sq_raw;
  d["frob_sq_hat"] = f.frob_sq_hat;
  d["a_n_hat"] = f.a_n_hat;
  d["regime"] = breakdate::regime_name(f.regime);
  d["log_n_over_a_n"] = f.log_n_over_a_n;
  return d;
}

py::dict interval_to_dict(const breakdate::IntervalResult& r) {
  py::dict d;
  d["method"] = breakdate::ci_method_name(r.method);
  d["lo"] = r.lo;
  d["hi"] = r.hi;
  d["level"] = r.level;
  d["B"] = r.B;
  d["aux"] = r.diagnostics;
  return d;
}

breakdate::BootstrapConfig make_config(int B, std::uint64_t seed, double level,
                                       const std::string& cov,
                                       const std::string& delta_shape,
                                       double c_star, int threads) {
  breakdate::BootstrapConfig config;
  config.B = B;
  config.seed = seed;
  config.level = level;
  config.cov_method = breakdate::cov_method_from_name(cov);
  config.delta_shape = delta_shape == "sparse5"
                           ? breakdate::DeltaShape::SparseFive
                           : breakdate::DeltaShape::UniformVector;
  config.c_star = c_star;
  config.threads = threads;
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Break-date estimation for high-dimensional panels";

  py::register_exception<breakdate::InvalidInput>(m, "InvalidInput",
                                                  PyExc_ValueError);
  py::register_exception<breakdate::NumericError>(m, "NumericError",
                                                  PyExc_RuntimeError);

  m.def(
      "scan_ustat",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
             x) { return profile_to_dict(breakdate::scan_ustat(panel_from_array(x))); },
      py::arg("panel"), "U-statistic objective over all admissible splits");

  m.def(
      "scan_ssr",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
             x) { return profile_to_dict(breakdate::scan_ssr(panel_from_array(x))); },
      py::arg("panel"), "Least-squares objective over all admissible splits");

  m.def(
      "estimate",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
             x) { return fit_to_dict(breakdate::fit(panel_from_array(x))); },
      py::arg("panel"),
      "Break location plus nuisance estimates (delta^2, ||Sigma||_F^2, a_n)");

  m.def(
      "confidence_intervals",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
         const std::vector<std::string>& methods, int B, std::uint64_t seed,
         double level, const std::string& cov, const std::string& delta_shape,
         double c_star, int threads, std::optional<double> oracle_a_n) {
        const Panel panel = panel_from_array(x);
        const breakdate::BootstrapConfig config = make_config(
            B, seed, level, cov, delta_shape, c_star, threads);
        py::list out;
        for (const std::string& name : methods) {
          out.append(interval_to_dict(breakdate::construct_interval(
              breakdate::ci_method_from_name(name), panel, config,
              oracle_a_n)));
        }
        return out;
      },
      py::arg("panel"), py::arg("methods"), py::arg("B") = 200,
      py::arg("seed") = 0, py::arg("level") = 0.95,
      py::arg("cov") = "rothman", py::arg("delta_shape") = "uniform",
      py::arg("c_star") = 0.05, py::arg("threads") = 1,
      py::arg("oracle_a_n") = std::nullopt,
      "Confidence intervals for the break fraction");

  m.def("xi_density", &breakdate::xi_density, py::arg("t"), py::arg("tau0"));
  m.def("xi_quantile", &breakdate::xi_quantile, py::arg("alpha"),
        py::arg("tau0"));
  m.def(
      "xi_sample_mc",
      [](double tau0, std::size_t reps, std::uint64_t seed, double gamma_max,
         double grid_step, int threads) {
        breakdate::XiMcOptions options;
        options.gamma_max = gamma_max;
        options.grid_step = grid_step;
        options.threads = threads;
        auto samples = breakdate::xi_sample_mc(tau0, reps, seed, options);
        return py::array_t<double>(samples.size(), samples.data());
      },
      py::arg("tau0"), py::arg("reps"), py::arg("seed") = 0,
      py::arg("gamma_max") = 0.0, py::arg("grid_step") = 0.0,
      py::arg("threads") = 1);

  m.def(
      "build_sigma",
      [](const std::string& model, std::size_t p) {
        const Eigen::MatrixXd sigma =
            breakdate::build_sigma(breakdate::sigma_model_from_name(model), p);
        py::array_t<double> out({p, p});
        for (std::size_t i = 0; i < p; ++i) {
          for (std::size_t j = 0; j < p; ++j) {
            out.mutable_at(i, j) = sigma(static_cast<Eigen::Index>(i),
                                         static_cast<Eigen::Index>(j));
          }
        }
        return out;
      },
      py::arg("model"), py::arg("p"));

  m.def(
      "build_delta",
      [](const std::string& kind, std::size_t n, std::size_t p,
         std::uint64_t seed) {
        auto delta = breakdate::build_delta(
            breakdate::delta_kind_from_name(kind), n, p, seed);
        return py::array_t<double>(delta.size(), delta.data());
      },
      py::arg("kind"), py::arg("n"), py::arg("p"), py::arg("seed") = 0);

  m.def(
      "generate_panel",
      [](std::size_t n, std::size_t p, double tau0, const std::string& sigma,
         const std::string& delta_kind, std::uint64_t seed,
         double noise_scale) {
        breakdate::Cp1Spec spec;
        spec.n = n;
        spec.p = p;
        spec.tau0 = tau0;
        spec.sigma.model = breakdate::sigma_model_from_name(sigma);
        spec.delta = breakdate::build_delta(
            breakdate::delta_kind_from_name(delta_kind), n, p, seed);
        return panel_to_array(
            breakdate::generate_panel(spec, seed, noise_scale));
      },
      py::arg("n"), py::arg("p"), py::arg("tau0") = 0.5,
      py::arg("sigma") = "id", py::arg("delta_kind") = "dense",
      py::arg("seed") = 0, py::arg("noise_scale") = 1.0);

  m.def(
      "rothman_pd",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
             r,
         double lambda1, double lambda2, double grad_tol, int max_iter) {
        if (r.ndim() != 2 || r.shape(0) != r.shape(1)) {
          throw breakdate::InvalidInput("correlation matrix must be square");
        }
        const auto p = static_cast<Eigen::Index>(r.shape(0));
        Eigen::MatrixXd rm(p, p);
        for (Eigen::Index i = 0; i < p; ++i) {
          for (Eigen::Index j = 0; j < p; ++j) rm(i, j) = r.at(i, j);
        }
        breakdate::RothmanOptions options;
        options.lambda1 = lambda1;
        options.lambda2 = lambda2;
        options.grad_tol = grad_tol;
        options.max_iter = max_iter;
        const breakdate::RothmanResult result =
            breakdate::rothman_pd(rm, options);
        py::array_t<double> theta({r.shape(0), r.shape(0)});
        for (Eigen::Index i = 0; i < p; ++i) {
          for (Eigen::Index j = 0; j < p; ++j) {
            theta.mutable_at(i, j) = result.theta(i, j);
          }
        }
        py::dict d;
        d["theta"] = theta;
        d["converged"] = result.converged;
        d["iterations"] = result.iterations;
        d["grad_map_norm"] = result.grad_map_norm;
        return d;
      },
      py::arg("R"), py::arg("lambda1") = 1e-4, py::arg("lambda2") = 0.0,
      py::arg("grad_tol") = 1e-7, py::arg("max_iter") = 5000,
      "Positive-definite penalized correlation estimator");

  m.def(
      "load_panel_csv",
      [](const std::string& path) {
        return panel_to_array(breakdate::load_panel_csv(path));
      },
      py::arg("path"));
}
