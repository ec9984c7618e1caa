#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "breakdate/errors.hpp"
#include "breakdate/sim.hpp"

namespace breakdate {

namespace {

using nlohmann::json;

constexpr std::size_t kDeskPointReps = 2000;
constexpr std::size_t kFullPointReps = 20000;
constexpr std::size_t kDeskCiReps = 300;
constexpr std::size_t kFullCiReps = 3000;

const std::vector<std::size_t> kGridN{50, 100, 200};
const std::vector<std::size_t> kGridP{50, 150};

std::string fmt(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<CiMethod> all_methods() {
  return {CiMethod::U1, CiMethod::U2, CiMethod::U3, CiMethod::U4,
          CiMethod::U5, CiMethod::LS1, CiMethod::LS2};
}

SigmaModel table_sigma(const std::string& table_id) {
  if (table_id == "3") return SigmaModel::Identity;
  if (table_id == "4") return SigmaModel::Ar1;
  if (table_id == "5") return SigmaModel::Banded;
  if (table_id == "6") return SigmaModel::CompoundSymmetric;
  throw InvalidInput("unknown interval table '" + table_id + "'");
}

json design_json(const DesignSpec& design) {
  return json{{"n", design.n},
              {"p", design.p},
              {"tau0", design.tau0},
              {"sigma", sigma_model_name(design.sigma_model)},
              {"delta", delta_kind_name(design.delta_kind)}};
}

void write_point_table(const std::string& path, double tau0, std::size_t reps,
                       const TableOptions& options, json& cells) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << "sigma,p,n,estimator,sparse_bias,sparse_variance,sparse_mse,"
         "dense_bias,dense_variance,dense_mse\n";
  const std::vector<SigmaModel> sigmas{
      SigmaModel::Identity, SigmaModel::Ar1, SigmaModel::Banded,
      SigmaModel::CompoundSymmetric};
  for (SigmaModel sigma : sigmas) {
    for (std::size_t p : kGridP) {
      for (std::size_t n : kGridN) {
        McSummary sparse, dense;
        for (DeltaKind kind : {DeltaKind::Sparse, DeltaKind::Dense}) {
          DesignSpec design{n, p, tau0, sigma, kind};
          McSummary summary =
              run_point_table(design, reps, options.seed, options.threads);
          cells.push_back(json{{"design", design_json(design)},
                               {"delta_norm_sq", summary.delta_norm_sq},
                               {"wall_seconds", summary.wall_seconds}});
          (kind == DeltaKind::Sparse ? sparse : dense) = std::move(summary);
        }
        for (const char* est : {"u", "ls"}) {
          const EstimatorStats& s = sparse.point.at(est);
          const EstimatorStats& d = dense.point.at(est);
          out << sigma_model_name(sigma) << ',' << p << ',' << n << ',' << est
              << ',' << fmt(s.bias * 1e4, 1) << ',' << fmt(s.variance * 1e4, 1)
              << ',' << fmt(s.mse * 1e4, 1) << ',' << fmt(d.bias * 1e4, 1)
              << ',' << fmt(d.variance * 1e4, 1) << ',' << fmt(d.mse * 1e4, 1)
              << '\n';
        }
      }
    }
  }
}

void write_ci_table(const std::string& path, SigmaModel sigma,
                    std::size_t reps, const TableOptions& options,
                    json& cells) {
  const std::vector<CiMethod> methods =
      options.methods.empty() ? all_methods() : options.methods;
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << "tau0,method,metric";
  for (std::size_t p : kGridP) {
    for (const char* kind : {"dense", "sparse"}) {
      for (std::size_t n : kGridN) {
        out << ",p" << p << '_' << kind << "_n" << n;
      }
    }
  }
  out << '\n';

  for (double tau0 : {0.2, 0.5}) {
    // column-major over the grid, one summary per cell
    std::vector<McSummary> summaries;
    for (std::size_t p : kGridP) {
      for (DeltaKind kind : {DeltaKind::Dense, DeltaKind::Sparse}) {
        for (std::size_t n : kGridN) {
          DesignSpec design{n, p, tau0, sigma, kind};
          McSummary summary =
              run_ci_table(design, methods, reps, options.B, options.seed,
                           options.threads);
          cells.push_back(json{{"design", design_json(design)},
                               {"delta_norm_sq", summary.delta_norm_sq},
                               {"wall_seconds", summary.wall_seconds}});
          summaries.push_back(std::move(summary));
        }
      }
    }
    for (CiMethod method : methods) {
      const std::string name = ci_method_name(method);
      out << tau0 << ',' << name << ",coverage";
      for (const McSummary& s : summaries) {
        out << ',' << fmt(s.ci.at(name).coverage, 3);
      }
      out << '\n' << tau0 << ',' << name << ",length";
      for (const McSummary& s : summaries) {
        out << ',' << fmt(s.ci.at(name).mean_length, 3);
      }
      out << '\n';
    }
  }
}

void write_interaction_table(const std::string& path, std::size_t reps,
                             const TableOptions& options, json& cells) {
  const std::vector<CiMethod> methods =
      options.methods.empty() ? all_methods() : options.methods;
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << "p,method,metric";
  for (const char* kind : {"weak", "moderate", "strong"}) {
    for (std::size_t n : kGridN) out << ',' << kind << "_n" << n;
  }
  out << '\n';

  for (std::size_t p : kGridP) {
    std::vector<McSummary> summaries;
    for (DeltaKind kind :
         {DeltaKind::WeakInt, DeltaKind::ModerateInt, DeltaKind::StrongInt}) {
      for (std::size_t n : kGridN) {
        DesignSpec design{n, p, 0.2, SigmaModel::InteractionDiag, kind};
        McSummary summary = run_ci_table(design, methods, reps, options.B,
                                         options.seed, options.threads);
        cells.push_back(json{{"design", design_json(design)},
                             {"delta_norm_sq", summary.delta_norm_sq},
                             {"wall_seconds", summary.wall_seconds}});
        summaries.push_back(std::move(summary));
      }
    }
    for (CiMethod method : methods) {
      const std::string name = ci_method_name(method);
      out << p << ',' << name << ",coverage";
      for (const McSummary& s : summaries) {
        out << ',' << fmt(s.ci.at(name).coverage, 3);
      }
      out << '\n' << p << ',' << name << ",length";
      for (const McSummary& s : summaries) {
        out << ',' << fmt(s.ci.at(name).mean_length, 3);
      }
      out << '\n';
    }
  }
}

}  // namespace

void reproduce_table(const std::string& table_id, const TableOptions& options,
                     const std::string& out_dir) {
  if (options.scale != "desk" && options.scale != "full") {
    throw InvalidInput("scale must be desk or full");
  }
  const bool full = options.scale == "full";
  std::filesystem::create_directories(out_dir);
  const auto start = std::chrono::steady_clock::now();

  json cells = json::array();
  const std::string csv_path = out_dir + "/table_" + table_id + ".csv";
  if (table_id == "1" || table_id == "2") {
    const std::size_t reps = options.reps
                                 ? options.reps
                                 : (full ? kFullPointReps : kDeskPointReps);
    write_point_table(csv_path, table_id == "1" ? 0.2 : 0.5, reps, options,
                      cells);
  } else if (table_id == "int") {
    const std::size_t reps =
        options.reps ? options.reps : (full ? kFullCiReps : kDeskCiReps);
    write_interaction_table(csv_path, reps, options, cells);
  } else {
    const std::size_t reps =
        options.reps ? options.reps : (full ? kFullCiReps : kDeskCiReps);
    write_ci_table(csv_path, table_sigma(table_id), reps, options, cells);
  }

  json manifest;
  manifest["table"] = table_id;
  manifest["scale"] = options.scale;
  manifest["seed"] = options.seed;
  manifest["B"] = options.B;
  manifest["threads"] = options.threads;
  manifest["reps_override"] = options.reps;
  manifest["version"] = "0.1.0";
  manifest["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  manifest["cells"] = cells;
  std::ofstream mf(out_dir + "/run_manifest.json");
  if (!mf) throw InvalidInput("cannot write manifest in '" + out_dir + "'");
  mf << manifest.dump(2) << '\n';
}

}  // namespace breakdate
