#include "cfie/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "cfie/errors.hpp"
#include "cfie/matrix_io.hpp"

namespace cfie {
namespace {

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string geometry_id(const ExperimentConfig& c) {
  if (c.geometry == "off") return std::filesystem::path(c.off).stem().string();
  char buf[64];
  std::snprintf(buf, sizeof buf, "cube_s%g_n%d", c.side, c.n);
  return buf;
}

}  // namespace

SurfaceMesh config_mesh(const ExperimentConfig& c) {
  if (c.geometry == "cube") return generate_cube_mesh(c.side, c.n);
  if (c.geometry == "off") return read_off_file(c.off);
  throw ParseError("config: geometry must be cube or off");
}

RunResult run_experiment(const ExperimentConfig& c, bool write_files) {
  validate_config(c);
  const auto start = std::chrono::steady_clock::now();
  const SurfaceMesh coarse = config_mesh(c);
  const std::string id = geometry_id(c);

  SweepOptions opts;
  opts.schemes = c.schemes;
  opts.scheme = c.scheme_options();
  opts.gmres.tol = c.tol;
  opts.gmres.restart = c.restart;
  opts.gmres.max_iter = c.max_iter;
  opts.alpha = c.alpha;
  opts.compute_cond = c.cond;
  // An OFF mesh without refinement is treated as unstructured.
  opts.structured = !(c.geometry == "off" && c.levels.front() == 0 && c.levels.size() == 1);

  RunResult result;
  auto hierarchy = [&] { return std::make_shared<const RefinementHierarchy>(dyadic_refine(coarse, c.levels.front())); };
  switch (c.experiment) {
    case ExperimentKind::solve:
      for (double f : c.f) {
        Problem p = make_problem(hierarchy(), id, f, c.alpha);
        if (!opts.structured) p.hierarchy.reset();
        SweepTable t = evaluate_schemes(p, c.schemes, opts);
        for (auto& r : t.rows) result.table.rows.push_back(std::move(r));
      }
      break;
    case ExperimentKind::refine:
      result.table = refinement_sweep(coarse, id, c.levels, c.f.front(), opts);
      break;
    case ExperimentKind::freq:
      result.table = frequency_sweep(hierarchy(), id, c.f, opts);
      break;
    case ExperimentKind::resonance:
      result.table = resonance_sweep(hierarchy(), id, c.f.front(), c.f.back(), static_cast<int>(c.f.size()), opts,
                                     c.refine_peak);
      break;
  }
  result.exit_code = result.table.failures() > 0 ? 2 : 0;

  nlohmann::json m;
  m["tool"] = "cfie";
  m["version"] = kVersion;
  m["experiment"] = to_string(c.experiment);
  m["config"] = serialize_config(c);
  m["seed"] = c.seed;
  m["geometry"] = id;
  m["mesh_fingerprint"] = coarse.fingerprint();
  m["rows"] = nlohmann::json::array();
  for (size_t i = 0; i < result.table.rows.size(); ++i) {
    const SweepRow& r = result.table.rows[i];
    nlohmann::json row;
    row["row"] = i;
    row["scheme"] = r.scheme;
    row["f_hz"] = r.f_hz;
    row["h_avg"] = r.h_avg;
    row["cond"] = finite_or_null(r.cond);
    row["iters"] = r.iters;
    row["converged"] = r.converged;
    if (r.refined) row["refined"] = true;
    row["true_residual"] = finite_or_null(r.true_residual);
    row["deviation_from_direct"] = finite_or_null(r.deviation);
    if (c.timing) row["wall_s"] = r.wall_s;
    if (!r.error.empty()) row["error"] = r.error;
    m["rows"].push_back(row);
  }
  m["failures"] = result.table.failures();
  m["exit_code"] = result.exit_code;
  if (c.timing) m["wall_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.manifest = m.dump(2) + "\n";

  if (write_files) {
    const std::filesystem::path out = c.out;
    std::filesystem::create_directories(out / "residuals");
    write_text_file(out / "results.csv", result.table.to_csv(c.timing));
    for (size_t i = 0; i < result.table.rows.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "row_%04zu.csv", i);
      write_text_file(out / "residuals" / name, residual_csv(result.table.rows[i].residuals));
    }
    write_text_file(out / "manifest.json", result.manifest);
  }
  return result;
}

}  // namespace cfie
