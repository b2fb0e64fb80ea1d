#include "cfie/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "cfie/errors.hpp"

namespace cfie {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<SchemeDescriptor> with_references(const std::vector<SchemeDescriptor>& schemes, bool cfie_none) {
  std::vector<SchemeDescriptor> out{SchemeDescriptor{Equation::efie, SchemeId::none}};
  if (cfie_none) out.push_back(SchemeDescriptor{Equation::cfie, SchemeId::none});
  for (const auto& s : schemes) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

void run_rows(const Problem& p, const std::vector<SchemeDescriptor>& schemes, const SweepOptions& opts,
              std::vector<SweepRow>& rows) {
  const MeshStatistics st = mesh_statistics(p.basis.mesh);
  std::map<Equation, CVector> direct;
  for (const SchemeDescriptor& s : schemes) {
    SweepRow row;
    row.geometry = p.geometry;
    row.h_avg = st.h_avg;
    row.inv_h = 1.0 / st.h_avg;
    row.f_hz = p.f_hz;
    row.scheme = s.name();
    row.cond = kNaN;
    row.deviation = kNaN;
    row.true_residual = kNaN;
    const auto start = Clock::now();
    try {
      const PreparedSystem sys = prepare_system(p, s, opts.scheme);
      if (opts.compute_cond) row.cond = preconditioned_condition_number(p, sys, opts.cap).cond;
      if (opts.compute_iters) {
        const SolveOutcome out = solve_prepared(p, sys, opts.gmres);
        row.iters = out.report.iterations;
        row.converged = out.report.converged;
        row.residuals = out.report.residuals;
        row.true_residual = out.true_residual;
        if (opts.check_direct && p.basis.size() <= opts.cap) {
          auto it = direct.find(s.equation);
          if (it == direct.end()) it = direct.emplace(s.equation, direct_solve(p, s.equation)).first;
          row.deviation = (out.current - it->second).norm() / it->second.norm();
        }
      } else {
        row.converged = true;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
      row.converged = false;
    }
    row.wall_s = std::chrono::duration<double>(Clock::now() - start).count();
    rows.push_back(std::move(row));
  }
}

Problem build(std::shared_ptr<const RefinementHierarchy> h, const std::string& geometry, double f,
              const SweepOptions& opts) {
  Problem p = make_problem(std::move(h), geometry, f, opts.alpha, opts.quad);
  if (!opts.structured) p.hierarchy.reset();
  return p;
}

}  // namespace

SweepTable evaluate_schemes(const Problem& problem, const std::vector<SchemeDescriptor>& schemes,
                            const SweepOptions& opts) {
  SweepTable table;
  run_rows(problem, schemes, opts, table.rows);
  return table;
}

SpectrumReport preconditioned_condition_number(const Problem& problem, const PreparedSystem& sys, int cap) {
  if (sys.size() > cap) {
    throw CapacityError("spectrum of size " + std::to_string(sys.size()) + " exceeds the dense cap " +
                        std::to_string(cap) + "; use iteration counts instead");
  }
  SpectrumReport rep;
  rep.singular_values = singular_values(sys.preconditioned_dense(), cap);
  rep.cond = condition_from(rep.singular_values, sys.size());
  rep.mesh_id = problem.geometry;
  rep.h_avg = mesh_statistics(problem.basis.mesh).h_avg;
  rep.f_hz = problem.f_hz;
  rep.scheme = sys.scheme.name();
  return rep;
}

SpectrumReport preconditioned_condition_number(const Problem& problem, const SchemeDescriptor& scheme,
                                               const SchemeOptions& opts, int cap) {
  return preconditioned_condition_number(problem, prepare_system(problem, scheme, opts), cap);
}

std::string SweepTable::csv_header() { return "geometry,h_avg,inv_h,f_hz,scheme,cond,iters,converged,wall_s"; }

std::string SweepTable::to_csv(bool timing) const {
  std::ostringstream out;
  out << csv_header() << '\n';
  for (const SweepRow& r : rows) {
    out << r.geometry << ',' << fmt(r.h_avg) << ',' << fmt(r.inv_h) << ',' << fmt(r.f_hz) << ',' << r.scheme << ','
        << fmt(r.cond) << ',' << r.iters << ',' << (r.converged ? "true" : "false") << ','
        << (timing ? fmt(r.wall_s) : std::string("0")) << '\n';
  }
  return out.str();
}

int SweepTable::failures() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); }));
}

std::vector<const SweepRow*> SweepTable::select(const std::string& scheme) const {
  std::vector<const SweepRow*> out;
  for (const SweepRow& r : rows) {
    if (r.scheme == scheme) out.push_back(&r);
  }
  return out;
}

SweepTable refinement_sweep(const SurfaceMesh& coarse, const std::string& geometry, const std::vector<int>& levels,
                            double f_hz, const SweepOptions& opts) {
  SweepTable table;
  for (int j : levels) {
    if (j < 0) throw_invalid("refinement_sweep: negative level");
    auto h = std::make_shared<const RefinementHierarchy>(dyadic_refine(coarse, j));
    try {
      const Problem p = build(h, geometry, f_hz, opts);
      run_rows(p, opts.schemes, opts, table.rows);
    } catch (const std::exception& e) {
      for (const auto& s : opts.schemes) {
        SweepRow row;
        row.geometry = geometry;
        row.f_hz = f_hz;
        row.scheme = s.name();
        row.cond = kNaN;
        row.error = e.what();
        table.rows.push_back(row);
      }
    }
  }
  return table;
}

SweepTable frequency_sweep(std::shared_ptr<const RefinementHierarchy> hierarchy, const std::string& geometry,
                           const std::vector<double>& f_hz, const SweepOptions& opts) {
  SweepTable table;
  const auto schemes = with_references(opts.schemes, false);
  for (double f : f_hz) {
    const Problem p = build(hierarchy, geometry, f, opts);
    run_rows(p, schemes, opts, table.rows);
  }
  return table;
}

SweepTable resonance_sweep(std::shared_ptr<const RefinementHierarchy> hierarchy, const std::string& geometry,
                           double f_lo, double f_hi, int steps, const SweepOptions& opts, int refine_peak) {
  if (steps < 1) throw_invalid("resonance_sweep: steps must be at least 1");
  if (!(f_lo > 0.0) || f_hi < f_lo) throw_invalid("resonance_sweep: invalid frequency window");
  const auto schemes = with_references(opts.schemes, true);
  std::vector<std::pair<double, std::vector<SweepRow>>> points;
  auto evaluate = [&](double f, bool refined = true) {
    std::vector<SweepRow> rows;
    run_rows(build(hierarchy, geometry, f, opts), schemes, opts, rows);
    for (SweepRow& r : rows) r.refined = refined;
    points.emplace_back(f, std::move(rows));
    return points.back().second.front().cond;  // efie-none comes first
  };
  for (int i = 0; i < steps; ++i) {
    evaluate(steps == 1 ? f_lo : f_lo + (f_hi - f_lo) * i / (steps - 1), false);
  }
  if (refine_peak > 0 && steps >= 3 && opts.compute_cond) {
    int best = 0;
    for (int i = 1; i < steps; ++i) {
      if (points[i].second.front().cond > points[best].second.front().cond) best = i;
    }
    if (best > 0 && best < steps - 1) {
      // Golden-section search for the EFIE maximum between the neighbours.
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      double a = points[best - 1].first, b = points[best + 1].first;
      double c = b - g * (b - a), d = a + g * (b - a);
      double fc = evaluate(c), fd = evaluate(d);
      for (int it = 2; it < refine_peak; ++it) {
        if (fc > fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - g * (b - a);
          fc = evaluate(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + g * (b - a);
          fd = evaluate(d);
        }
      }
    }
  }
  std::stable_sort(points.begin(), points.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  SweepTable table;
  for (auto& pt : points) {
    for (auto& r : pt.second) table.rows.push_back(std::move(r));
  }
  return table;
}

double spike_ratio(const SweepTable& table, const std::string& scheme) {
  std::vector<double> grid;
  double peak = kNaN;
  for (const SweepRow* r : table.select(scheme)) {
    if (std::isnan(r->cond)) continue;
    if (std::isnan(peak) || r->cond > peak) peak = r->cond;
    if (!r->refined) grid.push_back(r->cond);
  }
  if (grid.empty()) return kNaN;
  std::sort(grid.begin(), grid.end());
  const size_t m = grid.size();
  const double median = m % 2 ? grid[m / 2] : 0.5 * (grid[m / 2 - 1] + grid[m / 2]);
  return peak / median;
}

double box_resonance_hz(double a, double b, double d, int m, int n, int p) {
  const double x = m / a, y = n / b, z = p / d;
  return 0.5 * kSpeedOfLight * std::sqrt(x * x + y * y + z * z);
}

}  // namespace cfie
