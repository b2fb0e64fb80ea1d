#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cfie/dense.hpp"
#include "cfie/schemes.hpp"

namespace cfie {

struct SpectrumReport {
  Eigen::VectorXd singular_values;  // descending
  double cond = 1.0;
  std::string mesh_id;
  double h_avg = 0.0;
  double f_hz = 0.0;
  std::string scheme;
};

SpectrumReport preconditioned_condition_number(const Problem& problem, const PreparedSystem& sys,
                                               int cap = kDenseCap);
SpectrumReport preconditioned_condition_number(const Problem& problem, const SchemeDescriptor& scheme,
                                               const SchemeOptions& opts = {}, int cap = kDenseCap);

struct SweepRow {
  std::string geometry;
  double h_avg = 0.0;
  double inv_h = 0.0;
  double f_hz = 0.0;
  std::string scheme;
  double cond = 0.0;  // NaN when not computed
  int iters = 0;
  bool converged = false;
  double wall_s = 0.0;
  std::vector<double> residuals;
  // ||i - i_direct|| / ||i_direct||, NaN when not checked.
  double deviation = 0.0;
  double true_residual = 0.0;
  // Added by peak refinement rather than the equispaced window grid.
  bool refined = false;
  std::string error;  // non-empty when the row failed
};

struct SweepTable {
  std::vector<SweepRow> rows;

  static std::string csv_header();
  // timing = false writes wall_s as 0 so reruns are byte-identical.
  std::string to_csv(bool timing = true) const;
  int failures() const;
  std::vector<const SweepRow*> select(const std::string& scheme) const;
};

struct SweepOptions {
  std::vector<SchemeDescriptor> schemes{SchemeDescriptor{}};
  SchemeOptions scheme;
  GmresOptions gmres;
  double alpha = kDefaultAlpha;
  QuadratureOptions quad;
  bool compute_cond = true;
  bool compute_iters = true;
  bool check_direct = true;
  // false: drop the hierarchy so non-solenoidal bases come from agglomeration.
  bool structured = true;
  int cap = kDenseCap;
};

// One row per scheme for an assembled problem.
SweepTable evaluate_schemes(const Problem& problem, const std::vector<SchemeDescriptor>& schemes,
                            const SweepOptions& opts);

// One row per (level, scheme) on dyadic refinements of `coarse`.
SweepTable refinement_sweep(const SurfaceMesh& coarse, const std::string& geometry, const std::vector<int>& levels,
                            double f_hz, const SweepOptions& opts);

// One row per (f, scheme); efie-none is always included as the reference.
SweepTable frequency_sweep(std::shared_ptr<const RefinementHierarchy> hierarchy, const std::string& geometry,
                           const std::vector<double>& f_hz, const SweepOptions& opts);

// Rows for efie-none, cfie-none and every requested scheme at `steps`
// equispaced frequencies in [f_lo, f_hi]. With refine_peak, extra
// frequencies are added around the largest EFIE condition number.
SweepTable resonance_sweep(std::shared_ptr<const RefinementHierarchy> hierarchy, const std::string& geometry,
                           double f_lo, double f_hi, int steps, const SweepOptions& opts, int refine_peak = 0);

// Largest condition number of one scheme over the median of its grid rows.
double spike_ratio(const SweepTable& table, const std::string& scheme);

// Cavity resonance (m, n, p) of an a x b x d box.
double box_resonance_hz(double a, double b, double d, int m, int n, int p);

}  // namespace cfie
