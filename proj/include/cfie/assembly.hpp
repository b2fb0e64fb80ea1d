#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Core>

#include "cfie/basis.hpp"

namespace cfie {

using cdouble = std::complex<double>;

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kEta0 = 376.730313668;
constexpr double kDefaultAlpha = 0.5;

double wavenumber(double f_hz);

enum class Formulation { za, zphi, ze, zm, zc, gram, transformed };

const char* to_string(Formulation f);

struct SystemMatrix {
  Eigen::MatrixXcd values;
  Formulation formulation = Formulation::ze;
  double k = 0.0;
  double alpha = 0.0;
  std::uint64_t fingerprint = 0;

  int size() const { return static_cast<int>(values.rows()); }
};

// far_boost raises every regular-pair Gauss order; singular_order sets the
// Sauter-Schwab order for touching pairs.
struct QuadratureOptions {
  int singular_order = 8;
  int far_boost = 0;
};

// Gauss order for a non-touching pair at separation ratio s
// (centroid distance over the sum of circumradii about the centroids).
int regular_pair_order(double separation, int boost = 0);

// Element-pair integrals on triangles (t, u). Local index i refers to the RWG
// whose free vertex is local vertex i; signs are not applied.
//   a(i,j) = int_t int_u (r - p_i).(r' - q_j) G
//   v      = int_t int_u G
//   kt(i,j) = -int_t int_u (r - p_i).(n_t x (grad_r G x (r' - q_j)))
//   ku(j,i) = same with the roles of t and u exchanged
// The 1/(2A) RWG factors are already folded in, so a(i,j) * s_i s_j is the
// contribution to the Galerkin entry.
struct PairIntegrals {
  Eigen::Matrix3cd a;
  cdouble v;
  Eigen::Matrix3cd kt;
  Eigen::Matrix3cd ku;
};

PairIntegrals pair_integrals(const SurfaceMesh& mesh, int t, int u, double k, bool with_k,
                             const QuadratureOptions& opts = {});

// Single-pass assembly. Keeps the scalar potential factored as
// Z_Phi = -(1/(ik)) D V D^T so solenoidal columns are annihilated exactly.
struct OperatorSet {
  double k = 0.0;
  std::uint64_t fingerprint = 0;
  Eigen::MatrixXcd za;    // -ik int int f.f G
  Eigen::MatrixXcd vtt;   // int int G per triangle pair
  Eigen::MatrixXcd kmat;  // empty unless requested
  Eigen::MatrixXd gram;
};

OperatorSet assemble_operators(const RwgBasis& basis, double k, bool with_mfie,
                               const QuadratureOptions& opts = {});

struct EfieMatrices {
  SystemMatrix za;
  SystemMatrix zphi;
};

EfieMatrices assemble_efie(const RwgBasis& basis, double k, const QuadratureOptions& opts = {});
SystemMatrix assemble_mfie(const RwgBasis& basis, double k, const QuadratureOptions& opts = {});
SystemMatrix assemble_gram(const RwgBasis& basis);

SystemMatrix scalar_potential(const RwgBasis& basis, const OperatorSet& ops);
SystemMatrix efie_matrix(const RwgBasis& basis, const OperatorSet& ops);
SystemMatrix mfie_matrix(const OperatorSet& ops);

// alpha Z_E + (1 - alpha) eta Z_M. Endpoints 0 and 1 require allow_endpoints.
SystemMatrix combine_cfie(const SystemMatrix& ze, const SystemMatrix& zm, double alpha, double eta,
                          bool allow_endpoints = false);

// L^T Z_E R with the scalar potential through the exact divergence of L, R.
Eigen::MatrixXcd transformed_efie(const RwgBasis& basis, const OperatorSet& ops, const SparseMatrix& left,
                                  const SparseMatrix& right);

struct PlaneWave {
  Vec3 direction{0.0, 0.0, -1.0};
  Vec3 polarization{1.0, 0.0, 0.0};
  double amplitude = 1.0;
  double k = 1.0;
  double eta = kEta0;
};

void validate_plane_wave(const PlaneWave& wave);

// v_E = (f, E_tan) and eta v_M = (f, n x (k_hat x E)).
struct RhsParts {
  Eigen::VectorXcd ve;
  Eigen::VectorXcd eta_vm;
};

RhsParts plane_wave_parts(const RwgBasis& basis, const PlaneWave& wave);
Eigen::VectorXcd plane_wave_rhs(const RwgBasis& basis, const PlaneWave& wave, double alpha);

struct StaticBlocks {
  Eigen::MatrixXcd ll, ls, sl, ss;
  double norm_ll = 0, norm_ls = 0, norm_sl = 0, norm_ss = 0, norm_total = 0;
  // ||Z_LS||_F / ||T^T Z_E T||_F.
  double off_diagonal_ratio() const { return norm_ls / norm_total; }
};

// Blocks of T^T Z_E T for T = [Lambda / sqrt(k), Sigma sqrt(k)].
StaticBlocks static_limit_blocks(const RwgBasis& basis, const SparseTransform& loops,
                                 const SparseTransform& stars, double k_small,
                                 const QuadratureOptions& opts = {});

}  // namespace cfie
