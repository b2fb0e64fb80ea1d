#include "cfie/dense.hpp"

#include <lapacke.h>

#include <string>

#include "cfie/errors.hpp"

namespace cfie {

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a, int cap) {
  if (a.rows() != a.cols()) throw_invalid("singular_values: matrix must be square");
  if (a.rows() > cap) {
    throw CapacityError("dense SVD of size " + std::to_string(a.rows()) + " exceeds the cap of " +
                        std::to_string(cap) + "; use iteration counts instead");
  }
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXd s(n);
  if (n == 0) return s;
  Eigen::MatrixXcd work = a;  // column-major copy, destroyed by LAPACK
  Eigen::VectorXd superb(std::max<lapack_int>(1, n - 1));
  const lapack_int info =
      LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', n, n, reinterpret_cast<lapack_complex_double*>(work.data()), n,
                     s.data(), nullptr, 1, nullptr, 1, superb.data());
  if (info != 0) throw std::runtime_error("zgesvd failed with info " + std::to_string(info));
  return s;
}

double condition_from(const Eigen::VectorXd& sv, int n) {
  if (sv.size() == 0) return 1.0;
  const double smax = sv(0), smin = sv(sv.size() - 1);
  if (!(smin > n * std::numeric_limits<double>::epsilon() * smax)) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

double condition_number(const Eigen::MatrixXcd& a, int cap) {
  return condition_from(singular_values(a, cap), static_cast<int>(a.rows()));
}

}  // namespace cfie
