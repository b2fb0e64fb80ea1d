#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cfie/basis.hpp"

namespace cfie {

// MatrixMarket coordinate format ("real general" / "complex general").
std::string to_matrix_market(const SparseMatrix& m);
std::string to_matrix_market(const Eigen::MatrixXcd& m);
SparseMatrix read_matrix_market_real(std::string_view text);
Eigen::MatrixXcd read_matrix_market_complex(std::string_view text);

// Sidecar CSV "column,level".
std::string level_sidecar_csv(const SparseTransform& t);

// Dense binary: magic "CFIEMAT1", uint64 rows, uint64 cols, then row-major
// (re, im) little-endian doubles.
std::string to_dense_binary(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd read_dense_binary(std::string_view bytes);

// Residual history "iter,resid".
std::string residual_csv(const std::vector<double>& residuals);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace cfie
