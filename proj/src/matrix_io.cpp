#include "cfie/matrix_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cfie/errors.hpp"

namespace cfie {
namespace {

static_assert(std::endian::native == std::endian::little, "dense binary I/O assumes a little-endian host");

constexpr char kMagic[8] = {'C', 'F', 'I', 'E', 'M', 'A', 'T', '1'};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct MmHeader {
  bool complex = false;
  long rows = 0, cols = 0, nnz = 0;
};

MmHeader read_header(std::istringstream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0) {
    throw ParseError("matrix market: missing %%MatrixMarket banner");
  }
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate") throw ParseError("matrix market: only coordinate matrices");
  if (symmetry != "general") throw ParseError("matrix market: only general symmetry is supported");
  MmHeader h;
  if (field == "complex") h.complex = true;
  else if (field != "real" && field != "integer") throw ParseError("matrix market: unsupported field " + field);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream size(line);
    if (!(size >> h.rows >> h.cols >> h.nnz) || h.rows < 0 || h.cols < 0 || h.nnz < 0) {
      throw ParseError("matrix market: bad size line");
    }
    return h;
  }
  throw ParseError("matrix market: missing size line");
}

template <typename Fn>
void read_entries(std::istringstream& in, const MmHeader& h, Fn add) {
  for (long k = 0; k < h.nnz; ++k) {
    long i, j;
    double re, im = 0.0;
    if (!(in >> i >> j >> re) || (h.complex && !(in >> im))) throw ParseError("matrix market: truncated entries");
    if (i < 1 || i > h.rows || j < 1 || j > h.cols) throw ParseError("matrix market: index out of range");
    add(i - 1, j - 1, re, im);
  }
}

}  // namespace

std::string to_matrix_market(const SparseMatrix& m) {
  std::ostringstream out;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << num(it.value()) << '\n';
    }
  }
  return out.str();
}

std::string to_matrix_market(const Eigen::MatrixXcd& m) {
  long nnz = 0;
  for (long j = 0; j < m.cols(); ++j) {
    for (long i = 0; i < m.rows(); ++i) nnz += m(i, j) != 0.0;
  }
  std::ostringstream out;
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
  for (long j = 0; j < m.cols(); ++j) {
    for (long i = 0; i < m.rows(); ++i) {
      if (m(i, j) == 0.0) continue;
      out << i + 1 << ' ' << j + 1 << ' ' << num(m(i, j).real()) << ' ' << num(m(i, j).imag()) << '\n';
    }
  }
  return out.str();
}

SparseMatrix read_matrix_market_real(std::string_view text) {
  std::istringstream in{std::string(text)};
  const MmHeader h = read_header(in);
  if (h.complex) throw ParseError("matrix market: expected a real matrix");
  std::vector<Eigen::Triplet<double>> t;
  read_entries(in, h, [&](long i, long j, double re, double) { t.emplace_back(i, j, re); });
  SparseMatrix m(h.rows, h.cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::MatrixXcd read_matrix_market_complex(std::string_view text) {
  std::istringstream in{std::string(text)};
  const MmHeader h = read_header(in);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(h.rows, h.cols);
  read_entries(in, h, [&](long i, long j, double re, double im) { m(i, j) += std::complex<double>(re, im); });
  return m;
}

std::string level_sidecar_csv(const SparseTransform& t) {
  std::ostringstream out;
  out << "column,level\n";
  for (int c = 0; c < t.cols(); ++c) out << c << ',' << (t.has_levels() ? t.levels[c] : 0) << '\n';
  return out.str();
}

std::string to_dense_binary(const Eigen::MatrixXcd& m) {
  std::string out(kMagic, sizeof kMagic);
  const std::uint64_t dims[2] = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  out.append(reinterpret_cast<const char*>(dims), sizeof dims);
  out.reserve(out.size() + 16 * m.size());
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) {
      const double v[2] = {m(i, j).real(), m(i, j).imag()};
      out.append(reinterpret_cast<const char*>(v), sizeof v);
    }
  }
  return out;
}

Eigen::MatrixXcd read_dense_binary(std::string_view bytes) {
  if (bytes.size() < 24 || std::memcmp(bytes.data(), kMagic, 8) != 0) throw ParseError("dense binary: bad magic");
  std::uint64_t dims[2];
  std::memcpy(dims, bytes.data() + 8, sizeof dims);
  if (dims[0] > (1u << 20) || dims[1] > (1u << 20) || bytes.size() != 24 + 16 * dims[0] * dims[1]) {
    throw ParseError("dense binary: size does not match the header");
  }
  Eigen::MatrixXcd m(dims[0], dims[1]);
  const char* p = bytes.data() + 24;
  for (std::uint64_t i = 0; i < dims[0]; ++i) {
    for (std::uint64_t j = 0; j < dims[1]; ++j) {
      double v[2];
      std::memcpy(v, p, sizeof v);
      p += sizeof v;
      m(i, j) = std::complex<double>(v[0], v[1]);
    }
  }
  return m;
}

std::string residual_csv(const std::vector<double>& residuals) {
  std::ostringstream out;
  out << "iter,resid\n";
  for (size_t i = 0; i < residuals.size(); ++i) out << i << ',' << num(residuals[i]) << '\n';
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cfie
