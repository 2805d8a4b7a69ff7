#include "emqs/matrix_market.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace emqs {

void write_matrix_market(const SpMat& A, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << "%%MatrixMarket matrix coordinate real general\n";
  f << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  char buf[96];
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n", static_cast<long>(it.row()) + 1,
                    static_cast<long>(it.col()) + 1, it.value());
      f << buf;
    }
  }
}

void write_matrix_market(const SpMatC& A, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << "%%MatrixMarket matrix coordinate complex general\n";
  f << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  char buf[128];
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SpMatC::InnerIterator it(A, k); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%ld %ld %.17g %.17g\n", static_cast<long>(it.row()) + 1,
                    static_cast<long>(it.col()) + 1, it.value().real(), it.value().imag());
      f << buf;
    }
  }
}

SpMatC read_matrix_market(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw std::runtime_error("not a Matrix Market file: " + path);
  const bool complex_vals = line.find("complex") != std::string::npos;
  if (line.find("coordinate") == std::string::npos)
    throw std::runtime_error("only coordinate format supported");
  while (std::getline(f, line))
    if (!line.empty() && line[0] != '%') break;
  long rows = 0, cols = 0, nnz = 0;
  {
    std::stringstream ss(line);
    ss >> rows >> cols >> nnz;
  }
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<size_t>(nnz));
  for (long i = 0; i < nnz; ++i) {
    long r = 0, c = 0;
    double re = 0.0, im = 0.0;
    f >> r >> c >> re;
    if (complex_vals) f >> im;
    t.emplace_back(static_cast<int>(r - 1), static_cast<int>(c - 1), Complex(re, im));
  }
  SpMatC A(static_cast<int>(rows), static_cast<int>(cols));
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

}  // namespace emqs
