#pragma once

#include <complex>
#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace emqs {

using Complex = std::complex<double>;
using SpMat = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<Complex>;
using VecC = Eigen::VectorXcd;
using Vec = Eigen::VectorXd;

namespace constants {
inline constexpr double eps0 = 8.8541878128e-12;   // F/m
inline constexpr double mu0 = 1.25663706212e-6;    // H/m
inline constexpr double c0 = 299792458.0;          // m/s
}  // namespace constants

}  // namespace emqs
