#pragma once

#include <string>

#include "emqs/formulations.hpp"
#include "emqs/grid.hpp"
#include "emqs/operators.hpp"
#include "emqs/types.hpp"

namespace emqs {

/// Physical fields recovered from potential DOFs: edge voltages
/// e = -j w a - G phi, facet fluxes b = C a, and cell-centered E/B phasors.
struct FieldSolution {
  VecC a_full;    // per edge, Wb
  VecC phi_full;  // per node, V
  VecC e_hat;     // per edge, V
  VecC b_hat;     // per face, Wb
  Eigen::MatrixXcd E;  // n_cells x 3, V/m
  Eigen::MatrixXcd B;  // n_cells x 3, T
  double omega = 0.0;
};

FieldSolution reconstruct_fields(const AssembledSystem& system, const VecC& x,
                                 const Grid& grid, const OperatorSet& ops);

/// From full entity vectors (time-domain states, oracle phasors).
FieldSolution reconstruct_from_potentials(const VecC& a_full, const VecC& phi_full,
                                          double omega, const Grid& grid,
                                          const OperatorSet& ops);

struct ComparisonEntry {
  double max_rel = 0.0;
  double mean_rel = 0.0;
  int argmax_cell = -1;
};

/// Per quantity (E, B) and part (real, imaginary), relative differences
/// normalized by the global maximum complex magnitude of the reference
/// quantity.
struct ComparisonReport {
  ComparisonEntry e_real, e_imag, b_real, b_imag;
};

ComparisonReport compare_fields(const FieldSolution& candidate, const FieldSolution& reference,
                                const Grid& grid);

void export_vtk(const FieldSolution& fields, const Grid& grid, const std::string& path);
void export_csv(const FieldSolution& fields, const Grid& grid, const std::string& path);

/// Reads back the E/B cell data written by export_csv (bit-exact round trip).
void import_csv(const std::string& path, Eigen::MatrixXcd& E, Eigen::MatrixXcd& B);

}  // namespace emqs
