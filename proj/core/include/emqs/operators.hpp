#pragma once

#include "emqs/grid.hpp"
#include "emqs/materials.hpp"
#include "emqs/types.hpp"

namespace emqs {

/// Incidence matrices and diagonal material Hodge matrices of the grid
/// equations. G, C, D carry integer entries in {-1, 0, +1} and satisfy
/// C*G = 0 and D*C = 0 exactly.
struct OperatorSet {
  SpMat G;  // n_edges x n_nodes, gradient
  SpMat C;  // n_faces x n_edges, curl
  SpMat D;  // n_cells x n_faces, divergence

  Vec m_nu;         // per face, 1/H
  Vec m_kappa;      // per edge, S
  Vec m_eps;        // per edge, F
  Vec m_kappa_hat;  // per edge, S
};

/// Gradient/curl/divergence incidence matrices for the canonical ordering.
void build_incidence(const Grid& grid, SpMat& G, SpMat& C, SpMat& D);

/// Diagonal Hodge matrices. Edge parameters are averaged arithmetically over
/// the dual face (quarter-area weights of the <=4 adjacent cells); face
/// reluctivity is the series (harmonic-in-mu) average along the dual edge.
void build_hodges(const Grid& grid, const MaterialField& mat, Vec& m_nu, Vec& m_kappa,
                  Vec& m_eps, Vec& m_kappa_hat);

OperatorSet build_operators(const Grid& grid, const MaterialField& mat);

/// Edge Hodge for a single per-cell parameter (used for kappa, eps, kappa_hat).
Vec edge_hodge(const Grid& grid, const std::vector<double>& cell_values);

}  // namespace emqs
