#include "emqs/fields.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace emqs {

FieldSolution reconstruct_from_potentials(const VecC& a_full, const VecC& phi_full,
                                          double omega, const Grid& grid,
                                          const OperatorSet& ops) {
  if (a_full.size() != grid.n_edges() || phi_full.size() != grid.n_nodes())
    throw std::invalid_argument("reconstruct_fields: dimension mismatch");
  FieldSolution out;
  out.a_full = a_full;
  out.phi_full = phi_full;
  out.omega = omega;
  out.e_hat = -Complex(0.0, omega) * a_full - (ops.G * phi_full.eval()).eval();
  out.b_hat = ops.C * a_full;

  // Cell-centered averaging: per axis the 4 parallel edge voltages divided by
  // their lengths, and the 2 parallel facet fluxes divided by their areas.
  out.E.setZero(grid.n_cells(), 3);
  out.B.setZero(grid.n_cells(), 3);
  for (int c = 0; c < grid.n_cells(); ++c) {
    const auto [i, j, k] = grid.cell_coords(c);
    for (int axis = 0; axis < 3; ++axis) {
      const int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;
      Complex eacc = 0.0;
      for (int s1 = 0; s1 <= 1; ++s1) {
        for (int s2 = 0; s2 <= 1; ++s2) {
          std::array<int, 3> p{i, j, k};
          p[t1] += s1;
          p[t2] += s2;
          const int e = grid.edge_index(axis, p[0], p[1], p[2]);
          eacc += out.e_hat[e] / grid.edge_length(e);
        }
      }
      out.E(c, axis) = 0.25 * eacc;
      Complex bacc = 0.0;
      for (int s = 0; s <= 1; ++s) {
        std::array<int, 3> p{i, j, k};
        p[axis] += s;
        const int f = grid.face_index(axis, p[0], p[1], p[2]);
        bacc += out.b_hat[f] / grid.face_area(f);
      }
      out.B(c, axis) = 0.5 * bacc;
    }
  }
  return out;
}

FieldSolution reconstruct_fields(const AssembledSystem& system, const VecC& x,
                                 const Grid& grid, const OperatorSet& ops) {
  VecC a_full, phi_full;
  system.expand(x, a_full, phi_full);
  return reconstruct_from_potentials(a_full, phi_full, system.omega, grid, ops);
}

namespace {

ComparisonEntry compare_part(const Eigen::MatrixXd& cand, const Eigen::MatrixXd& ref,
                             double norm) {
  ComparisonEntry e;
  double acc = 0.0;
  for (int c = 0; c < ref.rows(); ++c) {
    const double diff = (cand.row(c) - ref.row(c)).norm();
    const double rel = (norm > 0.0) ? diff / norm : diff;
    acc += rel;
    if (rel > e.max_rel) {
      e.max_rel = rel;
      e.argmax_cell = c;
    }
  }
  e.mean_rel = ref.rows() ? acc / ref.rows() : 0.0;
  return e;
}

}  // namespace

ComparisonReport compare_fields(const FieldSolution& candidate, const FieldSolution& reference,
                                const Grid& grid) {
  if (candidate.E.rows() != grid.n_cells() || reference.E.rows() != grid.n_cells())
    throw std::invalid_argument("compare_fields: grid mismatch");
  // One normalization per quantity: the largest complex vector magnitude of
  // the reference, so a tiny real part next to a dominant imaginary part does
  // not blow up its relative numbers.
  auto global_max = [](const Eigen::MatrixXcd& m) {
    double v = 0.0;
    for (int c = 0; c < m.rows(); ++c) v = std::max(v, m.row(c).norm());
    return v;
  };
  const double en = global_max(reference.E);
  const double bn = global_max(reference.B);
  ComparisonReport r;
  r.e_real = compare_part(candidate.E.real(), reference.E.real(), en);
  r.e_imag = compare_part(candidate.E.imag(), reference.E.imag(), en);
  r.b_real = compare_part(candidate.B.real(), reference.B.real(), bn);
  r.b_imag = compare_part(candidate.B.imag(), reference.B.imag(), bn);
  return r;
}

void export_vtk(const FieldSolution& fields, const Grid& grid, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  // Legacy STRUCTURED_POINTS with the mean spacing; cell data carries the
  // exact per-cell values regardless of grid non-uniformity.
  const auto& s = grid.spec();
  auto mean = [](const std::vector<double>& v) {
    double a = 0.0;
    for (double x : v) a += x;
    return a / static_cast<double>(v.size());
  };
  f << "# vtk DataFile Version 3.0\n";
  f << "emqs fields omega=" << fields.omega << "\n";
  f << "ASCII\n";
  f << "DATASET STRUCTURED_POINTS\n";
  f << "DIMENSIONS " << s.nx + 1 << " " << s.ny + 1 << " " << s.nz + 1 << "\n";
  f << "ORIGIN " << s.origin[0] << " " << s.origin[1] << " " << s.origin[2] << "\n";
  f << "SPACING " << mean(s.spacing[0]) << " " << mean(s.spacing[1]) << " "
    << mean(s.spacing[2]) << "\n";
  f << "CELL_DATA " << grid.n_cells() << "\n";
  auto write_vectors = [&](const char* name, const Eigen::MatrixXd& m) {
    f << "VECTORS " << name << " double\n";
    char buf[128];
    for (int c = 0; c < m.rows(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", m(c, 0), m(c, 1), m(c, 2));
      f << buf;
    }
  };
  write_vectors("E_re", fields.E.real());
  write_vectors("E_im", fields.E.imag());
  write_vectors("B_re", fields.B.real());
  write_vectors("B_im", fields.B.imag());
}

void export_csv(const FieldSolution& fields, const Grid& grid, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << "cell,x,y,z,Ex_re,Ex_im,Ey_re,Ey_im,Ez_re,Ez_im,Bx_re,Bx_im,By_re,By_im,Bz_re,Bz_im\n";
  char buf[640];
  for (int c = 0; c < grid.n_cells(); ++c) {
    const auto p = grid.cell_center(c);
    std::snprintf(buf, sizeof(buf),
                  "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g,%.17g\n",
                  c, p[0], p[1], p[2], fields.E(c, 0).real(), fields.E(c, 0).imag(),
                  fields.E(c, 1).real(), fields.E(c, 1).imag(), fields.E(c, 2).real(),
                  fields.E(c, 2).imag(), fields.B(c, 0).real(), fields.B(c, 0).imag(),
                  fields.B(c, 1).real(), fields.B(c, 1).imag(), fields.B(c, 2).real(),
                  fields.B(c, 2).imag());
    f << buf;
  }
}

void import_csv(const std::string& path, Eigen::MatrixXcd& E, Eigen::MatrixXcd& B) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  std::getline(f, line);  // header
  std::vector<std::array<double, 16>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::array<double, 16> v{};
    std::stringstream ss(line);
    std::string tok;
    for (int i = 0; i < 16 && std::getline(ss, tok, ','); ++i) v[i] = std::stod(tok);
    rows.push_back(v);
  }
  const int n = static_cast<int>(rows.size());
  E.resize(n, 3);
  B.resize(n, 3);
  for (int c = 0; c < n; ++c) {
    const auto& v = rows[c];
    for (int a = 0; a < 3; ++a) {
      E(c, a) = Complex(v[4 + 2 * a], v[5 + 2 * a]);
      B(c, a) = Complex(v[10 + 2 * a], v[11 + 2 * a]);
    }
  }
}

}  // namespace emqs
