#include "emqs/formulations.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "emqs/errors.hpp"

namespace emqs {

namespace {

using Trip = Eigen::Triplet<Complex>;

SpMatC to_complex(const SpMat& A) { return A.cast<Complex>(); }

SpMatC diag_sp(const VecC& d) {
  SpMatC m(d.size(), d.size());
  m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
  for (int i = 0; i < d.size(); ++i) m.insert(i, i) = d[i];
  m.makeCompressed();
  return m;
}

VecC cvec(const Vec& v) { return v.cast<Complex>(); }

/// Mirror the upper triangle into the lower one so M = M^T holds entrywise
/// exactly, not just up to product-accumulation roundoff.
SpMatC sym_exact(const SpMatC& A) {
  std::vector<Trip> t;
  t.reserve(A.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SpMatC::InnerIterator it(A, k); it; ++it) {
      if (it.row() <= it.col()) {
        t.emplace_back(it.row(), it.col(), it.value());
        if (it.row() < it.col()) t.emplace_back(it.col(), it.row(), it.value());
      }
    }
  }
  SpMatC S(A.rows(), A.cols());
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

SpMatC selection(const std::vector<int>& keep, int n) {
  SpMatC S(static_cast<int>(keep.size()), n);
  S.reserve(Eigen::VectorXi::Constant(static_cast<int>(keep.size()), 1));
  for (int r = 0; r < static_cast<int>(keep.size()); ++r) S.insert(r, keep[r]) = 1.0;
  S.makeCompressed();
  return S;
}

struct Ctx {
  const Grid& grid;
  const OperatorSet& ops;
  const Excitation& exc;
  double omega;
  DofPartition part;
  SpMatC Gc;
  SpMatC curlcurl;  // C^T M_nu C, exactly symmetric
  VecC msig;        // m_kappa + j w m_eps
  VecC js;          // full edge source vector

  Ctx(const Grid& g, const OperatorSet& o, const Excitation& e, double w,
      bool with_multiplier = false)
      : grid(g), ops(o), exc(e), omega(w) {
    if (!(w > 0.0))
      throw StaticLimitError("frequency-domain assembly requires omega > 0 (static limit rejected)");
    part = make_partition(g, e, with_multiplier);
    Gc = to_complex(o.G);
    SpMatC Cc = to_complex(o.C);
    SpMatC cc = SpMatC(Cc.transpose()) * diag_sp(cvec(o.m_nu)) * Cc;
    curlcurl = sym_exact(cc);
    msig = cvec(o.m_kappa) + Complex(0.0, w) * cvec(o.m_eps);
    js = e.j_s.size() ? e.j_s : VecC::Zero(g.n_edges());
    if (js.size() != g.n_edges()) throw std::invalid_argument("j_s size mismatch");
  }

  Complex jw() const { return Complex(0.0, omega); }

  VecC nodal_dirichlet(bool psi) const {
    VecC d = VecC::Zero(grid.n_nodes());
    const Complex scale = psi ? 1.0 / jw() : Complex(1.0, 0.0);
    for (int n : exc.source_nodes) d[n] = exc.phi_source * scale;
    for (int n : exc.ground_nodes) d[n] = exc.phi_ground * scale;
    return d;
  }
};

/// Compose the full two-block system, then restrict rows/columns to the free
/// DOFs, folding Dirichlet columns into the rhs.
AssembledSystem reduce_two_block(const Ctx& ctx, const SpMatC& A11, const SpMatC& A12,
                                 const SpMatC& A21, const SpMatC& A22, const VecC& rhs1,
                                 const VecC& rhs2, bool psi) {
  const int ne = ctx.grid.n_edges();
  const int nn = ctx.grid.n_nodes();
  std::vector<Trip> t;
  t.reserve(A11.nonZeros() + A12.nonZeros() + A21.nonZeros() + A22.nonZeros());
  auto add = [&t](const SpMatC& B, int ro, int co) {
    for (int k = 0; k < B.outerSize(); ++k)
      for (SpMatC::InnerIterator it(B, k); it; ++it)
        t.emplace_back(static_cast<int>(it.row()) + ro, static_cast<int>(it.col()) + co,
                       it.value());
  };
  add(A11, 0, 0);
  add(A12, 0, ne);
  add(A21, ne, 0);
  add(A22, ne, ne);
  SpMatC A(ne + nn, ne + nn);
  A.setFromTriplets(t.begin(), t.end());

  AssembledSystem sys;
  sys.partition = ctx.part;
  sys.uses_psi = psi;
  sys.omega = ctx.omega;
  sys.nodal_dirichlet = ctx.nodal_dirichlet(psi);

  std::vector<int> keep = ctx.part.free_edges;
  keep.reserve(keep.size() + ctx.part.free_nodes.size());
  for (int n : ctx.part.free_nodes) keep.push_back(ne + n);
  SpMatC S = selection(keep, ne + nn);

  VecC xc = VecC::Zero(ne + nn);
  xc.tail(nn) = sys.nodal_dirichlet;
  for (int n : ctx.part.free_nodes) xc[ne + n] = 0.0;

  sys.matrix = S * A * SpMatC(S.transpose());
  VecC rhs_full(ne + nn);
  rhs_full << rhs1, rhs2;
  VecC folded = rhs_full - A * xc;
  sys.rhs.resize(keep.size());
  for (int r = 0; r < static_cast<int>(keep.size()); ++r) sys.rhs[r] = folded[keep[r]];
  return sys;
}

int count_void_interior_nodes(const Ctx& ctx, const Vec& edge_weight) {
  // Gauge nodes whose every adjacent edge carries zero weight span the
  // gradient kernel of the (weight-regularized) curlcurl block.
  int count = 0;
  for (int n : ctx.part.gauge_nodes) {
    bool all_zero = true;
    for (SpMatC::InnerIterator it(ctx.Gc, n); it && all_zero; ++it)
      if (edge_weight[it.row()] != 0.0) all_zero = false;
    if (all_zero) ++count;
  }
  return count;
}

}  // namespace

DofPartition make_partition(const Grid& grid, const Excitation& exc, bool with_multiplier) {
  DofPartition p;
  p.edge_to_free.assign(grid.n_edges(), -1);
  for (int e = 0; e < grid.n_edges(); ++e) {
    if (!grid.is_boundary_edge(e)) {
      p.edge_to_free[e] = static_cast<int>(p.free_edges.size());
      p.free_edges.push_back(e);
    }
  }
  std::unordered_set<int> constrained(exc.source_nodes.begin(), exc.source_nodes.end());
  constrained.insert(exc.ground_nodes.begin(), exc.ground_nodes.end());
  if (constrained.size() != exc.source_nodes.size() + exc.ground_nodes.size())
    throw std::invalid_argument("source and ground terminal node sets must be disjoint");
  p.node_to_free.assign(grid.n_nodes(), -1);
  p.node_to_gauge.assign(grid.n_nodes(), -1);
  for (int n = 0; n < grid.n_nodes(); ++n) {
    if (constrained.count(n)) continue;
    p.node_to_free[n] = static_cast<int>(p.free_nodes.size());
    p.free_nodes.push_back(n);
    if (!grid.is_boundary_node(n)) {
      p.node_to_gauge[n] = static_cast<int>(p.gauge_nodes.size());
      p.gauge_nodes.push_back(n);
    }
  }
  p.n_a = static_cast<int>(p.free_edges.size());
  p.n_phi = static_cast<int>(p.free_nodes.size());
  p.n_gamma = with_multiplier ? static_cast<int>(p.gauge_nodes.size()) : 0;
  return p;
}

void AssembledSystem::expand(const VecC& x, VecC& a_full, VecC& phi_full) const {
  if (x.size() < partition.n_a + partition.n_phi)
    throw std::invalid_argument("solution size does not match partition");
  a_full = VecC::Zero(static_cast<int>(partition.edge_to_free.size()));
  for (int i = 0; i < partition.n_a; ++i) a_full[partition.free_edges[i]] = x[i];
  VecC nodal = nodal_dirichlet;
  for (int i = 0; i < partition.n_phi; ++i) nodal[partition.free_nodes[i]] = x[partition.n_a + i];
  if (uses_psi) {
    phi_full = Complex(0.0, omega) * nodal;
  } else {
    phi_full = nodal;
  }
}

AssembledSystem fd_monolithic_darwin(const Grid& grid, const OperatorSet& ops,
                                     const Excitation& exc, double omega) {
  Ctx ctx(grid, ops, exc, omega);
  const Complex jw = ctx.jw();
  SpMatC A11 = ctx.curlcurl + diag_sp(jw * cvec(ops.m_kappa));
  SpMatC A12 = diag_sp(ctx.msig) * ctx.Gc;
  SpMatC A21 = SpMatC(ctx.Gc.transpose()) * diag_sp(cvec(ops.m_kappa));
  SpMatC A22 = (1.0 / jw) * SpMatC(SpMatC(ctx.Gc.transpose()) * diag_sp(ctx.msig) * ctx.Gc);
  VecC rhs2 = (1.0 / jw) * (ctx.Gc.transpose() * ctx.js);
  auto sys = reduce_two_block(ctx, A11, A12, A21, A22, ctx.js, rhs2, false);
  sys.formulation = "monolithic";
  sys.expected_singular = true;
  return sys;
}

AssembledSystem fd_darwin_regularized(const Grid& grid, const OperatorSet& ops,
                                      const Excitation& exc, double omega, bool scaled_psi) {
  Ctx ctx(grid, ops, exc, omega);
  const Complex jw = ctx.jw();
  const VecC mkh = cvec(ops.m_kappa) + cvec(ops.m_kappa_hat);
  SpMatC A11 = ctx.curlcurl + diag_sp(jw * cvec(ops.m_kappa));
  SpMatC A12 = diag_sp(ctx.msig) * ctx.Gc;
  SpMatC A21 = SpMatC(ctx.Gc.transpose()) * diag_sp(mkh);
  SpMatC A22 = SpMatC(SpMatC(ctx.Gc.transpose()) * diag_sp(ctx.msig) * ctx.Gc);
  VecC rhs2 = ctx.Gc.transpose() * ctx.js;
  AssembledSystem sys;
  if (scaled_psi) {
    sys = reduce_two_block(ctx, A11, SpMatC(jw * A12), SpMatC(jw * A21), SpMatC(jw * A22),
                           ctx.js, rhs2, true);
    sys.formulation = "regularized-psi";
  } else {
    sys = reduce_two_block(ctx, A11, A12, A21, SpMatC((1.0 / jw) * A22), ctx.js,
                           VecC((1.0 / jw) * rhs2), false);
    sys.formulation = "regularized";
  }
  bool all_covered = true;
  for (int e : ctx.part.free_edges)
    if (!(ops.m_kappa[e] + ops.m_kappa_hat[e] > 0.0)) all_covered = false;
  sys.expected_singular = !all_covered;
  return sys;
}

AssembledSystem fd_symmetric_full_continuity(const Grid& grid, const OperatorSet& ops,
                                             const Excitation& exc, double omega) {
  auto sys = fd_dd_combined_gauge(grid, ops, exc, omega, Complex(0.0, omega));
  sys.formulation = "symmetric";
  return sys;
}

AssembledSystem fd_dd_combined_gauge(const Grid& grid, const OperatorSet& ops,
                                     const Excitation& exc, double omega, Complex beta) {
  Ctx ctx(grid, ops, exc, omega);
  if (beta == Complex(0.0, 0.0)) throw std::invalid_argument("beta must be nonzero");
  const Complex jw = ctx.jw();
  const VecC msb = cvec(ops.m_kappa) + beta * cvec(ops.m_eps);
  SpMatC A11 = ctx.curlcurl + diag_sp(jw * cvec(ops.m_kappa));
  SpMatC A12 = diag_sp(msb) * ctx.Gc;
  SpMatC A21 = SpMatC(A12.transpose());
  SpMatC A22 =
      (1.0 / beta) * sym_exact(SpMatC(SpMatC(ctx.Gc.transpose()) * diag_sp(msb) * ctx.Gc));
  VecC rhs2 = (1.0 / beta) * (ctx.Gc.transpose() * ctx.js);
  if (ctx.exc.rho_s.size()) {
    if (ctx.exc.rho_s.size() != grid.n_nodes())
      throw std::invalid_argument("rho_s size mismatch");
    rhs2 += beta * ctx.exc.rho_s;
  }
  auto sys = reduce_two_block(ctx, A11, A12, A21, A22, ctx.js, rhs2, false);
  sys.formulation = "dd-combined";
  sys.is_symmetric = true;
  sys.expected_singular = false;
  return sys;
}

Vec default_gauge_weight(const Grid& grid, const OperatorSet& ops, const DofPartition& part,
                         double omega) {
  // Diagonal N over the gauge nodes: per-node mean of (omega * M_eps)^2 over
  // adjacent edges, then scaled so the largest diagonal of the grad-div
  // augmentation matches the largest diagonal of the curlcurl block.
  const int ng = static_cast<int>(part.gauge_nodes.size());
  Vec n0(ng);
  for (int gi = 0; gi < ng; ++gi) {
    const int node = part.gauge_nodes[gi];
    double acc = 0.0;
    int cnt = 0;
    for (SpMat::InnerIterator it(ops.G, node); it; ++it) {
      const double w = omega * ops.m_eps[it.row()];
      acc += w * w;
      ++cnt;
    }
    n0[gi] = acc / std::max(cnt, 1);
  }

  // max diagonal of the grad-div term with weight n0
  double gd_max = 0.0;
  Vec diag_gd = Vec::Zero(grid.n_edges());
  for (int gi = 0; gi < ng; ++gi) {
    const int node = part.gauge_nodes[gi];
    for (SpMat::InnerIterator it(ops.G, node); it; ++it) {
      const double v = omega * ops.m_eps[it.row()] * it.value();
      diag_gd[it.row()] += v * v / n0[gi];
    }
  }
  for (int e : part.free_edges) gd_max = std::max(gd_max, diag_gd[e]);

  double cc_max = 0.0;
  SpMat cc = SpMat(ops.C.transpose()) * SpMat(ops.m_nu.asDiagonal() * ops.C);
  for (int e : part.free_edges) cc_max = std::max(cc_max, cc.coeff(e, e));

  const double scale = (cc_max > 0.0 && gd_max > 0.0) ? gd_max / cc_max : 1.0;
  return scale * n0;
}

namespace {

/// Restriction of M_eps * G to the gauge-node columns (full edge rows).
SpMatC gauge_constraint_matrix(const Ctx& ctx) {
  std::vector<Trip> t;
  for (int gi = 0; gi < static_cast<int>(ctx.part.gauge_nodes.size()); ++gi) {
    const int node = ctx.part.gauge_nodes[gi];
    for (SpMatC::InnerIterator it(ctx.Gc, node); it; ++it)
      t.emplace_back(static_cast<int>(it.row()), gi,
                     Complex(ctx.ops.m_eps[it.row()], 0.0) * it.value());
  }
  SpMatC B(ctx.grid.n_edges(), static_cast<int>(ctx.part.gauge_nodes.size()));
  B.setFromTriplets(t.begin(), t.end());
  return B;
}

}  // namespace

AssembledSystem fd_lagrange_coulomb(const Grid& grid, const OperatorSet& ops,
                                    const Excitation& exc, double omega, const Vec& N_diag) {
  Ctx ctx(grid, ops, exc, omega, /*with_multiplier=*/true);
  const Complex jw = ctx.jw();
  if (N_diag.size() && N_diag.size() != static_cast<int>(ctx.part.gauge_nodes.size()))
    throw std::invalid_argument("N diagonal must have one entry per gauge node");

  SpMatC A11 = ctx.curlcurl + diag_sp(jw * cvec(ops.m_kappa));
  SpMatC A12 = diag_sp(ctx.msig) * ctx.Gc;
  SpMatC A21 = SpMatC(A12.transpose());
  SpMatC A22 =
      (1.0 / jw) * sym_exact(SpMatC(SpMatC(ctx.Gc.transpose()) * diag_sp(ctx.msig) * ctx.Gc));
  VecC rhs2 = (1.0 / jw) * (ctx.Gc.transpose() * ctx.js);
  auto sys = reduce_two_block(ctx, A11, A12, A21, A22, ctx.js, rhs2, false);

  // Append the multiplier block in reduced coordinates; gauge nodes touch
  // only free edges, so no Dirichlet folding arises here.
  const int n2 = sys.partition.n_a + sys.partition.n_phi;
  const int ng = sys.partition.n_gamma;
  SpMatC B = gauge_constraint_matrix(ctx);  // M_eps G over gauge columns
  std::vector<Trip> t;
  t.reserve(sys.matrix.nonZeros() + 2 * B.nonZeros() + ng);
  for (int k = 0; k < sys.matrix.outerSize(); ++k)
    for (SpMatC::InnerIterator it(sys.matrix, k); it; ++it)
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int k = 0; k < B.outerSize(); ++k) {
    for (SpMatC::InnerIterator it(B, k); it; ++it) {
      const int ef = sys.partition.edge_to_free[static_cast<int>(it.row())];
      if (ef < 0) continue;
      const Complex v = jw * it.value();
      t.emplace_back(ef, n2 + static_cast<int>(it.col()), v);
      t.emplace_back(n2 + static_cast<int>(it.col()), ef, v);
    }
  }
  for (int gi = 0; gi < ng; ++gi)
    if (N_diag.size()) t.emplace_back(n2 + gi, n2 + gi, Complex(N_diag[gi], 0.0));
  SpMatC M(n2 + ng, n2 + ng);
  M.setFromTriplets(t.begin(), t.end());
  sys.matrix = std::move(M);
  VecC rhs(n2 + ng);
  rhs.head(n2) = sys.rhs;
  rhs.tail(ng).setZero();
  sys.rhs = std::move(rhs);
  sys.formulation = "lagrange";
  sys.is_symmetric = true;
  sys.expected_singular = false;
  return sys;
}

AssembledSystem fd_graddiv_schur(const Grid& grid, const OperatorSet& ops,
                                 const Excitation& exc, double omega, const Vec& N_diag) {
  Ctx ctx(grid, ops, exc, omega);
  const Complex jw = ctx.jw();
  if (N_diag.size() != static_cast<int>(ctx.part.gauge_nodes.size()))
    throw std::invalid_argument("Schur grad-div needs an SPD diagonal N over gauge nodes");
  for (int i = 0; i < N_diag.size(); ++i)
    if (!(N_diag[i] > 0.0)) throw std::invalid_argument("N must be positive definite");

  SpMatC B = gauge_constraint_matrix(ctx);
  VecC ninv(N_diag.size());
  for (int i = 0; i < N_diag.size(); ++i) ninv[i] = 1.0 / N_diag[i];
  SpMatC graddiv = sym_exact(SpMatC(B * diag_sp(ninv) * SpMatC(B.transpose())));

  SpMatC A11 = SpMatC(ctx.curlcurl + (omega * omega) * graddiv) +
               diag_sp(jw * cvec(ops.m_kappa));
  SpMatC A12 = diag_sp(ctx.msig) * ctx.Gc;
  SpMatC A21 = SpMatC(A12.transpose());
  SpMatC A22 =
      (1.0 / jw) * sym_exact(SpMatC(SpMatC(ctx.Gc.transpose()) * diag_sp(ctx.msig) * ctx.Gc));
  VecC rhs2 = (1.0 / jw) * (ctx.Gc.transpose() * ctx.js);
  auto sys = reduce_two_block(ctx, A11, A12, A21, A22, ctx.js, rhs2, false);
  sys.formulation = "graddiv";
  sys.is_symmetric = true;
  sys.expected_singular = false;
  return sys;
}

namespace {

AssembledSystem eqs_block_triangular(const Grid& grid, const OperatorSet& ops,
                                     const Excitation& exc, double omega, bool full_maxwell) {
  Ctx ctx(grid, ops, exc, omega);
  const Complex jw = ctx.jw();
  VecC a_diag;
  if (full_maxwell) {
    a_diag = jw * ctx.msig;  // j w M_kappa - w^2 M_eps
  } else {
    a_diag = jw * (cvec(ops.m_kappa) + cvec(ops.m_kappa_hat));
  }
  SpMatC A11 = ctx.curlcurl + diag_sp(a_diag);
  SpMatC A12 = diag_sp(ctx.msig) * ctx.Gc;
  SpMatC A21(grid.n_nodes(), grid.n_edges());  // exactly zero: EQS gauge decouples phi
  SpMatC A22 = SpMatC(SpMatC(ctx.Gc.transpose()) * diag_sp(ctx.msig) * ctx.Gc);
  VecC rhs2 = ctx.Gc.transpose() * ctx.js;
  auto sys = reduce_two_block(ctx, A11, A12, A21, A22, ctx.js, rhs2, false);
  sys.block_triangular = true;
  if (full_maxwell) {
    sys.formulation = "tsm";
    sys.expected_singular = false;
  } else {
    sys.formulation = "eqs-gauge";
    Vec w(grid.n_edges());
    for (int e = 0; e < grid.n_edges(); ++e) w[e] = ops.m_kappa[e] + ops.m_kappa_hat[e];
    sys.expected_singular = count_void_interior_nodes(ctx, w) > 0;
  }
  return sys;
}

}  // namespace

AssembledSystem fd_eqs_gauge(const Grid& grid, const OperatorSet& ops, const Excitation& exc,
                             double omega) {
  return eqs_block_triangular(grid, ops, exc, omega, false);
}

AssembledSystem fd_full_maxwell_two_step(const Grid& grid, const OperatorSet& ops,
                                         const Excitation& exc, double omega) {
  return eqs_block_triangular(grid, ops, exc, omega, true);
}

TimeDomainSystem::TimeDomainSystem(const Grid& grid, const OperatorSet& ops,
                                   const Excitation& exc, double dt, double gamma)
    : dt_(dt), beta_(gamma / dt), grid_(&grid) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");

  DofPartition part = make_partition(grid, exc, false);
  SpMatC Gc = to_complex(ops.G);
  SpMatC Cc = to_complex(ops.C);
  SpMatC curlcurl = sym_exact(SpMatC(SpMatC(Cc.transpose()) * diag_sp(cvec(ops.m_nu)) * Cc));
  const VecC msdt = cvec(ops.m_kappa) + beta_ * cvec(ops.m_eps);

  SpMatC A11 = curlcurl + diag_sp(beta_ * cvec(ops.m_kappa));
  SpMatC A12 = diag_sp(msdt) * Gc;
  SpMatC A21 = SpMatC(A12.transpose());
  SpMatC A22 = (1.0 / beta_) * sym_exact(SpMatC(SpMatC(Gc.transpose()) * diag_sp(msdt) * Gc));

  const int ne = grid.n_edges();
  const int nn = grid.n_nodes();
  std::vector<Trip> t;
  auto add = [&t](const SpMatC& B, int ro, int co) {
    for (int k = 0; k < B.outerSize(); ++k)
      for (SpMatC::InnerIterator it(B, k); it; ++it)
        t.emplace_back(static_cast<int>(it.row()) + ro, static_cast<int>(it.col()) + co,
                       it.value());
  };
  add(A11, 0, 0);
  add(A12, 0, ne);
  add(A21, ne, 0);
  add(A22, ne, ne);
  SpMatC A(ne + nn, ne + nn);
  A.setFromTriplets(t.begin(), t.end());

  std::vector<int> keep = part.free_edges;
  for (int n : part.free_nodes) keep.push_back(ne + n);
  SpMatC S = selection(keep, ne + nn);
  std::vector<int> cnodes;
  for (int n = 0; n < nn; ++n)
    if (part.node_to_free[n] < 0) cnodes.push_back(ne + n);
  SpMatC Sc = selection(cnodes, ne + nn);

  sys_.formulation = "td-symmetric";
  sys_.matrix = S * A * SpMatC(S.transpose());
  sys_.partition = part;
  sys_.nodal_dirichlet = VecC::Zero(nn);
  sys_.is_symmetric = true;
  sys_.block_triangular = false;
  sys_.expected_singular = false;
  sys_.dt = dt;
  fold_ = S * A * SpMatC(Sc.transpose());

  h1_a_ = beta_ * ops.m_kappa;
  h1_phi_ = beta_ * SpMatC(diag_sp(cvec(ops.m_eps)) * Gc);
  gt_ = SpMatC(Gc.transpose());
  h2_a_ = gt_ * diag_sp(msdt);
  h2_phi_ = gt_ * diag_sp(cvec(ops.m_eps)) * Gc;

  source_nodes_ = exc.source_nodes;
  ground_nodes_ = exc.ground_nodes;
}

VecC TimeDomainSystem::build_rhs(const VecC& a_full, const VecC& phi_full, const VecC& js_np1,
                                 Complex phi_source_np1, Complex phi_ground_np1) const {
  const int ne = grid_->n_edges();
  const int nn = grid_->n_nodes();
  const VecC js = js_np1.size() ? js_np1 : VecC::Zero(ne);
  VecC rhs1 = js + h1_a_.cast<Complex>().cwiseProduct(a_full) + h1_phi_ * phi_full;
  VecC rhs2 = h2_a_ * a_full + h2_phi_ * phi_full + (1.0 / beta_) * (gt_ * js);

  const auto& part = sys_.partition;
  VecC rhs(part.n_a + part.n_phi);
  for (int i = 0; i < part.n_a; ++i) rhs[i] = rhs1[part.free_edges[i]];
  for (int i = 0; i < part.n_phi; ++i) rhs[part.n_a + i] = rhs2[part.free_nodes[i]];

  // Dirichlet folding at t^{n+1}.
  VecC xc(fold_.cols());
  int ci = 0;
  for (int n = 0; n < nn; ++n) {
    if (part.node_to_free[n] >= 0) continue;
    Complex v = 0.0;
    if (std::find(source_nodes_.begin(), source_nodes_.end(), n) != source_nodes_.end())
      v = phi_source_np1;
    else if (std::find(ground_nodes_.begin(), ground_nodes_.end(), n) != ground_nodes_.end())
      v = phi_ground_np1;
    xc[ci++] = v;
  }
  rhs -= fold_ * xc;
  return rhs;
}

void TimeDomainSystem::expand(const VecC& x, Complex phi_source, Complex phi_ground,
                              VecC& a_full, VecC& phi_full) const {
  const auto& part = sys_.partition;
  a_full = VecC::Zero(grid_->n_edges());
  phi_full = VecC::Zero(grid_->n_nodes());
  for (int i = 0; i < part.n_a; ++i) a_full[part.free_edges[i]] = x[i];
  for (int i = 0; i < part.n_phi; ++i) phi_full[part.free_nodes[i]] = x[part.n_a + i];
  for (int n : source_nodes_) phi_full[n] = phi_source;
  for (int n : ground_nodes_) phi_full[n] = phi_ground;
}

std::string formulation_ids() {
  return "monolithic, regularized, regularized-psi, symmetric, lagrange, graddiv, eqs-gauge, "
         "tsm, dd-combined, td-symmetric";
}

AssembledSystem assemble_fd(const std::string& id, const Grid& grid, const OperatorSet& ops,
                            const Excitation& exc, double omega) {
  if (id == "monolithic") return fd_monolithic_darwin(grid, ops, exc, omega);
  if (id == "regularized") return fd_darwin_regularized(grid, ops, exc, omega, false);
  if (id == "regularized-psi") return fd_darwin_regularized(grid, ops, exc, omega, true);
  if (id == "symmetric") return fd_symmetric_full_continuity(grid, ops, exc, omega);
  if (id == "lagrange" || id == "graddiv") {
    DofPartition part = make_partition(grid, exc, id == "lagrange");
    Vec N = default_gauge_weight(grid, ops, part, omega);
    return id == "lagrange" ? fd_lagrange_coulomb(grid, ops, exc, omega, N)
                            : fd_graddiv_schur(grid, ops, exc, omega, N);
  }
  if (id == "eqs-gauge") return fd_eqs_gauge(grid, ops, exc, omega);
  if (id == "tsm") return fd_full_maxwell_two_step(grid, ops, exc, omega);
  if (id == "dd-combined")
    return fd_dd_combined_gauge(grid, ops, exc, omega, Complex(0.0, omega));
  throw std::invalid_argument("unknown formulation id '" + id + "' (known: " +
                              formulation_ids() + ")");
}

}  // namespace emqs
