#include "emqs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>
#include <Eigen/SparseLU>

#include "emqs/errors.hpp"
#include "emqs/matrix_market.hpp"
#include "emqs/oracle.hpp"

namespace emqs {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw std::invalid_argument("scenario: " + path + ": " + msg);
}

/// Strict object view: every key must be consumed, leftovers are an error
/// reported with their JSON path.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& require(const std::string& key) {
    if (!j_.contains(key)) fail(path_, "missing required key '" + key + "'");
    seen_.insert(key);
    return j_.at(key);
  }

  const json* optional(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  std::string child_path(const std::string& key) const { return path_ + "." + key; }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        fail(path_ + "." + it.key(), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Eigen::Vector3d as_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v[i] = as_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

// Per-axis spacing: a single width or an explicit array of n widths.
std::vector<double> as_spacing(const json& j, int n, const std::string& path) {
  std::vector<double> out;
  if (j.is_number()) {
    out.assign(static_cast<size_t>(n), j.get<double>());
  } else if (j.is_array()) {
    if (static_cast<int>(j.size()) != n)
      fail(path, "expected " + std::to_string(n) + " widths, got " + std::to_string(j.size()));
    for (size_t i = 0; i < j.size(); ++i)
      out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  } else {
    fail(path, "expected a number or an array of numbers");
  }
  return out;
}

GridSpec parse_grid(const json& j, const std::string& path) {
  Obj o(j, path);
  GridSpec g;
  g.nx = as_int(o.require("nx"), o.child_path("nx"));
  g.ny = as_int(o.require("ny"), o.child_path("ny"));
  g.nz = as_int(o.require("nz"), o.child_path("nz"));
  if (g.nx <= 0 || g.ny <= 0 || g.nz <= 0) fail(path, "grid dimensions must be positive");
  g.spacing[0] = as_spacing(o.require("dx"), g.nx, o.child_path("dx"));
  g.spacing[1] = as_spacing(o.require("dy"), g.ny, o.child_path("dy"));
  g.spacing[2] = as_spacing(o.require("dz"), g.nz, o.child_path("dz"));
  if (const json* p = o.optional("origin")) g.origin = as_vec3(*p, o.child_path("origin"));
  o.done();
  return g;
}

MaterialBox parse_box(const json& j, const std::string& path, bool with_extent) {
  Obj o(j, path);
  MaterialBox b;
  if (with_extent) {
    b.lo = as_vec3(o.require("lo"), o.child_path("lo"));
    b.hi = as_vec3(o.require("hi"), o.child_path("hi"));
  }
  if (const json* p = o.optional("kappa")) b.kappa = as_number(*p, o.child_path("kappa"));
  if (const json* p = o.optional("eps_r")) b.eps_r = as_number(*p, o.child_path("eps_r"));
  if (const json* p = o.optional("mu_r")) b.mu_r = as_number(*p, o.child_path("mu_r"));
  if (const json* p = o.optional("tag")) b.tag = as_string(*p, o.child_path("tag"));
  o.done();
  return b;
}

MaterialOptions parse_material_options(const json& j, const std::string& path) {
  Obj o(j, path);
  MaterialOptions m;
  if (const json* p = o.optional("kappa_hat"))
    m.kappa_hat = as_number(*p, o.child_path("kappa_hat"));
  if (const json* p = o.optional("kappa_hat_policy")) {
    const std::string s = as_string(*p, o.child_path("kappa_hat_policy"));
    if (s == "nonconductive")
      m.kappa_hat_policy = KappaHatPolicy::NonConductiveOnly;
    else if (s == "everywhere")
      m.kappa_hat_policy = KappaHatPolicy::Everywhere;
    else
      fail(o.child_path("kappa_hat_policy"), "expected 'nonconductive' or 'everywhere'");
  }
  if (const json* p = o.optional("eps_restricted_to_nonconductive"))
    m.eps_restricted_to_nonconductive =
        as_bool(*p, o.child_path("eps_restricted_to_nonconductive"));
  o.done();
  return m;
}

TerminalSpec parse_terminal(const json& j, const std::string& path) {
  Obj o(j, path);
  TerminalSpec t;
  t.lo = as_vec3(o.require("lo"), o.child_path("lo"));
  t.hi = as_vec3(o.require("hi"), o.child_path("hi"));
  if (const json* p = o.optional("potential"))
    t.potential = as_number(*p, o.child_path("potential"));
  o.done();
  return t;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: invalid JSON: ") + e.what());
  }
  Obj o(j, "$");
  Scenario sc;
  sc.name = as_string(o.require("name"), o.child_path("name"));
  sc.grid = parse_grid(o.require("grid"), o.child_path("grid"));
  sc.background = parse_box(o.require("background"), o.child_path("background"), false);
  if (const json* p = o.optional("boxes")) {
    if (!p->is_array()) fail(o.child_path("boxes"), "expected an array");
    for (size_t i = 0; i < p->size(); ++i)
      sc.boxes.push_back(
          parse_box((*p)[i], o.child_path("boxes") + "[" + std::to_string(i) + "]", true));
  }
  if (const json* p = o.optional("materials"))
    sc.material_options = parse_material_options(*p, o.child_path("materials"));
  {
    Obj t(o.require("terminals"), o.child_path("terminals"));
    sc.source = parse_terminal(t.require("source"), t.child_path("source"));
    sc.ground = parse_terminal(t.require("ground"), t.child_path("ground"));
    t.done();
  }
  if (const json* p = o.optional("drive")) {
    Obj d(*p, o.child_path("drive"));
    FrequencyDrive fd;
    const json& fr = d.require("frequencies_hz");
    if (!fr.is_array() || fr.empty())
      fail(d.child_path("frequencies_hz"), "expected a non-empty array");
    for (size_t i = 0; i < fr.size(); ++i) {
      const double f = as_number(
          fr[i], d.child_path("frequencies_hz") + "[" + std::to_string(i) + "]");
      if (f <= 0.0) fail(d.child_path("frequencies_hz"), "frequencies must be positive");
      fd.frequencies_hz.push_back(f);
    }
    d.done();
    sc.frequency_drive = fd;
  }
  if (const json* p = o.optional("time_drive")) {
    Obj d(*p, o.child_path("time_drive"));
    TimeDrive td;
    td.frequency_hz = as_number(d.require("frequency_hz"), d.child_path("frequency_hz"));
    td.dt = as_number(d.require("dt"), d.child_path("dt"));
    td.n_steps = as_int(d.require("n_steps"), d.child_path("n_steps"));
    if (const json* q = d.optional("amplitude"))
      td.amplitude = as_number(*q, d.child_path("amplitude"));
    if (const json* q = d.optional("fd_check"))
      td.fd_check = as_bool(*q, d.child_path("fd_check"));
    if (td.dt <= 0.0) fail(d.child_path("dt"), "time step must be positive");
    if (td.n_steps <= 0) fail(d.child_path("n_steps"), "step count must be positive");
    if (td.frequency_hz < 0.0) fail(d.child_path("frequency_hz"), "frequency must be >= 0");
    d.done();
    sc.time_drive = td;
  }
  if (!sc.frequency_drive && !sc.time_drive)
    fail("$", "at least one of 'drive' or 'time_drive' is required");
  {
    const json& f = o.require("formulations");
    if (!f.is_array() || f.empty())
      fail(o.child_path("formulations"), "expected a non-empty array of formulation ids");
    static const std::vector<std::string> known = {
        "monolithic", "regularized", "regularized-psi", "symmetric", "lagrange",
        "graddiv",    "eqs-gauge",   "tsm",             "dd-combined"};
    for (size_t i = 0; i < f.size(); ++i) {
      const std::string path = o.child_path("formulations") + "[" + std::to_string(i) + "]";
      std::string id = as_string(f[i], path);
      if (std::find(known.begin(), known.end(), id) == known.end())
        fail(path, "unknown formulation id '" + id + "' (known: " + formulation_ids() + ")");
      sc.formulations.push_back(std::move(id));
    }
  }
  if (const json* p = o.optional("solver")) {
    Obj s(*p, o.child_path("solver"));
    if (const json* q = s.optional("method")) {
      sc.solver.method = as_string(*q, s.child_path("method"));
      if (sc.solver.method != "direct" && sc.solver.method != "iterative")
        fail(s.child_path("method"), "expected 'direct' or 'iterative'");
    }
    if (const json* q = s.optional("tol")) sc.solver.tol = as_number(*q, s.child_path("tol"));
    if (const json* q = s.optional("max_iterations"))
      sc.solver.max_iterations = as_int(*q, s.child_path("max_iterations"));
    if (const json* q = s.optional("preconditioner")) {
      sc.solver.preconditioner = as_string(*q, s.child_path("preconditioner"));
      if (sc.solver.preconditioner != "none" && sc.solver.preconditioner != "jacobi")
        fail(s.child_path("preconditioner"), "expected 'none' or 'jacobi'");
    }
    s.done();
  }
  if (const json* p = o.optional("output_dir"))
    sc.output_dir = as_string(*p, o.child_path("output_dir"));
  o.done();
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

ScenarioSetup build_setup(const Scenario& sc) {
  sc.grid.validate();
  Grid grid = build_grid(sc.grid);
  MaterialField mat =
      build_material_field(grid, sc.background, sc.boxes, sc.material_options);
  OperatorSet ops = build_operators(grid, mat);

  Excitation exc;
  const double tol = 1e-12;
  auto select_nodes = [&](const TerminalSpec& t, std::vector<int>& out) {
    for (int n = 0; n < grid.n_nodes(); ++n) {
      Eigen::Vector3d p = grid.node_position(n);
      if ((p.array() >= t.lo.array() - tol).all() && (p.array() <= t.hi.array() + tol).all())
        out.push_back(n);
    }
  };
  select_nodes(sc.source, exc.source_nodes);
  select_nodes(sc.ground, exc.ground_nodes);
  if (exc.source_nodes.empty())
    throw std::invalid_argument("scenario '" + sc.name + "': source terminal box selects no nodes");
  if (exc.ground_nodes.empty())
    throw std::invalid_argument("scenario '" + sc.name + "': ground terminal box selects no nodes");
  for (int n : exc.source_nodes)
    for (int m : exc.ground_nodes)
      if (n == m)
        throw std::invalid_argument("scenario '" + sc.name +
                                    "': source and ground terminals overlap");
  exc.phi_source = Complex(sc.source.potential, 0.0);
  exc.phi_ground = Complex(sc.ground.potential, 0.0);

  ScenarioSetup setup{std::move(grid), std::move(mat), std::move(ops), std::move(exc), {}};
  for (const auto& w : setup.materials.warnings()) setup.warnings.push_back(w);

  // Quasistatic validity: the domain must stay electrically small.
  double f_max = 0.0;
  if (sc.frequency_drive)
    for (double f : sc.frequency_drive->frequencies_hz) f_max = std::max(f_max, f);
  if (sc.time_drive) f_max = std::max(f_max, sc.time_drive->frequency_hz);
  if (f_max > 0.0) {
    double max_n = 1.0;  // refractive index sqrt(eps_r mu_r)
    auto scan = [&](const MaterialBox& b) {
      max_n = std::max(max_n, std::sqrt(std::max(1.0, b.eps_r) * std::max(1.0, b.mu_r)));
    };
    scan(sc.background);
    for (const auto& b : sc.boxes) scan(b);
    const double lambda = constants::c0 / (f_max * max_n);
    const double extent = setup.grid.domain_extent().maxCoeff();
    if (extent > lambda / 10.0)
      setup.warnings.push_back(
          "domain extent " + fmt("%.3g", extent) + " m exceeds lambda/10 = " +
          fmt("%.3g", lambda / 10.0) +
          " m at the highest drive frequency; quasistatic validity is doubtful");
  }
  return setup;
}

namespace {

std::string freq_label(double f_hz) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%gHz", f_hz);
  std::string s = buf;
  for (char& c : s)
    if (c == '+') c = 'p';
  return s;
}

VecC solve_system(const AssembledSystem& sys, const SolverSettings& st, SolveReport& rep) {
  IterativeOptions io;
  io.tol = st.tol;
  io.max_iterations = st.max_iterations;
  io.preconditioner =
      st.preconditioner == "none" ? Preconditioner::None : Preconditioner::Jacobi;
  if (sys.block_triangular)
    return block_back_substitute(sys, rep,
                                 st.method == "direct" ? InnerSolver::Direct
                                                       : InnerSolver::Iterative,
                                 io);
  if (st.method == "direct") return solve_direct(sys, rep);
  return solve_iterative(sys, io, rep);
}

}  // namespace

RunResult run_scenario(const Scenario& sc) {
  namespace fs = std::filesystem;
  RunResult rr;
  ScenarioSetup setup = build_setup(sc);
  const fs::path outdir = fs::path(sc.output_dir) / sc.name;
  fs::create_directories(outdir);

  rr.lines.push_back("scenario '" + sc.name + "': " + std::to_string(setup.grid.n_cells()) +
                     " cells, " + std::to_string(setup.grid.n_edges()) + " edges, " +
                     std::to_string(setup.grid.n_nodes()) + " nodes");
  for (const auto& w : setup.warnings) rr.lines.push_back("warning: " + w);

  std::ostringstream summary;
  summary << "scenario,formulation,frequency_hz,dofs,solver,status,iterations,residual,"
             "E_re_vs_tsm,E_im_vs_tsm,B_re_vs_tsm,B_im_vs_tsm\n";

  if (sc.frequency_drive) {
    for (double f_hz : sc.frequency_drive->frequencies_hz) {
      const double omega = 2.0 * M_PI * f_hz;
      const bool have_tsm =
          std::find(sc.formulations.begin(), sc.formulations.end(), std::string("tsm")) !=
          sc.formulations.end();
      FieldSolution tsm_fields;
      bool tsm_ok = false;
      if (have_tsm) {
        try {
          AssembledSystem sys = assemble_fd("tsm", setup.grid, setup.ops, setup.excitation, omega);
          SolveReport rep;
          VecC x = solve_system(sys, sc.solver, rep);
          tsm_fields = reconstruct_fields(sys, x, setup.grid, setup.ops);
          tsm_ok = true;
        } catch (const SolverError& e) {
          rr.lines.push_back(std::string("tsm reference solve failed: ") + e.what());
        }
      }
      for (const std::string& id : sc.formulations) {
        std::string status = "ok", comparison = ",,,";
        SolveReport rep;
        int dofs = 0;
        try {
          AssembledSystem sys = assemble_fd(id, setup.grid, setup.ops, setup.excitation, omega);
          dofs = sys.dim();
          VecC x = solve_system(sys, sc.solver, rep);
          if (rep.status == SolveStatus::MaxIterations) status = "max-iterations";
          if (rep.status == SolveStatus::Breakdown) status = "breakdown";
          FieldSolution fields = (id == "tsm" && tsm_ok)
                                     ? tsm_fields
                                     : reconstruct_fields(sys, x, setup.grid, setup.ops);
          const std::string base = sc.name + "_" + id + "_" + freq_label(f_hz);
          export_vtk(fields, setup.grid, (outdir / (base + ".vtk")).string());
          export_csv(fields, setup.grid, (outdir / (base + ".csv")).string());
          if (id != "tsm" && tsm_ok) {
            ComparisonReport cmp = compare_fields(fields, tsm_fields, setup.grid);
            comparison = fmt("%.6g", cmp.e_real.max_rel) + "," +
                         fmt("%.6g", cmp.e_imag.max_rel) + "," +
                         fmt("%.6g", cmp.b_real.max_rel) + "," +
                         fmt("%.6g", cmp.b_imag.max_rel);
            rr.lines.push_back("  " + id + " @ " + fmt("%g", f_hz) +
                               " Hz: max rel diff vs tsm  E(re " +
                               fmt("%.3g", cmp.e_real.max_rel) + ", im " +
                               fmt("%.3g", cmp.e_imag.max_rel) + ")  B(re " +
                               fmt("%.3g", cmp.b_real.max_rel) + ", im " +
                               fmt("%.3g", cmp.b_imag.max_rel) + ")");
          }
          rr.lines.push_back("  " + id + " @ " + fmt("%g", f_hz) + " Hz: " +
                             std::to_string(dofs) + " dofs, " + rep.method + ", residual " +
                             fmt("%.3g", rep.relative_residual) +
                             (rep.iterations ? ", " + std::to_string(rep.iterations) + " iters"
                                             : "") +
                             (status == "ok" ? "" : " [" + status + "]"));
          if (status != "ok") rr.exit_code = 1;
        } catch (const SolverError& e) {
          status = "singular";
          rr.lines.push_back("  " + id + " @ " + fmt("%g", f_hz) + " Hz: solve failed (" +
                             e.what() + ")");
          rr.exit_code = 1;
        } catch (const std::exception& e) {
          status = "error";
          rr.lines.push_back("  " + id + " @ " + fmt("%g", f_hz) + " Hz: " + e.what());
          rr.exit_code = 1;
        }
        summary << sc.name << "," << id << "," << fmt("%.17g", f_hz) << "," << dofs << ","
                << rep.method << "," << status << "," << rep.iterations << ","
                << fmt("%.6g", rep.relative_residual) << "," << comparison << "\n";
      }
    }
  }

  if (sc.time_drive) {
    const TimeDrive& td = *sc.time_drive;
    TimeDomainSystem sys(setup.grid, setup.ops, setup.excitation, td.dt);
    // The step matrix is constant: factor once, back-substitute per step.
    Eigen::SparseLU<SpMatC, Eigen::COLAMDOrdering<int>> lu;
    SpMatC A = sys.step_system().matrix;
    A.makeCompressed();
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      throw SingularMatrixError("time-domain step matrix factorization failed");
    VecC a = VecC::Zero(setup.grid.n_edges());
    VecC phi = VecC::Zero(setup.grid.n_nodes());
    const double amp =
        td.amplitude != 0.0 ? td.amplitude : std::real(setup.excitation.phi_source);
    const double omega = 2.0 * M_PI * td.frequency_hz;
    for (int n = 0; n < td.n_steps; ++n) {
      const double t = (n + 1) * td.dt;
      const Complex ps(omega > 0.0 ? amp * std::sin(omega * t) : amp, 0.0);
      const Complex pg(0.0, 0.0);
      VecC rhs = sys.build_rhs(a, phi, VecC(), ps, pg);
      VecC x = lu.solve(rhs);
      sys.expand(x, ps, pg, a, phi);
    }
    FieldSolution fields =
        reconstruct_from_potentials(a, phi, 0.0, setup.grid, setup.ops);
    export_csv(fields, setup.grid, (outdir / "td_final.csv").string());
    export_vtk(fields, setup.grid, (outdir / "td_final.vtk").string());
    rr.lines.push_back("  td-symmetric: " + std::to_string(td.n_steps) + " steps of " +
                       fmt("%.3g", td.dt) + " s, final |a| " + fmt("%.6g", a.norm()) +
                       " Wb, |phi| " + fmt("%.6g", phi.norm()) + " V");
    if (td.fd_check && td.frequency_hz > 0.0) {
      const double period = 1.0 / td.frequency_hz;
      int spp = std::max(8, static_cast<int>(std::lround(period / td.dt)));
      TdFdReport check = td_fd_consistency(setup.grid, setup.ops, setup.excitation,
                                           2.0 * M_PI * td.frequency_hz, spp, 4);
      rr.lines.push_back("  td/fd check: amp err a " + fmt("%.3g", check.max_amp_err_a) +
                         ", phi " + fmt("%.3g", check.max_amp_err_phi) + ", phase " +
                         fmt("%.3g", check.max_phase_err_deg) + " deg" +
                         (check.transient_flagged ? " [transient not settled]" : ""));
    }
  }

  std::ofstream sfile(outdir / "summary.csv");
  sfile << summary.str();
  return rr;
}

}  // namespace emqs
