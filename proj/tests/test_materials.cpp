#include <doctest.h>

#include <stdexcept>

#include "emqs/materials.hpp"

using namespace emqs;

namespace {

Grid make_grid() { return build_grid(GridSpec::uniform(4, 4, 4, 0.01, 0.01, 0.01)); }

MaterialBox box(double x0, double x1, double kappa, double eps_r = 1.0, double mu_r = 1.0,
                const std::string& tag = "") {
  MaterialBox b;
  b.lo = {x0, 0.0, 0.0};
  b.hi = {x1, 0.04, 0.04};
  b.kappa = kappa;
  b.eps_r = eps_r;
  b.mu_r = mu_r;
  b.tag = tag;
  return b;
}

}  // namespace

TEST_CASE("later boxes override earlier ones; lookup is by cell center") {
  Grid g = make_grid();
  MaterialBox bg;
  bg.tag = "air";
  auto f = build_material_field(g, bg, {box(0.0, 0.02, 1.0, 1, 1, "first"),
                                        box(0.01, 0.03, 2.0, 1, 1, "second")});
  CHECK(f.kappa(g.cell_index(0, 0, 0)) == 1.0);
  CHECK(f.tag(g.cell_index(0, 0, 0)) == "first");
  CHECK(f.kappa(g.cell_index(1, 0, 0)) == 2.0);  // overridden
  CHECK(f.tag(g.cell_index(1, 0, 0)) == "second");
  CHECK(f.kappa(g.cell_index(3, 0, 0)) == 0.0);
  CHECK(f.tag(g.cell_index(3, 0, 0)) == "air");
}

TEST_CASE("material values map to kappa, eps, nu") {
  Grid g = make_grid();
  MaterialBox bg;
  auto f = build_material_field(g, bg, {box(0.0, 0.02, 0.0, 4.0, 1000.0)});
  const int c = g.cell_index(0, 0, 0);
  CHECK(f.eps(c) == doctest::Approx(4.0 * constants::eps0));
  CHECK(f.nu(c) == doctest::Approx(1.0 / (1000.0 * constants::mu0)));
  CHECK(!f.is_conductive(c));
}

TEST_CASE("default artificial conductivity is 1e-4 of the smallest conductor") {
  Grid g = make_grid();
  MaterialBox bg;
  auto f = build_material_field(g, bg, {box(0.0, 0.02, 50.0), box(0.02, 0.04, 8.0)});
  CHECK(f.min_conductive_kappa() == 8.0);
  CHECK(f.kappa_hat() == doctest::Approx(1e-4 * 8.0));
  CHECK(f.has_conductor());

  // No conductor anywhere: the default degenerates to zero.
  auto f0 = build_material_field(g, bg, {});
  CHECK(f0.kappa_hat() == 0.0);
  CHECK(!f0.has_conductor());
}

TEST_CASE("kappa_hat placement policy") {
  Grid g = make_grid();
  MaterialBox bg;
  MaterialOptions opts;
  opts.kappa_hat = 0.01;
  auto f = build_material_field(g, bg, {box(0.0, 0.02, 5.0)}, opts);
  const int cond = g.cell_index(0, 0, 0);
  const int air = g.cell_index(3, 0, 0);
  CHECK(f.kappa_hat_cell(cond) == 0.0);  // NonConductiveOnly default
  CHECK(f.kappa_hat_cell(air) == 0.01);

  opts.kappa_hat_policy = KappaHatPolicy::Everywhere;
  auto fe = build_material_field(g, bg, {box(0.0, 0.02, 5.0)}, opts);
  CHECK(fe.kappa_hat_cell(cond) == 0.01);
  CHECK(fe.kappa_hat_cell(air) == 0.01);
}

TEST_CASE("kappa_hat must stay below every conductive kappa") {
  Grid g = make_grid();
  MaterialBox bg;
  MaterialOptions opts;
  opts.kappa_hat = 5.0;
  CHECK_THROWS_AS(build_material_field(g, bg, {box(0.0, 0.02, 5.0)}, opts),
                  std::invalid_argument);
  opts.kappa_hat = -1.0;
  CHECK_THROWS_AS(build_material_field(g, bg, {}, opts), std::invalid_argument);
}

TEST_CASE("permittivity restriction zeroes conductors only when requested") {
  Grid g = make_grid();
  MaterialBox bg;
  MaterialOptions opts;
  opts.eps_restricted_to_nonconductive = true;
  auto f = build_material_field(g, bg, {box(0.0, 0.02, 5.0, 2.0)}, opts);
  const int cond = g.cell_index(0, 0, 0);
  CHECK(f.eps(cond) == doctest::Approx(2.0 * constants::eps0));
  CHECK(f.eps_effective(cond) == 0.0);
  auto fd = build_material_field(g, bg, {box(0.0, 0.02, 5.0, 2.0)});
  CHECK(fd.eps_effective(cond) == doctest::Approx(2.0 * constants::eps0));
}

TEST_CASE("invalid boxes are rejected; oversized boxes warn") {
  Grid g = make_grid();
  MaterialBox bg;
  MaterialBox degenerate = box(0.02, 0.02, 1.0);
  CHECK_THROWS_AS(build_material_field(g, bg, {degenerate}), std::invalid_argument);

  MaterialBox neg = box(0.0, 0.02, -1.0);
  CHECK_THROWS_AS(build_material_field(g, bg, {neg}), std::invalid_argument);

  MaterialBox big = box(-0.01, 0.10, 1.0);
  auto f = build_material_field(g, bg, {big});
  REQUIRE(f.warnings().size() == 1);
  CHECK(f.warnings()[0].find("exceeds domain") != std::string::npos);
}
