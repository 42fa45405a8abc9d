#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ballmax/radial.hpp"
#include "oracles.hpp"

using namespace ballmax;

TEST_CASE("grid construction invariants") {
  const GridPtr g1 = build_grid(1, 2.0, 512);
  CHECK(g1->n_dir() == 2);
  CHECK(g1->n_nodes() == 513);
  CHECK(g1->h() == doctest::Approx(2.0 / 512.0).epsilon(1e-15));
  CHECK(g1->dir_weights.sum() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g1->r_nodes[0] == 0.0);
  CHECK(g1->r_nodes[512] == 2.0);
  // Simpson weights integrate cubics exactly
  Real cubic = 0.0;
  for (Index j = 0; j < g1->n_nodes(); ++j)
    cubic += g1->r_weights[j] * std::pow(g1->r_nodes[j], 3);
  CHECK(cubic == doctest::Approx(std::pow(2.0, 4) / 4.0).epsilon(1e-14));

  const GridPtr g2 = build_grid(2, 1.0, 64);
  CHECK(g2->n_dir() == 128);
  CHECK(g2->dir_weights.sum() == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-14));

  const GridPtr g3 = build_grid(3, 1.0, 64, 100);
  CHECK(g3->n_dir() == 100);
  CHECK(g3->dir_weights.sum() == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-14));
  for (Index i = 0; i < g3->n_dir(); ++i)
    CHECK(g3->directions.row(i).norm() == doctest::Approx(1.0).epsilon(1e-13));

  CHECK(build_grid(2, 1.0, 17)->n_nodes() == 19);  // rounded up to even
  CHECK_THROWS_AS(build_grid(4, 1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, -1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, 1.0, 8), std::invalid_argument);
}

TEST_CASE("optimal radius closed forms") {
  CHECK(ball_radius(1, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ball_radius(2, 1.0, 2.0) ==
        doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(ball_radius(3, 1.0, 2.0) ==
        doctest::Approx(std::cbrt(3.0 / (4.0 * std::numbers::pi))).epsilon(1e-14));
  CHECK(ball_radius(3, 2.0, 2.0) ==
        doctest::Approx(std::cbrt(3.0 / (16.0 * std::numbers::pi))).epsilon(1e-14));

  const Integrand ex = Integrand::exponential(1.0, 2.0, 1.0, 2.0, 1);
  const BallProfile ball = ball_profile(ex);
  CHECK(ball.radius == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ball.height == 1.0);
  CHECK(ball.threshold == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
}

TEST_CASE("maximizer saturates the mass budget in every dimension") {
  for (int dim : {1, 2, 3}) {
    const GridPtr grid = build_grid(dim, 2.0, 128);
    const BallProfile ball{ball_radius(dim, 1.0, 2.0), 1.0, 0.0};
    const GridFunction w = build_maximizer(ball, grid);
    CHECK(lp_mass(w, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(in_constraint_set(w, 1.0, 2.0));
    CHECK(all_rays_identical(w));
    CHECK(w.fully_piecewise());
  }
  const GridPtr tight = build_grid(1, 0.25, 32);
  CHECK_THROWS_AS(build_maximizer(BallProfile{0.5, 1.0, 0.0}, tight),
                  std::invalid_argument);
}

TEST_CASE("functional value of the maximizer matches closed forms") {
  const GridPtr grid = build_grid(1, 2.0, 512);

  const Integrand lc = Integrand::linear_cutoff(1.0, 2.0, 1.0, 2.0, 1);
  const GridFunction w = build_maximizer(ball_profile(lc), grid);
  // 2 int_0^{1/2} (1 - r) dr = 3/4, integrated cell-exactly
  CHECK(evaluate_functional(lc, w) == doctest::Approx(0.75).epsilon(1e-14));

  const Integrand ex = Integrand::exponential(1.0, 2.0, 1.0, 2.0, 1);
  // 2 int_0^{1/2} e^{-r} dr = 2 (1 - e^{-1/2})
  CHECK(evaluate_functional(ex, w) ==
        doctest::Approx(2.0 * (1.0 - std::exp(-0.5))).epsilon(1e-10));
}

TEST_CASE("sampled functions integrate against an independent quadrature") {
  const GridPtr grid = build_grid(2, 3.0, 256);
  ArrayXXr values(grid->n_dir(), grid->n_nodes());
  for (Index j = 0; j < grid->n_nodes(); ++j)
    values.col(j) = std::exp(-grid->r_nodes[j] * grid->r_nodes[j]);
  const GridFunction u = GridFunction::from_samples(grid, values);
  CHECK(all_rays_identical(u));

  const Real mass = lp_mass(u, 2.0);
  const Real ref = 2.0 * std::numbers::pi *
                   oracle::integrate([](Real r) { return std::exp(-2.0 * r * r) * r; },
                                     0.0, 3.0);
  CHECK(mass == doctest::Approx(ref).epsilon(1e-7));

  const Integrand ex = Integrand::exponential(1.0, 2.0, 1.0, 2.0, 2);
  const Real val = evaluate_functional(ex, u);
  const Real ref_val = 2.0 * std::numbers::pi *
                       oracle::integrate(
                           [](Real r) { return std::exp(-r) * std::exp(-2.0 * r * r) * r; },
                           0.0, 3.0);
  CHECK(val == doctest::Approx(ref_val).epsilon(1e-7));
}

TEST_CASE("profile evaluation and scaling") {
  const GridPtr grid = build_grid(1, 1.0, 32);
  const GridFunction w = build_maximizer(BallProfile{0.5, 1.0, 0.0}, grid);
  CHECK(w.value_at(0, 0.3) == 1.0);
  CHECK(w.value_at(0, 0.7) == 0.0);
  CHECK(w.value_at(0, 0.5) == 0.0);  // pieces are right-open

  GridFunction scaled = w;
  scaled.scale(0.25);
  CHECK(scaled.value_at(0, 0.3) == 0.25);
  CHECK(scaled.max_value() == 0.25);
  CHECK(lp_mass(scaled, 2.0) == doctest::Approx(0.0625).epsilon(1e-14));

  // sampled rays interpolate linearly between nodes
  ArrayXXr values = ArrayXXr::Zero(2, grid->n_nodes());
  for (Index j = 0; j < grid->n_nodes(); ++j) values(0, j) = grid->r_nodes[j];
  const GridFunction v = GridFunction::from_samples(grid, values);
  CHECK(v.value_at(0, 0.5 + 0.25 * grid->h()) ==
        doctest::Approx(0.5 + 0.25 * grid->h()).epsilon(1e-13));
  CHECK_FALSE(all_rays_identical(v));
}

TEST_CASE("profile validation") {
  const GridPtr grid = build_grid(1, 1.0, 32);
  CHECK_THROWS_AS(GridFunction::from_profiles(grid, {}), std::invalid_argument);
  std::vector<RayProfile> gap{{{0.0, 0.4, 1.0}, {0.5, 1.0, 0.0}},
                              {{0.0, 1.0, 0.0}}};
  CHECK_THROWS_AS(GridFunction::from_profiles(grid, gap), std::invalid_argument);
  std::vector<RayProfile> short_cover{{{0.0, 0.9, 1.0}}, {{0.0, 1.0, 0.0}}};
  CHECK_THROWS_AS(GridFunction::from_profiles(grid, short_cover), std::invalid_argument);
}

TEST_CASE("canonical ray density matches the quadrature mass") {
  const GridPtr grid = build_grid(2, 2.0, 64);
  const GridFunction w = build_maximizer(BallProfile{0.5, 1.0, 0.0}, grid);
  const PiecewisePowerDensity dw = canonical_ray_density(w, 0, 2.0);
  CHECK(dw.mass() == doctest::Approx(ray_lp_mass(w, 0, 2.0)).epsilon(1e-15));
  CHECK(dw.support_end() == doctest::Approx(0.5).epsilon(1e-15));

  ArrayXXr values(grid->n_dir(), grid->n_nodes());
  for (Index j = 0; j < grid->n_nodes(); ++j)
    values.col(j) = 1.0 / (1.0 + grid->r_nodes[j]);
  const GridFunction u = GridFunction::from_samples(grid, values);
  const PiecewisePowerDensity du = canonical_ray_density(u, 0, 2.0);
  CHECK(du.mass() == doctest::Approx(ray_lp_mass(u, 0, 2.0)).epsilon(1e-12));
}

TEST_CASE("auxiliary star-shaped set") {
  const GridPtr grid = build_grid(1, 2.0, 128);

  // half height: kappa shrinks by the factor (a_half/a)^{p/n} = 1/4
  const GridFunction half = build_maximizer(BallProfile{0.5, 0.5, 0.0}, grid);
  CHECK(kappa(half, 0, 1.0, 2.0) == doctest::Approx(0.125).epsilon(1e-14));

  const GridFunction w = build_maximizer(BallProfile{0.5, 1.0, 0.0}, grid);
  const RaySet G = build_auxiliary(w, 1.0, 2.0);
  CHECK(G.kappa[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(G.kappa[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(set_volume(G) == doctest::Approx(1.0).epsilon(1e-13));

  const GridFunction v = indicator_from_rays(G, 1.0);
  CHECK(lp_distance(v, w, 2.0) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("lp distance of indicators is the symmetric difference volume") {
  const GridPtr grid = build_grid(1, 2.0, 128);
  const GridFunction wa = build_maximizer(BallProfile{0.5, 1.0, 0.0}, grid);
  const GridFunction wb = build_maximizer(BallProfile{0.75, 1.0, 0.0}, grid);
  // |[-0.75, 0.75] \ [-0.5, 0.5]| = 0.5, cell-exact
  CHECK(lp_distance(wa, wb, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(lp_distance(wa, wa, 2.0) == 0.0);
}

TEST_CASE("coarsening halves the resolution and reports grid-too-small") {
  const GridPtr grid = build_grid(1, 2.0, 64);
  const GridFunction w = build_maximizer(BallProfile{0.5, 1.0, 0.0}, grid);
  const GridFunction wc = coarsen(w);
  CHECK(wc.grid()->n_nodes() == 33);
  // piecewise data transfers exactly: same mass on the coarse grid
  CHECK(lp_mass(wc, 2.0) == doctest::Approx(1.0).epsilon(1e-13));

  ArrayXXr values(grid->n_dir(), grid->n_nodes());
  for (Index j = 0; j < grid->n_nodes(); ++j)
    values.col(j) = std::cos(grid->r_nodes[j]);
  const GridFunction u = GridFunction::from_samples(grid, values);
  const GridFunction uc = coarsen(u);
  CHECK(uc.grid()->n_nodes() == 33);
  CHECK(uc.values()(0, 1) == u.values()(0, 2));

  const GridFunction tiny = build_maximizer(
      BallProfile{0.5, 1.0, 0.0}, build_grid(1, 2.0, 16));
  CHECK_THROWS_AS(coarsen(tiny), std::invalid_argument);
}

TEST_CASE("grid function csv layout") {
  const GridPtr grid = build_grid(1, 1.0, 16);
  const GridFunction w = build_maximizer(BallProfile{0.5, 1.0, 0.0}, grid);
  std::ostringstream os;
  write_grid_function_csv(w, os);
  const std::string text = os.str();
  CHECK(text.rfind("direction,radius,value\n", 0) == 0);
  Index rows = -1;  // header
  for (char ch : text)
    if (ch == '\n') ++rows;
  CHECK(rows == grid->n_dir() * grid->n_nodes());
  CHECK(text.find(',') != std::string::npos);
  CHECK(text.find("nan") == std::string::npos);
}
