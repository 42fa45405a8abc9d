#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "ballmax/transport.hpp"
#include "oracles.hpp"

using namespace ballmax;

TEST_CASE("piecewise power density closed forms") {
  // annulus measure r dr on [0.3, 0.5] in the plane
  const PiecewisePowerDensity ann(2, {0.0, 0.3, 0.5}, {0.0, 1.0});
  CHECK(ann.mass() == doctest::Approx(0.08).epsilon(1e-15));
  CHECK(ann.support_begin() == 0.3);
  CHECK(ann.support_end() == 0.5);
  CHECK(ann.density(0.4) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(ann.density(0.2) == 0.0);
  CHECK(ann.cdf(0.4) == doctest::Approx((0.16 - 0.09) / 2.0).epsilon(1e-14));
  // quantile inverts the cdf inside the support
  for (Real r : {0.31, 0.4, 0.49})
    CHECK(ann.quantile(ann.cdf(r)) == doctest::Approx(r).epsilon(1e-13));
  CHECK(ann.quantile(0.0) == 0.3);
  CHECK(ann.quantile(ann.mass()) == 0.5);

  CHECK_THROWS_AS(PiecewisePowerDensity(2, {0.1, 0.5}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewisePowerDensity(2, {0.0, 0.5}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewisePowerDensity(2, {0.0, 0.5, 0.4}, {1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("monotone rearrangement of an annulus onto the disc") {
  const PiecewisePowerDensity source(2, {0.0, 0.3, 0.5}, {0.0, 1.0});
  const PiecewisePowerDensity target(2, {0.0, 0.4, 2.0}, {1.0, 0.0});
  CHECK(source.mass() == doctest::Approx(target.mass()).epsilon(1e-15));

  const ArrayXr nodes = ArrayXr::LinSpaced(513, 0.0, 2.0);
  const MonotoneMap1D map = monotone_transport_1d(source, target, nodes);

  // T(r) = sqrt(r^2 - 0.09) on the annulus
  for (Real r : {0.35, 0.4, 0.45})
    CHECK(map.apply(r) == doctest::Approx(std::sqrt(r * r - 0.09)).epsilon(1e-12));
  CHECK(map.apply(0.3) == 0.0);
  CHECK(map.apply(0.5) == doctest::Approx(0.4).epsilon(1e-13));
  CHECK(map.preimage(0.2) == doctest::Approx(std::sqrt(0.04 + 0.09)).epsilon(1e-12));

  // mass mismatch is rejected
  const PiecewisePowerDensity wrong(2, {0.0, 0.5, 2.0}, {1.0, 0.0});
  CHECK_THROWS_AS(monotone_transport_1d(source, wrong, nodes), std::invalid_argument);
}

TEST_CASE("integrals against the source measure hit closed forms") {
  const PiecewisePowerDensity source(2, {0.0, 0.3, 0.5}, {0.0, 1.0});
  const PiecewisePowerDensity target(2, {0.0, 0.4, 2.0}, {1.0, 0.0});
  const ArrayXr nodes = ArrayXr::LinSpaced(513, 0.0, 2.0);
  const MonotoneMap1D map = monotone_transport_1d(source, target, nodes);
  const Real h = nodes[1] - nodes[0];

  // int T(r) dmu_s = int t dmu_t = 0.4^3 / 3
  const Real pushed = integrate_against_source(map, [](Real, Real t) { return t; }, h);
  CHECK(pushed == doctest::Approx(0.064 / 3.0).epsilon(1e-8));

  // int (r - T(r)) dmu_s = (0.098 - 0.064) / 3
  const Real displaced =
      integrate_against_source(map, [](Real r, Real t) { return r - t; }, h);
  CHECK(displaced == doctest::Approx(0.034 / 3.0).epsilon(1e-8));
}

TEST_CASE("pushforward checks pass and tighten under refinement") {
  const PiecewisePowerDensity source(2, {0.0, 0.3, 0.5}, {0.0, 1.0});
  const PiecewisePowerDensity target(2, {0.0, 0.4, 2.0}, {1.0, 0.0});
  const ArrayXr nodes = ArrayXr::LinSpaced(513, 0.0, 2.0);
  const MonotoneMap1D map = monotone_transport_1d(source, target, nodes);
  const Real h = nodes[1] - nodes[0];

  const auto rows = verify_pushforward(map, h);
  CHECK(rows.size() == 5);
  Real coarse_worst = 0.0;
  for (const auto& row : rows) {
    INFO(row.name);
    CHECK(row.rel_err <= 1e-6);
    coarse_worst = std::max(coarse_worst, row.rel_err);
  }
  Real fine_worst = 0.0;
  for (const auto& row : verify_pushforward(map, 0.5 * h))
    fine_worst = std::max(fine_worst, row.rel_err);
  CHECK(fine_worst <= coarse_worst * (1.0 + 1e-9) + 1e-15);
}

TEST_CASE("half-height profile rearranges by a linear map") {
  const PiecewisePowerDensity source(1, {0.0, 0.5, 2.0}, {0.25, 0.0});
  const PiecewisePowerDensity target(1, {0.0, 0.125, 2.0}, {1.0, 0.0});
  const ArrayXr nodes = ArrayXr::LinSpaced(129, 0.0, 2.0);
  const MonotoneMap1D map = monotone_transport_1d(source, target, nodes);
  CHECK(map.apply(0.4) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(map.apply(0.5) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(map.preimage(0.1) == doctest::Approx(0.4).epsilon(1e-13));
}

TEST_CASE("set discretization of a shifted interval") {
  const GridPtr grid = build_grid(1, 2.0, 32);
  const BallProfile E{0.5, 1.0, 0.0};
  RaySet G;
  G.grid = grid;
  G.kappa = ArrayXr(2);
  G.kappa << 0.6, 0.4;  // the interval [-0.4, 0.6]

  const auto [src, tgt] = discretize_sets(E, G, 0.0125);
  CHECK(src.centers.rows() == 8);
  CHECK(tgt.centers.rows() == 8);
  CHECK(src.cell_size == 0.0125);
  CHECK(src.discarded_volume == 0.0);
  CHECK(tgt.discarded_volume == 0.0);
  // two cells per side sit within one diameter of a set boundary
  CHECK(src.boundary_volume == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(tgt.boundary_volume == doctest::Approx(0.025).epsilon(1e-12));

  // sources live in (0.5, 0.6), targets in (-0.5, -0.4)
  Real src_sum = 0.0, tgt_sum = 0.0;
  for (Index i = 0; i < 8; ++i) {
    CHECK(src.centers(i, 0) > 0.5);
    CHECK(src.centers(i, 0) < 0.6);
    CHECK(tgt.centers(i, 0) > -0.5);
    CHECK(tgt.centers(i, 0) < -0.4);
    src_sum += std::abs(src.centers(i, 0));
    tgt_sum += std::abs(tgt.centers(i, 0));
  }
  // cell_volume * (sum |x| - sum |y|) = 0.0125 * (4.4 - 3.6) = 0.01
  CHECK(0.0125 * (src_sum - tgt_sum) == doctest::Approx(0.01).epsilon(1e-12));

  const CellAssignment plan = assign_min_cost(src, tgt);
  CHECK(plan.cell_volume == doctest::Approx(0.0125).epsilon(1e-15));
  CHECK(plan.cell_diameter == doctest::Approx(0.0125).epsilon(1e-15));
  // every monotone pair is exactly one unit apart, so the cost is 8
  CHECK(plan.total_cost == doctest::Approx(8.0).epsilon(1e-12));

  const InwardReport inward = verify_inward(plan, E);
  CHECK(inward.pair_count == 8);
  CHECK(inward.inward_fraction == 1.0);
  CHECK(inward.targets_inside_fraction == 1.0);

  // resolution guard: below ~0.5 mm the sides exceed 400 cells
  CHECK_THROWS_AS(discretize_sets(E, G, 0.0002), std::invalid_argument);
}

TEST_CASE("empty set difference produces no cells") {
  const GridPtr grid = build_grid(1, 2.0, 32);
  const BallProfile E{0.5, 1.0, 0.0};
  RaySet G;
  G.grid = grid;
  G.kappa = ArrayXr::Constant(2, 0.5);  // G == E
  const auto [src, tgt] = discretize_sets(E, G, 0.0125);
  CHECK(src.centers.rows() == 0);
  CHECK(tgt.centers.rows() == 0);
}

namespace {

CellSet cloud(std::mt19937& rng, Index n, int dim) {
  std::uniform_real_distribution<Real> coord(-1.0, 1.0);
  CellSet set;
  set.centers = MatrixXr(n, dim);
  for (Index i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k) set.centers(i, k) = coord(rng);
  set.cell_size = 0.1;
  return set;
}

}  // namespace

TEST_CASE("assignment is exactly optimal") {
  // one pair: cost is the squared distance
  CellSet one_src, one_tgt;
  one_src.centers = MatrixXr(1, 1);
  one_src.centers << 0.3;
  one_src.cell_size = 0.1;
  one_tgt.centers = MatrixXr(1, 1);
  one_tgt.centers << -0.3;
  one_tgt.cell_size = 0.1;
  CHECK(assign_min_cost(one_src, one_tgt).total_cost ==
        doctest::Approx(0.36).epsilon(1e-14));

  std::mt19937 rng(7);
  for (int rep = 0; rep < 4; ++rep) {
    // small instances: the exhaustive and general algorithms must agree
    const CellSet s6 = cloud(rng, 6, 2), t6 = cloud(rng, 6, 2);
    const Real exhaustive = assign_min_cost(s6, t6).total_cost;
    const Real general = assign_min_cost(s6, t6, true).total_cost;
    CHECK(exhaustive == doctest::Approx(general).epsilon(1e-12));

    // larger instance: check against brute force
    const CellSet s9 = cloud(rng, 9, 2), t9 = cloud(rng, 9, 2);
    const CellAssignment plan = assign_min_cost(s9, t9);
    const Real brute = oracle::brute_force_min_cost(9, [&](Index i, Index j) {
      return (s9.centers.row(i) - t9.centers.row(j)).squaredNorm();
    });
    CHECK(plan.total_cost == doctest::Approx(brute).epsilon(1e-12));

    // the pairing is a permutation
    std::vector<bool> seen(9, false);
    for (Index j : plan.pairing) {
      CHECK(!seen[static_cast<std::size_t>(j)]);
      seen[static_cast<std::size_t>(j)] = true;
    }
  }

  CellSet s2 = cloud(rng, 2, 2);
  CHECK_THROWS_AS(assign_min_cost(s2, cloud(rng, 3, 2)), std::invalid_argument);
}

TEST_CASE("assignment csv layout") {
  CellSet src, tgt;
  src.centers = MatrixXr(2, 1);
  src.centers << 0.55, 0.58;
  src.cell_size = 0.0125;
  tgt.centers = MatrixXr(2, 1);
  tgt.centers << -0.45, -0.42;
  tgt.cell_size = 0.0125;
  const CellAssignment plan = assign_min_cost(src, tgt);
  std::ostringstream os;
  write_assignment_csv(plan, os);
  const std::string text = os.str();
  CHECK(text.rfind("pair,source_0,target_0,squared_distance\n", 0) == 0);
  Index rows = -1;
  for (char ch : text)
    if (ch == '\n') ++rows;
  CHECK(rows == 2);
}
