#include "ballmax/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ballmax {

const char* perturb_family_name(PerturbFamily family) {
  switch (family) {
    case PerturbFamily::TranslateBall: return "translate";
    case PerturbFamily::DilateBall: return "dilate";
    case PerturbFamily::ScaleHeight: return "scale_height";
    case PerturbFamily::Annulus: return "annulus";
    case PerturbFamily::SmoothBump: return "smooth_bump";
    case PerturbFamily::RandomRays: return "random_rays";
  }
  return "unknown";
}

PerturbFamily perturb_family_from_string(const std::string& name) {
  if (name == "translate") return PerturbFamily::TranslateBall;
  if (name == "dilate") return PerturbFamily::DilateBall;
  if (name == "scale_height") return PerturbFamily::ScaleHeight;
  if (name == "annulus") return PerturbFamily::Annulus;
  if (name == "smooth_bump") return PerturbFamily::SmoothBump;
  if (name == "random_rays") return PerturbFamily::RandomRays;
  throw std::invalid_argument("unknown perturbation family: " + name);
}

namespace {

RayProfile interval_profile(Real lo, Real hi, Real value, Real r_max) {
  lo = std::clamp(lo, 0.0, r_max);
  hi = std::clamp(hi, 0.0, r_max);
  RayProfile prof;
  if (!(hi > lo)) {
    prof.push_back({0.0, r_max, 0.0});
    return prof;
  }
  if (lo > 0.0) prof.push_back({0.0, lo, 0.0});
  prof.push_back({lo, hi, value});
  if (hi < r_max) prof.push_back({hi, r_max, 0.0});
  return prof;
}

GridFunction translated_ball(const BallProfile& ball, GridPtr grid, Real tau) {
  const Real R = ball.radius;
  if (tau + R > grid->r_max)
    throw std::invalid_argument("translate: shifted ball leaves the grid; "
                                "increase r_max or reduce tau");
  std::vector<RayProfile> profiles;
  profiles.reserve(static_cast<std::size_t>(grid->n_dir()));
  for (Index i = 0; i < grid->n_dir(); ++i) {
    const Real c = grid->directions(i, 0);  // cosine against the shift axis
    const Real disc = R * R - tau * tau * (1.0 - c * c);
    if (disc <= 0.0) {
      profiles.push_back(interval_profile(0.0, 0.0, 0.0, grid->r_max));
      continue;
    }
    const Real root = std::sqrt(disc);
    const Real lo = tau * c - root, hi = tau * c + root;
    profiles.push_back(interval_profile(std::max(lo, 0.0), hi, ball.height, grid->r_max));
  }
  return GridFunction::from_profiles(std::move(grid), std::move(profiles));
}

GridFunction radial_indicator(GridPtr grid, Real radius, Real height) {
  if (radius > grid->r_max)
    throw std::invalid_argument("perturbation support exceeds r_max");
  std::vector<RayProfile> profiles(
      static_cast<std::size_t>(grid->n_dir()),
      interval_profile(0.0, radius, height, grid->r_max));
  return GridFunction::from_profiles(std::move(grid), std::move(profiles));
}

GridFunction annulus_profile(const BallProfile& ball, GridPtr grid, Real tau) {
  const int d = grid->dim;
  const Real R = ball.radius;
  const Real rho_in = tau * R;
  // grow the outer radius so the removed core's volume is restored exactly
  const Real rho_out = std::pow(std::pow(R, d) + std::pow(rho_in, d),
                                1.0 / static_cast<Real>(d));
  if (rho_out > grid->r_max)
    throw std::invalid_argument("annulus: outer radius exceeds r_max");
  std::vector<RayProfile> profiles(
      static_cast<std::size_t>(grid->n_dir()),
      interval_profile(rho_in, rho_out, ball.height, grid->r_max));
  return GridFunction::from_profiles(std::move(grid), std::move(profiles));
}

GridFunction smooth_bump(const BallProfile& ball, GridPtr grid, Real tau, Real p) {
  const Real rho = ball.radius * (1.0 + tau);
  if (rho > grid->r_max)
    throw std::invalid_argument("smooth_bump: support exceeds r_max");
  ArrayXr shape(grid->n_nodes());
  for (Index j = 0; j < grid->n_nodes(); ++j) {
    const Real x = grid->r_nodes[j] / rho;
    shape[j] = (x < 1.0 - 1e-14) ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
  }
  ArrayXXr values(grid->n_dir(), grid->n_nodes());
  values.rowwise() = shape.transpose();
  GridFunction u = GridFunction::from_samples(grid, std::move(values));
  // saturate the mass budget without breaching it or the height cap
  const Real unit_mass = lp_mass(u, p);
  Real height = ball.height;
  if (unit_mass > 0.0)
    height = std::min(ball.height, std::pow(1.0 / unit_mass, 1.0 / p));
  u.scale(height);
  return u;
}

GridFunction random_rays(const BallProfile& ball, GridPtr grid, Real tau,
                         Real p, std::uint32_t seed) {
  constexpr int kSegments = 8;
  const Real extent = std::min(tau * ball.radius, grid->r_max);
  std::vector<RayProfile> profiles;
  profiles.reserve(static_cast<std::size_t>(grid->n_dir()));
  for (Index i = 0; i < grid->n_dir(); ++i) {
    std::seed_seq seq{seed, static_cast<std::uint32_t>(i)};
    std::mt19937 gen(seq);
    std::uniform_int_distribution<int> level(0, 2);
    RayProfile prof;
    if (extent > 0.0) {
      const Real step = extent / kSegments;
      for (int k = 0; k < kSegments; ++k)
        prof.push_back({k * step, (k + 1) * step,
                        0.5 * ball.height * static_cast<Real>(level(gen))});
    }
    const Real lo = prof.empty() ? 0.0 : prof.back().hi;
    if (lo < grid->r_max) prof.push_back({lo, grid->r_max, 0.0});
    profiles.push_back(std::move(prof));
  }
  GridFunction u = GridFunction::from_profiles(std::move(grid), std::move(profiles));
  const Real mass = lp_mass(u, p);
  if (mass > 1.0) u.scale(std::pow(1.0 / mass, 1.0 / p));
  return u;
}

}  // namespace

GridFunction generate(const PerturbationSpec& spec, const BallProfile& ball,
                      GridPtr grid, Real p) {
  if (!grid) throw std::invalid_argument("generate: null grid");
  if (!(spec.tau >= 0.0)) throw std::invalid_argument("generate: tau must be >= 0");
  switch (spec.family) {
    case PerturbFamily::TranslateBall:
      return translated_ball(ball, std::move(grid), spec.tau);
    case PerturbFamily::DilateBall: {
      if (spec.tau > 1.0) throw std::invalid_argument("dilate: tau must be <= 1");
      return radial_indicator(std::move(grid), ball.radius * (1.0 - spec.tau),
                              ball.height);
    }
    case PerturbFamily::ScaleHeight: {
      if (spec.tau > 1.0) throw std::invalid_argument("scale_height: tau must be <= 1");
      return radial_indicator(std::move(grid), ball.radius,
                              ball.height * (1.0 - spec.tau));
    }
    case PerturbFamily::Annulus: {
      if (spec.tau >= 1.0) throw std::invalid_argument("annulus: tau must be < 1");
      return annulus_profile(ball, std::move(grid), spec.tau);
    }
    case PerturbFamily::SmoothBump:
      return smooth_bump(ball, std::move(grid), spec.tau, p);
    case PerturbFamily::RandomRays:
      return random_rays(ball, std::move(grid), spec.tau, p, spec.seed);
  }
  throw std::invalid_argument("generate: unknown family");
}

}  // namespace ballmax
