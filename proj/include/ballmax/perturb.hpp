#pragma once

#include <cstdint>
#include <string>

#include "ballmax/radial.hpp"

namespace ballmax {

// competitor families used to probe the deficit/distance relation
enum class PerturbFamily {
  TranslateBall,  // ball of the optimal radius, center shifted by tau along x1
  DilateBall,     // concentric ball with radius shrunk to R*(1-tau)
  ScaleHeight,    // optimal ball with height scaled to (1-tau)*a
  Annulus,        // core [0, tau*R) removed, outer radius grown to preserve mass
  SmoothBump,     // C^inf mollifier bump of radius R*(1+tau), height saturating the mass budget
  RandomRays,     // independent random piecewise profile on each direction
};

const char* perturb_family_name(PerturbFamily family);
PerturbFamily perturb_family_from_string(const std::string& name);

struct PerturbationSpec {
  PerturbFamily family = PerturbFamily::TranslateBall;
  Real tau = 0.0;
  std::uint32_t seed = 0;
};

// Build the competitor on the given grid. `ball` is the unperturbed optimal
// profile and `p` the mass exponent; every returned function satisfies
// 0 <= u <= ball.height and the unit mass budget. Throws std::invalid_argument
// when tau pushes the support past grid->r_max.
GridFunction generate(const PerturbationSpec& spec, const BallProfile& ball,
                      GridPtr grid, Real p);

}  // namespace ballmax
