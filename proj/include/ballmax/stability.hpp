#pragma once

#include <vector>

#include "ballmax/integrand.hpp"
#include "ballmax/radial.hpp"
#include "ballmax/transport.hpp"

namespace ballmax {

// Functional values along the comparison chain u -> v -> w, where v is the
// height-a indicator of the auxiliary star-shaped set of u and w is the
// optimal ball. delta = f_w - f_u splits exactly into the two gaps.
struct ChainReport {
  Real f_u = 0.0, f_v = 0.0, f_w = 0.0;
  Real gap_uv = 0.0;  // f_v - f_u
  Real gap_vw = 0.0;  // f_w - f_v
  Real delta = 0.0;   // gap_uv + gap_vw
  Real quad_error = 0.0;  // Richardson estimate from one coarsening step
  Real tol_chain = 0.0;
  bool chain_holds() const {
    return gap_uv >= -tol_chain && gap_vw >= -tol_chain;
  }
};

ChainReport chain_report(const Integrand& F, const GridFunction& u,
                         const GridFunction& w, Real tol_scale = 1.0);
// Convenience overload building the optimal ball on u's grid.
ChainReport chain_report(const Integrand& F, const GridFunction& u,
                         Real tol_scale = 1.0);

// Per-direction split of the competitor's mass at the auxiliary radius kappa:
// tau1 inside [0, kappa), tau2 beyond. The identity
// a^p kappa^n / n = tau1 + tau2 holds by construction; identity_residual is
// the worst per-ray defect actually observed.
struct DirectionalMasses {
  ArrayXr kappa, tau1, tau2;
  Real tau1_total = 0.0, tau2_total = 0.0;  // direction-weight aggregates
  Real identity_residual = 0.0;
};

DirectionalMasses directional_masses(const GridFunction& u, Real a, Real p);

// Transport-displacement quantities the deficit must dominate:
//   delta >= lambda * quant2   (per-ray monotone rearrangement toward v)
//   delta >= lambda * quant1   (cell transport from G \ B to B \ G)
// quant1_allowance is a geometric discretization allowance (cell diameter on
// matched volume, full r_max displacement on discarded/boundary volume);
// quant2_error is a step-halving quadrature estimate.
struct DisplacementBounds {
  Real quant1 = 0.0;
  Real quant1_allowance = 0.0;
  bool quant1_computed = false;  // false when cell_budget == 0 (check skipped)
  Index cell_count = 0;
  Real cell_size = 0.0;
  InwardReport inward;
  Real quant2 = 0.0;
  Real quant2_error = 0.0;
};

// cell_budget caps the transport cells per side (max 400); the cell size is
// grown deterministically from R/64 until the sets fit. 0 skips quant1.
DisplacementBounds displacement_bounds(const GridFunction& u,
                                       const BallProfile& ball, Real p,
                                       Index cell_budget);

// Full deficit/distance record for one competitor. Ratios are lhs/rhs_core
// and are set to zero when delta is within tol_chain of zero (the bound is
// vacuous there). rhs_core carries no constant: ratio estimates it.
struct StabilityReport {
  ChainReport chain;
  Real lambda_hat = 0.0;
  Real lhs = 0.0;       // int |u - w|^p
  Real rhs_core = 0.0;  // sqrt(delta / lambda)
  Real ratio = 0.0;
  Real step1_lhs = 0.0;       // a^{-p} int |w - v|^p
  Real step1_rhs_core = 0.0;  // max(sqrt(delta R^{n-1} / lambda), delta / (lambda R))
  Real step1_ratio = 0.0;
  Real step2_lhs = 0.0;       // int |u - v|^p
  Real step2_rhs_core = 0.0;  // sqrt(a^{p/n} delta / lambda)
  Real step2_ratio = 0.0;
  Real quant1_rhs = 0.0;  // lambda * quant1
  Real quant2_rhs = 0.0;  // lambda * quant2
  DisplacementBounds displacement;
  bool quant1_ok = true;  // delta + allowances >= quant1_rhs
  bool quant2_ok = true;  // delta + allowances >= quant2_rhs
};

// Throws std::domain_error naming the failed hypothesis when `hyp` does not
// certify the integrand; cell_budget == 0 skips the cell-transport check.
StabilityReport stability_report(const Integrand& F, const GridFunction& u,
                                 const GridFunction& w, const BallProfile& ball,
                                 const HypothesisReport& hyp,
                                 Real tol_scale = 1.0, Index cell_budget = 0);
// Convenience overload: builds the ball and runs the hypothesis checks.
StabilityReport stability_report(const Integrand& F, const GridFunction& u,
                                 Real tol_scale = 1.0, Index cell_budget = 0);

struct CalibratedConstants {
  Real c_main = 0.0, c_step1 = 0.0, c_step2 = 0.0;
  Index used = 0;     // reports with delta above tolerance
  Index skipped = 0;  // vacuous reports
};

// Largest observed ratios over all reports with a genuinely positive deficit.
// Throws std::invalid_argument when every report is vacuous.
CalibratedConstants calibrate_constant(const std::vector<StabilityReport>& reports);

}  // namespace ballmax
