#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ballmax/integrand.hpp"
#include "ballmax/perturb.hpp"

namespace ballmax {

// Experiment description, read from a flat sectioned key = value file:
//
//   [integrand]
//   family = exponential      # power_decay | linear_cutoff | exponential
//   a = 1.0
//   p = 2.0
//   n = 2
//   q = 2.0
//   gamma = 1.0               # m (power_decay) / c (linear_cutoff)
//
//   [grid]
//   rmax_multiple = 4.0       # r_max as a multiple of the optimal radius
//   n_r = 512
//   n_dir = 0                 # 0 = per-dimension default
//
//   [run]
//   out = results
//   workers = 1
//   tol_scale = 1.0
//   checks = on               # gate on hypothesis checks / bound violations
//   cell_budget = 200         # max transport cells per side (0 disables)
//
//   [sweep shift]
//   family = translate        # translate | dilate | scale_height | annulus
//   tau = 0.05 0.1 0.2        #   | smooth_bump | random_rays
//   seeds = 1 2 3             # random_rays only; tau also takes lo:step:hi
struct IntegrandConfig {
  std::string family = "exponential";
  Real a = 1.0, p = 2.0;
  int dim = 1;
  Real q = 2.0, m = 2.0, c = 1.0, gamma = 1.0;
};

struct GridConfig {
  Real rmax_multiple = 4.0;
  Index n_r = 512;
  Index n_dir = 0;
};

struct RunConfig {
  std::string out;  // empty: --out flag, else BALLMAX_OUT, else "out"
  std::uint32_t seed = 0;  // added to every sweep seed
  int workers = 1;
  Real tol_scale = 1.0;
  bool checks = true;
  Index cell_budget = 200;
};

struct SweepConfig {
  std::string name;
  std::string family = "translate";
  std::vector<Real> taus;
  std::vector<std::uint32_t> seeds = {0};
};

struct Config {
  IntegrandConfig integrand;
  GridConfig grid;
  RunConfig run;
  std::vector<SweepConfig> sweeps;
};

// Throws std::runtime_error with a line number on malformed input.
Config parse_config(std::istream& in);
Config parse_config_file(const std::string& path);

// Human-readable problems; empty iff run_experiment would start.
std::vector<std::string> validate(const Config& cfg);

Integrand make_integrand(const IntegrandConfig& cfg);

// Comma-free one-token description, e.g. "exponential(gamma=1;q=2)".
std::string integrand_params_string(const IntegrandConfig& cfg);

}  // namespace ballmax
