#include "ballmax/radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace ballmax {

GridPtr build_grid(int dim, Real r_max, Index n_r, Index n_dir) {
  if (!supported_dimension(dim))
    throw std::invalid_argument("build_grid: dim must be 1, 2 or 3");
  if (!(r_max > 0.0)) throw std::invalid_argument("build_grid: r_max must be positive");
  if (n_r < 16) throw std::invalid_argument("build_grid: n_r must be >= 16");

  auto grid = std::make_shared<RadialGrid>();
  grid->dim = dim;
  grid->r_max = r_max;

  const Index S = n_r + (n_r % 2);  // even subinterval count
  const Real h = r_max / static_cast<Real>(S);
  grid->r_nodes = ArrayXr::LinSpaced(S + 1, 0.0, r_max);
  grid->r_weights = ArrayXr::Constant(S + 1, 2.0 * h / 3.0);
  grid->r_weights[0] = grid->r_weights[S] = h / 3.0;
  for (Index j = 1; j < S; j += 2) grid->r_weights[j] = 4.0 * h / 3.0;

  if (dim == 1) {
    grid->directions = MatrixXr(2, 1);
    grid->directions << 1.0, -1.0;
    grid->dir_weights = ArrayXr::Constant(2, 1.0);
  } else if (dim == 2) {
    if (n_dir == 0) n_dir = 128;
    grid->directions = MatrixXr(n_dir, 2);
    for (Index i = 0; i < n_dir; ++i) {
      const Real theta = 2.0 * std::numbers::pi * static_cast<Real>(i) /
                         static_cast<Real>(n_dir);
      grid->directions(i, 0) = std::cos(theta);
      grid->directions(i, 1) = std::sin(theta);
    }
    grid->dir_weights =
        ArrayXr::Constant(n_dir, 2.0 * std::numbers::pi / static_cast<Real>(n_dir));
  } else {
    if (n_dir == 0) n_dir = 256;
    grid->directions = MatrixXr(n_dir, 3);
    const Real golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (Index i = 0; i < n_dir; ++i) {
      const Real z = 1.0 - (2.0 * static_cast<Real>(i) + 1.0) / static_cast<Real>(n_dir);
      const Real rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const Real theta = golden * static_cast<Real>(i);
      grid->directions(i, 0) = rho * std::cos(theta);
      grid->directions(i, 1) = rho * std::sin(theta);
      grid->directions(i, 2) = z;
    }
    grid->dir_weights =
        ArrayXr::Constant(n_dir, 4.0 * std::numbers::pi / static_cast<Real>(n_dir));
  }
  return grid;
}

GridFunction GridFunction::from_samples(GridPtr grid, ArrayXXr values) {
  if (!grid) throw std::invalid_argument("GridFunction: null grid");
  if (values.rows() != grid->n_dir() || values.cols() != grid->n_nodes())
    throw std::invalid_argument("GridFunction: value shape does not match grid");
  GridFunction u;
  u.grid_ = std::move(grid);
  u.values_ = std::move(values);
  u.profiles_.assign(static_cast<std::size_t>(u.values_.rows()), RayProfile{});
  return u;
}

GridFunction GridFunction::from_profiles(GridPtr grid, std::vector<RayProfile> profiles) {
  if (!grid) throw std::invalid_argument("GridFunction: null grid");
  if (static_cast<Index>(profiles.size()) != grid->n_dir())
    throw std::invalid_argument("GridFunction: one profile per direction required");

  for (auto& prof : profiles) {
    // drop empty pieces, then check the cover
    prof.erase(std::remove_if(prof.begin(), prof.end(),
                              [](const RayPiece& c) { return !(c.hi > c.lo); }),
               prof.end());
    if (prof.empty()) throw std::invalid_argument("GridFunction: empty ray profile");
    if (prof.front().lo != 0.0)
      throw std::invalid_argument("GridFunction: profile must start at 0");
    for (std::size_t k = 0; k + 1 < prof.size(); ++k)
      if (std::abs(prof[k].hi - prof[k + 1].lo) > 1e-12 * grid->r_max)
        throw std::invalid_argument("GridFunction: profile pieces must be contiguous");
    if (std::abs(prof.back().hi - grid->r_max) > 1e-12 * grid->r_max)
      throw std::invalid_argument("GridFunction: profile must end at r_max");
    prof.back().hi = grid->r_max;
  }

  GridFunction u;
  u.values_ = ArrayXXr::Zero(grid->n_dir(), grid->n_nodes());
  for (Index i = 0; i < grid->n_dir(); ++i) {
    const RayProfile& prof = profiles[static_cast<std::size_t>(i)];
    std::size_t k = 0;
    for (Index j = 0; j < grid->n_nodes(); ++j) {
      const Real r = grid->r_nodes[j];
      while (k + 1 < prof.size() && r >= prof[k].hi) ++k;
      u.values_(i, j) = prof[k].value;
    }
  }
  u.grid_ = std::move(grid);
  u.profiles_ = std::move(profiles);
  return u;
}

bool GridFunction::fully_piecewise() const {
  for (const auto& prof : profiles_)
    if (prof.empty()) return false;
  return !profiles_.empty();
}

Real GridFunction::value_at(Index ray, Real r) const {
  const RadialGrid& grid = *grid_;
  r = std::clamp(r, 0.0, grid.r_max);
  const RayProfile& prof = profiles_[static_cast<std::size_t>(ray)];
  if (!prof.empty()) {
    std::size_t lo = 0, hi = prof.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (r >= prof[mid].lo) lo = mid; else hi = mid - 1;
    }
    return prof[lo].value;
  }
  const Real h = grid.h();
  const Index j = std::min<Index>(static_cast<Index>(r / h), grid.n_nodes() - 2);
  const Real t = (r - grid.r_nodes[j]) / h;
  return (1.0 - t) * values_(ray, j) + t * values_(ray, j + 1);
}

void GridFunction::scale(Real factor) {
  values_ *= factor;
  for (auto& prof : profiles_)
    for (RayPiece& piece : prof) piece.value *= factor;
}

Real ball_radius(int dim, Real a, Real p) {
  if (!supported_dimension(dim)) throw std::invalid_argument("ball_radius: bad dim");
  if (!(a > 0.0) || !(p >= 1.0)) throw std::invalid_argument("ball_radius: bad a or p");
  return std::pow(1.0 / (unit_ball_volume(dim) * pow_p(a, p)), 1.0 / static_cast<Real>(dim));
}

BallProfile ball_profile(const Integrand& F) {
  BallProfile prof;
  prof.radius = ball_radius(F.dim, F.a, F.p);
  prof.height = F.a;
  prof.threshold = F(prof.radius, F.a);
  return prof;
}

bool all_rays_identical(const GridFunction& u) {
  const RadialGrid& grid = *u.grid();
  if (grid.n_dir() <= 1) return true;
  if (u.fully_piecewise()) {
    const RayProfile& first = u.ray_profile(0);
    for (Index i = 1; i < grid.n_dir(); ++i) {
      const RayProfile& prof = u.ray_profile(i);
      if (prof.size() != first.size()) return false;
      for (std::size_t k = 0; k < first.size(); ++k)
        if (prof[k].lo != first[k].lo || prof[k].hi != first[k].hi ||
            prof[k].value != first[k].value)
          return false;
    }
    return true;
  }
  for (Index i = 1; i < grid.n_dir(); ++i)
    if ((u.values().row(i) != u.values().row(0)).any()) return false;
  return true;
}

Real ray_lp_mass(const GridFunction& u, Index ray, Real p) {
  return integrate_ray(u, ray, [p](Real, Real s) { return pow_p(s, p); });
}

Real lp_mass(const GridFunction& u, Real p) {
  const RadialGrid& grid = *u.grid();
  if (all_rays_identical(u))
    return grid.dir_weights.sum() * ray_lp_mass(u, 0, p);
  Real total = 0.0;
  for (Index i = 0; i < grid.n_dir(); ++i)
    total += grid.dir_weights[i] * ray_lp_mass(u, i, p);
  return total;
}

bool in_constraint_set(const GridFunction& u, Real a, Real p, Real tol_mass) {
  if (u.min_value() < 0.0 || u.max_value() > a) return false;
  return lp_mass(u, p) <= 1.0 + tol_mass;
}

Real evaluate_functional(const Integrand& F, const GridFunction& u) {
  const RadialGrid& grid = *u.grid();
  auto f = [&F](Real r, Real s) { return F(r, s); };
  if (all_rays_identical(u))
    return grid.dir_weights.sum() * integrate_ray(u, 0, f);
  Real total = 0.0;
  for (Index i = 0; i < grid.n_dir(); ++i)
    total += grid.dir_weights[i] * integrate_ray(u, i, f);
  return total;
}

GridFunction build_maximizer(const BallProfile& profile, GridPtr grid) {
  if (!(profile.radius > 0.0))
    throw std::invalid_argument("build_maximizer: radius must be positive");
  if (profile.radius > grid->r_max)
    throw std::invalid_argument(
        "build_maximizer: truncation radius r_max is smaller than the ball");
  RayProfile ray{{0.0, profile.radius, profile.height},
                 {profile.radius, grid->r_max, 0.0}};
  if (profile.radius == grid->r_max) ray.pop_back();
  return GridFunction::from_profiles(
      grid, std::vector<RayProfile>(static_cast<std::size_t>(grid->n_dir()), ray));
}

PiecewisePowerDensity canonical_ray_density(const GridFunction& u, Index ray, Real p) {
  const RadialGrid& grid = *u.grid();
  const int d = grid.dim;
  if (u.is_piecewise(ray)) {
    const RayProfile& prof = u.ray_profile(ray);
    std::vector<Real> breaks, coeffs;
    breaks.reserve(prof.size() + 1);
    coeffs.reserve(prof.size());
    breaks.push_back(0.0);
    for (const RayPiece& piece : prof) {
      breaks.push_back(piece.hi);
      coeffs.push_back(pow_p(piece.value, p));
    }
    return PiecewisePowerDensity(d, std::move(breaks), std::move(coeffs));
  }
  // one coefficient per Simpson panel, matched to the panel quadrature mass
  const Index S = grid.n_nodes() - 1;
  const Real h = grid.h();
  std::vector<Real> breaks, coeffs;
  breaks.reserve(static_cast<std::size_t>(S / 2) + 1);
  coeffs.reserve(static_cast<std::size_t>(S / 2));
  breaks.push_back(0.0);
  for (Index k = 0; k + 1 < S; k += 2) {
    const Real lo = grid.r_nodes[k], hi = grid.r_nodes[k + 2];
    Real panel = 0.0;
    for (Index j = 0; j < 3; ++j) {
      const Real wj = (j == 1) ? 4.0 * h / 3.0 : h / 3.0;
      panel += wj * pow_p(u.values()(ray, k + j), p) *
               radial_weight(grid.r_nodes[k + j], d);
    }
    const Real cell = power_cell_mass(1.0, lo, hi, d);
    breaks.push_back(hi);
    coeffs.push_back(std::max(panel, 0.0) / cell);
  }
  return PiecewisePowerDensity(d, std::move(breaks), std::move(coeffs));
}

Real kappa(const GridFunction& u, Index ray, Real a, Real p) {
  if (!(a > 0.0)) throw std::invalid_argument("kappa: a must be positive");
  const RadialGrid& grid = *u.grid();
  const Real n = static_cast<Real>(grid.dim);
  const Real mass = canonical_ray_density(u, ray, p).mass();
  const Real k = std::pow(n * mass / pow_p(a, p), 1.0 / n);
  return std::min(k, grid.r_max);
}

RaySet build_auxiliary(const GridFunction& u, Real a, Real p) {
  const RadialGrid& grid = *u.grid();
  RaySet G;
  G.grid = u.grid();
  G.kappa = ArrayXr(grid.n_dir());
  for (Index i = 0; i < grid.n_dir(); ++i) G.kappa[i] = kappa(u, i, a, p);
  return G;
}

GridFunction indicator_from_rays(const RaySet& G, Real height) {
  const RadialGrid& grid = *G.grid;
  std::vector<RayProfile> profiles(static_cast<std::size_t>(grid.n_dir()));
  for (Index i = 0; i < grid.n_dir(); ++i) {
    const Real k = G.kappa[i];
    RayProfile prof;
    if (k > 0.0) prof.push_back({0.0, std::min(k, grid.r_max), height});
    if (k < grid.r_max) prof.push_back({std::min(k, grid.r_max), grid.r_max, 0.0});
    profiles[static_cast<std::size_t>(i)] = std::move(prof);
  }
  return GridFunction::from_profiles(G.grid, std::move(profiles));
}

Real set_volume(const RaySet& G) {
  const RadialGrid& grid = *G.grid;
  const Real n = static_cast<Real>(grid.dim);
  Real vol = 0.0;
  for (Index i = 0; i < grid.n_dir(); ++i)
    vol += grid.dir_weights[i] * std::pow(G.kappa[i], n) / n;
  return vol;
}

Real lp_distance(const GridFunction& u, const GridFunction& v, Real p) {
  const RadialGrid& grid = *u.grid();
  auto g = [p](Real, Real su, Real sv) { return pow_p(std::abs(su - sv), p); };
  if (all_rays_identical(u) && all_rays_identical(v))
    return grid.dir_weights.sum() * integrate_ray_pair(u, v, 0, g);
  Real total = 0.0;
  for (Index i = 0; i < grid.n_dir(); ++i)
    total += grid.dir_weights[i] * integrate_ray_pair(u, v, i, g);
  return total;
}

GridFunction coarsen(const GridFunction& u) {
  const RadialGrid& fine = *u.grid();
  const Index S = fine.n_nodes() - 1;
  if (S < 32 || S % 2 != 0) throw std::invalid_argument("coarsen: grid too small");
  GridPtr coarse = build_grid(fine.dim, fine.r_max, S / 2, fine.n_dir());
  if (u.fully_piecewise()) {
    std::vector<RayProfile> profiles;
    profiles.reserve(static_cast<std::size_t>(fine.n_dir()));
    for (Index i = 0; i < fine.n_dir(); ++i) profiles.push_back(u.ray_profile(i));
    return GridFunction::from_profiles(std::move(coarse), std::move(profiles));
  }
  if (coarse->n_nodes() * 2 - 1 != fine.n_nodes())
    throw std::invalid_argument("coarsen: node counts do not nest");
  ArrayXXr values(fine.n_dir(), coarse->n_nodes());
  for (Index j = 0; j < coarse->n_nodes(); ++j) values.col(j) = u.values().col(2 * j);
  return GridFunction::from_samples(std::move(coarse), std::move(values));
}

void write_grid_function_csv(const GridFunction& u, std::ostream& os) {
  const RadialGrid& grid = *u.grid();
  os << "direction,radius,value\n";
  char buf[80];
  for (Index i = 0; i < grid.n_dir(); ++i)
    for (Index j = 0; j < grid.n_nodes(); ++j) {
      std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g\n",
                    static_cast<long long>(i), grid.r_nodes[j], u.values()(i, j));
      os << buf;
    }
}

}  // namespace ballmax
