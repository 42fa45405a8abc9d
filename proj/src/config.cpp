#include "ballmax/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ballmax/radial.hpp"

namespace ballmax {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("config line " + std::to_string(line) + ": " + what);
}

Real parse_real(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const Real v = std::stod(s, &pos);
    if (pos != s.size()) fail(line, "trailing characters after number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(line, "expected a number, got '" + s + "'");
  }
}

long parse_int(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) fail(line, "trailing characters after integer '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(line, "expected an integer, got '" + s + "'");
  }
}

bool parse_bool(const std::string& s, int line) {
  if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
  if (s == "off" || s == "false" || s == "0" || s == "no") return false;
  fail(line, "expected on/off, got '" + s + "'");
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

// "lo:step:hi" inclusive range, otherwise whitespace-separated values
std::vector<Real> parse_tau_list(const std::string& s, int line) {
  std::vector<Real> out;
  for (const std::string& tok : split_ws(s)) {
    const std::size_t c1 = tok.find(':');
    if (c1 == std::string::npos) {
      out.push_back(parse_real(tok, line));
      continue;
    }
    const std::size_t c2 = tok.find(':', c1 + 1);
    if (c2 == std::string::npos) fail(line, "range needs lo:step:hi, got '" + tok + "'");
    const Real lo = parse_real(tok.substr(0, c1), line);
    const Real step = parse_real(tok.substr(c1 + 1, c2 - c1 - 1), line);
    const Real hi = parse_real(tok.substr(c2 + 1), line);
    if (!(step > 0.0)) fail(line, "range step must be positive");
    for (Real t = lo; t <= hi + 1e-12 * std::max(1.0, std::abs(hi)); t += step)
      out.push_back(t);
  }
  return out;
}

std::string fmt_g(Real v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

Config parse_config(std::istream& in) {
  Config cfg;
  std::string section;
  SweepConfig* sweep = nullptr;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text.back() != ']') fail(line, "unterminated section header");
      const std::string header = trim(text.substr(1, text.size() - 2));
      if (header.rfind("sweep", 0) == 0) {
        const std::string name = trim(header.substr(5));
        if (name.empty()) fail(line, "sweep section needs a name");
        cfg.sweeps.push_back(SweepConfig{});
        sweep = &cfg.sweeps.back();
        sweep->name = name;
        section = "sweep";
      } else if (header == "integrand" || header == "grid" || header == "run") {
        section = header;
        sweep = nullptr;
      } else {
        fail(line, "unknown section [" + header + "]");
      }
      continue;
    }

    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) fail(line, "expected key = value");

    if (section == "integrand") {
      IntegrandConfig& ic = cfg.integrand;
      if (key == "family") ic.family = value;
      else if (key == "a") ic.a = parse_real(value, line);
      else if (key == "p") ic.p = parse_real(value, line);
      else if (key == "n") ic.dim = static_cast<int>(parse_int(value, line));
      else if (key == "q") ic.q = parse_real(value, line);
      else if (key == "m") ic.m = parse_real(value, line);
      else if (key == "c") ic.c = parse_real(value, line);
      else if (key == "gamma") ic.gamma = parse_real(value, line);
      else fail(line, "unknown integrand key '" + key + "'");
    } else if (section == "grid") {
      GridConfig& gc = cfg.grid;
      if (key == "rmax_multiple") gc.rmax_multiple = parse_real(value, line);
      else if (key == "n_r") gc.n_r = parse_int(value, line);
      else if (key == "n_dir") gc.n_dir = parse_int(value, line);
      else fail(line, "unknown grid key '" + key + "'");
    } else if (section == "run") {
      RunConfig& rc = cfg.run;
      if (key == "out") rc.out = value;
      else if (key == "workers") rc.workers = static_cast<int>(parse_int(value, line));
      else if (key == "tol_scale") rc.tol_scale = parse_real(value, line);
      else if (key == "checks") rc.checks = parse_bool(value, line);
      else if (key == "cell_budget") rc.cell_budget = parse_int(value, line);
      else if (key == "seed") rc.seed = static_cast<std::uint32_t>(parse_int(value, line));
      else fail(line, "unknown run key '" + key + "'");
    } else if (section == "sweep") {
      if (key == "family") sweep->family = value;
      else if (key == "tau") sweep->taus = parse_tau_list(value, line);
      else if (key == "seeds") {
        sweep->seeds.clear();
        for (const std::string& tok : split_ws(value))
          sweep->seeds.push_back(static_cast<std::uint32_t>(parse_int(tok, line)));
        if (sweep->seeds.empty()) fail(line, "seeds list is empty");
      } else fail(line, "unknown sweep key '" + key + "'");
    } else {
      fail(line, "key outside any section");
    }
  }
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

Integrand make_integrand(const IntegrandConfig& cfg) {
  if (cfg.family == "power_decay")
    return Integrand::power_decay(cfg.m, cfg.q, cfg.a, cfg.p, cfg.dim);
  if (cfg.family == "linear_cutoff")
    return Integrand::linear_cutoff(cfg.c, cfg.q, cfg.a, cfg.p, cfg.dim);
  if (cfg.family == "exponential")
    return Integrand::exponential(cfg.gamma, cfg.q, cfg.a, cfg.p, cfg.dim);
  throw std::invalid_argument("unknown integrand family: " + cfg.family);
}

std::string integrand_params_string(const IntegrandConfig& cfg) {
  std::string inner;
  if (cfg.family == "power_decay") inner = "m=" + fmt_g(cfg.m);
  else if (cfg.family == "linear_cutoff") inner = "c=" + fmt_g(cfg.c);
  else if (cfg.family == "exponential") inner = "gamma=" + fmt_g(cfg.gamma);
  else inner = "?";
  return cfg.family + "(" + inner + ";q=" + fmt_g(cfg.q) + ")";
}

std::vector<std::string> validate(const Config& cfg) {
  std::vector<std::string> problems;
  const IntegrandConfig& ic = cfg.integrand;

  const bool family_known = ic.family == "power_decay" ||
                            ic.family == "linear_cutoff" ||
                            ic.family == "exponential";
  if (!family_known)
    problems.push_back("unknown integrand family '" + ic.family + "'");
  if (ic.dim < 1 || ic.dim > 3)
    problems.push_back("unsupported dimension n=" + std::to_string(ic.dim));
  if (!(ic.a > 0.0)) problems.push_back("a must be positive");
  if (!(ic.p >= 1.0)) problems.push_back("p must be at least 1");
  if (!(ic.q > 0.0)) problems.push_back("q must be positive");
  if (ic.family == "power_decay" && !(ic.m > 0.0))
    problems.push_back("m must be positive");
  if (ic.family == "linear_cutoff" && !(ic.c > 0.0))
    problems.push_back("c must be positive");
  if (ic.family == "exponential" && !(ic.gamma > 0.0))
    problems.push_back("gamma must be positive");

  if (!(cfg.grid.rmax_multiple >= 1.0))
    problems.push_back("truncation smaller than maximizer (rmax_multiple < 1)");
  if (cfg.grid.n_r < 16) problems.push_back("n_r must be at least 16");
  if (cfg.grid.n_dir < 0) problems.push_back("n_dir must be nonnegative");
  if (cfg.run.workers < 1) problems.push_back("workers must be at least 1");
  if (!(cfg.run.tol_scale > 0.0)) problems.push_back("tol_scale must be positive");
  if (cfg.run.cell_budget < 0 || cfg.run.cell_budget > 400)
    problems.push_back("cell_budget must be in [0, 400]");

  // geometric admissibility needs the optimal radius
  Real R = 0.0, r_max = 0.0;
  const bool geometry_ok =
      ic.dim >= 1 && ic.dim <= 3 && ic.a > 0.0 && ic.p >= 1.0;
  if (geometry_ok) {
    R = ball_radius(ic.dim, ic.a, ic.p);
    r_max = cfg.grid.rmax_multiple * R;
  }

  for (const SweepConfig& sw : cfg.sweeps) {
    const std::string tag = "sweep '" + sw.name + "': ";
    PerturbFamily family = PerturbFamily::TranslateBall;
    bool known = true;
    try {
      family = perturb_family_from_string(sw.family);
    } catch (const std::invalid_argument&) {
      problems.push_back(tag + "unknown perturbation family '" + sw.family + "'");
      known = false;
    }
    if (sw.taus.empty()) problems.push_back(tag + "tau list is empty");
    if (!known || !geometry_ok) continue;
    for (Real tau : sw.taus) {
      if (!(tau >= 0.0)) {
        problems.push_back(tag + "tau must be >= 0");
        break;
      }
      const std::string where = tag + "tau=" + fmt_g(tau) + ": ";
      switch (family) {
        case PerturbFamily::TranslateBall:
          if (tau + R > r_max)
            problems.push_back(where + "translated ball leaves the grid");
          break;
        case PerturbFamily::DilateBall:
        case PerturbFamily::ScaleHeight:
          if (tau > 1.0) problems.push_back(where + "tau must be <= 1");
          break;
        case PerturbFamily::Annulus: {
          if (tau >= 1.0) {
            problems.push_back(where + "tau must be < 1");
            break;
          }
          const Real n = static_cast<Real>(ic.dim);
          const Real outer = std::pow(std::pow(R, n) * (1.0 + std::pow(tau, n)),
                                      1.0 / n);
          if (outer > r_max)
            problems.push_back(where + "annulus outer radius exceeds r_max");
          break;
        }
        case PerturbFamily::SmoothBump:
          if (R * (1.0 + tau) > r_max)
            problems.push_back(where + "bump support exceeds r_max");
          break;
        case PerturbFamily::RandomRays:
          break;
      }
    }
  }
  return problems;
}

}  // namespace ballmax
