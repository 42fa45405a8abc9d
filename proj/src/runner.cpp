#include "ballmax/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ballmax {

namespace {

std::string num(Real v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string failed_hypothesis_name(const HypothesisReport& hyp) {
  if (!hyp.h1.pass) return "monotonicity";
  if (!hyp.condition.pass) return "condition";
  if (!hyp.h2.pass) return "domination";
  if (!(hyp.lambda_hat > 0.0)) return "lambda";
  return "";
}

void write_hypotheses_csv(const Config& cfg, const HypothesisReport& hyp,
                          std::ostream& os) {
  os << "family,params,n,p,a,h1_pass,h1_worst,h1_strict,condition_pass,"
        "condition_worst,h2_pass,h2_worst,alpha_integral,lambda_hat\n";
  os << cfg.integrand.family << ',' << integrand_params_string(cfg.integrand)
     << ',' << cfg.integrand.dim << ',' << num(cfg.integrand.p) << ','
     << num(cfg.integrand.a) << ',' << (hyp.h1.pass ? 1 : 0) << ','
     << num(hyp.h1.worst_violation) << ',' << (hyp.h1.strict_decrease ? 1 : 0)
     << ',' << (hyp.condition.pass ? 1 : 0) << ','
     << num(hyp.condition.worst_violation) << ',' << (hyp.h2.pass ? 1 : 0)
     << ',' << num(hyp.h2.worst_violation) << ',' << num(hyp.h2.alpha_integral)
     << ',' << num(hyp.lambda_hat) << '\n';
}

void write_chain_csv(const std::vector<CompetitorRow>& rows, std::ostream& os) {
  os << "family,tau,seed,f_u,f_v,f_w,gap_uv,gap_vw,delta,quad_error,tol_chain,"
        "chain_ok\n";
  for (const CompetitorRow& row : rows) {
    const ChainReport& c = row.report.chain;
    os << perturb_family_name(row.spec.family) << ',' << num(row.spec.tau)
       << ',' << row.spec.seed << ',' << num(c.f_u) << ',' << num(c.f_v) << ','
       << num(c.f_w) << ',' << num(c.gap_uv) << ',' << num(c.gap_vw) << ','
       << num(c.delta) << ',' << num(c.quad_error) << ',' << num(c.tol_chain)
       << ',' << (c.chain_holds() ? 1 : 0) << '\n';
  }
}

void write_stability_csv(const Config& cfg, const std::vector<CompetitorRow>& rows,
                         std::ostream& os) {
  os << "family,params,n,p,a,tau,delta,lambda,lhs,rhs_core,ratio,quant1_rhs,"
        "quant2_rhs,step1_lhs,step1_ratio,step2_lhs,step2_ratio\n";
  const std::string params = integrand_params_string(cfg.integrand);
  for (const CompetitorRow& row : rows) {
    const StabilityReport& s = row.report;
    os << perturb_family_name(row.spec.family) << ',' << params << ','
       << cfg.integrand.dim << ',' << num(cfg.integrand.p) << ','
       << num(cfg.integrand.a) << ',' << num(row.spec.tau) << ','
       << num(s.chain.delta) << ',' << num(s.lambda_hat) << ',' << num(s.lhs)
       << ',' << num(s.rhs_core) << ',' << num(s.ratio) << ','
       << num(s.quant1_rhs) << ',' << num(s.quant2_rhs) << ','
       << num(s.step1_lhs) << ',' << num(s.step1_ratio) << ','
       << num(s.step2_lhs) << ',' << num(s.step2_ratio) << '\n';
  }
}

}  // namespace

ExperimentResult run_experiment(const Config& cfg, const std::string& out_dir) {
  ExperimentResult result;

  const std::vector<std::string> problems = validate(cfg);
  if (!problems.empty()) {
    std::ostringstream ss;
    for (const std::string& p : problems) ss << p << '\n';
    result.status = 2;
    result.summary = ss.str();
    return result;
  }

  const Integrand F = make_integrand(cfg.integrand);
  const BallProfile ball = ball_profile(F);
  const Real r_max = cfg.grid.rmax_multiple * ball.radius;
  const GridPtr grid =
      build_grid(cfg.integrand.dim, r_max, cfg.grid.n_r, cfg.grid.n_dir);
  const GridFunction w = build_maximizer(ball, grid);

  result.hypotheses = run_hypothesis_checks(F, grid->r_nodes);
  const std::string hyp_fail = failed_hypothesis_name(result.hypotheses);

  std::ostringstream summary;
  summary << "integrand: " << integrand_params_string(cfg.integrand)
          << " n=" << cfg.integrand.dim << " p=" << num(cfg.integrand.p)
          << " a=" << num(cfg.integrand.a) << '\n';
  summary << "grid: r_max=" << num(r_max) << " n_r=" << cfg.grid.n_r
          << " n_dir=" << grid->n_dir() << '\n';
  if (hyp_fail.empty())
    summary << "hypotheses: PASS lambda_hat=" << num(result.hypotheses.lambda_hat)
            << '\n';
  else
    summary << "hypotheses: FAIL " << hyp_fail << '\n';

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  {
    std::ofstream os(out / "hypotheses.csv");
    if (!os) throw std::runtime_error("cannot write to " + out_dir);
    write_hypotheses_csv(cfg, result.hypotheses, os);
  }

  // A failed hypothesis stops the run when checks are on; without the
  // separation modulus the bound quantities cannot be formed at all.
  const bool can_run = result.hypotheses.lambda_hat > 0.0 &&
                       (cfg.run.checks ? hyp_fail.empty() : true);
  if (!can_run) {
    result.status = 3;
    summary << "competitors: 0\noverall: FAIL (hypothesis " << hyp_fail << ")\n";
    result.summary = summary.str();
    std::ofstream os(out / "summary.txt");
    os << result.summary;
    return result;
  }

  // gate-passing view of the hypotheses when checks are disabled
  HypothesisReport gate = result.hypotheses;
  if (!cfg.run.checks) {
    gate.h1.pass = true;
    gate.condition.pass = true;
    gate.h2.pass = true;
  }

  struct Item {
    std::string sweep;
    PerturbationSpec spec;
  };
  std::vector<Item> items;
  for (const SweepConfig& sw : cfg.sweeps) {
    const PerturbFamily family = perturb_family_from_string(sw.family);
    const bool seeded = family == PerturbFamily::RandomRays;
    for (Real tau : sw.taus) {
      if (seeded) {
        for (std::uint32_t s : sw.seeds)
          items.push_back({sw.name, {family, tau, cfg.run.seed + s}});
      } else {
        items.push_back({sw.name, {family, tau, cfg.run.seed}});
      }
    }
  }

  std::vector<CompetitorRow> rows(items.size());
  std::vector<std::string> errors(items.size());
  std::atomic<std::size_t> next{0};
  const int workers =
      std::max(1, std::min<int>(cfg.run.workers, static_cast<int>(items.size())));
  auto work = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= items.size()) return;
      try {
        const GridFunction u = generate(items[k].spec, ball, grid, F.p);
        rows[k].sweep = items[k].sweep;
        rows[k].spec = items[k].spec;
        rows[k].report = stability_report(F, u, w, ball, gate, cfg.run.tol_scale,
                                          cfg.run.cell_budget);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t k = 0; k < items.size(); ++k)
    if (!errors[k].empty())
      throw std::runtime_error("sweep '" + items[k].sweep + "' tau=" +
                               num(items[k].spec.tau) + ": " + errors[k]);
  result.rows = std::move(rows);

  {
    std::ofstream os(out / "chain.csv");
    write_chain_csv(result.rows, os);
  }
  {
    std::ofstream os(out / "stability.csv");
    write_stability_csv(cfg, result.rows, os);
  }

  Real worst_gap = 0.0;
  bool chain_ok = true, bounds_ok = true;
  for (const CompetitorRow& row : result.rows) {
    const ChainReport& c = row.report.chain;
    worst_gap = std::min({worst_gap, c.gap_uv, c.gap_vw});
    chain_ok = chain_ok && c.chain_holds();
    bounds_ok = bounds_ok && row.report.quant1_ok && row.report.quant2_ok;
  }
  summary << "competitors: " << result.rows.size() << '\n';
  summary << "chain inequalities: " << (chain_ok ? "PASS" : "FAIL")
          << " worst_gap=" << num(worst_gap) << '\n';
  summary << "displacement bounds: " << (bounds_ok ? "PASS" : "FAIL") << '\n';

  std::vector<StabilityReport> reports;
  reports.reserve(result.rows.size());
  for (const CompetitorRow& row : result.rows) reports.push_back(row.report);
  try {
    const CalibratedConstants c = calibrate_constant(reports);
    summary << "calibrated constant: C(n=" << cfg.integrand.dim
            << ",p=" << num(cfg.integrand.p) << ",a=" << num(cfg.integrand.a)
            << ") >= " << num(c.c_main) << " from " << c.used << " of "
            << (c.used + c.skipped) << " runs (step1 >= " << num(c.c_step1)
            << ", step2 >= " << num(c.c_step2) << ")\n";
  } catch (const std::invalid_argument&) {
    summary << "calibrated constant: unavailable (every deficit within "
               "tolerance)\n";
  }

  const bool enabled_ok = !cfg.run.checks || (chain_ok && bounds_ok);
  if (!enabled_ok) result.status = 4;
  summary << "overall: " << (result.status == 0 ? "PASS" : "FAIL") << '\n';
  result.summary = summary.str();
  {
    std::ofstream os(out / "summary.txt");
    os << result.summary;
  }
  return result;
}

}  // namespace ballmax
