// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ikham/ikham.hpp"

using namespace ikham;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out{false, ""};
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs <= budget_seconds;
  const bool pass = out.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %d %s: %s; runtime %.1f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              out.detail.c_str(), secs, budget_seconds, in_time ? "" : " EXCEEDED");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Field bottom_for(const Grid& g, std::mt19937_64& rng, ExpansionCase c, double amp) {
  return c == ExpansionCase::H1 ? Field(g) : random_smooth(g, rng, 4, amp);
}

double rel_error(const PotentialVec& a, const PotentialVec& b) {
  double err = 0.0, ref = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    err += inner(a[j] - b[j], a[j] - b[j]);
    ref += inner(b[j], b[j]);
  }
  return std::sqrt(err / ref);
}

Outcome adjointness() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> delta_dist(0.1, 1.0);
  const Grid g(2 * pi, 128);
  double worst = 0.0;
  int instances = 0;
  for (auto c : {ExpansionCase::H1, ExpansionCase::H2}) {
    for (int trial = 0; trial < 20; ++trial) {
      const ExpansionSpec spec(c, 3);
      const Geometry geom(random_smooth(g, rng, 6, 0.15), bottom_for(g, rng, c, 0.15), delta_dist(rng), 1.0, 1e-3,
                          spec);
      const Field u = random_smooth(g, rng, 8, 1.0);
      const Field v = random_smooth(g, rng, 8, 1.0);
      for (int i = 0; i <= 3; ++i) {
        for (int j = 0; j <= 3; ++j) {
          const double lhs = inner(apply_Lij(geom, spec, i, j, u), v);
          const double rhs = inner(u, apply_Lij(geom, spec, j, i, v));
          const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
          worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
      }
      ++instances;
    }
  }
  return {worst <= 1e-10, std::to_string(instances) + " instances, max scaled |<L_ij u,v> - <u,L_ji v>| = " +
                              fmt("%.2e", worst) + " (limit 1e-10)"};
}

Outcome manufactured() {
  std::mt19937_64 rng(202);
  const Grid g(2 * pi, 64);
  double worst = 0.0;
  int solves = 0;
  bool converged = true;
  for (int n = 0; n <= 3; ++n) {
    for (double delta : {1.0, 0.2}) {
      for (bool variable : {false, true}) {
        for (auto c : {ExpansionCase::H1, ExpansionCase::H2}) {
          if (variable && c == ExpansionCase::H1) continue;
          const ExpansionSpec spec(c, n);
          const Field bottom = variable ? random_smooth(g, rng, 4, 0.1) : Field(g);
          const Geometry geom(random_smooth(g, rng, 4, 0.1), bottom, delta, 1.0, 1e-3, spec);
          PotentialVec target;
          for (int j = 0; j <= n; ++j) target.push_back(random_smooth(g, rng, 5, 1.0));
          const auto sol = solve_general(geom, spec, l_dot(geom, spec, target), apply_calL(geom, spec, target));
          converged = converged && sol.report.converged;
          worst = std::max(worst, rel_error(sol.phi, target));
          ++solves;
        }
      }
    }
  }
  return {worst <= 1e-8 && converged, std::to_string(solves) + " solves at default tolerance, max relative error " +
                                          fmt("%.2e", worst) + " (limit 1e-8)"};
}

Outcome variational() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> delta_dist(0.2, 1.0);
  const Grid g(2 * pi, 64);
  const std::vector<double> eps{1e-2, 5e-3, 2.5e-3, 1.25e-3};
  const SolverOptions opt{1e-12, 500, 60};
  double worst_order_dev = 0.0, worst_phi = 0.0;
  const ExpansionCase cases[] = {ExpansionCase::H1, ExpansionCase::H2, ExpansionCase::H2, ExpansionCase::H1,
                                 ExpansionCase::H2};
  const int orders[] = {1, 1, 2, 2, 3};
  std::string orders_seen;
  for (int trial = 0; trial < 5; ++trial) {
    const ExpansionSpec spec(cases[trial], orders[trial]);
    const Geometry geom(random_smooth(g, rng, 4, 0.1), bottom_for(g, rng, cases[trial], 0.1), delta_dist(rng), 1.0,
                        1e-3, spec);
    const auto rep = gradcheck(geom, spec, random_smooth(g, rng, 4, 1.0), random_smooth(g, rng, 4, 1.0),
                               random_smooth(g, rng, 4, 1.0), eps, opt);
    worst_order_dev = std::max(worst_order_dev, std::abs(rep.observed_order_eta - 2.0));
    for (const auto& r : rep.rows) {
      worst_phi = std::max(worst_phi, r.discrepancy_phi / std::max(1.0, std::abs(rep.pairing_phi)));
    }
    orders_seen += (trial ? " " : "") + fmt("%.3f", rep.observed_order_eta);
  }
  const bool pass = worst_order_dev <= 0.2 && worst_phi <= 1e-8;
  return {pass, "eta orders [" + orders_seen + "] (2 +/- 0.2), max scaled phi discrepancy " + fmt("%.2e", worst_phi) +
                    " (limit 1e-8)"};
}

Outcome gauge_linearity() {
  std::mt19937_64 rng(404);
  const Grid g(2 * pi, 64);
  double gauge = 0.0, lin = 0.0;
  for (int n = 1; n <= 3; ++n) {
    for (auto c : {ExpansionCase::H1, ExpansionCase::H2}) {
      const ExpansionSpec spec(c, n);
      const Geometry geom(random_smooth(g, rng, 4, 0.1), bottom_for(g, rng, c, 0.1), 0.4, 1.0, 1e-3, spec);
      const Field phi = random_smooth(g, rng, 5, 1.0);
      const Field chi = random_smooth(g, rng, 5, 1.0);
      const double h = hamiltonian_ik(geom, spec, phi);
      gauge = std::max(gauge, std::abs(hamiltonian_ik(geom, spec, phi + 1.7) - h) / std::max(1.0, std::abs(h)));
      const auto a = solve_S(geom, spec, phi).phi;
      const auto b = solve_S(geom, spec, chi).phi;
      const auto ab = solve_S(geom, spec, 0.7 * phi - 1.3 * chi).phi;
      PotentialVec expect;
      for (int j = 0; j <= n; ++j) expect.push_back(0.7 * a[j] - 1.3 * b[j]);
      lin = std::max(lin, rel_error(ab, expect));
    }
  }
  return {gauge <= 1e-9 && lin <= 1e-9,
          "gauge " + fmt("%.2e", gauge) + " (limit 1e-9), linearity " + fmt("%.2e", lin) + " (limit 1e-9)"};
}

// Standing wave shared by criteria 5 and 6.
SimulationConfig standing_wave(double dt, int steps) {
  const Grid g(2 * pi, 64);
  const ExpansionSpec spec(ExpansionCase::H1, 1);
  const Geometry geom{Field(g), Field(g), 0.5, 1.0, 1e-3, spec};
  const CanonicalState init{Field::sample(g, [](double x) { return 0.2 * std::cos(x); }), Field(g), 0.0};
  return SimulationConfig{geom, spec, init, dt, steps, 1, SolverOptions{1e-12, 500, 60}, 0.5};
}

const double base_dt = 0.01;

double max_relative_drift(const Trajectory& traj) {
  const double e0 = traj.energies.front();
  double worst = 0.0;
  for (double e : traj.energies) worst = std::max(worst, std::abs(e - e0) / std::abs(e0));
  return worst;
}

Trajectory base_run;

Outcome equivalence() {
  base_run = simulate(standing_wave(base_dt, 500));
  if (!base_run.ok()) return {false, "run failed: " + base_run.message};
  const double ik = *std::max_element(base_run.ik_residuals.begin(), base_run.ik_residuals.end());
  const double con = *std::max_element(base_run.constraint_residuals.begin(), base_run.constraint_residuals.end());
  return {ik <= 1e-8 && con <= 1e-8, std::to_string(base_run.size()) + " records, max ik_residual " +
                                         fmt("%.2e", ik) + ", max constraint residual " + fmt("%.2e", con) +
                                         " (limits 1e-8)"};
}

Outcome energy_ratio() {
  if (base_run.size() == 0) base_run = simulate(standing_wave(base_dt, 500));
  const auto half = simulate(standing_wave(base_dt / 2, 1000));
  if (!base_run.ok() || !half.ok()) return {false, "run failed"};
  const double d1 = max_relative_drift(base_run);
  const double d2 = max_relative_drift(half);
  const double ratio = d1 / d2;
  return {ratio >= 10.0 && ratio <= 22.0, "drift " + fmt("%.3e", d1) + " at dt, " + fmt("%.3e", d2) +
                                              " at dt/2, ratio " + fmt("%.2f", ratio) + " (accepted [10, 22])"};
}

Outcome consistency() {
  const Grid g(2 * pi, 64);
  struct Case {
    ExpansionCase c;
    int n;
    bool variable;
    double lo, hi;
  };
  const Case cases[] = {{ExpansionCase::H1, 0, false, 1.7, 2.4},
                        {ExpansionCase::H1, 1, false, 5.3, 6.8},
                        {ExpansionCase::H2, 1, true, 1.7, 2.4},
                        {ExpansionCase::H2, 2, true, 5.2, 6.9}};
  bool pass = true;
  std::string detail;
  for (const auto& cs : cases) {
    SweepConfig cfg{standard_profile(g, "eta"), cs.variable ? standard_profile(g, "bottom") : Field(g),
                    standard_profile(g, "phi"), ExpansionSpec(cs.c, cs.n), geometric_deltas(0.05, 0.4, 8)};
    const auto res = consistency_sweep(cfg);
    const bool ok = res.fitted_rows >= 3 && res.slope >= cs.lo && res.slope <= cs.hi;
    pass = pass && ok;
    detail += std::string(detail.empty() ? "" : "; ") + to_string(cs.c) + " N=" + std::to_string(cs.n) + " slope " +
              fmt("%.3f", res.slope) + " over " + std::to_string(res.fitted_rows) + " rows in [" + fmt("%.1f", cs.lo) +
              ", " + fmt("%.1f", cs.hi) + "]" + (ok ? "" : " OUT");
  }
  return {pass, detail};
}

Outcome reference_check() {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> delta_dist(0.05, 1.0);
  const Grid g(2 * pi, 64);
  const Field zero(g);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Field phi = random_smooth(g, rng, 8, 1.0);
    const double delta = delta_dist(rng);
    const double ww = hamiltonian_ww(zero, zero, phi, delta, 24);
    const double dtn = 0.5 * inner(phi, dtn_flat(phi, delta));
    worst = std::max(worst, std::abs(ww - dtn) / std::max(1.0, std::abs(dtn)));
  }
  return {worst <= 1e-9, "10 random potentials, max scaled difference " + fmt("%.2e", worst) + " (limit 1e-9)"};
}

}  // namespace

int main() {
  criterion(1, "operator adjointness", 10, adjointness);
  criterion(2, "manufactured-solution solve", 30, manufactured);
  criterion(3, "variational-derivative gradcheck", 30, variational);
  criterion(4, "gauge and linearity invariants", 10, gauge_linearity);
  criterion(5, "equivalence residual along RK4 run", 120, equivalence);
  criterion(6, "energy drift ratio dt vs dt/2", 180, energy_ratio);
  criterion(7, "consistency exponents", 600, consistency);
  criterion(8, "reference solver vs flat DtN", 30, reference_check);
  std::printf("%s: %d of 8 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
