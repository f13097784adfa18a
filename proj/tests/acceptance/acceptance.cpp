// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "causalbounds/bootstrap.hpp"
#include "causalbounds/bounds.hpp"
#include "causalbounds/estimators.hpp"
#include "causalbounds/linprog.hpp"
#include "causalbounds/logistic.hpp"
#include "causalbounds/simulation.hpp"
#include "oracles.hpp"

using namespace cbounds;

namespace {

constexpr std::uint64_t kSeed = 20240517;
constexpr std::size_t kReplicates = 100;
constexpr std::size_t kTrueAteStudies = 1000;  // 10^6 pooled units

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
  std::cout << "criterion " << id << ' ' << (ok ? "PASS" : "FAIL") << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string interval(double lo, double hi) { return "[" + fmt(lo) + ", " + fmt(hi) + "]"; }

bool near(double v, double target, double tol) { return std::abs(v - target) <= tol; }

Scenario scenario(ScenarioId id) {
  auto s = Scenario::make(id);
  s.replicates = kReplicates;
  return s;
}

double truth(ScenarioId id) { return true_ate(scenario(id), kTrueAteStudies, kSeed, 0).value; }

ReportRow single_row(ScenarioId id, const TableSetting& setting, double true_value) {
  return run_table(scenario(id), {setting}, kSeed, true_value).rows.front();
}

void criterion1(double t1, double t2) {
  const TableSetting d1{Method::Proposed, Ladder::D1, 0.01, std::nullopt};
  const auto s1 = single_row(ScenarioId::S1, d1, t1);
  const auto s2 = single_row(ScenarioId::S2, d1, t2);
  const bool ok1 = s1.avg_lo && near(*s1.avg_lo, -1.36, 0.15) && near(*s1.avg_hi, 2.12, 0.15) && *s1.coverage >= 0.98;
  const bool ok2 = s2.avg_lo && near(*s2.avg_lo, -0.60, 0.15) && near(*s2.avg_hi, 3.09, 0.15) && *s2.coverage == 1.0;
  verdict(1, ok1 && ok2,
          "D1 delta=0.01: S1 " + interval(*s1.avg_lo, *s1.avg_hi) + " cov " + fmt(*s1.coverage, 2) +
              " (target [-1.36, 2.12] +-0.15, cov>=0.98); S2 " + interval(*s2.avg_lo, *s2.avg_hi) + " cov " +
              fmt(*s2.coverage, 2) + " (target [-0.60, 3.09] +-0.15, cov=1)");
}

void criterion2() {
  auto rate = [](ScenarioId id) {
    const auto s = scenario(id);
    std::vector<SimulatedStudy> studies;
    for (std::size_t r = 0; r < s.replicates; ++r) studies.push_back(simulate_replicate(s, kSeed, r));
    return positivity_violation_rate(studies, 0.1);
  };
  const double r1 = rate(ScenarioId::S1) * 100.0;
  const double r2 = rate(ScenarioId::S2) * 100.0;
  verdict(2, near(r1, 18.39, 0.5) && near(r2, 2.47, 0.3),
          "violations at delta=0.1: S1 " + fmt(r1, 2) + "% (target 18.39 +-0.5), S2 " + fmt(r2, 2) +
              "% (target 2.47 +-0.3)");
}

void criterion3(double t2) {
  const auto row = single_row(ScenarioId::S2, {Method::Proposed, Ladder::D4, 0.1, std::nullopt}, t2);
  const double frac = static_cast<double>(row.feasible_count) / static_cast<double>(row.replicates);
  const bool ok = frac >= 0.90 && row.length && near(*row.length, 1.09, 0.2);
  verdict(3, ok,
          "S2 D4 delta=0.1: feasible " + std::to_string(row.feasible_count) + "/" + std::to_string(row.replicates) +
              " (target >=0.90), length " + (row.length ? fmt(*row.length) : std::string("NA")) +
              " (target 1.09 +-0.2), near-zero denominators " + std::to_string(row.nonfinite_count));
}

void criterion4(double t1) {
  const auto s = scenario(ScenarioId::S1);
  const std::vector<TableSetting> settings{{Method::QB, std::nullopt, 0.01, 2.0}, {Method::QB, std::nullopt, 0.01, 1.0}};
  const auto rep = run_table(s, settings, kSeed, t1);
  const auto& two = rep.rows[0];
  const bool ok_two = two.avg_lo && near(*two.avg_lo, -0.51, 0.2) && near(*two.avg_hi, 0.54, 0.2);

  double worst = 0.0;
  std::size_t compared = 0;
  for (std::size_t r = 0; r < s.replicates; ++r) {
    const auto& o = rep.replicates[r * settings.size() + 1];
    if (!o.psi_lo) continue;
    const auto study = simulate_replicate(s, kSeed, r);
    const auto est = sipw(study.dataset, fit_mar_propensity(study.dataset).ehat);
    worst = std::max({worst, std::abs(*o.psi_lo - est.psi), std::abs(*o.psi_hi - est.psi)});
    ++compared;
  }
  const bool ok_one = compared == s.replicates && worst <= 1e-8;
  verdict(4, ok_two && ok_one,
          "QB S1 lambda=2 " + (two.avg_lo ? interval(*two.avg_lo, *two.avg_hi) : std::string("NA")) +
              " (target [-0.51, 0.54] +-0.2); lambda=1 max |bound - SIPW| " + std::to_string(worst) + " over " +
              std::to_string(compared) + " replicates (tol 1e-8)");
}

LinearProgram random_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> m_dist(1, 8);
  std::uniform_real_distribution<double> u(-2.0, 2.0), width(0.1, 3.0), unit(0.0, 1.0);
  const int m = m_dist(rng);
  const int r = std::uniform_int_distribution<int>(0, std::min(3, m))(rng);
  LinearProgram p;
  p.c.resize(m);
  p.lower.resize(m);
  p.upper.resize(m);
  for (int j = 0; j < m; ++j) {
    p.c[j] = u(rng);
    p.lower[j] = u(rng);
    p.upper[j] = p.lower[j] + width(rng);
  }
  p.sense = rng() % 2 ? Sense::Min : Sense::Max;
  p.a.resize(r, m);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < m; ++j) p.a(i, j) = u(rng);
  }
  const bool feasible = rng() % 4 != 0;
  Eigen::VectorXd point(m);
  for (int j = 0; j < m; ++j) {
    point[j] = feasible ? p.lower[j] + unit(rng) * (p.upper[j] - p.lower[j]) : p.upper[j] + 0.5 + unit(rng);
  }
  p.b = p.a * point;
  return p;
}

void criterion5() {
  std::mt19937_64 rng(kSeed);
  int disagreements = 0, optimal = 0;
  for (int t = 0; t < 500; ++t) {
    const auto p = random_lp(rng);
    const auto oracle = testing::enumerate_vertices(p);
    const auto s = solve(p);
    bool ok;
    if (oracle.feasible) {
      ok = s.status == LpStatus::Optimal && std::abs(s.objective - oracle.objective) <= 1e-9;
      ++optimal;
    } else {
      ok = s.status == LpStatus::Infeasible;
    }
    if (!ok) ++disagreements;
  }
  verdict(5, disagreements == 0,
          "500 random LPs (" + std::to_string(optimal) + " feasible): " + std::to_string(disagreements) +
              " disagreements with vertex enumeration");
}

SensitivityConfig sens(double delta, std::optional<double> lambda = std::nullopt) {
  SensitivityConfig c;
  c.delta = delta;
  c.lambda = lambda;
  return c;
}

bool contains(const BoundResult& outer, const BoundResult& inner, double tol) {
  return *inner.psi_lo >= *outer.psi_lo - tol && *inner.psi_hi <= *outer.psi_hi + tol &&
         *inner.mu1.lo >= *outer.mu1.lo - tol && *inner.mu1.hi <= *outer.mu1.hi + tol &&
         *inner.mu0.lo >= *outer.mu0.lo - tol && *inner.mu0.hi <= *outer.mu0.hi + tol;
}

void criterion6() {
  constexpr int kDatasets = 200;
  std::mt19937_64 rng(kSeed + 6);
  int identity_bad = 0, bounded_bad = 0, nest_basis_bad = 0, nest_delta_bad = 0, nest_lambda_bad = 0, psi_bad = 0;
  int basis_pairs = 0, lambda_pairs = 0, feasible = 0, skipped = 0;
  while (feasible < kDatasets) {
    const auto d = testing::random_dataset(rng, 200, 2);
    const auto g1 = expand(ladder(Ladder::D1, 2), d);
    const auto g2 = expand(ladder(Ladder::D2, 2), d);
    // Datasets whose arm moments cannot reach the pooled moments have no
    // feasible weights at any delta; they carry no information here.
    const auto r1 = solve_bounds(d, g1, sens(0.02));
    if (!r1.feasible()) {
      ++skipped;
      continue;
    }
    ++feasible;

    // (a) with the ones row, optimal weights sum to n, so (1/n) sum y w equals the
    // SIPW form at the implied propensities and lies within the arm's outcome range.
    for (Arm arm : {Arm::Treated, Arm::Control}) {
      const auto p = build_polytope(d, g1, 0.02, arm);
      Eigen::VectorXd cost(static_cast<Eigen::Index>(p.indices.size()));
      double lo = 1e300, hi = -1e300;
      for (std::size_t j = 0; j < p.indices.size(); ++j) {
        const double y = d.y()[static_cast<Eigen::Index>(p.indices[j])];
        cost[static_cast<Eigen::Index>(j)] = y / static_cast<double>(d.n());
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
      for (Sense sense : {Sense::Min, Sense::Max}) {
        const auto s = solve(p.program(cost, sense));
        if (s.status != LpStatus::Optimal) {
          ++identity_bad;
          continue;
        }
        Eigen::VectorXd e = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d.n()), 0.5);
        for (std::size_t j = 0; j < p.indices.size(); ++j) {
          const double w = s.w[static_cast<Eigen::Index>(j)];
          e[static_cast<Eigen::Index>(p.indices[j])] = arm == Arm::Treated ? 1.0 / w : 1.0 - 1.0 / w;
        }
        const auto i = ipw(d, e), si = sipw(d, e);
        const double vi = arm == Arm::Treated ? i.mu1 : i.mu0;
        const double vs = arm == Arm::Treated ? si.mu1 : si.mu0;
        if (std::abs(vi - vs) > 1e-8 || std::abs(vi - s.objective) > 1e-8) ++identity_bad;
        if (s.objective < lo - 1e-8 || s.objective > hi + 1e-8) ++bounded_bad;
      }
    }

    // (b) nesting in basis, delta and lambda; (c) exact psi assembly.
    const auto r2 = solve_bounds(d, g2, sens(0.02));
    const auto wide = solve_bounds(d, g1, sens(0.01));
    if (!wide.feasible()) {
      ++nest_delta_bad;
      continue;
    }
    if (r2.feasible()) {
      ++basis_pairs;
      if (!contains(r1, r2, 1e-8)) ++nest_basis_bad;
    }
    if (!contains(wide, r1, 1e-8)) ++nest_delta_bad;
    for (const auto* r : {&r1, &wide}) {
      if (*r->psi_lo != *r->mu1.lo - *r->mu0.hi || *r->psi_hi != *r->mu1.hi - *r->mu0.lo) ++psi_bad;
    }
    const auto ehat = fit_mar_propensity(d).ehat;
    const auto l2 = solve_bounds(d, g1, sens(0.01, 2.0), ehat);
    const auto l4 = solve_bounds(d, g1, sens(0.01, 4.0), ehat);
    if (l2.feasible() && l4.feasible()) {
      ++lambda_pairs;
      if (!contains(l4, l2, 1e-8) || !contains(wide, l4, 1e-8)) ++nest_lambda_bad;
      if (*l2.psi_lo != *l2.mu1.lo - *l2.mu0.hi) ++psi_bad;
    }
  }

  // (d) end-to-end determinism: 200 simulated studies, 1 versus 4 workers.
  auto s = Scenario::make(ScenarioId::S2);
  s.n = 300;
  s.replicates = kDatasets;
  const auto settings = table_settings(Method::Proposed, {Ladder::D1, Ladder::D2}, {0.01, 0.1}, {});
  std::ostringstream one, four;
  write_simulation_csv(run_table(s, settings, kSeed, 1.13, {}, 1), one);
  write_replicate_dump(run_table(s, settings, kSeed, 1.13, {}, 1), one);
  write_simulation_csv(run_table(s, settings, kSeed, 1.13, {}, 4), four);
  write_replicate_dump(run_table(s, settings, kSeed, 1.13, {}, 4), four);
  const bool deterministic = one.str() == four.str();

  const bool ok = identity_bad == 0 && bounded_bad == 0 && nest_basis_bad == 0 && nest_delta_bad == 0 &&
                  nest_lambda_bad == 0 && psi_bad == 0 && deterministic && basis_pairs > 0 && lambda_pairs > 0;
  verdict(6, ok,
          std::to_string(feasible) + " feasible datasets (" + std::to_string(skipped) +
              " infeasible skipped): identity/boundedness violations " + std::to_string(identity_bad) +
              "/" + std::to_string(bounded_bad) + ", nesting violations basis " + std::to_string(nest_basis_bad) +
              " of " + std::to_string(basis_pairs) + ", delta " + std::to_string(nest_delta_bad) + ", lambda " +
              std::to_string(nest_lambda_bad) + " of " + std::to_string(lambda_pairs) + ", psi assembly " +
              std::to_string(psi_bad) + ", thread determinism " + (deterministic ? "yes" : "no"));
}

void criterion7() {
  Eigen::VectorXd y(4), z(4);
  y << 2, 5, 0, 1;
  z << 1, 0, 1, 0;
  const Dataset d(y, z, Eigen::MatrixXd::Zero(4, 1));
  const auto r = solve_bounds(d, expand(parse_terms({"1"}), d), sens(0.25));
  const bool ok = r.feasible() && std::abs(*r.psi_lo + 3.0) <= 1e-9 && std::abs(*r.psi_hi + 1.0) <= 1e-9;
  verdict(7, ok, "four-unit example psi " + (r.feasible() ? interval(*r.psi_lo, *r.psi_hi) : std::string("NA")) +
                     " (target [-3, -1] to 1e-9)");
}

void criterion8() {
  auto s = Scenario::make(ScenarioId::S1);
  const auto study = simulate_replicate(s, kSeed, 0);
  SensitivityConfig cfg = sens(0.01);
  cfg.seed = kSeed;
  cfg.bootstrap_b = 200;
  const auto a = bootstrap_bounds(study.dataset, cfg, Method::Proposed, {}, 1);
  const auto b = bootstrap_bounds(study.dataset, cfg, Method::Proposed, {}, 1);
  const auto c = bootstrap_bounds(study.dataset, cfg, Method::Proposed, {}, 4);
  auto text = [](const BootstrapSummary& x) {
    std::ostringstream o;
    o.precision(17);
    o << x.feasible_count << ' ' << x.boot_lower << ' ' << x.boot_upper << '\n';
    write_replicates_csv(x, o);
    return o.str();
  };
  const bool stable = text(a) == text(b) && text(a) == text(c);

  std::vector<double> lows, highs;
  for (const auto& r : a.records) {
    if (!r.feasible()) continue;
    lows.push_back(*r.psi_lo);
    highs.push_back(*r.psi_hi);
  }
  auto order_stat = [](std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto i = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(i);
    return i + 1 < v.size() ? v[i] + frac * (v[i + 1] - v[i]) : v[i];
  };
  const double dl = std::abs(order_stat(lows, 0.025) - a.boot_lower);
  const double du = std::abs(order_stat(highs, 0.975) - a.boot_upper);
  const bool ok = stable && lows.size() == a.feasible_count && dl <= 1e-12 && du <= 1e-12;
  verdict(8, ok,
          "B=200: feasible " + std::to_string(a.feasible_count) + ", interval " + interval(a.boot_lower, a.boot_upper) +
              ", byte-stable across runs and 1/4 workers " + (stable ? "yes" : "no") + ", percentile error " +
              std::to_string(std::max(dl, du)));
}

}  // namespace

int main() {
  const double t1 = truth(ScenarioId::S1);
  const double t2 = truth(ScenarioId::S2);
  std::cout << "true ATE S1 " << fmt(t1) << ", S2 " << fmt(t2) << " (pooled over " << kTrueAteStudies * 1000
            << " units)" << std::endl;
  criterion1(t1, t2);
  criterion2();
  criterion3(t2);
  criterion4(t1);
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
