#include "causalbounds/simulation.hpp"

#include <array>
#include <cmath>
#include <ostream>

#include "causalbounds/error.hpp"
#include "causalbounds/parallel.hpp"
#include "causalbounds/random.hpp"
#include "causalbounds/report.hpp"

namespace cbounds {

std::string_view to_string(ScenarioId id) { return id == ScenarioId::S1 ? "S1" : "S2"; }

ScenarioId parse_scenario(std::string_view text) {
  if (text == "S1" || text == "s1" || text == "1") return ScenarioId::S1;
  if (text == "S2" || text == "s2" || text == "2") return ScenarioId::S2;
  throw Error(ErrorCode::ParseError, "unknown scenario '" + std::string(text) + "'");
}

Scenario Scenario::make(ScenarioId id) {
  Scenario s;
  s.id = id;
  s.a1 = id == ScenarioId::S1 ? 0.0775 : 0.998;
  return s;
}

double outcome_mean1(const Scenario& s, std::span<const double, 5> x) {
  return s.a1 + 0.4 * x[0] + 0.4 * x[1] + 0.6 * x[0] * x[1] + 0.5 * x[2] - 0.7 * x[3] +
         0.2 * s.hidden_scale * x[4];
}

double outcome_mean0(const Scenario& s, std::span<const double, 5> x) {
  return 0.0654 + 0.2 * x[0] + 0.1 * x[1] + 1.2 * x[0] * x[1] + 0.2 * x[2] - 0.3 * x[3] +
         0.6 * s.hidden_scale * x[4];
}

double assignment_probability(std::span<const double, 5> x, double y1) {
  return 1.0 / (1.0 + std::exp(-0.904 + 0.5 * x[0] + 0.5 * x[1] + 0.5 * x[2] - 0.2 * x[3] - x[4] + 0.3 * y1));
}

namespace {

struct Draws {
  Eigen::MatrixXd x;  // n x 5
  Eigen::VectorXd y1, y0, ps, z;
};

Draws draw(const Scenario& s, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(s.n);
  Draws d;
  d.x.resize(n, 5);
  d.y1.resize(n);
  d.y0.resize(n);
  d.ps.resize(n);
  d.z.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::array<double, 5> x{};
    x[0] = normal(rng);
    for (std::size_t k = 1; k < 5; ++k) x[k] = -x[k - 1] / 3.0 + normal(rng);
    const double e1 = normal(rng);
    const double e0 = normal(rng);
    const double u = unif(rng);
    for (std::size_t k = 0; k < 5; ++k) d.x(i, static_cast<Eigen::Index>(k)) = x[k];
    d.y1[i] = outcome_mean1(s, x) + s.outcome_sd * e1;
    d.y0[i] = outcome_mean0(s, x) + s.outcome_sd * e0;
    d.ps[i] = assignment_probability(x, d.y1[i]);
    d.z[i] = u < d.ps[i] ? 1.0 : 0.0;
  }
  return d;
}

}  // namespace

SimulatedStudy generate_study(const Scenario& s, std::mt19937_64& rng) {
  auto d = draw(s, rng);
  Eigen::VectorXd y = d.z.cwiseProduct(d.y1) + (Eigen::VectorXd::Ones(d.z.size()) - d.z).cwiseProduct(d.y0);
  Eigen::MatrixXd observed = d.x.leftCols(4);
  return SimulatedStudy{Dataset(std::move(y), d.z, std::move(observed)), d.x.col(4), std::move(d.y1),
                        std::move(d.y0), std::move(d.ps)};
}

SimulatedStudy simulate_replicate(const Scenario& s, std::uint64_t seed, std::size_t r) {
  auto rng = make_stream(seed, r, StreamDomain::Simulation);
  return generate_study(s, rng);
}

TrueAte true_ate(const Scenario& s, std::size_t m, std::uint64_t seed, std::size_t threads) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "true ATE needs at least one study");
  std::vector<double> sums(m), sums_sq(m);
  parallel_for(m, worker_count(threads), [&](std::size_t r) {
    auto rng = make_stream(seed, r, StreamDomain::TrueAte);
    const auto d = draw(s, rng);
    const Eigen::VectorXd diff = d.y1 - d.y0;
    sums[r] = diff.sum();
    sums_sq[r] = diff.squaredNorm();
  });
  double total = 0.0, total_sq = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    total += sums[r];
    total_sq += sums_sq[r];
  }
  TrueAte out;
  out.units = m * s.n;
  const double n = static_cast<double>(out.units);
  out.value = total / n;
  const double var = n > 1 ? (total_sq - n * out.value * out.value) / (n - 1.0) : 0.0;
  out.standard_error = std::sqrt(std::max(var, 0.0) / n);
  return out;
}

double positivity_violation_rate(std::span<const SimulatedStudy> studies, double delta) {
  std::size_t outside = 0, total = 0;
  for (const auto& st : studies) {
    for (Eigen::Index i = 0; i < st.true_ps.size(); ++i) {
      const double p = st.true_ps[i];
      if (p < delta || p > 1.0 - delta) ++outside;
    }
    total += static_cast<std::size_t>(st.true_ps.size());
  }
  return total == 0 ? 0.0 : static_cast<double>(outside) / static_cast<double>(total);
}

std::string TableSetting::basis_label() const {
  if (method == Method::QB) return "1,qhat";
  return ladder ? std::string(to_string(*ladder)) : std::string("D1");
}

std::vector<TableSetting> table_settings(Method method, const std::vector<Ladder>& ladders,
                                         const std::vector<double>& deltas, const std::vector<double>& lambdas) {
  std::vector<TableSetting> out;
  if (method == Method::QB) {
    for (const double lam : lambdas) out.push_back({Method::QB, std::nullopt, deltas.empty() ? 0.01 : deltas[0], lam});
    return out;
  }
  for (const auto lv : ladders) {
    for (const double dl : deltas) {
      if (lambdas.empty()) {
        out.push_back({Method::Proposed, lv, dl, std::nullopt});
      } else {
        for (const double lam : lambdas) out.push_back({Method::Proposed, lv, dl, lam});
      }
    }
  }
  return out;
}

SimulationReport run_table(const Scenario& s, const std::vector<TableSetting>& settings, std::uint64_t seed,
                           double true_ate_value, const AnalysisOptions& options, std::size_t threads) {
  if (s.replicates < 1) throw Error(ErrorCode::InvalidArgument, "at least one replicate is required");
  const std::size_t ns = settings.size();
  SimulationReport report;
  report.scenario = s;
  report.true_ate = true_ate_value;
  report.replicates.resize(s.replicates * ns);

  parallel_for(s.replicates, worker_count(threads), [&](std::size_t r) {
    const auto study = simulate_replicate(s, seed, r);
    for (std::size_t k = 0; k < ns; ++k) {
      const auto& st = settings[k];
      SensitivityConfig cfg;
      cfg.delta = st.delta;
      cfg.lambda = st.lambda;
      cfg.seed = splitmix64(seed) ^ r;
      if (st.method == Method::Proposed && st.ladder) cfg.basis_terms = ladder(*st.ladder, study.dataset.k()).labels();
      auto& out = report.replicates[r * ns + k];
      out.replicate = r;
      out.setting = k;
      try {
        const auto res = analyze(study.dataset, cfg, st.method, options);
        out.psi_lo = res.bounds.psi_lo;
        out.psi_hi = res.bounds.psi_hi;
        out.status = res.bounds.status();
      } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::ParseError) throw;
        out.status = std::string(to_string(e.code()));
      }
    }
  });

  for (std::size_t k = 0; k < ns; ++k) {
    ReportRow row;
    row.scenario = s.id;
    row.setting = settings[k];
    row.replicates = s.replicates;
    double sum_lo = 0.0, sum_hi = 0.0;
    std::size_t covered = 0;
    for (std::size_t r = 0; r < s.replicates; ++r) {
      const auto& o = report.replicates[r * ns + k];
      if (o.status == to_string(ErrorCode::NonFiniteValue)) ++row.nonfinite_count;
      if (!o.psi_lo || !o.psi_hi) continue;
      ++row.feasible_count;
      sum_lo += *o.psi_lo;
      sum_hi += *o.psi_hi;
      if (*o.psi_lo <= true_ate_value && true_ate_value <= *o.psi_hi) ++covered;
    }
    if (row.feasible_count > 0) {
      const double f = static_cast<double>(row.feasible_count);
      row.avg_lo = sum_lo / f;
      row.avg_hi = sum_hi / f;
      row.length = *row.avg_hi - *row.avg_lo;
      row.coverage = static_cast<double>(covered) / f;
    }
    report.rows.push_back(row);
  }
  return report;
}

void write_simulation_csv(const SimulationReport& r, std::ostream& out) {
  out << "scenario,method,basis,delta,lambda,avg_lo,avg_hi,length,coverage,feasible_count,replicates,"
         "nonfinite_count,true_ate\n";
  for (const auto& row : r.rows) {
    out << to_string(row.scenario) << ',' << to_string(row.setting.method) << ',' << csv_field(row.setting.basis_label()) << ','
        << format_number(row.setting.method == Method::QB ? std::nullopt : std::optional<double>(row.setting.delta))
        << ',' << format_number(row.setting.lambda) << ',' << format_number(row.avg_lo) << ','
        << format_number(row.avg_hi) << ',' << format_number(row.length) << ',' << format_number(row.coverage) << ','
        << row.feasible_count << ',' << row.replicates << ',' << row.nonfinite_count << ','
        << format_number(r.true_ate) << '\n';
  }
}

void write_replicate_dump(const SimulationReport& r, std::ostream& out) {
  out << "replicate,setting,method,basis,delta,lambda,psi_lo,psi_hi,status\n";
  for (const auto& o : r.replicates) {
    const auto& st = r.rows.at(o.setting).setting;
    out << o.replicate << ',' << o.setting << ',' << to_string(st.method) << ',' << csv_field(st.basis_label()) << ','
        << format_number(st.delta) << ',' << format_number(st.lambda) << ',' << format_number(o.psi_lo) << ','
        << format_number(o.psi_hi) << ',' << o.status << '\n';
  }
}

}  // namespace cbounds
