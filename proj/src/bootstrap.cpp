#include "causalbounds/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>

#include "causalbounds/error.hpp"
#include "causalbounds/parallel.hpp"
#include "causalbounds/random.hpp"
#include "causalbounds/report.hpp"

namespace cbounds {

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "percentile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "percentile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

bool replicate_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyArm:
    case ErrorCode::SeparationDetected:
    case ErrorCode::NoConvergence:
    case ErrorCode::RankDeficientDesign:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::TooFewUnits:
    case ErrorCode::NumericalBreakdown:
      return true;
    default:
      return false;
  }
}

}  // namespace

BootstrapSummary bootstrap_bounds(const Dataset& d, const SensitivityConfig& cfg, Method method,
                                  const AnalysisOptions& options, std::size_t threads) {
  cfg.validate();
  if (cfg.bootstrap_b < 1) throw Error(ErrorCode::InvalidArgument, "at least one bootstrap replicate is required");
  BootstrapSummary s;
  s.b_requested = cfg.bootstrap_b;
  s.records.resize(cfg.bootstrap_b);

  parallel_for(cfg.bootstrap_b, worker_count(threads), [&](std::size_t b) {
    auto rng = make_stream(cfg.seed, b, StreamDomain::Bootstrap);
    std::uniform_int_distribution<std::size_t> pick(0, d.n() - 1);
    std::vector<std::size_t> rows(d.n());
    for (auto& r : rows) r = pick(rng);
    ReplicateRecord& rec = s.records[b];
    rec.index = b;
    try {
      const auto sample = d.subset(rows);
      const auto r = analyze(sample, cfg, method, options);
      rec.psi_lo = r.bounds.psi_lo;
      rec.psi_hi = r.bounds.psi_hi;
      rec.status = r.bounds.status();
    } catch (const Error& e) {
      if (!replicate_failure(e.code())) throw;
      rec.status = std::string(to_string(e.code()));
    }
  });

  std::vector<double> lows, highs;
  for (const auto& rec : s.records) {
    if (!rec.feasible()) continue;
    lows.push_back(*rec.psi_lo);
    highs.push_back(*rec.psi_hi);
  }
  s.feasible_count = lows.size();
  if (s.feasible_count == 0) {
    throw Error(ErrorCode::AllReplicatesInfeasible,
                "none of the " + std::to_string(cfg.bootstrap_b) + " bootstrap replicates was feasible");
  }
  s.boot_lower = percentile(std::move(lows), 0.025);
  s.boot_upper = percentile(std::move(highs), 0.975);
  return s;
}

void write_replicates_csv(const BootstrapSummary& s, std::ostream& out) {
  out << "replicate,psi_lo,psi_hi,status\n";
  for (const auto& rec : s.records) {
    out << rec.index << ',' << format_number(rec.psi_lo) << ',' << format_number(rec.psi_hi) << ',' << rec.status
        << '\n';
  }
}

void write_replicates_csv(const BootstrapSummary& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_replicates_csv(s, out);
}

}  // namespace cbounds
