#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "causalbounds/analysis.hpp"
#include "causalbounds/dataset.hpp"

namespace cbounds {

inline constexpr const char* kPercentileRule =
    "linear interpolation between order statistics at h = (N - 1) p";

/// p-quantile of values by linear interpolation between the order statistics
/// x_(floor h) and x_(floor h + 1), h = (N - 1) p on zero-based ranks.
double percentile(std::vector<double> values, double p);

struct ReplicateRecord {
  std::size_t index = 0;
  std::optional<double> psi_lo;
  std::optional<double> psi_hi;
  std::string status;  // bound status, or the error code that stopped the replicate

  bool feasible() const { return psi_lo.has_value() && psi_hi.has_value(); }
};

struct BootstrapSummary {
  std::size_t b_requested = 0;
  std::size_t feasible_count = 0;
  double boot_lower = 0.0;  // 2.5th percentile of feasible replicate lower bounds
  double boot_upper = 0.0;  // 97.5th percentile of feasible replicate upper bounds
  std::vector<ReplicateRecord> records;  // ordered by replicate index
  std::string percentile_rule = kPercentileRule;
};

/// cfg.bootstrap_b resamples of size n with replacement, replicate b drawing
/// from the stream keyed by (cfg.seed, b). The whole pipeline reruns on each
/// resample, logistic refit included. Replicates with an empty arm or a
/// failed propensity fit count as infeasible.
BootstrapSummary bootstrap_bounds(const Dataset& d, const SensitivityConfig& cfg, Method method,
                                  const AnalysisOptions& options = {}, std::size_t threads = 0);

void write_replicates_csv(const BootstrapSummary& s, std::ostream& out);
void write_replicates_csv(const BootstrapSummary& s, const std::filesystem::path& path);

}  // namespace cbounds
