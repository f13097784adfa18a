#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "causalbounds/analysis.hpp"
#include "causalbounds/dataset.hpp"
#include "causalbounds/design_basis.hpp"
#include "causalbounds/simulation.hpp"

namespace cbounds::cli {

enum class Command { Bounds, Simulate, Bootstrap };

struct RunConfig {
  Command command = Command::Bounds;
  std::filesystem::path input;
  SensitivityConfig sensitivity;    // first delta / lambda of the lists below
  std::vector<double> deltas{0.01};
  std::vector<double> lambdas;      // empty: no odds-ratio bound
  std::vector<Ladder> ladders;      // empty: use the g-terms (or D1)
  bool both_methods = false;
  Method method = Method::Proposed;
  std::optional<std::filesystem::path> output;
  ScenarioId scenario = ScenarioId::S1;
  std::size_t replicates = 100;
  std::size_t sample_size = 1000;
  std::size_t true_ate_studies = 1000;
  std::size_t threads = 0;
  AnalysisOptions analysis;
  std::optional<std::filesystem::path> dump_lp;
  std::optional<std::filesystem::path> replicate_dump;
  std::optional<std::filesystem::path> export_dir;  // simulate: one CSV per generated study
};

/// Throws Error(UsageError) on malformed or out-of-range arguments. Returns
/// nullopt when help was requested (already printed to `out`).
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Executes the command. 0 on success, 2 when a bounds polytope is infeasible
/// (the report is still written); errors propagate as exceptions.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// parse_args + run with errors mapped to exit 1 and a one-line message.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cbounds::cli
