#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cbounds {

enum class Sense { Min, Max };
enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(LpStatus s);

/// optimize c'w  subject to  lower <= w <= upper,  a w = b.
struct LinearProgram {
  Eigen::VectorXd c;
  Sense sense = Sense::Min;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::MatrixXd a;  // r x m
  Eigen::VectorXd b;

  std::size_t variables() const noexcept { return static_cast<std::size_t>(c.size()); }
  std::size_t rows() const noexcept { return static_cast<std::size_t>(a.rows()); }

  /// Throws InvalidArgument on size mismatches, crossed or non-finite bounds.
  void validate() const;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd w;  // empty unless Optimal
  double objective = 0.0;
  std::size_t iterations = 0;
  double max_residual = 0.0;  // max |a w - b| on the caller's rows
  // Row multipliers y with c - a'y the reduced costs in the caller's sense.
  // For an infeasible problem these are the Phase-1 multipliers instead.
  Eigen::VectorXd duals;
};

struct SolverOptions {
  double feasibility_tol = 1e-8;
  double reduced_cost_tol = 1e-9;
  double pivot_tol = 1e-9;       // smallest |alpha| accepted in the ratio test
  double breakdown_pivot = 1e-12;
  bool equilibrate = true;       // scale each row to unit max-abs before solving
  std::size_t refactor_interval = 64;
  std::size_t degenerate_run_before_bland = 50;
  std::size_t max_iterations = 0;  // 0: 50 (m + r) + 1000
};

/// Indices of a maximal linearly independent subset of rows (first-come order).
/// Throws InconsistentRows if a dependent row's right-hand side disagrees.
std::vector<std::size_t> independent_rows(const LinearProgram& p, double pivot_tol = 1e-10,
                                          double rhs_tol = 1e-8);

/// Drop linearly dependent equality rows.
LinearProgram preprocess(const LinearProgram& p);

/// Two-phase bounded-variable primal simplex. Nonbasic variables rest at one
/// of their bounds; Dantzig pricing with lowest-index tie breaks, switching to
/// Bland's rule during long runs of degenerate pivots. Deterministic.
/// Infeasible/Unbounded come back as statuses; NumericalBreakdown is thrown.
LpSolution solve(const LinearProgram& p, const SolverOptions& options = {});

/// Plain-text dump: sense, c, bounds and rows, one block per section.
void write_lp_text(const LinearProgram& p, std::ostream& out);

}  // namespace cbounds
