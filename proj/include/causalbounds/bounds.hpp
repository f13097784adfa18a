#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causalbounds/dataset.hpp"
#include "causalbounds/design_basis.hpp"
#include "causalbounds/linprog.hpp"

namespace cbounds {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Feasible set of one arm's inverse-propensity weights: a box per unit and
/// the balance rows a w = b. Column j of `a` belongs to unit indices[j].
struct WeightPolytope {
  Arm arm = Arm::Treated;
  std::vector<std::size_t> indices;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;

  /// True when some unit's box is empty (e.g. an odds-ratio interval that
  /// misses the positivity box entirely).
  bool empty_box() const;
  LinearProgram program(const Eigen::VectorXd& cost, Sense sense) const;
};

/// Weight intervals implied by an odds-ratio bound lambda around ehat, one per
/// entry of ehat. Treated weights are 1/e, control weights 1/(1-e).
std::vector<Interval> or_envelope(const Eigen::VectorXd& ehat, double lambda, Arm arm);

/// Box [1/(1-delta), 1/delta], optionally intersected with a per-unit
/// envelope (length n, indexed by unit), and the rows
///   sum_{i in arm} g(X_i) w_i = sum_{all i} g(X_i).
WeightPolytope build_polytope(const Dataset& d, const BasisMatrix& g, double delta, Arm arm,
                              std::span<const Interval> envelope = {});

struct LpDiagnostics {
  LpStatus status = LpStatus::Infeasible;
  std::size_t iterations = 0;
  double max_residual = 0.0;
};

/// Min and max of scale * sum_{arm} y_i w_i over one polytope.
struct ArmBounds {
  std::optional<double> lo;
  std::optional<double> hi;
  LpDiagnostics min_side;
  LpDiagnostics max_side;

  bool feasible() const { return lo.has_value() && hi.has_value(); }
};

/// One side: optimum of scale * sum_{arm} y_i w_i, or nullopt when the
/// polytope is empty. `y` is indexed by unit.
std::optional<double> solve_side(const WeightPolytope& p, const Eigen::VectorXd& y, double scale, Sense sense,
                                 LpDiagnostics& diagnostics, const SolverOptions& options = {});

ArmBounds solve_arm(const WeightPolytope& p, const Eigen::VectorXd& y, double scale,
                    const SolverOptions& options = {});

struct BoundResult {
  ArmBounds mu1;
  ArmBounds mu0;
  std::optional<double> psi_lo;  // mu1.lo - mu0.hi
  std::optional<double> psi_hi;  // mu1.hi - mu0.lo

  bool feasible() const { return psi_lo.has_value() && psi_hi.has_value(); }
  std::optional<double> length() const;
  /// "Optimal", or "Infeasible:treated", "Infeasible:control", "Infeasible:both".
  std::string status() const;
};

/// psi is only assembled when both arms are feasible.
BoundResult combine(ArmBounds mu1, ArmBounds mu0);

/// The four programs with objective (1/n) sum_{arm} y_i w_i. With cfg.lambda
/// set, the odds-ratio envelope around ehat tightens every box.
BoundResult solve_bounds(const Dataset& d, const BasisMatrix& g, const SensitivityConfig& cfg,
                         const SolverOptions& options = {});
BoundResult solve_bounds(const Dataset& d, const BasisMatrix& g, const SensitivityConfig& cfg,
                         const Eigen::VectorXd& ehat, const SolverOptions& options = {});

}  // namespace cbounds
