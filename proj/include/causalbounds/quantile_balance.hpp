#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "causalbounds/bounds.hpp"
#include "causalbounds/dataset.hpp"
#include "causalbounds/linprog.hpp"

namespace cbounds {

struct QuantileFit {
  double tau = 0.5;
  Eigen::VectorXd beta;  // coefficients on the columns of the design
  double pinball_loss = 0.0;
};

/// sum_i rho_tau(r_i) with rho_tau(u) = u (tau - 1{u < 0}).
double pinball_loss(const Eigen::VectorXd& residual, double tau);

/// Linear quantile regression of y on the given design (include a column of
/// ones for an intercept). Solved as the box-constrained dual program
///   max y'a  s.t.  X'a = (1 - tau) X'1,  0 <= a <= 1,
/// whose row multipliers are the regression coefficients.
QuantileFit fit_quantile_regression(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, double tau,
                                    const SolverOptions& options = {});

/// Out-of-fold predictions of the tau-quantile of Y given (1, X) within one
/// arm, in the order of split_arms(d).of(arm). The arm's units are shuffled
/// with a stream keyed by seed; unit at shuffled position p sits in fold
/// p mod folds.
Eigen::VectorXd crossfit_quantiles(const Dataset& d, double tau, std::size_t folds, std::uint64_t seed,
                                   Arm arm = Arm::Treated, const SolverOptions& options = {});

/// One arm's program: rows (1, qhat) w = sum_{arm} what (1, qhat), where
/// what_i = 1/ehat_i (treated) or 1/(1 - ehat_i) (control), and the odds-ratio
/// box, optionally intersected with [1/(1-delta), 1/delta]. `qhat` follows
/// the arm order of split_arms.
WeightPolytope qb_polytope(const Dataset& d, const Eigen::VectorXd& ehat, const Eigen::VectorXd& qhat,
                           double lambda, Arm arm, std::optional<double> delta = std::nullopt);

struct QbOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::optional<double> delta;
};

struct QbBoundResult {
  BoundResult bounds;
  double tau_lower = 0.5;  // used for the minimising side of each arm
  double tau_upper = 0.5;  // used for the maximising side
};

/// Each arm mean is sum y w / sum what, so lambda = 1 reproduces the SIPW
/// estimate at ehat.
QbBoundResult qb_bounds(const Dataset& d, const Eigen::VectorXd& ehat, double lambda, const QbOptions& qb = {},
                        const SolverOptions& options = {});

}  // namespace cbounds
