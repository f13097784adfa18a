#pragma once

#include <Eigen/Dense>

#include "causalbounds/dataset.hpp"

namespace cbounds {

enum class EstimatorForm { IPW, SIPW };

struct AteEstimate {
  double mu1 = 0.0;
  double mu0 = 0.0;
  double psi = 0.0;  // mu1 - mu0
  EstimatorForm form = EstimatorForm::IPW;
};

// Both estimators take the per-unit propensity e_i = P(Z=1 | ...) directly, so
// fitted, true, and LP-implied propensities share one code path.

/// mu1 = (1/n) sum z y / e,  mu0 = (1/n) sum (1-z) y / (1-e).
AteEstimate ipw(const Dataset& d, const Eigen::VectorXd& e);

/// Normalised-weight form; each arm's mean is a convex combination of that
/// arm's outcomes.
AteEstimate sipw(const Dataset& d, const Eigen::VectorXd& e);

}  // namespace cbounds
