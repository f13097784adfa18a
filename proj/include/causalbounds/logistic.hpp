#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "causalbounds/dataset.hpp"

namespace cbounds {

double expit(double eta);

/// MAR-based propensity model logit e(X) = theta + alpha'X fitted on the
/// observed covariates only.
struct MarPropensity {
  double theta = 0.0;
  Eigen::VectorXd alpha;
  Eigen::VectorXd ehat;
  std::size_t iterations = 0;
  double score_norm = 0.0;  // max-abs of the score residual at the solution
};

/// Newton-Raphson on the logistic score equation with step halving.
/// Initial point theta = logit(mean z), alpha = 0. Covariate columns that are
/// identically zero carry no information and keep alpha_j = 0.
MarPropensity fit_mar_propensity(const Dataset& d);

double predict(const MarPropensity& m, const Eigen::Ref<const Eigen::VectorXd>& x_row);

}  // namespace cbounds
