#include "causalbounds/estimators.hpp"

#include "causalbounds/error.hpp"

namespace cbounds {

namespace {

void check_propensities(const Dataset& d, const Eigen::VectorXd& e) {
  if (static_cast<std::size_t>(e.size()) != d.n()) {
    throw Error(ErrorCode::InvalidArgument, "one propensity per unit expected");
  }
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (!(e[i] > 0.0 && e[i] < 1.0)) throw Error(ErrorCode::InvalidArgument, "propensities must lie in (0, 1)");
  }
}

struct ArmSums {
  double weighted_y1 = 0.0, weight1 = 0.0, weighted_y0 = 0.0, weight0 = 0.0;
};

ArmSums arm_sums(const Dataset& d, const Eigen::VectorXd& e) {
  ArmSums s;
  for (std::size_t i = 0; i < d.n(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (d.treated(i)) {
      const double w = 1.0 / e[r];
      s.weighted_y1 += w * d.y()[r];
      s.weight1 += w;
    } else {
      const double w = 1.0 / (1.0 - e[r]);
      s.weighted_y0 += w * d.y()[r];
      s.weight0 += w;
    }
  }
  return s;
}

}  // namespace

AteEstimate ipw(const Dataset& d, const Eigen::VectorXd& e) {
  check_propensities(d, e);
  const auto s = arm_sums(d, e);
  const double n = static_cast<double>(d.n());
  AteEstimate out{s.weighted_y1 / n, s.weighted_y0 / n, 0.0, EstimatorForm::IPW};
  out.psi = out.mu1 - out.mu0;
  return out;
}

AteEstimate sipw(const Dataset& d, const Eigen::VectorXd& e) {
  check_propensities(d, e);
  const auto s = arm_sums(d, e);
  AteEstimate out{s.weighted_y1 / s.weight1, s.weighted_y0 / s.weight0, 0.0, EstimatorForm::SIPW};
  out.psi = out.mu1 - out.mu0;
  return out;
}

}  // namespace cbounds
