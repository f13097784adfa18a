#include "causalbounds/logistic.hpp"

#include <cmath>
#include <vector>

#include "causalbounds/error.hpp"

namespace cbounds {

namespace {

constexpr double kScoreTolerance = 1e-8;
// A converged fit with |eta| above kSeparationEta has fitted probabilities
// within 3e-7 of 0 or 1: the score vanishes there only because the MLE is at
// infinity. Iterates beyond kDivergenceEta are taken as diverging.
constexpr double kSeparationEta = 15.0;
constexpr double kDivergenceEta = 30.0;
constexpr double kRidge = 1e-10;
constexpr std::size_t kMaxIterations = 100;

double log1pexp(double eta) { return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

double log_likelihood(const Eigen::VectorXd& eta, const Eigen::VectorXd& z) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += z[i] * eta[i] - log1pexp(eta[i]);
  return ll;
}

}  // namespace

double expit(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

MarPropensity fit_mar_propensity(const Dataset& d) {
  const auto n = static_cast<Eigen::Index>(d.n());
  const auto& x = d.x();
  const auto& z = d.z();

  // Columns of (1, X) that take part in the fit; all-zero covariates are skipped.
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (x.col(j).cwiseAbs().maxCoeff() > 0.0) active.push_back(j);
  }
  const auto p = static_cast<Eigen::Index>(active.size()) + 1;
  Eigen::MatrixXd design(n, p);
  design.col(0).setOnes();
  for (Eigen::Index c = 1; c < p; ++c) design.col(c) = x.col(active[static_cast<std::size_t>(c - 1)]);

  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
      throw Error(ErrorCode::RankDeficientDesign, "the design (1, X) is not of full column rank");
    }
  }

  const double zbar = z.mean();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  beta[0] = std::log(zbar / (1.0 - zbar));

  Eigen::VectorXd eta = design * beta;
  double ll = log_likelihood(eta, z);
  MarPropensity out;
  for (std::size_t iter = 0;; ++iter) {
    const Eigen::VectorXd prob = eta.unaryExpr([](double v) { return expit(v); });
    const Eigen::VectorXd score = design.transpose() * (z - prob);
    const double score_norm = score.cwiseAbs().maxCoeff();
    const double eta_max = eta.cwiseAbs().maxCoeff();
    if (eta_max > kDivergenceEta || (score_norm <= kScoreTolerance && eta_max > kSeparationEta)) {
      throw Error(ErrorCode::SeparationDetected, "linear predictor diverges; treatment is (quasi-)separated");
    }
    if (score_norm <= kScoreTolerance) {
      out.theta = beta[0];
      out.alpha = Eigen::VectorXd::Zero(x.cols());
      for (Eigen::Index c = 1; c < p; ++c) out.alpha[active[static_cast<std::size_t>(c - 1)]] = beta[c];
      out.ehat = prob;
      out.iterations = iter;
      out.score_norm = score_norm;
      return out;
    }
    if (iter == kMaxIterations) {
      throw Error(ErrorCode::NoConvergence, "logistic fit did not converge in 100 Newton steps");
    }
    const Eigen::VectorXd w = prob.array() * (1.0 - prob.array());
    Eigen::MatrixXd hessian = design.transpose() * w.asDiagonal() * design;
    hessian.diagonal().array() += kRidge;
    const Eigen::VectorXd step = hessian.ldlt().solve(score);

    double t = 1.0;
    for (;;) {
      const Eigen::VectorXd trial = beta + t * step;
      const Eigen::VectorXd trial_eta = design * trial;
      const double trial_ll = log_likelihood(trial_eta, z);
      if (trial_ll >= ll - 1e-12 * std::abs(ll) || t < 1e-10) {
        beta = trial;
        eta = trial_eta;
        ll = trial_ll;
        break;
      }
      t *= 0.5;
    }
  }
}

double predict(const MarPropensity& m, const Eigen::Ref<const Eigen::VectorXd>& x_row) {
  if (x_row.size() != m.alpha.size()) {
    throw Error(ErrorCode::InvalidArgument, "covariate row has the wrong length");
  }
  return expit(m.theta + m.alpha.dot(x_row));
}

}  // namespace cbounds
