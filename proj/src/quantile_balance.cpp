#include "causalbounds/quantile_balance.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "causalbounds/error.hpp"
#include "causalbounds/random.hpp"

namespace cbounds {

double pinball_loss(const Eigen::VectorXd& residual, double tau) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < residual.size(); ++i) {
    const double u = residual[i];
    loss += u * (tau - (u < 0.0 ? 1.0 : 0.0));
  }
  return loss;
}

QuantileFit fit_quantile_regression(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, double tau,
                                    const SolverOptions& options) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::InvalidArgument, "tau must lie in (0, 1)");
  if (x.rows() != y.size() || x.cols() < 1) throw Error(ErrorCode::InvalidArgument, "design does not match outcomes");
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < x.cols()) {
      throw Error(ErrorCode::RankDeficientDesign, "quantile regression design is not of full column rank");
    }
  }
  LinearProgram lp;
  lp.c = y;
  lp.sense = Sense::Max;
  lp.lower = Eigen::VectorXd::Zero(y.size());
  lp.upper = Eigen::VectorXd::Ones(y.size());
  lp.a = x.transpose();
  lp.b = (1.0 - tau) * x.transpose() * Eigen::VectorXd::Ones(y.size());
  const auto sol = solve(lp, options);
  if (sol.status != LpStatus::Optimal) {
    throw Error(ErrorCode::NumericalBreakdown, "quantile regression program did not reach an optimum");
  }
  QuantileFit fit;
  fit.tau = tau;
  fit.beta = sol.duals;
  fit.pinball_loss = pinball_loss(y - x * fit.beta, tau);
  return fit;
}

namespace {

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols() + 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    out(i, 0) = 1.0;
    out.row(i).tail(x.cols()) = x.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

}  // namespace

Eigen::VectorXd crossfit_quantiles(const Dataset& d, double tau, std::size_t folds, std::uint64_t seed, Arm arm,
                                   const SolverOptions& options) {
  if (folds < 2) throw Error(ErrorCode::InvalidArgument, "cross-fitting needs at least two folds");
  const auto arms = split_arms(d);
  const auto& units = arms.of(arm);
  const std::size_t m = units.size();
  if (m < folds) {
    throw Error(ErrorCode::TooFewUnits, std::string(to_string(arm)) + " arm has " + std::to_string(m) +
                                            " units, fewer than " + std::to_string(folds) + " folds");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_stream(seed, arm == Arm::Treated ? 1 : 0, StreamDomain::CrossFit);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> fold_of(m);
  for (std::size_t p = 0; p < m; ++p) fold_of[order[p]] = p % folds;

  Eigen::VectorXd qhat(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < folds; ++k) {
    std::vector<std::size_t> train, held;
    for (std::size_t j = 0; j < m; ++j) (fold_of[j] == k ? held : train).push_back(j);
    std::vector<std::size_t> train_units(train.size());
    Eigen::VectorXd ys(static_cast<Eigen::Index>(train.size()));
    for (std::size_t t = 0; t < train.size(); ++t) {
      train_units[t] = units[train[t]];
      ys[static_cast<Eigen::Index>(t)] = d.y()[static_cast<Eigen::Index>(train_units[t])];
    }
    const auto fit = fit_quantile_regression(ys, with_intercept(d.x(), train_units), tau, options);
    for (const auto j : held) {
      const auto unit = static_cast<Eigen::Index>(units[j]);
      qhat[static_cast<Eigen::Index>(j)] = fit.beta[0] + d.x().row(unit).dot(fit.beta.tail(d.x().cols()));
    }
  }
  return qhat;
}

WeightPolytope qb_polytope(const Dataset& d, const Eigen::VectorXd& ehat, const Eigen::VectorXd& qhat,
                           double lambda, Arm arm, std::optional<double> delta) {
  if (static_cast<std::size_t>(ehat.size()) != d.n()) {
    throw Error(ErrorCode::InvalidArgument, "one fitted propensity per unit expected");
  }
  WeightPolytope p;
  p.arm = arm;
  p.indices = split_arms(d).of(arm);
  const auto m = static_cast<Eigen::Index>(p.indices.size());
  if (qhat.size() != m) throw Error(ErrorCode::InvalidArgument, "one predicted quantile per arm unit expected");
  if (delta && !(*delta > 0.0 && *delta < 0.5)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 0.5)");

  const auto envelope = or_envelope(ehat, lambda, arm);
  p.lower.resize(m);
  p.upper.resize(m);
  p.a.resize(2, m);
  p.b = Eigen::VectorXd::Zero(2);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto unit = p.indices[static_cast<std::size_t>(j)];
    const double e = ehat[static_cast<Eigen::Index>(unit)];
    const double what = arm == Arm::Treated ? 1.0 / e : 1.0 / (1.0 - e);
    p.lower[j] = envelope[unit].lower;
    p.upper[j] = envelope[unit].upper;
    if (delta) {
      p.lower[j] = std::max(p.lower[j], 1.0 / (1.0 - *delta));
      p.upper[j] = std::min(p.upper[j], 1.0 / *delta);
    }
    p.a(0, j) = 1.0;
    p.a(1, j) = qhat[j];
    p.b[0] += what;
    p.b[1] += what * qhat[j];
  }
  return p;
}

QbBoundResult qb_bounds(const Dataset& d, const Eigen::VectorXd& ehat, double lambda, const QbOptions& qb,
                        const SolverOptions& options) {
  if (!(lambda >= 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be at least 1");
  QbBoundResult out;
  out.tau_upper = lambda / (1.0 + lambda);
  out.tau_lower = 1.0 / (1.0 + lambda);

  auto arm_bounds = [&](Arm arm) {
    ArmBounds ab;
    double weight_total = 0.0;
    const auto arms = split_arms(d);
    for (const auto unit : arms.of(arm)) {
      const double e = ehat[static_cast<Eigen::Index>(unit)];
      weight_total += arm == Arm::Treated ? 1.0 / e : 1.0 / (1.0 - e);
    }
    const double scale = 1.0 / weight_total;
    const auto q_lo = crossfit_quantiles(d, out.tau_lower, qb.folds, qb.seed, arm, options);
    const auto p_lo = qb_polytope(d, ehat, q_lo, lambda, arm, qb.delta);
    ab.lo = solve_side(p_lo, d.y(), scale, Sense::Min, ab.min_side, options);
    if (out.tau_upper == out.tau_lower) {
      ab.hi = solve_side(p_lo, d.y(), scale, Sense::Max, ab.max_side, options);
    } else {
      const auto q_hi = crossfit_quantiles(d, out.tau_upper, qb.folds, qb.seed, arm, options);
      const auto p_hi = qb_polytope(d, ehat, q_hi, lambda, arm, qb.delta);
      ab.hi = solve_side(p_hi, d.y(), scale, Sense::Max, ab.max_side, options);
    }
    return ab;
  };
  auto mu1 = arm_bounds(Arm::Treated);
  auto mu0 = arm_bounds(Arm::Control);
  out.bounds = combine(std::move(mu1), std::move(mu0));
  return out;
}

}  // namespace cbounds
