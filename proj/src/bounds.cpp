#include "causalbounds/bounds.hpp"

#include <algorithm>

#include "causalbounds/error.hpp"

namespace cbounds {

bool WeightPolytope::empty_box() const {
  for (Eigen::Index j = 0; j < lower.size(); ++j) {
    if (lower[j] > upper[j]) return true;
  }
  return false;
}

LinearProgram WeightPolytope::program(const Eigen::VectorXd& cost, Sense sense) const {
  LinearProgram p;
  p.c = cost;
  p.sense = sense;
  p.lower = lower;
  p.upper = upper;
  p.a = a;
  p.b = b;
  return p;
}

std::vector<Interval> or_envelope(const Eigen::VectorXd& ehat, double lambda, Arm arm) {
  if (!(lambda >= 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be at least 1");
  std::vector<Interval> out(static_cast<std::size_t>(ehat.size()));
  for (Eigen::Index i = 0; i < ehat.size(); ++i) {
    const double e = ehat[i];
    if (!(e > 0.0 && e < 1.0)) throw Error(ErrorCode::InvalidArgument, "fitted propensities must lie in (0, 1)");
    auto& iv = out[static_cast<std::size_t>(i)];
    if (arm == Arm::Treated) {
      iv.lower = (1.0 + (lambda - 1.0) * e) / (lambda * e);
      iv.upper = (1.0 + e * (1.0 / lambda - 1.0)) / (e / lambda);
    } else {
      const double odds = e / (1.0 - e);
      iv.lower = odds / lambda + 1.0;
      iv.upper = lambda * odds + 1.0;
    }
  }
  return out;
}

WeightPolytope build_polytope(const Dataset& d, const BasisMatrix& g, double delta, Arm arm,
                              std::span<const Interval> envelope) {
  if (!(delta > 0.0 && delta < 0.5)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 0.5)");
  if (static_cast<std::size_t>(g.g.rows()) != d.n()) {
    throw Error(ErrorCode::InvalidArgument, "basis matrix rows do not match the dataset");
  }
  if (!envelope.empty() && envelope.size() != d.n()) {
    throw Error(ErrorCode::InvalidArgument, "envelope must have one interval per unit");
  }
  WeightPolytope p;
  p.arm = arm;
  p.indices = split_arms(d).of(arm);
  const auto m = static_cast<Eigen::Index>(p.indices.size());
  p.lower = Eigen::VectorXd::Constant(m, 1.0 / (1.0 - delta));
  p.upper = Eigen::VectorXd::Constant(m, 1.0 / delta);
  p.a.resize(g.g.cols(), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto unit = p.indices[static_cast<std::size_t>(j)];
    p.a.col(j) = g.g.row(static_cast<Eigen::Index>(unit)).transpose();
    if (!envelope.empty()) {
      p.lower[j] = std::max(p.lower[j], envelope[unit].lower);
      p.upper[j] = std::min(p.upper[j], envelope[unit].upper);
    }
  }
  p.b = g.g.colwise().sum().transpose();
  return p;
}

std::optional<double> solve_side(const WeightPolytope& p, const Eigen::VectorXd& y, double scale, Sense sense,
                                 LpDiagnostics& diagnostics, const SolverOptions& options) {
  diagnostics = {};
  if (p.empty_box()) return std::nullopt;
  Eigen::VectorXd cost(static_cast<Eigen::Index>(p.indices.size()));
  for (std::size_t j = 0; j < p.indices.size(); ++j) {
    cost[static_cast<Eigen::Index>(j)] = scale * y[static_cast<Eigen::Index>(p.indices[j])];
  }
  const auto sol = solve(p.program(cost, sense), options);
  diagnostics = {sol.status, sol.iterations, sol.max_residual};
  if (sol.status != LpStatus::Optimal) return std::nullopt;
  return sol.objective;
}

ArmBounds solve_arm(const WeightPolytope& p, const Eigen::VectorXd& y, double scale, const SolverOptions& options) {
  ArmBounds out;
  out.lo = solve_side(p, y, scale, Sense::Min, out.min_side, options);
  // Both sides share the feasible set; an infeasible min means an infeasible max.
  if (!out.lo) {
    out.max_side = out.min_side;
    return out;
  }
  out.hi = solve_side(p, y, scale, Sense::Max, out.max_side, options);
  return out;
}

std::optional<double> BoundResult::length() const {
  if (!feasible()) return std::nullopt;
  return *psi_hi - *psi_lo;
}

std::string BoundResult::status() const {
  const bool t = mu1.feasible();
  const bool c = mu0.feasible();
  if (t && c) return "Optimal";
  if (!t && !c) return "Infeasible:both";
  return t ? "Infeasible:control" : "Infeasible:treated";
}

BoundResult combine(ArmBounds mu1, ArmBounds mu0) {
  BoundResult r;
  r.mu1 = std::move(mu1);
  r.mu0 = std::move(mu0);
  if (r.mu1.feasible() && r.mu0.feasible()) {
    r.psi_lo = *r.mu1.lo - *r.mu0.hi;
    r.psi_hi = *r.mu1.hi - *r.mu0.lo;
  }
  return r;
}

namespace {

BoundResult solve_bounds_impl(const Dataset& d, const BasisMatrix& g, const SensitivityConfig& cfg,
                              const Eigen::VectorXd* ehat, const SolverOptions& options) {
  cfg.validate();
  if (cfg.lambda && ehat == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "an odds-ratio bound needs fitted propensities");
  }
  if (ehat != nullptr && static_cast<std::size_t>(ehat->size()) != d.n()) {
    throw Error(ErrorCode::InvalidArgument, "one fitted propensity per unit expected");
  }
  const double scale = 1.0 / static_cast<double>(d.n());
  auto arm_bounds = [&](Arm arm) {
    std::vector<Interval> env;
    if (cfg.lambda) env = or_envelope(*ehat, *cfg.lambda, arm);
    const auto p = build_polytope(d, g, cfg.delta, arm, env);
    return solve_arm(p, d.y(), scale, options);
  };
  auto mu1 = arm_bounds(Arm::Treated);
  auto mu0 = arm_bounds(Arm::Control);
  return combine(std::move(mu1), std::move(mu0));
}

}  // namespace

BoundResult solve_bounds(const Dataset& d, const BasisMatrix& g, const SensitivityConfig& cfg,
                         const SolverOptions& options) {
  return solve_bounds_impl(d, g, cfg, nullptr, options);
}

BoundResult solve_bounds(const Dataset& d, const BasisMatrix& g, const SensitivityConfig& cfg,
                         const Eigen::VectorXd& ehat, const SolverOptions& options) {
  return solve_bounds_impl(d, g, cfg, &ehat, options);
}

}  // namespace cbounds
