#include "causalbounds/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "causalbounds/error.hpp"

namespace cbounds {

std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

void LinearProgram::validate() const {
  const auto m = c.size();
  if (lower.size() != m || upper.size() != m) {
    throw Error(ErrorCode::InvalidArgument, "bounds must have one entry per variable");
  }
  if (a.cols() != m && a.rows() > 0) throw Error(ErrorCode::InvalidArgument, "row width differs from variable count");
  if (a.rows() != b.size()) throw Error(ErrorCode::InvalidArgument, "one right-hand side per row expected");
  if (!c.allFinite() || !lower.allFinite() || !upper.allFinite() || !a.allFinite() || !b.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "linear program entries must be finite");
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    if (lower[j] > upper[j]) throw Error(ErrorCode::InvalidArgument, "lower bound exceeds upper bound");
  }
}

std::vector<std::size_t> independent_rows(const LinearProgram& p, double pivot_tol, double rhs_tol) {
  // Modified Gram-Schmidt (two passes) over equilibrated rows in their given order.
  const auto r = p.a.rows();
  std::vector<std::size_t> kept;
  std::vector<Eigen::VectorXd> basis;
  std::vector<double> basis_rhs;
  for (Eigen::Index i = 0; i < r; ++i) {
    const double scale = p.a.row(i).cwiseAbs().maxCoeff();
    if (scale == 0.0) {
      if (std::abs(p.b[i]) > rhs_tol) {
        throw Error(ErrorCode::InconsistentRows, "row " + std::to_string(i + 1) + " is zero with nonzero rhs");
      }
      continue;
    }
    Eigen::VectorXd v = p.a.row(i).transpose() / scale;
    double rhs = p.b[i] / scale;
    const double rhs_ref = std::max(1.0, std::abs(rhs));
    const double norm0 = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < basis.size(); ++k) {
        const double coef = basis[k].dot(v);
        v -= coef * basis[k];
        rhs -= coef * basis_rhs[k];
      }
    }
    const double norm = v.norm();
    if (norm <= pivot_tol * norm0) {
      if (std::abs(rhs) > rhs_tol * rhs_ref) {
        throw Error(ErrorCode::InconsistentRows,
                    "row " + std::to_string(i + 1) + " is a combination of earlier rows with a different rhs");
      }
      continue;
    }
    basis.push_back(v / norm);
    basis_rhs.push_back(rhs / norm);
    kept.push_back(static_cast<std::size_t>(i));
  }
  return kept;
}

LinearProgram preprocess(const LinearProgram& p) {
  p.validate();
  const auto kept = independent_rows(p);
  LinearProgram out = p;
  out.a.resize(static_cast<Eigen::Index>(kept.size()), p.c.size());
  out.b.resize(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.a.row(static_cast<Eigen::Index>(k)) = p.a.row(static_cast<Eigen::Index>(kept[k]));
    out.b[static_cast<Eigen::Index>(k)] = p.b[static_cast<Eigen::Index>(kept[k])];
  }
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class BoundedSimplex {
 public:
  BoundedSimplex(Eigen::MatrixXd a, Eigen::VectorXd b, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                 const SolverOptions& opt)
      : opt_(opt), a_(std::move(a)), b_(std::move(b)), m_(lower.size()), r_(b_.size()) {
    max_iterations_ = opt_.max_iterations > 0 ? opt_.max_iterations
                                              : 50 * static_cast<std::size_t>(m_ + r_) + 1000;
    lo_.resize(m_ + r_);
    up_.resize(m_ + r_);
    lo_.head(m_) = lower;
    up_.head(m_) = upper;
    lo_.tail(r_).setZero();
    up_.tail(r_).setConstant(kInf);

    x_.resize(m_ + r_);
    x_.head(m_) = lower;
    state_.assign(static_cast<std::size_t>(m_ + r_), State::AtLower);

    // Orient rows so that the starting artificial values are nonnegative.
    const Eigen::VectorXd residual = b_ - a_ * x_.head(m_);
    row_sign_ = Eigen::VectorXd::Ones(r_);
    for (Eigen::Index i = 0; i < r_; ++i) {
      if (residual[i] < 0) {
        row_sign_[i] = -1.0;
        a_.row(i) *= -1.0;
        b_[i] = -b_[i];
      }
      x_[m_ + i] = std::abs(residual[i]);
      head_.push_back(m_ + i);
      state_[static_cast<std::size_t>(m_ + i)] = State::Basic;
    }
    binv_ = Eigen::MatrixXd::Identity(r_, r_);
  }

  bool phase_one() {
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(m_ + r_);
    cost.tail(r_).setOnes();
    iterate(cost);
    refactor();
    cost_ = cost;
    double infeasibility = 0.0;
    for (Eigen::Index i = 0; i < r_; ++i) {
      if (head_[static_cast<std::size_t>(i)] >= m_) infeasibility += std::max(0.0, x_[head_[static_cast<std::size_t>(i)]]);
    }
    if (infeasibility > opt_.feasibility_tol) return false;
    drive_out_artificials();
    up_.tail(r_).setZero();
    return true;
  }

  bool phase_two(const Eigen::VectorXd& structural_cost) {
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(m_ + r_);
    cost.head(m_) = structural_cost;
    cost_ = cost;
    const bool bounded = iterate(cost);
    refactor();
    for (Eigen::Index i = 0; i < r_; ++i) {
      const auto v = head_[static_cast<std::size_t>(i)];
      x_[v] = std::clamp(x_[v], lo_[v], up_[v]);
    }
    return bounded;
  }

  Eigen::VectorXd structural() const { return x_.head(m_); }
  Eigen::VectorXd multipliers() const { return binv_.transpose() * basic_costs(cost_); }
  const Eigen::VectorXd& row_sign() const { return row_sign_; }
  std::size_t iterations() const { return iterations_; }

 private:
  enum class State : unsigned char { Basic, AtLower, AtUpper };

  Eigen::VectorXd basic_costs(const Eigen::VectorXd& cost) const {
    Eigen::VectorXd cb(r_);
    for (Eigen::Index i = 0; i < r_; ++i) cb[i] = cost[head_[static_cast<std::size_t>(i)]];
    return cb;
  }

  Eigen::VectorXd ftran(Eigen::Index j) const {
    return j < m_ ? Eigen::VectorXd(binv_ * a_.col(j)) : Eigen::VectorXd(binv_.col(j - m_));
  }

  // Returns false when an improving ray is unbounded.
  bool iterate(const Eigen::VectorXd& cost) {
    std::size_t degenerate_run = 0;
    bool bland = false;
    const Eigen::Index total = m_ + r_;
    for (;;) {
      if (iterations_ >= max_iterations_) {
        throw Error(ErrorCode::NumericalBreakdown, "simplex iteration limit reached");
      }
      if (since_refactor_ >= opt_.refactor_interval) refactor();

      const Eigen::VectorXd pi = binv_.transpose() * basic_costs(cost);
      Eigen::VectorXd d(total);
      d.head(m_) = cost.head(m_) - a_.transpose() * pi;
      d.tail(r_) = cost.tail(r_) - pi;

      Eigen::Index q = -1;
      double best = 0.0;
      for (Eigen::Index j = 0; j < total; ++j) {
        const auto st = state_[static_cast<std::size_t>(j)];
        if (st == State::Basic || !(up_[j] > lo_[j])) continue;
        const bool improving = (st == State::AtLower && d[j] < -opt_.reduced_cost_tol) ||
                               (st == State::AtUpper && d[j] > opt_.reduced_cost_tol);
        if (!improving) continue;
        if (bland) {
          q = j;
          break;
        }
        if (std::abs(d[j]) > best) {
          best = std::abs(d[j]);
          q = j;
        }
      }
      if (q < 0) return true;

      const double dir = state_[static_cast<std::size_t>(q)] == State::AtLower ? 1.0 : -1.0;
      const Eigen::VectorXd alpha = ftran(q);

      // Ratio test; a bound flip of the entering variable wins ties.
      double step = up_[q] - lo_[q];
      Eigen::Index leave = -1;
      for (Eigen::Index i = 0; i < r_; ++i) {
        const double rate = dir * alpha[i];
        if (std::abs(rate) <= opt_.pivot_tol) continue;
        const auto v = head_[static_cast<std::size_t>(i)];
        double limit;
        if (rate > 0) {
          if (lo_[v] == -kInf) continue;
          limit = (x_[v] - lo_[v]) / rate;
        } else {
          if (up_[v] == kInf) continue;
          limit = (up_[v] - x_[v]) / -rate;
        }
        limit = std::max(limit, 0.0);
        const double tie = 1e-12 * (1.0 + limit);
        if (limit < step - tie) {
          step = limit;
          leave = i;
        } else if (leave >= 0 && limit <= step + tie) {
          const auto incumbent = head_[static_cast<std::size_t>(leave)];
          const bool better = bland ? v < incumbent : std::abs(alpha[i]) > std::abs(alpha[leave]);
          if (better) {
            step = std::min(step, limit);
            leave = i;
          }
        }
      }
      if (leave < 0 && step == kInf) return false;

      x_[q] += dir * step;
      for (Eigen::Index i = 0; i < r_; ++i) x_[head_[static_cast<std::size_t>(i)]] -= dir * step * alpha[i];

      if (leave < 0) {
        const bool to_upper = dir > 0;
        x_[q] = to_upper ? up_[q] : lo_[q];
        state_[static_cast<std::size_t>(q)] = to_upper ? State::AtUpper : State::AtLower;
      } else {
        const auto v = head_[static_cast<std::size_t>(leave)];
        const bool hits_lower = dir * alpha[leave] > 0;
        x_[v] = hits_lower ? lo_[v] : up_[v];
        state_[static_cast<std::size_t>(v)] = hits_lower ? State::AtLower : State::AtUpper;
        pivot(leave, q, alpha);
      }
      ++iterations_;

      if (step <= 1e-12) {
        if (++degenerate_run > opt_.degenerate_run_before_bland) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

  void pivot(Eigen::Index row, Eigen::Index entering, const Eigen::VectorXd& alpha) {
    if (std::abs(alpha[row]) < opt_.breakdown_pivot) {
      throw Error(ErrorCode::NumericalBreakdown, "pivot element below 1e-12");
    }
    const Eigen::RowVectorXd pivot_row = binv_.row(row) / alpha[row];
    binv_.noalias() -= alpha * pivot_row;
    binv_.row(row) = pivot_row;
    head_[static_cast<std::size_t>(row)] = entering;
    state_[static_cast<std::size_t>(entering)] = State::Basic;
    ++since_refactor_;
  }

  void refactor() {
    since_refactor_ = 0;
    if (r_ == 0) return;
    Eigen::MatrixXd basis(r_, r_);
    for (Eigen::Index i = 0; i < r_; ++i) {
      const auto v = head_[static_cast<std::size_t>(i)];
      if (v < m_) {
        basis.col(i) = a_.col(v);
      } else {
        basis.col(i).setZero();
        basis(v - m_, i) = 1.0;
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
    const double umax = lu.matrixLU().diagonal().cwiseAbs().maxCoeff();
    const double umin = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(umin >= opt_.breakdown_pivot * std::max(1.0, umax))) {
      throw Error(ErrorCode::NumericalBreakdown, "basis matrix became singular");
    }
    binv_ = lu.inverse();

    Eigen::VectorXd rhs = b_;
    for (Eigen::Index j = 0; j < m_ + r_; ++j) {
      if (state_[static_cast<std::size_t>(j)] == State::Basic || x_[j] == 0.0) continue;
      if (j < m_) {
        rhs -= a_.col(j) * x_[j];
      } else {
        rhs[j - m_] -= x_[j];
      }
    }
    const Eigen::VectorXd xb = binv_ * rhs;
    for (Eigen::Index i = 0; i < r_; ++i) x_[head_[static_cast<std::size_t>(i)]] = xb[i];
  }

  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < r_; ++i) {
      if (head_[static_cast<std::size_t>(i)] < m_) continue;
      const Eigen::RowVectorXd row = binv_.row(i) * a_;
      Eigen::Index best = -1;
      double best_mag = opt_.pivot_tol;
      for (Eigen::Index j = 0; j < m_; ++j) {
        if (state_[static_cast<std::size_t>(j)] == State::Basic) continue;
        if (std::abs(row[j]) > best_mag) {
          best_mag = std::abs(row[j]);
          best = j;
        }
      }
      if (best < 0) continue;  // redundant row; the artificial stays basic at zero
      const auto art = head_[static_cast<std::size_t>(i)];
      const Eigen::VectorXd alpha = ftran(best);
      x_[art] = 0.0;
      state_[static_cast<std::size_t>(art)] = State::AtLower;
      pivot(i, best, alpha);
    }
    refactor();
  }

  SolverOptions opt_;
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  Eigen::Index m_;
  Eigen::Index r_;
  Eigen::VectorXd lo_, up_, x_, row_sign_, cost_;
  std::vector<State> state_;
  std::vector<Eigen::Index> head_;
  Eigen::MatrixXd binv_;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
  std::size_t max_iterations_ = 0;
};

}  // namespace

LpSolution solve(const LinearProgram& p, const SolverOptions& options) {
  p.validate();
  LpSolution out;
  out.duals = Eigen::VectorXd::Zero(p.a.rows());

  std::vector<std::size_t> kept;
  try {
    kept = independent_rows(p);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InconsistentRows) throw;
    out.status = LpStatus::Infeasible;
    return out;
  }

  const auto m = p.c.size();
  const auto r = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd a(r, m);
  Eigen::VectorXd b(r), row_scale = Eigen::VectorXd::Ones(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    const auto src = static_cast<Eigen::Index>(kept[static_cast<std::size_t>(k)]);
    if (options.equilibrate) row_scale[k] = 1.0 / p.a.row(src).cwiseAbs().maxCoeff();
    a.row(k) = p.a.row(src) * row_scale[k];
    b[k] = p.b[src] * row_scale[k];
  }
  Eigen::VectorXd cost = p.sense == Sense::Max ? Eigen::VectorXd(-p.c) : p.c;
  const double cmax = m > 0 ? cost.cwiseAbs().maxCoeff() : 0.0;
  const double cost_scale = cmax > 0.0 ? 1.0 / cmax : 1.0;
  cost *= cost_scale;

  BoundedSimplex simplex(std::move(a), std::move(b), p.lower, p.upper, options);

  auto map_duals = [&](const Eigen::VectorXd& internal, double scale, double sign) {
    for (Eigen::Index k = 0; k < r; ++k) {
      const auto src = static_cast<Eigen::Index>(kept[static_cast<std::size_t>(k)]);
      out.duals[src] = sign * internal[k] * simplex.row_sign()[k] * row_scale[k] / scale;
    }
  };

  if (!simplex.phase_one()) {
    out.status = LpStatus::Infeasible;
    out.iterations = simplex.iterations();
    map_duals(simplex.multipliers(), 1.0, 1.0);
    return out;
  }
  const bool bounded = simplex.phase_two(cost);
  out.iterations = simplex.iterations();
  if (!bounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.w = simplex.structural();
  out.objective = p.c.dot(out.w);
  out.max_residual = p.a.rows() > 0 ? (p.a * out.w - p.b).cwiseAbs().maxCoeff() : 0.0;
  map_duals(simplex.multipliers(), cost_scale, p.sense == Sense::Max ? -1.0 : 1.0);
  return out;
}

void write_lp_text(const LinearProgram& p, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "sense " << (p.sense == Sense::Min ? "min" : "max") << '\n';
  out << "variables " << p.c.size() << '\n';
  out << "rows " << p.a.rows() << '\n';
  out << "objective\n";
  for (Eigen::Index j = 0; j < p.c.size(); ++j) out << p.c[j] << '\n';
  out << "bounds\n";
  for (Eigen::Index j = 0; j < p.c.size(); ++j) out << p.lower[j] << ' ' << p.upper[j] << '\n';
  out << "equalities\n";
  for (Eigen::Index i = 0; i < p.a.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.a.cols(); ++j) out << p.a(i, j) << ' ';
    out << "= " << p.b[i] << '\n';
  }
  out << "end\n";
  out.precision(old_precision);
}

}  // namespace cbounds
