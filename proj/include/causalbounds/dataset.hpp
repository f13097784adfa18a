#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cbounds {

enum class Arm { Treated, Control };

std::string_view to_string(Arm arm);

/// Observed data (Y, Z, X) for n units. Immutable once constructed; the
/// constructor enforces matching sizes, binary z with both arms present and
/// finite entries everywhere.
class Dataset {
 public:
  Dataset(Eigen::VectorXd y, Eigen::VectorXd z, Eigen::MatrixXd x,
          std::vector<std::string> names = {});

  std::size_t n() const noexcept { return static_cast<std::size_t>(y_.size()); }
  std::size_t k() const noexcept { return static_cast<std::size_t>(x_.cols()); }

  const Eigen::VectorXd& y() const noexcept { return y_; }
  const Eigen::VectorXd& z() const noexcept { return z_; }
  const Eigen::MatrixXd& x() const noexcept { return x_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool treated(std::size_t i) const { return z_[static_cast<Eigen::Index>(i)] == 1.0; }
  bool in_arm(std::size_t i, Arm arm) const { return treated(i) == (arm == Arm::Treated); }

  /// Rows in the given order; repeats allowed (bootstrap resampling).
  Dataset subset(std::span<const std::size_t> rows) const;

  /// Covariates centred and scaled to unit sample standard deviation; constant
  /// columns are only centred. Outcomes are untouched.
  Dataset standardized() const;

 private:
  Eigen::VectorXd y_;
  Eigen::VectorXd z_;
  Eigen::MatrixXd x_;
  std::vector<std::string> names_;
};

struct ArmIndices {
  std::vector<std::size_t> treated;
  std::vector<std::size_t> control;

  const std::vector<std::size_t>& of(Arm arm) const {
    return arm == Arm::Treated ? treated : control;
  }
};

ArmIndices split_arms(const Dataset& d);

Dataset load_csv(const std::filesystem::path& path);
Dataset read_csv(std::istream& in);

// Reals are written with 17 significant digits so load_csv(write_csv(d)) == d.
void write_csv(const Dataset& d, std::ostream& out);
void write_csv(const Dataset& d, const std::filesystem::path& path);

struct SensitivityConfig {
  double delta = 0.01;
  std::optional<double> lambda;
  std::vector<std::string> basis_terms;
  std::uint64_t seed = 0;
  std::size_t bootstrap_b = 1000;

  void validate() const;
};

}  // namespace cbounds
