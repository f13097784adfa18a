#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "causalbounds/dataset.hpp"

namespace cbounds {

/// One covariate raised to a positive power; covariate is zero-based.
struct Factor {
  std::size_t covariate = 0;
  int power = 1;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// A single column of g(X): the constant, a monomial in the covariates, or a
/// caller-supplied column referenced as `custom:<name>`.
class Term {
 public:
  enum class Kind { Constant, Monomial, Custom };

  static Term constant();
  static Term monomial(std::vector<Factor> factors);
  static Term custom(std::string name);

  Kind kind() const noexcept { return kind_; }
  const std::vector<Factor>& factors() const noexcept { return factors_; }
  const std::string& custom_name() const noexcept { return custom_name_; }
  int degree() const noexcept;

  /// Canonical spelling: factors sorted by covariate, powers merged.
  std::string label() const;

  friend bool operator==(const Term&, const Term&) = default;

 private:
  Kind kind_ = Kind::Constant;
  std::vector<Factor> factors_;
  std::string custom_name_;
};

/// Accepts `1`, `xj`, `xj^p` (p >= 2), products such as `x1^2*x3`, and
/// `custom:<name>`. Whitespace is ignored.
Term parse_term(std::string_view text);

class DesignBasis {
 public:
  explicit DesignBasis(std::vector<Term> terms);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t dimension() const noexcept { return terms_.size(); }
  std::vector<std::string> labels() const;
  bool contains(const Term& t) const;

 private:
  std::vector<Term> terms_;
};

/// Parse and normalise a term list. The constant term, when present, is moved
/// to the first position; the remaining terms keep their input order.
DesignBasis parse_terms(const std::vector<std::string>& spec);

/// Split "1,x1,x2" into its comma separated pieces.
std::vector<std::string> split_term_list(std::string_view list);

enum class Ladder { D1, D2, D3, D4 };

std::string_view to_string(Ladder level);
Ladder parse_ladder(std::string_view text);

// D1: constant, linear and quadratic terms. D2 adds pairwise interactions.
// D3 is D1 plus cubic terms and the pairwise interactions. D4 adds quartic and
// quintic powers and the two bespoke columns custom:d4_product, custom:d4_ratio.
DesignBasis ladder(Ladder level, std::size_t k);

using CustomColumns = std::map<std::string, Eigen::VectorXd, std::less<>>;

struct BasisMatrix {
  Eigen::MatrixXd g;
  std::vector<std::string> column_labels;
};

BasisMatrix expand(const DesignBasis& basis, const Dataset& d, const CustomColumns& custom = {});

inline constexpr double kDenominatorFloor = 1e-8;

/// The two non-polynomial D4 columns built from the first four covariates:
///   d4_product = x4^3 (x3 - x2) (x1 + 1.5 x2)
///   d4_ratio   = x4^3 (x3 - x2) / (x1 - x3) * (x1 + 1.5 x2)
/// Throws NonFiniteValue when |x1 - x3| < kDenominatorFloor for any unit.
CustomColumns d4_custom_columns(const Dataset& d);

/// True when some term of the basis is a custom:d4_* slot.
bool uses_d4_columns(const DesignBasis& basis);

}  // namespace cbounds
