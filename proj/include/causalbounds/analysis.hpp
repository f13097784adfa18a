#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "causalbounds/bounds.hpp"
#include "causalbounds/dataset.hpp"
#include "causalbounds/design_basis.hpp"
#include "causalbounds/linprog.hpp"

namespace cbounds {

enum class Method { Proposed, QB };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

struct AnalysisOptions {
  bool standardize = false;     // centre and scale covariates before expansion
  bool add_constant = true;     // prepend the ones column when the terms omit it
  std::size_t qb_folds = 5;
  bool qb_delta_box = false;    // intersect the quantile-balancing box with the delta box
  SolverOptions solver;
};

/// The basis used for cfg: the parsed cfg.basis_terms, or the D1 ladder when
/// none are given.
DesignBasis resolve_basis(const SensitivityConfig& cfg, std::size_t k, bool add_constant = true);

struct AnalysisResult {
  BoundResult bounds;
  std::optional<double> tau_lower;
  std::optional<double> tau_upper;
};

/// Full pipeline on one dataset: optional standardisation, logistic fit when
/// an odds-ratio bound is used, basis expansion (with the D4 bespoke columns
/// when referenced) and the four programs. QB requires cfg.lambda.
AnalysisResult analyze(const Dataset& d, const SensitivityConfig& cfg, Method method,
                       const AnalysisOptions& options = {});

}  // namespace cbounds
