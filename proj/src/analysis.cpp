#include "causalbounds/analysis.hpp"

#include "causalbounds/error.hpp"
#include "causalbounds/logistic.hpp"
#include "causalbounds/quantile_balance.hpp"

namespace cbounds {

std::string_view to_string(Method m) { return m == Method::Proposed ? "Proposed" : "QB"; }

Method parse_method(std::string_view text) {
  if (text == "Proposed" || text == "proposed") return Method::Proposed;
  if (text == "QB" || text == "qb") return Method::QB;
  throw Error(ErrorCode::ParseError, "unknown method '" + std::string(text) + "'");
}

DesignBasis resolve_basis(const SensitivityConfig& cfg, std::size_t k, bool add_constant) {
  if (cfg.basis_terms.empty()) return ladder(Ladder::D1, k);
  auto basis = parse_terms(cfg.basis_terms);
  if (add_constant && !basis.contains(Term::constant())) {
    auto terms = basis.terms();
    terms.insert(terms.begin(), Term::constant());
    basis = DesignBasis(std::move(terms));
  }
  return basis;
}

AnalysisResult analyze(const Dataset& raw, const SensitivityConfig& cfg, Method method,
                       const AnalysisOptions& options) {
  cfg.validate();
  const Dataset d = options.standardize ? raw.standardized() : raw;
  AnalysisResult out;
  if (method == Method::QB) {
    if (!cfg.lambda) throw Error(ErrorCode::InvalidArgument, "quantile balancing needs an odds-ratio bound lambda");
    const auto fit = fit_mar_propensity(d);
    QbOptions qb;
    qb.folds = options.qb_folds;
    qb.seed = cfg.seed;
    if (options.qb_delta_box) qb.delta = cfg.delta;
    auto r = qb_bounds(d, fit.ehat, *cfg.lambda, qb, options.solver);
    out.bounds = std::move(r.bounds);
    out.tau_lower = r.tau_lower;
    out.tau_upper = r.tau_upper;
    return out;
  }
  const auto basis = resolve_basis(cfg, d.k(), options.add_constant);
  // The bespoke D4 columns are defined on the untransformed covariates.
  const CustomColumns custom = uses_d4_columns(basis) ? d4_custom_columns(raw) : CustomColumns{};
  const auto g = expand(basis, d, custom);
  if (cfg.lambda) {
    const auto fit = fit_mar_propensity(d);
    out.bounds = solve_bounds(d, g, cfg, fit.ehat, options.solver);
  } else {
    out.bounds = solve_bounds(d, g, cfg, options.solver);
  }
  return out;
}

}  // namespace cbounds
