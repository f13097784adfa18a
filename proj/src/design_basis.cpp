#include "causalbounds/design_basis.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "causalbounds/error.hpp"

namespace cbounds {

namespace {

constexpr std::string_view kCustomPrefix = "custom:";
constexpr std::string_view kD4Product = "d4_product";
constexpr std::string_view kD4Ratio = "d4_ratio";

double ipow(double v, int p) {
  double out = 1.0;
  for (int i = 0; i < p; ++i) out *= v;
  return out;
}

std::size_t parse_index(std::string_view digits, std::string_view whole) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw Error(ErrorCode::ParseError, "malformed term '" + std::string(whole) + "'");
  }
  return value;
}

Factor parse_factor(std::string_view text, std::string_view whole) {
  if (text.size() < 2 || text.front() != 'x') {
    throw Error(ErrorCode::ParseError, "unknown token '" + std::string(text) + "' in '" + std::string(whole) + "'");
  }
  const auto caret = text.find('^');
  const auto index = parse_index(text.substr(1, caret == std::string_view::npos ? caret : caret - 1), whole);
  if (index == 0) throw Error(ErrorCode::ParseError, "covariates are numbered from x1");
  int power = 1;
  if (caret != std::string_view::npos) {
    const auto p = parse_index(text.substr(caret + 1), whole);
    if (p < 2 || p > 64) {
      throw Error(ErrorCode::ParseError, "power must be an integer >= 2 in '" + std::string(whole) + "'");
    }
    power = static_cast<int>(p);
  }
  return Factor{index - 1, power};
}

}  // namespace

Term Term::constant() { return Term{}; }

Term Term::monomial(std::vector<Factor> factors) {
  if (factors.empty()) throw Error(ErrorCode::ParseError, "a monomial needs at least one factor");
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return a.covariate < b.covariate; });
  std::vector<Factor> merged;
  for (const auto& f : factors) {
    if (f.power < 1) throw Error(ErrorCode::ParseError, "powers must be positive");
    if (!merged.empty() && merged.back().covariate == f.covariate) {
      merged.back().power += f.power;
    } else {
      merged.push_back(f);
    }
  }
  Term t;
  t.kind_ = Kind::Monomial;
  t.factors_ = std::move(merged);
  return t;
}

Term Term::custom(std::string name) {
  if (name.empty()) throw Error(ErrorCode::ParseError, "custom term needs a name");
  for (const char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
      throw Error(ErrorCode::ParseError, "invalid custom term name '" + name + "'");
    }
  }
  Term t;
  t.kind_ = Kind::Custom;
  t.custom_name_ = std::move(name);
  return t;
}

int Term::degree() const noexcept {
  int d = 0;
  for (const auto& f : factors_) d += f.power;
  return d;
}

std::string Term::label() const {
  switch (kind_) {
    case Kind::Constant: return "1";
    case Kind::Custom: return std::string(kCustomPrefix) + custom_name_;
    case Kind::Monomial: break;
  }
  std::string out;
  for (const auto& f : factors_) {
    if (!out.empty()) out += '*';
    out += 'x' + std::to_string(f.covariate + 1);
    if (f.power > 1) out += '^' + std::to_string(f.power);
  }
  return out;
}

Term parse_term(std::string_view text) {
  std::string compact;
  for (const char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
  }
  const std::string_view s = compact;
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty term");
  if (s == "1") return Term::constant();
  if (s.substr(0, kCustomPrefix.size()) == kCustomPrefix) {
    return Term::custom(std::string(s.substr(kCustomPrefix.size())));
  }
  std::vector<Factor> factors;
  std::size_t start = 0;
  for (;;) {
    const auto star = s.find('*', start);
    factors.push_back(parse_factor(s.substr(start, star == std::string_view::npos ? star : star - start), s));
    if (star == std::string_view::npos) break;
    start = star + 1;
  }
  return Term::monomial(std::move(factors));
}

DesignBasis::DesignBasis(std::vector<Term> terms) {
  if (terms.empty()) throw Error(ErrorCode::InvalidArgument, "a design basis needs at least one term");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (terms[i] == terms[j]) {
        throw Error(ErrorCode::DuplicateTerm, "term '" + terms[i].label() + "' appears twice");
      }
    }
  }
  std::stable_partition(terms.begin(), terms.end(),
                        [](const Term& t) { return t.kind() == Term::Kind::Constant; });
  terms_ = std::move(terms);
}

std::vector<std::string> DesignBasis::labels() const {
  std::vector<std::string> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(t.label());
  return out;
}

bool DesignBasis::contains(const Term& t) const {
  return std::find(terms_.begin(), terms_.end(), t) != terms_.end();
}

DesignBasis parse_terms(const std::vector<std::string>& spec) {
  std::vector<Term> terms;
  terms.reserve(spec.size());
  for (const auto& s : spec) terms.push_back(parse_term(s));
  return DesignBasis(std::move(terms));
}

std::vector<std::string> split_term_list(std::string_view list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = list.find(',', start);
    std::string piece(list.substr(start, comma == std::string_view::npos ? comma : comma - start));
    piece.erase(std::remove_if(piece.begin(), piece.end(), [](unsigned char c) { return std::isspace(c); }),
                piece.end());
    if (!piece.empty()) out.push_back(std::move(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view to_string(Ladder level) {
  switch (level) {
    case Ladder::D1: return "D1";
    case Ladder::D2: return "D2";
    case Ladder::D3: return "D3";
    case Ladder::D4: return "D4";
  }
  return "?";
}

Ladder parse_ladder(std::string_view text) {
  if (text == "D1" || text == "d1") return Ladder::D1;
  if (text == "D2" || text == "d2") return Ladder::D2;
  if (text == "D3" || text == "d3") return Ladder::D3;
  if (text == "D4" || text == "d4") return Ladder::D4;
  throw Error(ErrorCode::ParseError, "unknown ladder level '" + std::string(text) + "'");
}

DesignBasis ladder(Ladder level, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "ladder needs at least one covariate");
  std::vector<Term> terms{Term::constant()};
  auto powers = [&](int p) {
    for (std::size_t j = 0; j < k; ++j) terms.push_back(Term::monomial({{j, p}}));
  };
  powers(1);
  powers(2);
  if (level != Ladder::D1) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) terms.push_back(Term::monomial({{a, 1}, {b, 1}}));
    }
  }
  if (level == Ladder::D3 || level == Ladder::D4) powers(3);
  if (level == Ladder::D4) {
    powers(4);
    powers(5);
    terms.push_back(Term::custom(std::string(kD4Product)));
    terms.push_back(Term::custom(std::string(kD4Ratio)));
  }
  return DesignBasis(std::move(terms));
}

BasisMatrix expand(const DesignBasis& basis, const Dataset& d, const CustomColumns& custom) {
  const auto n = static_cast<Eigen::Index>(d.n());
  const auto& x = d.x();
  BasisMatrix out;
  out.g.resize(n, static_cast<Eigen::Index>(basis.dimension()));
  out.column_labels = basis.labels();
  for (std::size_t t = 0; t < basis.dimension(); ++t) {
    const auto& term = basis.terms()[t];
    auto col = out.g.col(static_cast<Eigen::Index>(t));
    switch (term.kind()) {
      case Term::Kind::Constant:
        col.setOnes();
        break;
      case Term::Kind::Custom: {
        const auto it = custom.find(term.custom_name());
        if (it == custom.end()) {
          throw Error(ErrorCode::UnknownCovariate, "no column bound to '" + term.label() + "'");
        }
        if (it->second.size() != n) {
          throw Error(ErrorCode::InvalidArgument, "custom column '" + term.custom_name() + "' has wrong length");
        }
        col = it->second;
        break;
      }
      case Term::Kind::Monomial:
        for (const auto& f : term.factors()) {
          if (f.covariate >= d.k()) {
            throw Error(ErrorCode::UnknownCovariate, "term '" + term.label() + "' references a covariate beyond x" +
                                                         std::to_string(d.k()));
          }
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          double v = 1.0;
          for (const auto& f : term.factors()) v *= ipow(x(i, static_cast<Eigen::Index>(f.covariate)), f.power);
          col[i] = v;
        }
        break;
    }
    if (!col.allFinite()) {
      throw Error(ErrorCode::NonFiniteValue, "term '" + term.label() + "' produced a non-finite entry");
    }
  }
  return out;
}

CustomColumns d4_custom_columns(const Dataset& d) {
  if (d.k() < 4) throw Error(ErrorCode::UnknownCovariate, "the D4 bespoke columns need four covariates");
  const auto& x = d.x();
  const auto n = static_cast<Eigen::Index>(d.n());
  Eigen::VectorXd product(n), ratio(n);
  std::size_t near_zero = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x1 = x(i, 0), x2 = x(i, 1), x3 = x(i, 2), x4 = x(i, 3);
    const double head = x4 * x4 * x4 * (x3 - x2);
    const double tail = x1 + 1.5 * x2;
    const double denom = x1 - x3;
    product[i] = head * tail;
    if (std::abs(denom) < kDenominatorFloor) {
      ++near_zero;
      ratio[i] = 0.0;
    } else {
      ratio[i] = head / denom * tail;
    }
  }
  if (near_zero > 0) {
    throw Error(ErrorCode::NonFiniteValue, std::to_string(near_zero) +
                                               " unit(s) with |x1 - x3| below the denominator floor");
  }
  return {{std::string(kD4Product), std::move(product)}, {std::string(kD4Ratio), std::move(ratio)}};
}

bool uses_d4_columns(const DesignBasis& basis) {
  return std::any_of(basis.terms().begin(), basis.terms().end(), [](const Term& t) {
    return t.kind() == Term::Kind::Custom && (t.custom_name() == kD4Product || t.custom_name() == kD4Ratio);
  });
}

}  // namespace cbounds
