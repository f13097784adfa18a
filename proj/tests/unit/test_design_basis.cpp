#include <doctest.h>

#include <algorithm>

#include "causalbounds/design_basis.hpp"
#include "causalbounds/error.hpp"

using namespace cbounds;

namespace {

ErrorCode parse_error(const std::vector<std::string>& spec) {
  try {
    parse_terms(spec);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

Dataset one_row_pair(double a, double b) {
  Eigen::MatrixXd x(2, 2);
  x << a, b, 1, 1;
  Eigen::VectorXd z(2);
  z << 1, 0;
  return Dataset(Eigen::VectorXd::Zero(2), z, x);
}

}  // namespace

TEST_CASE("parse_terms examples") {
  CHECK(parse_terms({"1", "x1", "x1^2"}).dimension() == 3);
  CHECK(parse_error({"x2*x1", "x1*x2"}) == ErrorCode::DuplicateTerm);
  CHECK(parse_error({"x1^0"}) == ErrorCode::ParseError);
}

TEST_CASE("parse_terms rejects malformed tokens") {
  CHECK(parse_error({"y"}) == ErrorCode::ParseError);
  CHECK(parse_error({"x0"}) == ErrorCode::ParseError);
  CHECK(parse_error({"x1^"}) == ErrorCode::ParseError);
  CHECK(parse_error({"x1^1.5"}) == ErrorCode::ParseError);
  CHECK(parse_error({"x1**x2"}) == ErrorCode::ParseError);
  CHECK(parse_error({"2"}) == ErrorCode::ParseError);
  CHECK(parse_error({"custom:"}) == ErrorCode::ParseError);
  CHECK(parse_error({}) == ErrorCode::InvalidArgument);
}

TEST_CASE("term normalisation sorts factors and merges powers") {
  CHECK(parse_term("x3*x1^2").label() == "x1^2*x3");
  CHECK(parse_term("x1*x1").label() == "x1^2");
  CHECK(parse_term(" x2 * x1 ").label() == "x1*x2");
  CHECK(parse_error({"x1^2", "x1*x1"}) == ErrorCode::DuplicateTerm);
  CHECK(parse_term("x1^2*x2").degree() == 3);
}

TEST_CASE("the constant term is moved to column one") {
  const auto b = parse_terms({"x1", "1", "x2"});
  CHECK(b.labels() == std::vector<std::string>{"1", "x1", "x2"});
}

TEST_CASE("expand examples") {
  const auto d = one_row_pair(2, 3);
  const auto g = expand(parse_terms({"1", "x1", "x1*x2"}), d);
  CHECK(g.g(0, 0) == 1.0);
  CHECK(g.g(0, 1) == 2.0);
  CHECK(g.g(0, 2) == 6.0);
  CHECK(g.column_labels == std::vector<std::string>{"1", "x1", "x1*x2"});

  const auto g2 = expand(parse_terms({"x1^2"}), one_row_pair(-3, 0));
  CHECK(g2.g(0, 0) == 9.0);
}

TEST_CASE("expand raises UnknownCovariate for indices beyond K") {
  const auto d = one_row_pair(1, 2);
  try {
    expand(parse_terms({"1", "x3"}), d);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownCovariate);
  }
  try {
    expand(parse_terms({"custom:nothing"}), d);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownCovariate);
  }
}

TEST_CASE("constant column is exactly ones") {
  const auto d = one_row_pair(0.3, -7);
  const auto g = expand(parse_terms({"1"}), d);
  CHECK(g.g.col(0) == Eigen::VectorXd::Ones(2));
}

TEST_CASE("ladder dimensions") {
  CHECK(ladder(Ladder::D1, 4).dimension() == 9);
  CHECK(ladder(Ladder::D2, 4).dimension() == 15);
  CHECK(ladder(Ladder::D1, 1).dimension() == 3);
  CHECK(ladder(Ladder::D3, 4).dimension() == 19);
  CHECK(ladder(Ladder::D4, 4).dimension() == 29);
  const auto d1 = ladder(Ladder::D1, 4).labels();
  CHECK(d1 == std::vector<std::string>{"1", "x1", "x2", "x3", "x4", "x1^2", "x2^2", "x3^2", "x4^2"});
}

TEST_CASE("ladder levels are nested") {
  for (std::size_t k = 1; k <= 5; ++k) {
    const Ladder levels[] = {Ladder::D1, Ladder::D2, Ladder::D3, Ladder::D4};
    for (int i = 0; i + 1 < 4; ++i) {
      const auto small = ladder(levels[i], k);
      const auto big = ladder(levels[i + 1], k);
      for (const auto& t : small.terms()) CHECK(big.contains(t));
    }
  }
}

TEST_CASE("D4 bespoke columns") {
  Eigen::MatrixXd x(2, 4);
  x << 1, 2, 3, 2, 0.5, -1, 1.5, 1;
  Eigen::VectorXd z(2);
  z << 1, 0;
  const Dataset d(Eigen::VectorXd::Zero(2), z, x);
  const auto cols = d4_custom_columns(d);
  // unit 0: x4^3 (x3 - x2) (x1 + 1.5 x2) = 8 * 1 * 4 = 32; ratio divides by x1 - x3 = -2
  CHECK(cols.at("d4_product")[0] == doctest::Approx(32.0));
  CHECK(cols.at("d4_ratio")[0] == doctest::Approx(-16.0));
  CHECK(uses_d4_columns(ladder(Ladder::D4, 4)));
  CHECK_FALSE(uses_d4_columns(ladder(Ladder::D3, 4)));
  const auto g = expand(ladder(Ladder::D4, 4), d, cols);
  CHECK(g.g.cols() == 29);

  Eigen::MatrixXd bad = x;
  bad(1, 2) = bad(1, 0);  // x3 == x1
  try {
    d4_custom_columns(Dataset(Eigen::VectorXd::Zero(2), z, bad));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteValue);
  }
}

TEST_CASE("split_term_list and parse_ladder") {
  CHECK(split_term_list("1, x1,x2") == std::vector<std::string>{"1", "x1", "x2"});
  CHECK(split_term_list("").empty());
  CHECK(parse_ladder("D3") == Ladder::D3);
  CHECK_THROWS_AS(parse_ladder("D5"), Error);
}
