#include <doctest.h>

#include <random>

#include "causalbounds/error.hpp"
#include "causalbounds/estimators.hpp"
#include "oracles.hpp"

using namespace cbounds;

namespace {

Dataset make(std::vector<double> y, std::vector<double> z) {
  const auto n = static_cast<Eigen::Index>(y.size());
  return Dataset(Eigen::Map<Eigen::VectorXd>(y.data(), n), Eigen::Map<Eigen::VectorXd>(z.data(), n),
                 Eigen::MatrixXd::Zero(n, 1));
}

Eigen::VectorXd vec(std::vector<double> v) { return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

TEST_CASE("ipw examples") {
  auto d = make({2, 4, 0, 0}, {1, 1, 0, 0});
  CHECK(ipw(d, Eigen::VectorXd::Constant(4, 0.5)).mu1 == doctest::Approx(3.0));

  // n=2 with both units treated is not a valid Dataset; the control unit has y=0 and
  // contributes nothing to mu1, so mu1 = (5 + 5) / n with the n of the example.
  d = make({2, 4, 0}, {1, 1, 0});
  const auto est = ipw(d, vec({0.4, 0.8, 0.5}));
  CHECK(est.mu1 * 3.0 / 2.0 == doctest::Approx(5.0));

  const double delta = 1e-3;
  d = make({7, 7, 7, 0}, {1, 1, 1, 0});
  const auto c = ipw(d, Eigen::VectorXd::Constant(4, 1.0 - delta));
  CHECK(c.mu1 == doctest::Approx(7.0 * 3.0 / 4.0 / (1.0 - delta)));
}

TEST_CASE("sipw examples") {
  auto d = make({2, 4, 1}, {1, 1, 0});
  CHECK(sipw(d, vec({0.5, 0.5, 0.5})).mu1 == doctest::Approx(3.0));
  CHECK(sipw(d, vec({0.4, 0.8, 0.5})).mu1 == doctest::Approx(10.0 / 3.75));
  d = make({5, 5, 1}, {1, 1, 0});
  CHECK(sipw(d, vec({0.1, 0.9, 0.5})).mu1 == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("psi is mu1 - mu0 exactly") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int rep = 0; rep < 50; ++rep) {
    const auto d = testing::random_dataset(rng, 20, 1);
    Eigen::VectorXd e(20);
    for (auto& v : e) v = u(rng);
    for (const auto& est : {ipw(d, e), sipw(d, e)}) CHECK(est.psi == est.mu1 - est.mu0);
  }
}

TEST_CASE("sipw invariance to per-arm weight rescaling and boundedness") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int rep = 0; rep < 200; ++rep) {
    const auto d = testing::random_dataset(rng, 30, 1);
    Eigen::VectorXd e(30);
    for (auto& v : e) v = u(rng);
    const auto s = sipw(d, e);

    // Inverse weights 1/e scaled by c on the treated arm, 1/(1-e) by c' on controls.
    const double c1 = 0.5, c0 = 0.8;
    Eigen::VectorXd e2 = e;
    for (Eigen::Index i = 0; i < 30; ++i) {
      if (d.z()[i] == 1.0) {
        e2[i] = e[i] / c1;
      } else {
        e2[i] = 1.0 - (1.0 - e[i]) / c0;
      }
    }
    bool valid = true;
    for (auto v : e2) valid = valid && v > 0.0 && v < 1.0;
    if (valid) {
      const auto s2 = sipw(d, e2);
      CHECK(s2.mu1 == doctest::Approx(s.mu1).epsilon(1e-12));
      CHECK(s2.mu0 == doctest::Approx(s.mu0).epsilon(1e-12));
    }

    double lo1 = 1e300, hi1 = -1e300, lo0 = 1e300, hi0 = -1e300;
    for (Eigen::Index i = 0; i < 30; ++i) {
      if (d.z()[i] == 1.0) {
        lo1 = std::min(lo1, d.y()[i]);
        hi1 = std::max(hi1, d.y()[i]);
      } else {
        lo0 = std::min(lo0, d.y()[i]);
        hi0 = std::max(hi0, d.y()[i]);
      }
    }
    CHECK(s.mu1 >= lo1 - 1e-12);
    CHECK(s.mu1 <= hi1 + 1e-12);
    CHECK(s.mu0 >= lo0 - 1e-12);
    CHECK(s.mu0 <= hi0 + 1e-12);
  }
}

TEST_CASE("ipw equals sipw when treated weights sum to n") {
  // n = 4, two treated with 1/e summing to 4.
  const auto d = make({3, 5, 1, 2}, {1, 1, 0, 0});
  const auto e = vec({0.5, 0.5, 0.5, 0.5});
  CHECK(ipw(d, e).mu1 == doctest::Approx(sipw(d, e).mu1).epsilon(1e-15));
  CHECK(ipw(d, e).mu0 == doctest::Approx(sipw(d, e).mu0).epsilon(1e-15));
}

TEST_CASE("propensities outside (0,1) are rejected") {
  const auto d = make({1, 2}, {1, 0});
  CHECK_THROWS_AS(ipw(d, vec({0.0, 0.5})), Error);
  CHECK_THROWS_AS(sipw(d, vec({0.5})), Error);
}
