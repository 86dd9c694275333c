#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "npmix/cc_oracle.hpp"
#include "npmix/error.hpp"
#include "oracles.hpp"

using namespace npmix;
using namespace npmix::diagnostics;
using Catch::Approx;

namespace {

constexpr double NA = std::numeric_limits<double>::quiet_NaN();

// Σ_r ĝ(r) μ̂_{2,r} with each pattern's conditional mean of X2 written out:
// observed X2 averages for 11 and 01, the complete-case mean for 00, and the
// Nadaraya-Watson regression on complete cases averaged over 10 rows.
double four_term_mean(const ObservedSample& s, double h1) {
  const double n = static_cast<double>(s.rows());
  double sum11 = 0, sum01 = 0, n11 = 0, n01 = 0, n10 = 0, n00 = 0, sum10 = 0;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const bool o1 = s.pattern(i)[0], o2 = s.pattern(i)[1];
    if (o1 && o2) { sum11 += s.value(i, 1); ++n11; }
    if (!o1 && o2) { sum01 += s.value(i, 1); ++n01; }
    if (!o1 && !o2) ++n00;
    if (o1 && !o2) {
      ++n10;
      double num = 0, den = 0;
      for (std::size_t j = 0; j < s.rows(); ++j) {
        if (!(s.pattern(j)[0] && s.pattern(j)[1])) continue;
        const double k = testing::normal_pdf(s.value(i, 0), s.value(j, 0), h1);
        num += k * s.value(j, 1);
        den += k;
      }
      sum10 += num / den;
    }
  }
  const double mu11 = sum11 / n11;
  const double mu01 = n01 ? sum01 / n01 : 0.0;
  const double mu10 = n10 ? sum10 / n10 : 0.0;
  return (n11 / n) * mu11 + (n01 / n) * mu01 + (n00 / n) * mu11 + (n10 / n) * mu10;
}

}  // namespace

TEST_CASE("CC weights on complete data", "[cc_oracle]") {
  const auto s = ObservedSample::continuous(2, {1, 2, 3, 5, 4, 11});
  const auto kernels = testing::gaussian_kernels({1.0, 1.0});
  const auto w = cc_mean_weights(s, kernels);
  for (double o : w.omega) CHECK(o == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(cc_closed_form_mean(s, kernels) == Approx(6.0).epsilon(1e-15));
}

TEST_CASE("CC weights without 10 rows", "[cc_oracle]") {
  const auto s = ObservedSample::continuous(2, {1, 2, 3, 5, NA, 7, NA, NA, NA, NA});
  const auto w = cc_mean_weights(s, testing::gaussian_kernels({1.0, 1.0}));
  CHECK(w.n11 == 2);
  CHECK(w.n01 == 1);
  CHECK(w.n00 == 2);
  CHECK(w.n10 == 0);
  const double complete = (1.0 + 2.0 / 2.0) / 5.0;
  CHECK(w.omega[0] == Approx(complete).epsilon(1e-15));
  CHECK(w.omega[1] == Approx(complete).epsilon(1e-15));
  CHECK(w.omega[2] == Approx(0.2).epsilon(1e-15));
  CHECK(w.omega[3] == 0.0);
  for (double a : w.alpha) CHECK(a == 0.0);
}

TEST_CASE("CC weights on mixed data", "[cc_oracle]") {
  const auto s = testing::four_pattern_sample(200, 17);
  const auto kernels = testing::gaussian_kernels({0.35, 0.4});
  const auto w = cc_mean_weights(s, kernels);
  CHECK(w.n11 + w.n10 + w.n01 + w.n00 == 200);
  CHECK(w.n00 > 0);
  CHECK(w.n10 > 0);
  double total = 0.0, alpha_total = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    CHECK(w.omega[i] >= 0.0);
    if (!s.pattern(i)[1]) CHECK(w.omega[i] == 0.0);
    total += w.omega[i];
    alpha_total += w.alpha[i];
  }
  CHECK(std::abs(total - 1.0) <= 1e-12);
  CHECK(alpha_total == Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(cc_closed_form_mean(s, kernels) - four_term_mean(s, 0.35)) <= 1e-10);
}

TEST_CASE("CC mean with only 11 and 01 rows is the observed mean", "[cc_oracle]") {
  const auto s = ObservedSample::continuous(2, {1, 2, NA, 4, 3, 9, NA, -1});
  CHECK(cc_closed_form_mean(s, testing::gaussian_kernels({1.0, 1.0})) ==
        Approx((2.0 + 4.0 + 9.0 - 1.0) / 4.0).epsilon(1e-15));
}

TEST_CASE("CC oracle errors", "[cc_oracle]") {
  const auto none = ObservedSample::continuous(2, {1, NA, NA, 2});
  CHECK_THROWS_AS(cc_mean_weights(none, testing::gaussian_kernels({1.0, 1.0})), EstimationError);
  const auto d3 = ObservedSample::continuous(3, {1, 2, 3});
  CHECK_THROWS_AS(cc_mean_weights(d3, testing::gaussian_kernels({1.0, 1.0, 1.0})), ConfigError);
}

TEST_CASE("CC oracle is location equivariant and label invariant", "[cc_oracle][property]") {
  const auto s = testing::four_pattern_sample(120, 5);
  const auto kernels = testing::gaussian_kernels({0.4, 0.4});
  const double base = cc_closed_form_mean(s, kernels);

  auto shifted = s.values();
  for (std::size_t i = 0; i < s.rows(); ++i) shifted[2 * i + 1] += 3.25;
  CHECK(cc_closed_form_mean(ObservedSample::continuous(2, shifted), kernels) ==
        Approx(base + 3.25).epsilon(1e-12));

  std::vector<std::size_t> order(s.rows());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 gen(1);
  std::shuffle(order.begin(), order.end(), gen);
  const auto permuted = s.select(order);
  CHECK(cc_closed_form_mean(permuted, kernels) == Approx(base).epsilon(1e-12));
  const auto w = cc_mean_weights(s, kernels);
  const auto wp = cc_mean_weights(permuted, kernels);
  for (std::size_t k = 0; k < order.size(); ++k) {
    CHECK(wp.omega[k] == Approx(w.omega[order[k]]).epsilon(1e-12));
  }
}
