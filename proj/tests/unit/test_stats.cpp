#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "epkit/stats.hpp"
#include "epkit/synth.hpp"
#include "helpers.hpp"
#include "oracles/oracles.hpp"

using namespace epkit;

namespace {

template <std::size_t N>
std::vector<double> vec(const double (&a)[N]) {
  return {a, a + N};
}

void check_sw(std::span<const double> x, double w, double p) {
  const auto r = shapiro_wilk(x);
  CHECK(r.test_name == "shapiro-wilk");
  CHECK(r.n == x.size());
  CHECK(r.statistic == doctest::Approx(w).epsilon(1e-5));
  CHECK(r.p_value == doctest::Approx(p).epsilon(1e-3).scale(1e-6));
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("shapiro-wilk against the reference") {
    check_sw(vec(oracle::k_sw3_x), oracle::k_sw3_w, oracle::k_sw3_p);
    check_sw(vec(oracle::k_sw5_x), oracle::k_sw5_w, oracle::k_sw5_p);
    check_sw(vec(oracle::k_sw11_x), oracle::k_sw11_w, oracle::k_sw11_p);
    check_sw(vec(oracle::k_sw20_x), oracle::k_sw20_w, oracle::k_sw20_p);
    check_sw(vec(oracle::k_sw50_x), oracle::k_sw50_w, oracle::k_sw50_p);
  }

  TEST_CASE("shapiro-wilk at normal quantiles") {
    const boost::math::normal_distribution<double> nd;
    std::vector<double> x;
    for (int i = 1; i <= 9; ++i) x.push_back(boost::math::quantile(nd, (i - 0.375) / 9.25));
    const auto r = shapiro_wilk(x);
    CHECK(r.statistic > 0.98);
    CHECK(r.p_value > 0.5);
  }

  TEST_CASE("shapiro-wilk power against exponential samples") {
    // Monte Carlo rejection rates of the reference implementation, 20000 draws.
    constexpr double k_ref_rate_01 = 0.6309;
    constexpr double k_ref_rate_05 = 0.8365;
    constexpr int trials = 2000;
    Rng rng(31);
    int at01 = 0, at05 = 0;
    for (int trial = 0; trial < trials; ++trial) {
      std::vector<double> x(20);
      for (auto& v : x) v = -std::log(rng.uniform());
      const double p = shapiro_wilk(x).p_value;
      at01 += p < 0.01;
      at05 += p < 0.05;
    }
    CHECK(at01 / double(trials) == doctest::Approx(k_ref_rate_01).epsilon(0.04 / k_ref_rate_01));
    CHECK(at05 / double(trials) == doctest::Approx(k_ref_rate_05).epsilon(0.03 / k_ref_rate_05));
  }

  TEST_CASE("shapiro-wilk is location and scale invariant") {
    auto x = vec(oracle::k_sw20_x);
    const double w = shapiro_wilk(x).statistic;
    for (auto& v : x) v = 3.5 * v - 120.0;
    CHECK(shapiro_wilk(x).statistic == doctest::Approx(w).epsilon(1e-12));
  }

  TEST_CASE("shapiro-wilk sample size") {
    CHECK_EPKIT_ERROR(shapiro_wilk(std::vector<double>{1.0, 2.0}), ErrorCode::SampleTooSmall);
    CHECK_EPKIT_ERROR(shapiro_wilk(std::vector<double>(51, 1.0)), ErrorCode::SampleTooLarge);
    CHECK_EPKIT_ERROR(shapiro_wilk(std::vector<double>{2.0, 2.0, 2.0, 2.0}), ErrorCode::ZeroVariance);
  }

  TEST_CASE("t distribution tails") {
    CHECK(student_t_cdf(-1.5, 7) == doctest::Approx(oracle::k_tcdf_m1p5_df7).epsilon(1e-10));
    CHECK(student_t_sf(2.2, 3) == doctest::Approx(oracle::k_tsf_2p2_df3).epsilon(1e-10));
    CHECK(student_t_sf(40.0, 8) > 0.0);
    CHECK(student_t_cdf(-40.0, 8) == doctest::Approx(student_t_sf(40.0, 8)).epsilon(1e-10));
  }

  TEST_CASE("paired and one-sample t against the reference") {
    const auto a = vec(oracle::k_t_a);
    const auto b = vec(oracle::k_t_b);
    struct Row {
      Alternative alt;
      double t_rel, p_rel, t1, p1;
    };
    const Row rows[] = {
        {Alternative::two_sided, oracle::k_trel_two_sided_t, oracle::k_trel_two_sided_p, oracle::k_t1_two_sided_t, oracle::k_t1_two_sided_p},
        {Alternative::less, oracle::k_trel_less_t, oracle::k_trel_less_p, oracle::k_t1_less_t, oracle::k_t1_less_p},
        {Alternative::greater, oracle::k_trel_greater_t, oracle::k_trel_greater_p, oracle::k_t1_greater_t, oracle::k_t1_greater_p},
    };
    for (const auto& row : rows) {
      CAPTURE(to_string(row.alt));
      const auto rel = t_test(a, b, TMode::paired, row.alt);
      CHECK(rel.test_name == "paired-t");
      CHECK(rel.statistic == doctest::Approx(row.t_rel).epsilon(1e-10));
      CHECK(rel.p_value == doctest::Approx(row.p_rel).epsilon(1e-8));
      CHECK(*rel.df == 8.0);
      CHECK(rel.tails() == (row.alt == Alternative::two_sided ? "two" : "one"));
      const auto one = t_test(a, {}, TMode::one_sample, row.alt);
      CHECK(one.test_name == "one-sample-t");
      CHECK(one.statistic == doctest::Approx(row.t1).epsilon(1e-10));
      CHECK(one.p_value == doctest::Approx(row.p1).epsilon(1e-8).scale(1e-300));
    }
  }

  TEST_CASE("paired t on hand-computed differences") {
    const std::vector<double> d{1.0, 2.0, 3.0}, zero(3, 0.0);
    const auto r = t_test(d, zero, TMode::paired);
    CHECK(r.statistic == doctest::Approx(3.464).epsilon(0.001 / 3.464));
    CHECK(r.statistic == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));
    CHECK(*r.df == 2.0);
    CHECK(r.p_value == doctest::Approx(0.0742).epsilon(0.0005 / 0.0742));
    CHECK(r.n == 3);
  }

  TEST_CASE("paired t equals one-sample t on differences") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> a(9), b(9), diff(9);
      for (std::size_t i = 0; i < 9; ++i) {
        a[i] = rng.normal(57.0, 12.0);
        b[i] = rng.normal(35.0, 8.0);
        diff[i] = a[i] - b[i];
      }
      for (auto alt : {Alternative::two_sided, Alternative::less, Alternative::greater}) {
        const auto p = t_test(a, b, TMode::paired, alt);
        const auto o = one_sample_t(diff, alt);
        CHECK(p.statistic == o.statistic);
        CHECK(p.p_value == o.p_value);
      }
    }
  }

  TEST_CASE("t test errors") {
    const std::vector<double> same(4, 2.5), one{1.0}, two{1.0, 2.0}, three{1.0, 2.0, 3.0};
    CHECK_EPKIT_ERROR(t_test(same, std::vector<double>(4, 0.5), TMode::paired), ErrorCode::ZeroVariance);
    CHECK_EPKIT_ERROR(one_sample_t(same), ErrorCode::ZeroVariance);
    CHECK_EPKIT_ERROR(t_test(two, three, TMode::paired), ErrorCode::LengthMismatch);
    CHECK_EPKIT_ERROR(one_sample_t(one), ErrorCode::SampleTooSmall);
  }

  TEST_CASE("p values stay in range and do not underflow") {
    std::vector<double> a(30), b(30);
    for (std::size_t i = 0; i < 30; ++i) {
      a[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
      b[i] = 3.0 + 0.01 * static_cast<double>(i % 5);
    }
    const auto r = t_test(a, b, TMode::paired, Alternative::less);
    CHECK(r.p_value > 0.0);
    CHECK(r.p_value < 1e-7);
    CHECK(t_test(a, b, TMode::paired, Alternative::greater).p_value <= 1.0);
  }

  TEST_CASE("exact rank-sum against the reference") {
    const auto a = vec(oracle::k_rs_a), b = vec(oracle::k_rs_b);
    const auto two = rank_sum(a, b);
    CHECK(two.test_name == "rank-sum-exact");
    CHECK(two.statistic == oracle::k_rs_two_sided_u);
    CHECK(two.p_value == doctest::Approx(oracle::k_rs_two_sided_p).epsilon(1e-12));
    CHECK(rank_sum(a, b, Alternative::less).p_value == doctest::Approx(oracle::k_rs_less_p).epsilon(1e-12));
    CHECK(rank_sum(a, b, Alternative::greater).p_value == doctest::Approx(oracle::k_rs_greater_p).epsilon(1e-12));
  }

  TEST_CASE("exact rank-sum with ties against enumeration") {
    const auto a = vec(oracle::k_rst_a), b = vec(oracle::k_rst_b);
    CHECK(rank_sum(a, b).statistic == oracle::k_rst_u);
    CHECK(rank_sum(a, b, Alternative::less).p_value == doctest::Approx(oracle::k_rst_less_p).epsilon(1e-12));
    CHECK(rank_sum(a, b, Alternative::greater).p_value == doctest::Approx(oracle::k_rst_greater_p).epsilon(1e-12));
    CHECK(rank_sum(a, b).p_value == doctest::Approx(oracle::k_rst_two_sided_p).epsilon(1e-12));
  }

  TEST_CASE("normal rank-sum against the reference") {
    const auto a = vec(oracle::k_rsa_a), b = vec(oracle::k_rsa_b);
    REQUIRE(static_cast<double>(a.size() * b.size()) > kExactRankSumLimit);
    const auto two = rank_sum(a, b);
    CHECK(two.test_name == "rank-sum-normal");
    CHECK(two.statistic == oracle::k_rsa_two_sided_u);
    CHECK(two.p_value == doctest::Approx(oracle::k_rsa_two_sided_p).epsilon(1e-9));
    CHECK(rank_sum(a, b, Alternative::less).p_value == doctest::Approx(oracle::k_rsa_less_p).epsilon(1e-9));
    CHECK(rank_sum(a, b, Alternative::greater).p_value == doctest::Approx(oracle::k_rsa_greater_p).epsilon(1e-9));
  }

  TEST_CASE("rank-sum hand cases") {
    const std::vector<double> a{1.0, 2.0}, b{3.0, 4.0};
    const auto r = rank_sum(a, b);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0 / 3.0);
    const std::vector<double> same{2.0, 5.0, 7.0};
    CHECK(rank_sum(same, same).p_value == 1.0);
    CHECK_EPKIT_ERROR(rank_sum(std::vector<double>{}, b), ErrorCode::EmptySample);
  }

  TEST_CASE("rank-sum conventions") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<double> a(7), b(9);
      for (auto& v : a) v = std::round(rng.normal(0.0, 2.0));
      for (auto& v : b) v = std::round(rng.normal(1.0, 2.0));
      const auto less = rank_sum(a, b, Alternative::less);
      const auto greater = rank_sum(a, b, Alternative::greater);
      const auto two = rank_sum(a, b);
      CHECK(two.p_value == doctest::Approx(std::min(1.0, 2.0 * std::min(less.p_value, greater.p_value))));
      const auto swapped = rank_sum(b, a);
      CHECK(swapped.statistic == 63.0 - two.statistic);
      CHECK(swapped.p_value == doctest::Approx(two.p_value).epsilon(1e-12));
      CHECK(rank_sum(b, a, Alternative::greater).p_value == doctest::Approx(less.p_value).epsilon(1e-12));
      std::vector<double> ta = a, tb = b;
      for (auto& v : ta) v = std::exp(v / 3.0) + 2.0 * v;
      for (auto& v : tb) v = std::exp(v / 3.0) + 2.0 * v;
      CHECK(rank_sum(ta, tb).p_value == doctest::Approx(two.p_value).epsilon(1e-12));
      CHECK(rank_sum(ta, tb, Alternative::less).p_value == doctest::Approx(less.p_value).epsilon(1e-12));
    }
  }

  TEST_CASE("per-pulse onset samples separate strongly") {
    Rng rng(5);
    std::vector<double> dcr(30), acep(30);
    for (auto& v : dcr) v = rng.normal(4.25, 0.30);
    for (auto& v : acep) v = rng.normal(4.96, 0.38);
    CHECK(rank_sum(dcr, acep, Alternative::two_sided).p_value < 1e-3);
    CHECK(rank_sum(dcr, acep, Alternative::less).p_value < 1e-3);
  }

  TEST_CASE("patient-7-style onset samples reach the 1e-7 range") {
    Rng rng(7);
    std::vector<double> dcr(61), acep(61);
    for (auto& v : dcr) v = rng.normal(5.40, 1.91);
    for (auto& v : acep) v = rng.normal(7.28, 1.64);
    const auto r = rank_sum(dcr, acep, Alternative::two_sided);
    CHECK(r.test_name == "rank-sum-normal");
    CHECK(r.p_value > 1e-9);
    CHECK(r.p_value < 1e-5);
  }

  TEST_CASE("regression") {
    const std::vector<double> x{0.0, 1.0}, y{1.0, 3.0};
    const auto r = linear_regression(x, y);
    CHECK(r.slope == 2.0);
    CHECK(r.intercept == 1.0);
    CHECK(r.r_squared == 1.0);
    CHECK(r.n == 2);
    const auto flat = linear_regression(std::vector<double>{1.0, 2.0, 5.0}, std::vector<double>{4.0, 4.0, 4.0});
    CHECK(flat.slope == 0.0);
    CHECK(flat.r_squared == 0.0);
    const auto ref = linear_regression(vec(oracle::k_reg_x), vec(oracle::k_reg_y));
    CHECK(ref.slope == doctest::Approx(oracle::k_reg_slope).epsilon(1e-12));
    CHECK(ref.intercept == doctest::Approx(oracle::k_reg_intercept).epsilon(1e-12));
    CHECK(ref.r_squared == doctest::Approx(oracle::k_reg_r2).epsilon(1e-12));
    CHECK_EPKIT_ERROR(linear_regression(std::vector<double>{2.0, 2.0}, std::vector<double>{1.0, 3.0}), ErrorCode::DegenerateX);
    CHECK_EPKIT_ERROR(linear_regression(std::vector<double>{1.0}, std::vector<double>{1.0}), ErrorCode::LengthMismatch);
    CHECK_EPKIT_ERROR(linear_regression(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}), ErrorCode::LengthMismatch);
  }

  TEST_CASE("regression residuals are orthogonal to x") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> x(9), y(9);
      for (std::size_t i = 0; i < 9; ++i) {
        x[i] = rng.normal(-150.0, 40.0);
        y[i] = 0.041 * x[i] + 38.46 + rng.normal(0.0, 5.0);
      }
      const auto r = linear_regression(x, y);
      double dot = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < 9; ++i) {
        const double e = y[i] - (r.slope * x[i] + r.intercept);
        dot += e * x[i];
        scale += std::abs(y[i] * x[i]);
      }
      CHECK(std::abs(dot) <= 1e-9 * scale);
      CHECK(r.r_squared >= 0.0);
      CHECK(r.r_squared <= 1.0);
    }
  }
}
