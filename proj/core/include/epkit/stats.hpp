#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace epkit {

enum class Alternative { two_sided, less, greater };

std::string_view to_string(Alternative alt) noexcept;

struct TestResult {
  std::string test_name;
  double statistic{0.0};
  double p_value{1.0};
  std::optional<double> df;
  Alternative alternative{Alternative::two_sided};
  std::size_t n{0};

  std::string_view tails() const noexcept { return alternative == Alternative::two_sided ? "two" : "one"; }
};

struct RegressionResult {
  double slope{0.0};
  double intercept{0.0};
  double r_squared{0.0};
  std::size_t n{0};
};

// Royston (1995) approximation, valid for 3 <= n <= 50 here.
// Throws SampleTooSmall / SampleTooLarge / ZeroVariance.
TestResult shapiro_wilk(std::span<const double> sample);

enum class TMode { paired, one_sample };

// Student t test. Paired mode tests mean(a - b) = 0, one-sample mode tests
// mean(a) = 0 (b ignored). `less` means mean difference < 0.
// Throws LengthMismatch, SampleTooSmall, ZeroVariance.
TestResult t_test(std::span<const double> a, std::span<const double> b, TMode mode,
                  Alternative alternative = Alternative::two_sided);
TestResult one_sample_t(std::span<const double> x, Alternative alternative = Alternative::two_sided);

// Student t tail probabilities, P(T <= t) and P(T >= t).
double student_t_cdf(double t, double df);
double student_t_sf(double t, double df);

inline constexpr double kExactRankSumLimit = 400.0;

// Wilcoxon-Mann-Whitney test on U_a = R_a - n_a(n_a+1)/2. Exact null
// distribution (midranks, ties allowed) when n_a * n_b <= 400, otherwise a
// tie-corrected normal approximation with continuity correction.
// `less` means a tends to be smaller than b.
// Two-sided p = min(1, 2 * min(P(U <= u), P(U >= u))).
// Throws EmptySample.
TestResult rank_sum(std::span<const double> a, std::span<const double> b,
                    Alternative alternative = Alternative::two_sided);

// Ordinary least squares y = slope * x + intercept. Throws LengthMismatch
// for unequal or < 2 points, DegenerateX for constant x.
RegressionResult linear_regression(std::span<const double> x, std::span<const double> y);

}  // namespace epkit
