#include "epkit/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "epkit/error.hpp"

namespace epkit {

namespace {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// c[0] + c[1] x + c[2] x^2 + ...
template <std::size_t N>
double poly(const double (&c)[N], double x) {
  double r = 0.0;
  for (std::size_t i = N; i-- > 0;) r = r * x + c[i];
  return r;
}

double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Midranks (1-based) of the pooled sample, plus the tie groups' sizes.
std::vector<double> midranks(std::span<const double> pooled, std::vector<std::size_t>& tie_sizes) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::string_view to_string(Alternative alt) noexcept {
  switch (alt) {
    case Alternative::two_sided: return "two-sided";
    case Alternative::less: return "less";
    case Alternative::greater: return "greater";
  }
  return "two-sided";
}

double student_t_cdf(double t, double df) {
  boost::math::students_t dist(df);
  return boost::math::cdf(dist, t);
}

double student_t_sf(double t, double df) {
  boost::math::students_t dist(df);
  return boost::math::cdf(boost::math::complement(dist, t));
}

TestResult shapiro_wilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3) throw Error(ErrorCode::SampleTooSmall, "Shapiro-Wilk needs at least 3 values");
  if (n > 50) throw Error(ErrorCode::SampleTooLarge, "Shapiro-Wilk limited to 50 values");

  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  if (x.back() - x.front() < 1e-19 * std::max(1.0, std::abs(x.front()))) {
    throw Error(ErrorCode::ZeroVariance, "all values identical");
  }

  // Coefficients a[0..half-1] for the smallest/largest order-statistic pairs.
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  const double an = static_cast<double>(n);
  if (n == 3) {
    a[0] = std::numbers::sqrt2 / 2.0;
  } else {
    static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
    static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    boost::math::normal standard;
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      m[i] = boost::math::quantile(standard, (static_cast<double>(i + 1) - 0.375) / (an + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, rsn) - m[0] / ssumm2;
    std::size_t first = 1;
    double fac;
    if (n > 5) {
      const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[1] = a2;
      first = 2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
  }

  const double xm = mean(x);
  double ssq = 0.0;
  for (double v : x) ssq += (v - xm) * (v - xm);
  double num = 0.0;
  for (std::size_t i = 0; i < half; ++i) num += a[i] * (x[n - 1 - i] - x[i]);
  double w = std::min(1.0, num * num / ssq);

  double p;
  if (n == 3) {
    constexpr double pi6 = 6.0 / std::numbers::pi;
    constexpr double stqr = std::numbers::pi / 3.0;
    p = std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
  } else {
    static constexpr double g[] = {-2.273, 0.459};
    static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
    static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
    static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
    double y = std::log(1.0 - w);
    double mu, sigma;
    if (n <= 11) {
      const double gamma = poly(g, an);
      if (y >= gamma) {
        p = 1e-99;
        return {"shapiro-wilk", w, p, std::nullopt, Alternative::two_sided, n};
      }
      y = -std::log(gamma - y);
      mu = poly(c3, an);
      sigma = std::exp(poly(c4, an));
    } else {
      const double xx = std::log(an);
      mu = poly(c5, xx);
      sigma = std::exp(poly(c6, xx));
    }
    p = normal_sf((y - mu) / sigma);
  }
  return {"shapiro-wilk", w, std::clamp(p, 0.0, 1.0), std::nullopt, Alternative::two_sided, n};
}

TestResult one_sample_t(std::span<const double> x, Alternative alternative) {
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::SampleTooSmall, "t test needs at least 2 values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw Error(ErrorCode::ZeroVariance, "sample variance is zero");
  const double t = m / (sd / std::sqrt(static_cast<double>(n)));
  const double df = static_cast<double>(n - 1);
  double p = 1.0;
  switch (alternative) {
    case Alternative::two_sided: p = std::min(1.0, 2.0 * student_t_sf(std::abs(t), df)); break;
    case Alternative::less: p = student_t_cdf(t, df); break;
    case Alternative::greater: p = student_t_sf(t, df); break;
  }
  return {"one-sample-t", t, p, df, alternative, n};
}

TestResult t_test(std::span<const double> a, std::span<const double> b, TMode mode, Alternative alternative) {
  if (mode == TMode::one_sample) return one_sample_t(a, alternative);
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "paired samples differ in length");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  TestResult r = one_sample_t(d, alternative);
  r.test_name = "paired-t";
  return r;
}

TestResult rank_sum(std::span<const double> a, std::span<const double> b, Alternative alternative) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySample, "rank-sum needs two non-empty samples");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::size_t> ties;
  const auto ranks = midranks(pooled, ties);
  const double ra = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(na), 0.0);
  const double u = ra - static_cast<double>(na * (na + 1)) / 2.0;

  double p_less, p_greater;
  std::string name;
  if (static_cast<double>(na) * static_cast<double>(nb) <= kExactRankSumLimit) {
    name = "rank-sum-exact";
    // Doubled midranks are integers; count subsets of size na by doubled rank sum.
    std::vector<std::size_t> score(n);
    std::size_t max_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      score[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
      max_sum += score[i];
    }
    std::vector<std::vector<double>> ways(na + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = std::min(i + 1, na); k >= 1; --k) {
        auto& dst = ways[k];
        const auto& src = ways[k - 1];
        for (std::size_t s = max_sum; s >= score[i]; --s) {
          if (src[s - score[i]] != 0.0) dst[s] += src[s - score[i]];
          if (s == score[i]) break;
        }
      }
    }
    const auto observed = static_cast<std::size_t>(std::llround(2.0 * ra));
    const auto& dist = ways[na];
    const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    double le = 0.0, ge = 0.0;
    for (std::size_t s = 0; s <= max_sum; ++s) {
      if (s <= observed) le += dist[s];
      if (s >= observed) ge += dist[s];
    }
    p_less = le / total;
    p_greater = ge / total;
  } else {
    name = "rank-sum-normal";
    const double dna = static_cast<double>(na), dnb = static_cast<double>(nb), dn = static_cast<double>(n);
    double tie_term = 0.0;
    for (std::size_t t : ties) {
      const double dt = static_cast<double>(t);
      tie_term += dt * dt * dt - dt;
    }
    const double mu = dna * dnb / 2.0;
    const double var = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (!(var > 0.0)) {
      p_less = p_greater = 1.0;
    } else {
      const double sd = std::sqrt(var);
      p_less = normal_cdf((u + 0.5 - mu) / sd);
      p_greater = normal_sf((u - 0.5 - mu) / sd);
    }
  }

  double p = 1.0;
  switch (alternative) {
    case Alternative::two_sided: p = std::min(1.0, 2.0 * std::min(p_less, p_greater)); break;
    case Alternative::less: p = std::min(1.0, p_less); break;
    case Alternative::greater: p = std::min(1.0, p_greater); break;
  }
  return {name, u, p, std::nullopt, alternative, n};
}

RegressionResult linear_regression(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::LengthMismatch, "regression needs equal-length samples of at least 2 points");
  }
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateX, "x is constant");
  RegressionResult r;
  r.n = x.size();
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 0.0;
  return r;
}

}  // namespace epkit
