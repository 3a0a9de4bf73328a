#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace clk::stats {

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval for `hits` successes out of `trials` at normal
// quantile z.
Interval wilson(std::int64_t hits, std::int64_t trials, double z = 1.96);

// Upper tail P(chi^2_dof > x).
double chi_square_sf(double x, int dof);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Pearson goodness-of-fit for observed counts against expected counts; bins
// with expected count below `min_expected` are pooled into their neighbour.
ChiSquare chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                         double min_expected = 5.0);

// Streaming mean and variance (Welford).
class Accumulator {
public:
  void add(double x);
  void merge(const Accumulator& o);
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased
  double std_error() const;

private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KolmogorovSmirnov {
  double statistic = 0.0;
  double p_value = 1.0;
};
KolmogorovSmirnov ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic Kolmogorov distribution tail Q_KS(lambda).
double kolmogorov_sf(double lambda);

// CDF of the Maxwellian speed distribution at temperature T.
double maxwell_speed_cdf(double s, double temperature);

}  // namespace clk::stats
