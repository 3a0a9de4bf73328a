#include "clk/theorem_constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clk/error.hpp"

namespace clk::theorem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double t_star(double xi, double t_max) { return 2.0 * xi / (xi + 1.0) * t_max; }

void check_ladder_args(int l, int i, double xi, double t_max, double r_min) {
  require(i >= 1 && i <= l, "t_ladder: need 1 <= i <= l");
  require(xi > 0.0 && t_max > 0.0, "t_ladder: xi and T_M must be positive");
  require(r_min > 0.0 && r_min <= 1.0, "t_ladder: r_min must lie in (0, 1]");
}

// (1 + e)/(1 + e/2), with its limit 2 at e = inf
double eps_factor(double eps2) {
  if (std::isinf(eps2)) return 2.0;
  return (1.0 + eps2) / (1.0 + 0.5 * eps2);
}

}  // namespace

double t_ladder(int l, int i, double xi, double t_max, double r_min) {
  check_ladder_args(l, i, xi, t_max, r_min);
  const double ts = t_star(xi, t_max);
  return ts + (t_max - ts) * (1.0 - std::pow(1.0 - r_min, l - i));
}

double t_ladder_recurrence(int l, int i, double xi, double t_max, double r_min) {
  check_ladder_args(l, i, xi, t_max, r_min);
  double t = t_star(xi, t_max);
  for (int j = l; j > i; --j) t = r_min * t_max + (1.0 - r_min) * t;
  return t;
}

EtaCoefficients eta_coefficients(double r_par, double r_perp, double eps2) {
  require(eps2 > 0.0, "eta_coefficients: eps2 must be positive");
  require(r_perp > 0.0 && r_perp <= 1.0 && r_par > 0.0 && r_par < 2.0,
          "eta_coefficients: accommodation coefficients out of range");
  const double q = eps_factor(eps2);
  const double s = std::sqrt(1.0 - r_perp);
  EtaCoefficients e;
  e.eta_par = 1.0 / (1.0 - r_par + r_par * q);
  e.eta_perp = 1.0 / (s + (1.0 - s) * q);
  e.eta = std::max(e.eta_par, e.eta_perp);
  return e;
}

HypothesisReport check_hypotheses(const HypothesisInputs& in) {
  require(in.t_max > 0.0 && in.min_tw > 0.0, "check_hypotheses: temperatures must be positive");
  require(in.theta > 0.0, "check_hypotheses: theta must be positive");
  require(in.min_tw <= in.t_max, "check_hypotheses: min T_w cannot exceed T_M");
  HypothesisReport rep;
  rep.in = in;
  rep.r_condition = in.r_perp > 0.0 && in.r_perp <= 1.0 && in.r_par > 0.0 && in.r_par < 2.0;
  rep.xi = 1.0 / (4.0 * in.t_max * in.theta);
  rep.theta_condition = rep.xi > 1.0;
  rep.t_star = t_star(rep.xi, in.t_max);
  rep.ratio = in.min_tw / in.t_max;
  if (!rep.r_condition) return rep;

  const double q = in.r_par * (2.0 - in.r_par);
  rep.r_max = std::max(q, in.r_perp);
  rep.r_min = std::min(q, in.r_perp);
  rep.threshold_par = (1.0 - in.r_par) / (2.0 - in.r_par);
  const double s = std::sqrt(1.0 - in.r_perp);
  rep.threshold_perp = (s - (1.0 - in.r_perp)) / in.r_perp;
  rep.threshold = std::max(rep.threshold_par, rep.threshold_perp);
  rep.temperature_condition = rep.ratio > rep.threshold;

  // largest eps2 with ratio > threshold (1 + eps2) for each threshold; a
  // threshold <= 0 puts no constraint
  rep.eps2 = kInf;
  for (double thr : {rep.threshold_par, rep.threshold_perp})
    if (thr > 0.0) rep.eps2 = std::min(rep.eps2, rep.ratio / thr - 1.0);

  const double ts = rep.t_star;
  const double denom = ts + (in.min_tw - ts) * rep.r_max;
  rep.c_denominator_positive = denom > 0.0;
  if (rep.c_denominator_positive) {
    rep.c_tm_xi = 2.0 * ts / denom;
    rep.cal_c = 4.0 * in.t_max * (ts - in.min_tw) / (2.0 * in.min_tw * denom) + rep.c_tm_xi;
    rep.cal_c_sign = (rep.cal_c > 0.0) - (rep.cal_c < 0.0);
  }
  if (rep.temperature_condition) rep.eta = eta_coefficients(in.r_par, in.r_perp, rep.eps2);
  return rep;
}

}  // namespace clk::theorem
