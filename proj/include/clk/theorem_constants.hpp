#pragma once

#include <optional>

namespace clk::theorem {

struct HypothesisInputs {
  double t_max = 1.0;  // T_M, the largest wall temperature
  double min_tw = 1.0;
  double r_perp = 1.0;
  double r_par = 1.0;
  double theta = 0.125;
};

struct EtaCoefficients {
  double eta_par = 0.0;
  double eta_perp = 0.0;
  double eta = 0.0;
};

struct HypothesisReport {
  HypothesisInputs in;

  bool r_condition = false;            // 0 < r_perp <= 1, 0 < r_par < 2
  bool theta_condition = false;        // 0 < theta < 1/(4 T_M), i.e. xi > 1
  bool temperature_condition = false;  // min T_w / T_M above both thresholds

  double ratio = 0.0;  // min T_w / T_M
  double threshold_par = 0.0;   // (1 - r_par)/(2 - r_par)
  double threshold_perp = 0.0;  // (sqrt(1 - r_perp) - (1 - r_perp))/r_perp
  double threshold = 0.0;

  double xi = 0.0;
  double t_star = 0.0;  // 2 xi/(xi + 1) T_M = T_{l,l}
  double r_min = 0.0;
  double r_max = 0.0;
  double eps2 = 0.0;  // +inf when both thresholds vanish

  double c_tm_xi = 0.0;  // C_{T_M, xi}
  bool c_denominator_positive = false;
  double cal_c = 0.0;    // the constant multiplying t in the exponent bound
  int cal_c_sign = 0;

  // Present only when the temperature condition holds.
  std::optional<EtaCoefficients> eta;

  bool holds() const { return r_condition && theta_condition && temperature_condition; }
};

// Evaluates the hypotheses and derived constants with all t-dependent slack
// set to zero. Throws DomainError for non-positive temperatures or theta, or
// min T_w > T_M.
HypothesisReport check_hypotheses(const HypothesisInputs& in);

// T_{l,i} in closed form; requires 1 <= i <= l.
double t_ladder(int l, int i, double xi, double t_max, double r_min);
// Same value by running the recurrence down from T_{l,l}.
double t_ladder_recurrence(int l, int i, double xi, double t_max, double r_min);

// eta_par, eta_perp and their maximum for a given eps2 > 0 (may be +inf).
EtaCoefficients eta_coefficients(double r_par, double r_perp, double eps2);

}  // namespace clk::theorem
