#pragma once

#include <array>

namespace clk::analytics {

// |y| at or below which I0 is summed from its power series; above it the
// defining integral is evaluated with the e^{|y|} factor pulled out.
inline constexpr double kI0SeriesCutoff = 15.0;

struct I0Result {
  double value = 1.0;
  bool overflow = false;  // value saturated at DBL_MAX
};

// Modified Bessel function I0(y) = (1/pi) * int_0^pi exp(y cos phi) dphi.
I0Result bessel_i0(double y);

// e^{-|y|} I0(y); never overflows. This is what kernel evaluations use.
double bessel_i0_scaled(double y);

// sum_k (y^2/4)^k / (k!)^2, truncated once a term drops below 1e-16 of the
// partial sum. Even in y by construction.
double bessel_i0_series(double y);

// (1/pi) int_0^pi exp(|y| (cos phi - 1)) dphi by the periodic trapezoid rule,
// i.e. e^{-|y|} I0(y) from the integral representation.
double bessel_i0_scaled_integral(double y);

// Parameters of the Gaussian identities
//   (b/pi) int_{R^2} e^{(a+eps)|v|^2} e^{-b|v-w|^2} dv
//   2b int_0^inf v e^{(a+eps)v^2} e^{-b v^2} e^{-b w^2} I0(2 b v w) dv
// Both equal b/(b-a-eps) * exp((a+eps) b/(b-a-eps) |w|^2) when a + eps < b.
// `a` may be negative; the Maxwellian push-forward uses a = -1/(2 T0).
struct GaussParams {
  double a = 0.0;
  double b = 1.0;
  double eps = 0.0;
  std::array<double, 2> w{0.0, 0.0};
  int dim = 2;

  static GaussParams plane(double a, double b, double eps, double w1, double w2);
  static GaussParams half_line(double a, double b, double eps, double w);

  // b - a - eps (> 0)
  double gap() const { return b - a - eps; }
  double shift_norm2() const { return w[0] * w[0] + w[1] * w[1]; }
  // Centre b w / (b - a - eps) of the completed square.
  std::array<double, 2> center() const;
  void validate() const;
};

// Closed form of the plane integral.
double gauss_plane_integral(const GaussParams& p);
// Closed-form bound e^{-(b-a-eps)/delta^2} * gauss_plane_integral(p) for the
// part of the plane integral outside the disc |v - center| <= 1/delta.
double gauss_plane_tail(const GaussParams& p, double delta);
// Numerical value of that outer part (polar quadrature about the centre).
double gauss_plane_tail_numeric(const GaussParams& p, double delta);
// Numerical value of the whole plane integral (same quadrature, disc of radius 0).
double gauss_plane_integral_numeric(const GaussParams& p);

// Closed form of the half-line Rice integral (w >= 0).
double gauss_halfline_rice_integral(const GaussParams& p);
double gauss_halfline_rice_numeric(const GaussParams& p);

enum class Truncation {
  head,          // v in (0, delta)
  shifted_tail,  // v in (b w/(b-a-eps) + 1/delta, inf)
};

// Numerical value of the truncated half-line integral.
double gauss_halfline_truncations(const GaussParams& p, double delta, Truncation mode);
// The matching closed-form bound: delta * whole for `head`,
// e^{-(b-a-eps)/(4 delta^2)} * whole for `shifted_tail`.
double gauss_halfline_truncation_bound(const GaussParams& p, double delta, Truncation mode);

}  // namespace clk::analytics
