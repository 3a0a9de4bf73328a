#include "clk/analytics.hpp"

#include <cfloat>
#include <cmath>
#include <numbers>

#include "clk/error.hpp"
#include "clk/quadrature.hpp"

namespace clk::analytics {

double bessel_i0_series(double y) {
  const double q = 0.25 * y * y;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 1000; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

double bessel_i0_scaled_integral(double y) {
  const double ay = std::abs(y);
  const long n = 32 + static_cast<long>(std::ceil(8.0 * std::sqrt(ay)));
  const double h = std::numbers::pi / static_cast<double>(n);
  // endpoints: cos 0 - 1 = 0, cos pi - 1 = -2
  double sum = 0.5 * (1.0 + std::exp(-2.0 * ay));
  for (long i = 1; i < n; ++i) sum += std::exp(ay * (std::cos(static_cast<double>(i) * h) - 1.0));
  return sum * h / std::numbers::pi;
}

double bessel_i0_scaled(double y) {
  const double ay = std::abs(y);
  if (ay <= kI0SeriesCutoff) return bessel_i0_series(ay) * std::exp(-ay);
  return bessel_i0_scaled_integral(ay);
}

I0Result bessel_i0(double y) {
  const double ay = std::abs(y);
  if (ay <= kI0SeriesCutoff) return {bessel_i0_series(ay), false};
  const double scaled = bessel_i0_scaled_integral(ay);
  const double log_value = ay + std::log(scaled);
  if (log_value >= std::log(DBL_MAX)) return {DBL_MAX, true};
  return {std::exp(ay) * scaled, false};
}

GaussParams GaussParams::plane(double a, double b, double eps, double w1, double w2) {
  GaussParams p{a, b, eps, {w1, w2}, 2};
  p.validate();
  return p;
}

GaussParams GaussParams::half_line(double a, double b, double eps, double w) {
  GaussParams p{a, b, eps, {w, 0.0}, 1};
  p.validate();
  return p;
}

std::array<double, 2> GaussParams::center() const {
  const double s = b / gap();
  return {s * w[0], s * w[1]};
}

void GaussParams::validate() const {
  require(std::isfinite(a) && std::isfinite(b) && std::isfinite(eps), "GaussParams: non-finite");
  require(b > 0.0, "GaussParams: b must be positive");
  require(eps >= 0.0, "GaussParams: eps must be non-negative");
  require(a + eps < b, "GaussParams: need a + eps < b");
  require(dim == 1 || dim == 2, "GaussParams: dimension must be 1 or 2");
  if (dim == 1) require(w[0] >= 0.0 && w[1] == 0.0, "GaussParams: half-line shift must be >= 0");
}

namespace {

void require_delta(double delta) {
  require(delta > 0.0 && delta < 1.0, "truncation parameter delta must lie in (0, 1)");
}

double closed_form(const GaussParams& p) {
  p.validate();
  const double k = p.gap();
  return p.b / k * std::exp((p.a + p.eps) * p.b / k * p.shift_norm2());
}

// (b/pi) e^{(a+eps)|v|^2 - b|v-w|^2} evaluated in polar coordinates about the
// completed-square centre, integrated over rho in [rho0, inf).
double plane_polar(const GaussParams& p, double rho0) {
  p.validate();
  require(p.dim == 2, "plane integral needs a two-dimensional shift");
  const auto c = p.center();
  const double s = p.a + p.eps;
  const auto integrand = [&](double vx, double vy) {
    const double dx = vx - p.w[0], dy = vy - p.w[1];
    return std::exp(s * (vx * vx + vy * vy) - p.b * (dx * dx + dy * dy));
  };
  const auto ring = [&](double rho) {
    // periodic trapezoid in the angle, doubled until stable
    int n = 64;
    double prev = 0.0;
    for (int pass = 0; pass < 12; ++pass, n *= 2) {
      double sum = 0.0;
      const double h = 2.0 * std::numbers::pi / n;
      for (int i = 0; i < n; ++i) {
        const double phi = i * h;
        sum += integrand(c[0] + rho * std::cos(phi), c[1] + rho * std::sin(phi));
      }
      sum *= h;
      if (pass > 0 && std::abs(sum - prev) <= 1e-13 * std::abs(sum)) return rho * sum;
      prev = sum;
    }
    return rho * prev;
  };
  // radial profile decays like exp(-(b-a-eps) rho^2) about the centre
  const double k = p.gap();
  const double span = std::sqrt(50.0 / k) + 1.0;
  auto r = quad::romberg(ring, rho0, rho0 + span, 1e-11);
  return p.b / std::numbers::pi * r.value;
}

// 2b v e^{(a+eps)v^2 - b v^2 - b w^2} I0(2 b v w), with the I0 growth folded
// into the exponent.
double halfline_integrand(const GaussParams& p, double v) {
  const double y = 2.0 * p.b * v * p.w[0];
  const double expo = (p.a + p.eps - p.b) * v * v - p.b * p.w[0] * p.w[0] + y;
  return 2.0 * p.b * v * std::exp(expo) * bessel_i0_scaled(y);
}

double halfline_numeric(const GaussParams& p, double lo, double hi_start) {
  const double sigma = 1.0 / std::sqrt(2.0 * p.gap());
  const auto f = [&](double v) { return halfline_integrand(p, v); };
  const double peak_at = std::max(lo, std::max(hi_start, p.center()[0]));
  auto [r_lo, r_hi] = quad::truncate_range(f, peak_at + 0.5 * sigma, 0.5 * sigma, lo);
  (void)r_lo;
  return quad::romberg(f, lo, r_hi, 1e-11).value;
}

}  // namespace

double gauss_plane_integral(const GaussParams& p) {
  require(p.dim == 2, "gauss_plane_integral: shift must be two-dimensional");
  return closed_form(p);
}

double gauss_plane_tail(const GaussParams& p, double delta) {
  require_delta(delta);
  return std::exp(-p.gap() / (delta * delta)) * gauss_plane_integral(p);
}

double gauss_plane_tail_numeric(const GaussParams& p, double delta) {
  require_delta(delta);
  return plane_polar(p, 1.0 / delta);
}

double gauss_plane_integral_numeric(const GaussParams& p) { return plane_polar(p, 0.0); }

double gauss_halfline_rice_integral(const GaussParams& p) {
  require(p.dim == 1, "gauss_halfline_rice_integral: shift must be one-dimensional");
  return closed_form(p);
}

double gauss_halfline_rice_numeric(const GaussParams& p) {
  p.validate();
  require(p.dim == 1, "gauss_halfline_rice_numeric: shift must be one-dimensional");
  return halfline_numeric(p, 0.0, 0.0);
}

double gauss_halfline_truncations(const GaussParams& p, double delta, Truncation mode) {
  require_delta(delta);
  p.validate();
  require(p.dim == 1, "gauss_halfline_truncations: shift must be one-dimensional");
  if (mode == Truncation::head) {
    const auto f = [&](double v) { return halfline_integrand(p, v); };
    return quad::romberg(f, 0.0, delta, 1e-12).value;
  }
  const double start = p.center()[0] + 1.0 / delta;
  return halfline_numeric(p, start, start);
}

double gauss_halfline_truncation_bound(const GaussParams& p, double delta, Truncation mode) {
  require_delta(delta);
  const double whole = gauss_halfline_rice_integral(p);
  if (mode == Truncation::head) return delta * whole;
  return std::exp(-p.gap() / (4.0 * delta * delta)) * whole;
}

}  // namespace clk::analytics
