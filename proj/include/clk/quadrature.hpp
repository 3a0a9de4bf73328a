#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace clk::quad {

using Integrand = std::function<double(double)>;

struct Result {
  double value = 0.0;
  double error = 0.0;  // |last two Richardson-extrapolated estimates|
  int levels = 0;
};

// Trapezoid rule on [a, b], halving the step until the Richardson-corrected
// estimate changes by less than rel_tol (relative) or abs_floor (absolute).
Result romberg(const Integrand& f, double a, double b, double rel_tol = 1e-9,
               double abs_floor = 0.0, int max_levels = 22);

// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
const std::vector<std::pair<double, double>>& gauss_legendre_rule(int order);

// Composite Gauss-Legendre: `panels` equal panels of `order` points each.
// Returns (abscissa, weight) pairs mapped to [a, b].
std::vector<std::pair<double, double>> composite_gauss_legendre(double a, double b, int panels,
                                                               int order = 16);

double integrate_gl(const Integrand& f, double a, double b, int panels, int order = 16);

// Extends [lo, hi] around `peak_at` in steps of `step` until |f| falls below
// rel * |f(peak_at)| on both sides (or max_steps is reached on a side).
std::pair<double, double> truncate_range(const Integrand& f, double peak_at, double step,
                                         double lo_limit, double rel = 1e-18,
                                         int max_steps = 400);

}  // namespace clk::quad
