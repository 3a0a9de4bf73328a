#include "clk/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "clk/error.hpp"

namespace clk::quad {

Result romberg(const Integrand& f, double a, double b, double rel_tol, double abs_floor,
               int max_levels) {
  require(b >= a, "romberg: empty or reversed interval");
  Result out;
  if (b == a) return out;

  double h = b - a;
  double trap = 0.5 * h * (f(a) + f(b));
  std::vector<double> prev{trap};
  for (int level = 1; level <= max_levels; ++level) {
    const long n = 1L << (level - 1);
    double mid = 0.0;
    for (long i = 0; i < n; ++i) mid += f(a + (static_cast<double>(i) + 0.5) * h);
    trap = 0.5 * (trap + h * mid);
    h *= 0.5;

    std::vector<double> row{trap};
    double factor = 4.0;
    for (std::size_t k = 1; k <= prev.size(); ++k) {
      row.push_back(row[k - 1] + (row[k - 1] - prev[k - 1]) / (factor - 1.0));
      factor *= 4.0;
    }
    const double change = std::abs(row.back() - prev.back());
    out.value = row.back();
    out.error = change;
    out.levels = level;
    if (level >= 4 && (change <= rel_tol * std::abs(out.value) || change <= abs_floor)) break;
    prev = std::move(row);
  }
  return out;
}

namespace {

std::vector<std::pair<double, double>> build_rule(int order) {
  std::vector<std::pair<double, double>> rule(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule[static_cast<std::size_t>(i)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
  }
  return rule;
}

}  // namespace

const std::vector<std::pair<double, double>>& gauss_legendre_rule(int order) {
  require(order >= 1 && order <= 128, "gauss_legendre_rule: order out of range");
  static std::mutex guard;
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  std::lock_guard lock(guard);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

std::vector<std::pair<double, double>> composite_gauss_legendre(double a, double b, int panels,
                                                               int order) {
  require(panels >= 1, "composite_gauss_legendre: need at least one panel");
  const auto& rule = gauss_legendre_rule(order);
  std::vector<std::pair<double, double>> nodes;
  nodes.reserve(static_cast<std::size_t>(panels) * rule.size());
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (const auto& [x, w] : rule)
      nodes.emplace_back(lo + 0.5 * width * (x + 1.0), 0.5 * width * w);
  }
  return nodes;
}

double integrate_gl(const Integrand& f, double a, double b, int panels, int order) {
  double sum = 0.0;
  for (const auto& [x, w] : composite_gauss_legendre(a, b, panels, order)) sum += w * f(x);
  return sum;
}

std::pair<double, double> truncate_range(const Integrand& f, double peak_at, double step,
                                         double lo_limit, double rel, int max_steps) {
  const double peak = std::abs(f(peak_at));
  double hi = peak_at;
  for (int i = 0; i < max_steps; ++i) {
    hi += step;
    if (std::abs(f(hi)) < rel * peak) break;
  }
  double lo = peak_at;
  for (int i = 0; i < max_steps && lo > lo_limit; ++i) {
    lo = std::max(lo_limit, lo - step);
    if (std::abs(f(lo)) < rel * peak) break;
  }
  return {lo, hi};
}

}  // namespace clk::quad
