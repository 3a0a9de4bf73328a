#include "clk/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "clk/analytics.hpp"
#include "clk/random.hpp"
#include "clk/wall.hpp"

namespace clk::verify {

namespace {

using Clock = std::chrono::steady_clock;

Check timed(std::string name, double tolerance, const std::function<double(std::string&)>& body) {
  Check c;
  c.name = std::move(name);
  c.tolerance = tolerance;
  const auto t0 = Clock::now();
  c.measured = body(c.detail);
  c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  c.pass = std::isfinite(c.measured) && c.measured <= tolerance;
  return c;
}

wall::AccommodationPair random_pair(RandomStream& rng) {
  return {0.01 + 0.99 * rng.uniform(), 0.01 + 1.98 * rng.uniform()};
}

Vec3 random_incident(RandomStream& rng, const wall::WallPatch& w, double max_speed) {
  for (;;) {
    const Vec3 u = max_speed * Vec3{2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1};
    if (norm(u) <= max_speed && dot(u, w.normal) > 1e-3) return u;
  }
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

Check kernel_normalization(std::uint64_t seed, int cases) {
  return timed("kernel normalization", 1e-5, [&](std::string& d) {
    auto rng = RandomStream::derive(seed, {1});
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
      const auto w = wall::WallPatch::make(0.3 + 2 * rng.uniform(), rng.unit_vector());
      const auto r = random_pair(rng);
      const Vec3 u = random_incident(rng, w, 8.0);
      worst = std::max(worst, std::abs(wall::verify_normalization(u, w, r) - 1.0));
    }
    d = std::to_string(cases) + " random (u, T_w, r), |int R dv - 1|";
    return worst;
  });
}

Check kernel_reciprocity(std::uint64_t seed, int pairs) {
  return timed("kernel reciprocity", 1e-12, [&](std::string& d) {
    auto rng = RandomStream::derive(seed, {2});
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
      const auto w = wall::WallPatch::make(0.3 + 2 * rng.uniform(), rng.unit_vector());
      const auto r = random_pair(rng);
      const Vec3 u = random_incident(rng, w, 4.0);
      const Vec3 v = -random_incident(rng, w, 4.0);
      const double t = w.temperature;
      const double lhs = wall::cl_density(u, v, w, r) * std::exp(-norm2(u) / (2 * t)) * dot(u, w.normal);
      const double rhs = wall::cl_density(-v, -u, w, r) * std::exp(-norm2(v) / (2 * t)) * -dot(v, w.normal);
      if (lhs > 0.0 || rhs > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / std::max(lhs, rhs));
    }
    d = std::to_string(pairs) + " random pairs, relative defect";
    return worst;
  });
}

Check bessel_series_vs_integral(std::uint64_t seed, int points) {
  return timed("I0 series vs integral", 1e-12, [&](std::string& d) {
    auto rng = RandomStream::derive(seed, {3});
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
      const double y = 30.0 * (2.0 * rng.uniform() - 1.0);
      const double series = analytics::bessel_i0_series(y) * std::exp(-std::abs(y));
      worst = std::max(worst, rel(analytics::bessel_i0_scaled_integral(y), series));
    }
    d = std::to_string(points) + " points |y| <= 30, relative";
    return worst;
  });
}

Check plane_closed_form(std::uint64_t seed, int draws) {
  return timed("plane Gaussian closed form", 1e-6, [&](std::string& d) {
    auto rng = RandomStream::derive(seed, {4});
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double b = 0.3 + 1.5 * rng.uniform();
      const double a = -0.5 + 1.2 * b * rng.uniform();
      const double eps = 0.4 * (b - a) * rng.uniform();
      const auto p = analytics::GaussParams::plane(a, b, eps, 3 * rng.uniform() - 1.5, 3 * rng.uniform() - 1.5);
      worst = std::max(worst, rel(analytics::gauss_plane_integral_numeric(p), analytics::gauss_plane_integral(p)));
    }
    d = std::to_string(draws) + " draws, closed form vs polar quadrature";
    return worst;
  });
}

Check halfline_closed_form(std::uint64_t seed, int draws) {
  return timed("half-line Rice closed form", 1e-6, [&](std::string& d) {
    auto rng = RandomStream::derive(seed, {5});
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double b = 0.3 + 1.5 * rng.uniform();
      const double a = -0.5 + 1.2 * b * rng.uniform();
      const double eps = 0.4 * (b - a) * rng.uniform();
      const auto p = analytics::GaussParams::half_line(a, b, eps, 3 * rng.uniform());
      worst = std::max(worst,
                       rel(analytics::gauss_halfline_rice_numeric(p), analytics::gauss_halfline_rice_integral(p)));
    }
    d = std::to_string(draws) + " draws, closed form vs quadrature";
    return worst;
  });
}

Check truncation_bounds(std::uint64_t seed, int draws) {
  // measured: largest ratio numeric / bound (must not exceed 1 + 1e-8)
  return timed("truncation inequalities", 1.0 + 1e-8, [&](std::string& d) {
    auto rng = RandomStream::derive(seed, {6});
    double worst = 0.0;
    using analytics::Truncation;
    for (int i = 0; i < draws; ++i) {
      const double b = 0.3 + 1.5 * rng.uniform();
      const double a = -0.3 + 1.1 * b * rng.uniform();
      const double eps = 0.3 * (b - a) * rng.uniform();
      const double gap = b - a - eps;
      const double delta = std::min(0.05 + 0.9 * rng.uniform(), 0.99 / std::max(gap, 1.0));
      const auto h = analytics::GaussParams::half_line(a, b, eps, 2 * rng.uniform());
      for (auto mode : {Truncation::head, Truncation::shifted_tail})
        worst = std::max(worst, analytics::gauss_halfline_truncations(h, delta, mode) /
                                    analytics::gauss_halfline_truncation_bound(h, delta, mode));
      const auto pl = analytics::GaussParams::plane(a, b, eps, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
      worst = std::max(worst, analytics::gauss_plane_tail_numeric(pl, delta) / analytics::gauss_plane_tail(pl, delta));
    }
    d = std::to_string(draws) + " draws, max numeric/bound";
    return worst;
  });
}

Check pushforward_closed_form(std::uint64_t seed, int points) {
  return timed("Maxwellian push-forward", 1e-6, [&](std::string& d) {
    auto rng = RandomStream::derive(seed, {7});
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
      const auto w = wall::WallPatch::make(0.5 + rng.uniform(), rng.unit_vector());
      const auto r = random_pair(rng);
      const double t0 = 0.5 + 2.0 * rng.uniform();
      const auto mu = wall::cl_pushforward_maxwellian(w, r, t0);
      const Vec3 v = -random_incident(rng, w, 2.5);
      worst = std::max(worst, rel(wall::pushforward_by_quadrature(v, w, r, t0), mu.density(v, w)));
    }
    d = std::to_string(points) + " random (v, T_w, T0, r), quadrature vs closed form";
    return worst;
  });
}

Check pushforward_flux(std::uint64_t seed, int draws) {
  return timed("push-forward unit flux", 1e-8, [&](std::string& d) {
    auto rng = RandomStream::derive(seed, {8});
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
      const auto w = wall::WallPatch::make(0.5 + rng.uniform(), {0.0, 0.0, 1.0});
      const auto mu = wall::cl_pushforward_maxwellian(w, random_pair(rng), 0.5 + 2.0 * rng.uniform());
      worst = std::max(worst, std::abs(mu.flux_integral() - 1.0));
    }
    d = std::to_string(draws) + " draws, |flux - 1|";
    return worst;
  });
}

Check equilibrium_collapse(std::uint64_t seed, int draws) {
  return timed("equilibrium collapse T0 = T_w", 1e-12, [&](std::string& d) {
    auto rng = RandomStream::derive(seed, {9});
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double tw = 0.1 + 5.0 * rng.uniform();
      const auto w = wall::WallPatch::make(tw, rng.unit_vector());
      const auto mu = wall::cl_pushforward_maxwellian(w, random_pair(rng), tw);
      worst = std::max({worst, rel(mu.t_tangential, tw), rel(mu.t_normal, tw)});
    }
    d = std::to_string(draws) + " draws, relative";
    return worst;
  });
}

std::vector<Check> run_suite(std::uint64_t seed) {
  return {bessel_series_vs_integral(seed), plane_closed_form(seed), halfline_closed_form(seed),
          truncation_bounds(seed),         kernel_normalization(seed), kernel_reciprocity(seed),
          pushforward_closed_form(seed),   pushforward_flux(seed),     equilibrium_collapse(seed)};
}

std::string format(const Check& c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s  %-32s %.3e <= %.3e  %.2fs  (%s)", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.measured, c.tolerance, c.seconds, c.detail.c_str());
  return buf;
}

}  // namespace clk::verify
