#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "clk/error.hpp"
#include "clk/random.hpp"
#include "clk/vec3.hpp"

namespace clk::collision {

// B(v - u, omega) = |v - u|^kappa q0(cos), with q0(c) = |c|.
struct CollisionModel {
  double kappa = 1.0;
  void validate() const;
};

// Post-collision velocities u' = u - [(u - v).w] w, v' = v + [(u - v).w] w.
std::pair<Vec3, Vec3> post_collision(const Vec3& u, const Vec3& v, const Vec3& omega);

// |v - u|^kappa |cos angle(v - u, omega)|; 0 at u = v.
double kernel_B(const Vec3& u, const Vec3& v, const Vec3& omega, const CollisionModel& model);

// Relative speeds below this are skipped by the Monte Carlo estimators when
// kappa < 0; the excluded ball carries O(1e-8^(3+kappa)) of the integral.
inline constexpr double kCoincidence = 1e-8;

// Cubic lattice {-V, ..., V}^3 with M points per axis (M odd).
class VelocityGrid {
public:
  VelocityGrid(int points_per_axis, double v_max);

  int m() const { return m_; }
  double v_max() const { return v_max_; }
  double spacing() const { return h_; }
  double weight() const { return h_ * h_ * h_; }
  std::size_t size() const { return static_cast<std::size_t>(m_) * m_ * m_; }

  double coord(int i) const { return -v_max_ + h_ * i; }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(m_) * (j + static_cast<std::size_t>(m_) * k);
  }
  std::array<int, 3> ijk(std::size_t idx) const;
  Vec3 node(std::size_t idx) const;

  // Trilinear interpolation stencil: 8 (index, weight) pairs. Points outside
  // the box are clamped onto it.
  struct Stencil {
    std::array<std::uint32_t, 8> idx{};
    std::array<double, 8> w{};
  };
  Stencil stencil(const Vec3& v) const;

  double interpolate(const std::vector<double>& values, const Vec3& v) const;

private:
  int m_;
  double v_max_;
  double h_;
};

inline double apply(const VelocityGrid::Stencil& s, const double* values) {
  double out = 0.0;
  for (int c = 0; c < 8; ++c) out += s.w[c] * values[s.idx[c]];
  return out;
}

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Normalised Gaussian density at temperature T.
inline double gaussian_density(const Vec3& u, double temperature) {
  return std::exp(-norm2(u) / (2.0 * temperature)) / std::pow(2.0 * std::numbers::pi * temperature, 1.5);
}

// nu(F)(v) = int int B(v - u, w) F(u) dw du, by Monte Carlo with u drawn
// from the Gaussian at `importance_temperature` and w uniform on the sphere.
template <class Density>
Estimate nu_of(const Density& f, const Vec3& v, const CollisionModel& model, int n_mc, RandomStream& rng,
               double importance_temperature = 1.0) {
  model.validate();
  require(n_mc > 0, "nu_of: n_mc must be positive");
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n_mc; ++i) {
    const Vec3 u = rng.gaussian_vector(importance_temperature);
    const Vec3 w = rng.unit_vector();
    const double rel = norm(v - u);
    double x = 0.0;
    if (!(model.kappa < 0.0 && rel < kCoincidence)) {
      const double g = gaussian_density(u, importance_temperature) / (4.0 * std::numbers::pi);
      x = kernel_B(u, v, w, model) * f(u) / g;
    }
    s += x;
    s2 += x * x;
  }
  const double n = n_mc;
  const double mean = s / n;
  const double var = n > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

// Deterministic grid quadrature of nu(F)(v): 2 pi sum_u w |v - u|^kappa F(u)
// (the angular integral of |cos| over the sphere is 2 pi).
double nu_of_grid(const VelocityGrid& grid, const std::vector<double>& f, const Vec3& v,
                  const CollisionModel& model);

struct GainLoss {
  Estimate gain;  // Q_gain(F, F)(v)
  Estimate nu;    // nu(F)(v)
  Estimate q;     // Q_gain - nu F(v), from paired samples
};

// Gain and loss from the same (u, w) samples.
template <class Density>
GainLoss gain_loss(const Density& f, const Vec3& v, const CollisionModel& model, int n_mc, RandomStream& rng,
                   double importance_temperature = 1.0) {
  model.validate();
  require(n_mc > 0, "gain_loss: n_mc must be positive");
  const double fv = f(v);
  double sg = 0, sg2 = 0, sn = 0, sn2 = 0, sq = 0, sq2 = 0;
  for (int i = 0; i < n_mc; ++i) {
    const Vec3 u = rng.gaussian_vector(importance_temperature);
    const Vec3 w = rng.unit_vector();
    double g = 0, l = 0;
    if (!(model.kappa < 0.0 && norm(v - u) < kCoincidence)) {
      const double dens = gaussian_density(u, importance_temperature) / (4.0 * std::numbers::pi);
      const double b = kernel_B(u, v, w, model) / dens;
      const auto [up, vp] = post_collision(u, v, w);
      g = b * f(up) * f(vp);
      l = b * f(u);
    }
    const double q = g - l * fv;
    sg += g; sg2 += g * g;
    sn += l; sn2 += l * l;
    sq += q; sq2 += q * q;
  }
  const double n = n_mc;
  auto est = [n](double s, double s2) {
    const double mean = s / n;
    const double var = n > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1)) : 0.0;
    return Estimate{mean, std::sqrt(var / n)};
  };
  return {est(sg, sg2), est(sn, sn2), est(sq, sq2)};
}

// Weighted gain at a grid node: e^{(theta - s)|v|^2} Gamma_gain(f, f)(v) with
// f = e^{-(theta - s)|.|^2} h and Gamma_gain(f, f) = Q_gain(sqrt(mu) f,
// sqrt(mu) f)/sqrt(mu), mu = e^{-|v|^2/(2 T_M)}. h is interpolated
// trilinearly at u, u', v'.
Estimate gamma_gain(const VelocityGrid& grid, const std::vector<double>& h, std::size_t node, double theta,
                    double s, double t_max, const CollisionModel& model, int n_mc, RandomStream& rng);

}  // namespace clk::collision
