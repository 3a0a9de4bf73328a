#include "clk/collision.hpp"

#include <algorithm>
#include <numbers>

namespace clk::collision {

void CollisionModel::validate() const {
  require(kappa > -3.0 && kappa <= 1.0, "collision kernel exponent must satisfy -3 < kappa <= 1");
}

std::pair<Vec3, Vec3> post_collision(const Vec3& u, const Vec3& v, const Vec3& omega) {
  require(std::abs(norm2(omega) - 1.0) <= 2e-12, "post_collision: omega must be a unit vector");
  const double a = dot(u - v, omega);
  return {u - a * omega, v + a * omega};
}

double kernel_B(const Vec3& u, const Vec3& v, const Vec3& omega, const CollisionModel& model) {
  require(std::abs(norm2(omega) - 1.0) <= 2e-12, "kernel_B: omega must be a unit vector");
  const Vec3 d = v - u;
  const double r = norm(d);
  if (r == 0.0) return 0.0;
  const double c = std::abs(dot(d, omega)) / r;
  return (model.kappa == 1.0 ? r : std::pow(r, model.kappa)) * c;
}

VelocityGrid::VelocityGrid(int points_per_axis, double v_max) : m_(points_per_axis), v_max_(v_max) {
  require(m_ >= 3 && m_ % 2 == 1, "velocity grid needs an odd number (>= 3) of points per axis");
  require(v_max > 0.0, "velocity grid extent must be positive");
  h_ = 2.0 * v_max_ / (m_ - 1);
}

std::array<int, 3> VelocityGrid::ijk(std::size_t idx) const {
  const int i = static_cast<int>(idx % m_);
  const int j = static_cast<int>((idx / m_) % m_);
  const int k = static_cast<int>(idx / (static_cast<std::size_t>(m_) * m_));
  return {i, j, k};
}

Vec3 VelocityGrid::node(std::size_t idx) const {
  const auto [i, j, k] = ijk(idx);
  return {coord(i), coord(j), coord(k)};
}

VelocityGrid::Stencil VelocityGrid::stencil(const Vec3& v) const {
  std::array<int, 3> base{};
  std::array<double, 3> frac{};
  for (int a = 0; a < 3; ++a) {
    const double s = std::clamp((v[a] + v_max_) / h_, 0.0, static_cast<double>(m_ - 1));
    int b = static_cast<int>(s);
    if (b >= m_ - 1) b = m_ - 2;
    base[a] = b;
    frac[a] = s - b;
  }
  Stencil st;
  int c = 0;
  for (int dk = 0; dk < 2; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di, ++c) {
        st.idx[c] = static_cast<std::uint32_t>(index(base[0] + di, base[1] + dj, base[2] + dk));
        st.w[c] = (di ? frac[0] : 1 - frac[0]) * (dj ? frac[1] : 1 - frac[1]) * (dk ? frac[2] : 1 - frac[2]);
      }
  return st;
}

double VelocityGrid::interpolate(const std::vector<double>& values, const Vec3& v) const {
  require(values.size() == size(), "interpolate: value array does not match the grid");
  return apply(stencil(v), values.data());
}

double nu_of_grid(const VelocityGrid& grid, const std::vector<double>& f, const Vec3& v,
                  const CollisionModel& model) {
  model.validate();
  require(f.size() == grid.size(), "nu_of_grid: value array does not match the grid");
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (f[i] == 0.0) continue;
    const double r = norm(v - grid.node(i));
    if (r < kCoincidence && model.kappa < 0.0) continue;
    s += std::pow(r, model.kappa) * f[i];
  }
  return 2.0 * std::numbers::pi * grid.weight() * s;
}

Estimate gamma_gain(const VelocityGrid& grid, const std::vector<double>& h, std::size_t node, double theta,
                    double s, double t_max, const CollisionModel& model, int n_mc, RandomStream& rng) {
  model.validate();
  require(node < grid.size(), "gamma_gain: node outside the grid");
  require(h.size() == grid.size(), "gamma_gain: value array does not match the grid");
  require(theta > 0.0 && theta < 1.0 / (4.0 * t_max), "gamma_gain: need 0 < theta < 1/(4 T_M)");
  require(n_mc > 0, "gamma_gain: n_mc must be positive");
  const Vec3 v = grid.node(node);
  const double a = theta - s;
  // F(w) = e^{-a|w|^2} sqrt(mu(w)) h(w)
  auto big_f = [&](const Vec3& w) {
    return std::exp(-a * norm2(w) - norm2(w) / (4.0 * t_max)) * grid.interpolate(h, w);
  };
  const auto gl = gain_loss(big_f, v, model, n_mc, rng, t_max);
  const double scale = std::exp(a * norm2(v) + norm2(v) / (4.0 * t_max));
  return {scale * gl.gain.value, scale * gl.gain.std_error};
}

}  // namespace clk::collision
