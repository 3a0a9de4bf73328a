#include "clk/wall.hpp"

#include <cmath>
#include <numbers>

#include "clk/analytics.hpp"
#include "clk/error.hpp"
#include "clk/quadrature.hpp"

namespace clk::wall {

namespace {
constexpr double kPi = std::numbers::pi;
}

AccommodationPair::AccommodationPair(double r_perp, double r_par) : r_perp_(r_perp), r_par_(r_par) {
  require(r_perp > 0.0 && r_perp <= 1.0, "accommodation r_perp must satisfy 0 < r_perp <= 1");
  require(r_par > 0.0 && r_par < 2.0, "accommodation r_par must satisfy 0 < r_par < 2");
}

double AccommodationPair::r_max() const { return std::max(tangential_factor(), r_perp_); }
double AccommodationPair::r_min() const { return std::min(tangential_factor(), r_perp_); }

WallPatch WallPatch::make(double temperature, const Vec3& normal) {
  require(temperature > 0.0 && std::isfinite(temperature), "wall temperature must be positive");
  const double len = norm(normal);
  require(std::abs(len - 1.0) < 1e-9, "wall normal must be a unit vector");
  WallPatch w;
  w.temperature = temperature;
  w.normal = normal * (1.0 / len);
  const Vec3 helper = std::abs(w.normal.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  w.tangent1 = normalized(helper - dot(helper, w.normal) * w.normal);
  w.tangent2 = cross(w.normal, w.tangent1);
  return w;
}

HalfSpaceVelocity decompose(const Vec3& v, const WallPatch& wall) {
  return {dot(v, wall.normal), {dot(v, wall.tangent1), dot(v, wall.tangent2)}};
}

Vec3 compose(const HalfSpaceVelocity& h, const WallPatch& wall) {
  return h.v_par[0] * wall.tangent1 + h.v_par[1] * wall.tangent2 + h.v_perp * wall.normal;
}

Maxwell make_maxwell(double c) {
  require(c >= 0.0 && c <= 1.0, "Maxwell diffuse fraction c must lie in [0, 1]");
  return Maxwell{c};
}

std::optional<std::pair<double, double>> equivalent_accommodation(const BoundaryModel& model) {
  struct Visitor {
    std::optional<std::pair<double, double>> operator()(const ClModel& m) const {
      return std::pair{m.r.r_perp(), m.r.r_par()};
    }
    std::optional<std::pair<double, double>> operator()(const Diffuse&) const {
      return std::pair{1.0, 1.0};
    }
    std::optional<std::pair<double, double>> operator()(const Specular&) const {
      return std::pair{0.0, 0.0};
    }
    std::optional<std::pair<double, double>> operator()(const BounceBack&) const {
      return std::pair{0.0, 2.0};
    }
    std::optional<std::pair<double, double>> operator()(const Maxwell&) const {
      return std::nullopt;
    }
  };
  return std::visit(Visitor{}, model);
}

double cl_density(const Vec3& u, const Vec3& v, const WallPatch& wall, const AccommodationPair& r) {
  const auto hu = decompose(u, wall);
  const auto hv = decompose(v, wall);
  require(hu.v_perp > 0.0, "cl_density: incident velocity must satisfy n.u > 0");
  require(hv.v_perp < 0.0, "cl_density: emitted velocity must satisfy n.v < 0");

  const double t = wall.temperature;
  const double q = r.tangential_factor();
  const double keep = 1.0 - r.r_par();
  const double d0 = hv.v_par[0] - keep * hu.v_par[0];
  const double d1 = hv.v_par[1] - keep * hu.v_par[1];
  const double tangential = std::exp(-(d0 * d0 + d1 * d1) / (2.0 * t * q)) / (2.0 * kPi * t * q);

  const double rp = r.r_perp();
  const double s = std::sqrt(1.0 - rp);
  const double up = hu.v_perp;
  const double vp = -hv.v_perp;
  const double shifted = vp - s * up;
  const double normal = vp / (rp * t) * std::exp(-shifted * shifted / (2.0 * t * rp)) *
                        analytics::bessel_i0_scaled(s * vp * up / (t * rp));
  return tangential * normal;
}

double diffuse_density(const Vec3& v, const WallPatch& wall) {
  const double vn = dot(v, wall.normal);
  require(vn < 0.0, "diffuse_density: emitted velocity must satisfy n.v < 0");
  const double t = wall.temperature;
  return 2.0 / (kPi * 4.0 * t * t) * std::exp(-norm2(v) / (2.0 * t)) * std::abs(vn);
}

Vec3 cl_sample_raw(const Vec3& u, const WallPatch& wall, double r_perp, double r_par,
                   RandomStream& rng) {
  const auto hu = decompose(u, wall);
  require(hu.v_perp > 0.0, "cl_sample: incident velocity must satisfy n.u > 0");
  const double t = wall.temperature;
  const double keep = 1.0 - r_par;
  const double sd_par = std::sqrt(t * r_par * (2.0 - r_par));
  HalfSpaceVelocity out;
  out.v_par[0] = keep * hu.v_par[0] + sd_par * rng.normal();
  out.v_par[1] = keep * hu.v_par[1] + sd_par * rng.normal();
  const double sd_perp = std::sqrt(t * r_perp);
  const double x = std::sqrt(1.0 - r_perp) * hu.v_perp + sd_perp * rng.normal();
  const double y = sd_perp * rng.normal();
  out.v_perp = -std::hypot(x, y);
  return compose(out, wall);
}

Vec3 cl_sample(const Vec3& u, const WallPatch& wall, const AccommodationPair& r, RandomStream& rng) {
  return cl_sample_raw(u, wall, r.r_perp(), r.r_par(), rng);
}

MaxwellKernelValue maxwell_density(const Vec3& u, const Vec3& v, const WallPatch& wall, double c) {
  require(c >= 0.0 && c <= 1.0, "Maxwell diffuse fraction c must lie in [0, 1]");
  require(dot(u, wall.normal) > 0.0, "maxwell_density: incident velocity must satisfy n.u > 0");
  MaxwellKernelValue out;
  out.continuous = c == 0.0 ? 0.0 : c * diffuse_density(v, wall);
  out.atom_weight = 1.0 - c;
  out.atom_at = reflect_specular(u, wall.normal);
  return out;
}

MaxwellDraw maxwell_sample(const Vec3& u, const WallPatch& wall, double c, RandomStream& rng) {
  require(c >= 0.0 && c <= 1.0, "Maxwell diffuse fraction c must lie in [0, 1]");
  require(dot(u, wall.normal) > 0.0, "maxwell_sample: incident velocity must satisfy n.u > 0");
  if (rng.bernoulli(c)) return {cl_sample_raw(u, wall, 1.0, 1.0, rng), false};
  return {reflect_specular(u, wall.normal), true};
}

Vec3 scatter(const BoundaryModel& model, const Vec3& u, const WallPatch& wall, RandomStream& rng) {
  require(dot(u, wall.normal) > 0.0, "scatter: incident velocity must satisfy n.u > 0");
  struct Visitor {
    const Vec3& u;
    const WallPatch& wall;
    RandomStream& rng;
    Vec3 operator()(const ClModel& m) const { return cl_sample(u, wall, m.r, rng); }
    Vec3 operator()(const Diffuse&) const { return cl_sample_raw(u, wall, 1.0, 1.0, rng); }
    Vec3 operator()(const Specular&) const { return reflect_specular(u, wall.normal); }
    Vec3 operator()(const BounceBack&) const { return -u; }
    Vec3 operator()(const Maxwell& m) const { return maxwell_sample(u, wall, m.c, rng).v; }
  };
  return std::visit(Visitor{u, wall, rng}, model);
}

double PushforwardMaxwellian::density(const Vec3& v, const WallPatch& wall) const {
  const auto h = decompose(v, wall);
  const double par2 = h.v_par[0] * h.v_par[0] + h.v_par[1] * h.v_par[1];
  return std::exp(-par2 / (2.0 * t_tangential)) / (2.0 * kPi * t_tangential) *
         std::exp(-h.v_perp * h.v_perp / (2.0 * t_normal)) / t_normal;
}

double PushforwardMaxwellian::flux_integral(int panels) const {
  const double st = std::sqrt(t_tangential);
  const double sn = std::sqrt(t_normal);
  const auto tang = quad::composite_gauss_legendre(-12.0 * st, 12.0 * st, panels);
  const auto perp = quad::composite_gauss_legendre(0.0, 12.0 * sn, panels);
  const WallPatch frame = WallPatch::make(1.0, {0.0, 0.0, 1.0});
  double sum = 0.0;
  for (const auto& [a, wa] : tang)
    for (const auto& [b, wb] : tang)
      for (const auto& [c, wc] : perp) sum += wa * wb * wc * c * density({a, b, c}, frame);
  return sum;
}

PushforwardMaxwellian cl_pushforward_maxwellian(const WallPatch& wall, const AccommodationPair& r,
                                                double t0) {
  require(t0 > 0.0 && std::isfinite(t0), "pushforward: T0 must be positive");
  const double tw = wall.temperature;
  const double keep = 1.0 - r.r_par();
  return {t0 * keep * keep + tw * r.tangential_factor(), t0 * (1.0 - r.r_perp()) + tw * r.r_perp()};
}

double flux_maxwellian(const Vec3& v, double temperature) {
  return std::exp(-norm2(v) / (2.0 * temperature)) / (2.0 * kPi * temperature * temperature);
}

double pushforward_by_quadrature(const Vec3& v, const WallPatch& wall, const AccommodationPair& r,
                                 double t0, int panels) {
  const auto hv = decompose(v, wall);
  require(hv.v_perp < 0.0, "pushforward_by_quadrature: v must satisfy n.v < 0");
  const double tw = wall.temperature;
  const double keep = 1.0 - r.r_par();
  const double q = r.tangential_factor();
  const double s = std::sqrt(1.0 - r.r_perp());
  const double vp = -hv.v_perp;

  // Gaussian envelope of the integrand in each component of u.
  const double prec_t = 1.0 / t0 + keep * keep / (tw * q);
  const double sd_t = 1.0 / std::sqrt(prec_t);
  const double prec_n = 1.0 / t0 + s * s / (tw * r.r_perp());
  const double sd_n = 1.0 / std::sqrt(prec_n);
  const double c_n = (s * vp / (tw * r.r_perp())) / prec_n;

  std::array<std::vector<std::pair<double, double>>, 2> tang;
  for (int i = 0; i < 2; ++i) {
    const double c = (keep * hv.v_par[static_cast<std::size_t>(i)] / (tw * q)) / prec_t;
    tang[static_cast<std::size_t>(i)] =
        quad::composite_gauss_legendre(c - 12.0 * sd_t, c + 12.0 * sd_t, panels);
  }
  const auto perp = quad::composite_gauss_legendre(std::max(0.0, c_n - 12.0 * sd_n), c_n + 12.0 * sd_n,
                                                   panels);
  double sum = 0.0;
  for (const auto& [a, wa] : tang[0])
    for (const auto& [b, wb] : tang[1])
      for (const auto& [c, wc] : perp) {
        if (c <= 0.0) continue;
        const Vec3 u = compose({c, {a, b}}, wall);
        sum += wa * wb * wc * cl_density(u, v, wall, r) * flux_maxwellian(u, t0) * c;
      }
  return sum / vp;
}

double verify_normalization(const Vec3& u, const WallPatch& wall, const AccommodationPair& r,
                            int panels) {
  const auto hu = decompose(u, wall);
  require(hu.v_perp > 0.0, "verify_normalization: incident velocity must satisfy n.u > 0");
  const double t = wall.temperature;
  const double keep = 1.0 - r.r_par();
  const double sd_t = std::sqrt(t * r.tangential_factor());
  const double sd_n = std::sqrt(t * r.r_perp());
  const double mean_n = std::sqrt(1.0 - r.r_perp()) * hu.v_perp;

  std::array<std::vector<std::pair<double, double>>, 2> tang;
  for (std::size_t i = 0; i < 2; ++i) {
    const double c = keep * hu.v_par[i];
    tang[i] = quad::composite_gauss_legendre(c - 12.0 * sd_t, c + 12.0 * sd_t, panels);
  }
  const auto perp = quad::composite_gauss_legendre(std::max(0.0, mean_n - 12.0 * sd_n),
                                                   mean_n + 12.0 * sd_n, panels);
  double sum = 0.0;
  for (const auto& [a, wa] : tang[0])
    for (const auto& [b, wb] : tang[1])
      for (const auto& [c, wc] : perp) {
        if (c <= 0.0) continue;
        sum += wa * wb * wc * cl_density(u, compose({-c, {a, b}}, wall), wall, r);
      }
  return sum;
}

}  // namespace clk::wall
