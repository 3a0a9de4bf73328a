#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "clk/error.hpp"
#include "clk/particle_sim.hpp"

using namespace clk;
using namespace clk::particles;

namespace {

SimConfig ball_config(wall::BoundaryModel model, std::int64_t n = 20000, double t_end = 5.0) {
  SimConfig c;
  c.model = model;
  c.n_particles = n;
  c.t_end = t_end;
  c.sample_times = {0.0};
  return c;
}

wall::ClModel cl(double rp, double rt) { return wall::ClModel{wall::AccommodationPair(rp, rt)}; }

// Probability that the reflected C-L beam lands within `radius` of (2, 2) in
// the (v . t1, -v . n) plane, for incident (2, -2) at T_w = 1 and r_perp =
// r_par = r: direct 2-D integration of the product of the tangential Gaussian
// and the Rice density of the normal speed.
double cl_disk_probability(double r, double radius) {
  using boost::math::quadrature::gauss_kronrod;
  const double mean = (1.0 - r) * 2.0;
  const double var = r * (2.0 - r);
  const double s = std::sqrt(1.0 - r);
  auto rice = [&](double y) {
    const double z = s * 2.0 * y / r;
    // scaled Bessel keeps the exponent finite at small r
    return y / r * std::exp(-(y - s * 2.0) * (y - s * 2.0) / (2.0 * r)) * boost::math::cyl_bessel_i(0, z) *
           std::exp(-z);
  };
  auto inner = [&](double x) {
    const double half = std::sqrt(std::max(0.0, radius * radius - (x - 2.0) * (x - 2.0)));
    const double g = std::exp(-(x - mean) * (x - mean) / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
    return g * gauss_kronrod<double, 61>::integrate(rice, 2.0 - half, 2.0 + half, 10, 1e-12);
  };
  return gauss_kronrod<double, 61>::integrate(inner, 2.0 - radius, 2.0 + radius, 10, 1e-12);
}

}  // namespace

TEST_CASE("specular and bounce-back walls preserve speed") {
  auto mirror = run_transient(ball_config(wall::Specular{}, 2000, 20.0));
  CHECK(mirror.max_speed_drift < 1e-12);
  CHECK(mirror.wall_events > 10000);
  auto back = run_transient(ball_config(wall::BounceBack{}, 2000, 20.0));
  CHECK(back.max_speed_drift == 0.0);
}

TEST_CASE("bounce-back reverses the velocity exactly") {
  const auto w = wall::WallPatch::make(1.0, normalized(Vec3{1.0, 2.0, -0.5}));
  auto rng = RandomStream::derive(3, {});
  const Vec3 u = 0.7 * w.normal + 0.3 * w.tangent1 - 1.1 * w.tangent2;
  const Vec3 v = wall::scatter(wall::BounceBack{}, u, w, rng);
  CHECK(v.x == -u.x);
  CHECK(v.y == -u.y);
  CHECK(v.z == -u.z);
}

TEST_CASE("mass is exactly conserved") {
  const std::vector<wall::BoundaryModel> models{wall::Diffuse{}, wall::Specular{}, wall::BounceBack{},
                                                wall::make_maxwell(0.3), cl(0.4, 1.5)};
  for (const auto& m : models) {
    auto o = run_transient(ball_config(m, 3000));
    CHECK(o.initial_count == 3000);
    CHECK(o.final_count == o.initial_count);
    CHECK(o.final_mass() == o.initial_mass());
    for (const auto& w : o.walls) CHECK(w.incident == w.emitted);
  }
  SimConfig s = ball_config(wall::Diffuse{}, 3000);
  s.domain = geometry::Domain(geometry::Slab{1.0, 1.0}, geometry::WallTemperature::faces(1.0, 2.0));
  auto o = run_transient(s);
  CHECK(o.final_count == 3000);
  REQUIRE(o.walls.size() == 2);
  CHECK(o.walls[0].incident > 0);
  CHECK(o.walls[1].incident > 0);
}

TEST_CASE("Maxwellian is invariant under C-L walls at the gas temperature") {
  for (auto [rp, rt] : {std::pair{1.0, 1.0}, {0.5, 0.5}, {0.9, 1.3}}) {
    CAPTURE(rp);
    CAPTURE(rt);
    auto c = ball_config(cl(rp, rt), 100000, 20.0);
    auto o = run_transient(c);
    CHECK(speed_chi_square(o, 1.0).p_value > 0.01);
    const auto& a = o.moments.front();
    const auto& b = o.moments.back();
    auto z = [](const stats::Accumulator& x, const stats::Accumulator& y) {
      return std::abs(x.mean() - y.mean()) / std::hypot(x.std_error(), y.std_error());
    };
    for (int d = 0; d < 3; ++d) CHECK(z(a.velocity[d], b.velocity[d]) < 3.0);
    CHECK(z(a.energy, b.energy) < 3.0);
  }
}

TEST_CASE("wall speed distributions at equilibrium") {
  // diffuse emission at T = 1 is the flux-weighted Maxwellian speed law
  // F(s) = 1 - (1 + s^2/2) e^{-s^2/2}
  auto c = ball_config(wall::Diffuse{}, 2000, 10.0);
  auto o = run_transient(c);
  auto speeds = o.walls[0].emitted_speed;
  REQUIRE(speeds.size() > 5000);
  std::sort(speeds.begin(), speeds.end());
  double d = 0.0;
  const double n = static_cast<double>(speeds.size());
  for (std::size_t k = 0; k < speeds.size(); ++k) {
    const double s2 = speeds[k] * speeds[k];
    const double f = 1.0 - (1.0 + s2 / 2.0) * std::exp(-s2 / 2.0);
    d = std::max({d, std::abs(f - k / n), std::abs(f - (k + 1) / n)});
  }
  CHECK(stats::kolmogorov_sf(std::sqrt(n) * d) > 0.01);

  // C-L: incident and emitted speeds of disjoint particle groups
  auto g = run_transient(ball_config(cl(0.5, 0.5), 4000, 20.0));
  const auto& in = g.walls[0].incident_speed;
  const auto& out = g.walls[0].emitted_speed;
  std::vector<double> a(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(in.size() / 2));
  std::vector<double> b(out.begin() + static_cast<std::ptrdiff_t>(out.size() / 2), out.end());
  CHECK(stats::ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("runs are reproducible") {
  auto c = ball_config(cl(0.5, 0.5), 2000);
  auto a = run_transient(c);
  auto b = run_transient(c);
  CHECK(a.speed_histogram == b.speed_histogram);
  CHECK(a.moments.back().energy.mean() == b.moments.back().energy.mean());
  c.threads = 3;
  auto d = run_transient(c);
  CHECK(d.speed_histogram == a.speed_histogram);
  CHECK(d.wall_events == a.wall_events);
  CHECK(d.moments.back().energy.mean() == doctest::Approx(a.moments.back().energy.mean()).epsilon(1e-12));
  CHECK(d.walls[0].incident_speed == a.walls[0].incident_speed);
}

TEST_CASE("figure 1: Maxwell c = 1/2 puts half the mass on the specular image") {
  auto f = figure_setup(1);
  auto h = beam_reflection_histogram(f.u_in, f.wall, f.model, 100000, 11);
  const double sigma = std::sqrt(100000 * 0.25);
  CHECK(std::abs(h.atom_count - 50000.0) < 3.0 * sigma);
  CHECK(h.mode[0] == doctest::Approx(2.05));
  CHECK(h.mode[1] == doctest::Approx(2.05));
  double total = 0.0;
  for (double m : h.mass) total += m;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("figure 2: tangential mean is (1 - r_par) u_par") {
  auto f = figure_setup(2);
  auto h = beam_reflection_histogram(f.u_in, f.wall, f.model, 100000, 12);
  CHECK(std::abs(h.tangential.mean() - 1.0) < 3.0 * h.tangential.std_error());
  CHECK(h.atom_count == 0);
}

TEST_CASE("figures 2-4: concentration on (2, 2) matches direct integration") {
  double last = 0.0;
  for (int which : {2, 3, 4}) {
    auto f = figure_setup(which);
    const double r = std::get<wall::ClModel>(f.model).r.r_par();
    auto h = beam_reflection_histogram(f.u_in, f.wall, f.model, 100000, 20 + which);
    const double p = h.fraction_within({2.0, 2.0}, 0.5);
    const double exact = cl_disk_probability(r, 0.5);
    CAPTURE(which);
    CHECK(std::abs(p - exact) < 4.0 * std::sqrt(exact * (1.0 - exact) / 1e5));
    CHECK(p > last);
    last = p;
  }
}

TEST_CASE("thermal creep steady state") {
  CreepConfig c;
  c.n_particles = 50000;
  c.amp = 0.0;
  auto flat = thermal_creep_steady(c);
  CHECK(flat.stationary);
  CHECK(flat.deviation() < 3.0 * flat.dipole_se);

  c.amp = 0.05;
  auto full = thermal_creep_steady(c);
  CHECK(full.stationary);
  CHECK(full.deviation() > 5.0 * full.dipole_se);
  // the gas gathers on the cold side: x1 < 0 where T_w = T0 + amp x1 / R is low
  CHECK(full.dipole < 0.0);
  CHECK(full.deviation() < 0.05);

  c.amp = 0.025;
  auto half = thermal_creep_steady(c);
  CHECK(half.deviation() <= 0.5 * full.deviation() + 3.0 * std::hypot(half.dipole_se, 0.5 * full.dipole_se));

  c.amp = 0.05;
  c.r = wall::AccommodationPair(0.9, 0.9);
  auto near = thermal_creep_steady(c);
  CHECK(near.deviation() < 2.0 * full.deviation());
  CHECK(near.deviation() > 0.5 * full.deviation());
}

TEST_CASE("configuration errors") {
  auto c = ball_config(wall::Diffuse{}, 0);
  CHECK_THROWS_AS(run_transient(c), ConfigError);
  c = ball_config(wall::Diffuse{}, 10, -1.0);
  CHECK_THROWS_AS(run_transient(c), ConfigError);
  c = ball_config(wall::Diffuse{}, 10);
  c.sample_times = {7.0};
  CHECK_THROWS_AS(run_transient(c), ConfigError);
  auto f = figure_setup(2);
  CHECK_THROWS_AS(beam_reflection_histogram(f.u_in, f.wall, f.model, 10, 1), ConfigError);
  CHECK_THROWS_AS(figure_setup(5), ConfigError);
  CreepConfig k;
  k.amp = 0.2;
  CHECK_THROWS_AS(thermal_creep_steady(k), ConfigError);
  k.amp = 0.05;
  k.r = wall::AccommodationPair(0.5, 0.5);
  CHECK_THROWS_AS(thermal_creep_steady(k), ConfigError);
}
