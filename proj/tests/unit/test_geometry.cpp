#include <cmath>
#include <numbers>

#include "clk/error.hpp"
#include "clk/geometry.hpp"
#include "clk/random.hpp"
#include "doctest.h"

using namespace clk;
using namespace clk::geometry;

namespace {

const Domain ball1{Ball{1.0}, WallTemperature::constant(1.0)};
const Domain slab1{Slab{1.0, 1.0}, WallTemperature::faces(1.0, 2.0)};

Vec3 random_inside(const Domain& dom, RandomStream& rng) {
  for (;;) {
    const double s = dom.scale();
    Vec3 x{(2 * rng.uniform() - 1) * s, (2 * rng.uniform() - 1) * s, (2 * rng.uniform() - 1) * s};
    if (std::holds_alternative<Slab>(dom.shape())) x.x = rng.uniform() * s;
    if (dom.level(x) < -1e-6 * s) return x;
  }
}

}  // namespace

TEST_CASE("forward exit examples") {
  auto h = first_exit_forward({0, 0, 0}, {1, 0, 0}, ball1);
  REQUIRE(h);
  CHECK(h->time == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h->point == Vec3{1, 0, 0});
  CHECK(h->normal == Vec3{1, 0, 0});

  h = first_exit_forward({0.5, 0, 0}, {-1, 0, 0}, ball1);
  REQUIRE(h);
  CHECK(h->time == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(norm(h->point - Vec3{-1, 0, 0}) < 1e-15);

  h = first_exit_forward({0.25, 0.3, 0.1}, {2, 1, 0}, slab1);
  REQUIRE(h);
  CHECK(h->time == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(h->point.x == 1.0);
  CHECK(h->wall.temperature == 2.0);

  CHECK_FALSE(first_exit_forward({0, 0, 0}, {0, 0, 0}, ball1));
  const Domain disk{Disk2D{1.0}, WallTemperature::constant(1.0)};
  CHECK_FALSE(first_exit_forward({0, 0, 0}, {0, 0, 1}, disk));
  CHECK_FALSE(first_exit_forward({0.5, 0, 0}, {0, 1, 0}, slab1));
}

TEST_CASE("back-time hit examples") {
  auto b = back_time_hit(0.5, {0, 0, 0}, {1, 0, 0}, ball1);
  CHECK(b.t1 == doctest::Approx(-0.5));
  CHECK_FALSE(b.hits_wall);
  b = back_time_hit(2.0, {0, 0, 0}, {1, 0, 0}, ball1);
  CHECK(b.t1 == doctest::Approx(1.0));
  CHECK(b.hits_wall);
  CHECK(norm(b.x1 - Vec3{-1, 0, 0}) < 1e-15);
  b = back_time_hit(1.0, {0.9, 0, 0}, {3, 0, 0}, slab1);
  CHECK(b.t1 == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(b.x1.x == 0.0);
}

TEST_CASE("errors and configuration") {
  CHECK_THROWS_AS(first_exit_forward({1.5, 0, 0}, {1, 0, 0}, ball1), DomainError);
  CHECK_THROWS_AS(Domain(Slab{1, 1}, WallTemperature::angular(1, 0.1)), ConfigError);
  CHECK_THROWS_AS(Domain(Ball{1}, WallTemperature::faces(1, 2)), ConfigError);
  CHECK_THROWS_AS(Domain(Ball{-1}, WallTemperature::constant(1)), ConfigError);
  CHECK_THROWS_AS(Domain(Ball{1}, WallTemperature::angular(1, 1.5)), ConfigError);
  CHECK_THROWS_AS(WallTemperature::parse("hot"), ConfigError);
  CHECK_THROWS_AS(WallTemperature::parse("const:x"), ConfigError);
  const auto f = WallTemperature::parse("faces:1.5,0.5");
  CHECK(f.kind == WallTemperature::Kind::faces);
  CHECK(f.p0 == 1.5);
  CHECK(f.p1 == 0.5);
  const Domain d(Ball{2}, WallTemperature::parse("angular:1,0.1"));
  CHECK(d.t_max() == doctest::Approx(1.1));
  CHECK(d.t_min() == doctest::Approx(0.9));
  CHECK(d.wall_temperature({2, 0, 0}) == doctest::Approx(1.1));
  CHECK(d.wall_temperature({0, 2, 0}) == doctest::Approx(1.0));
}

TEST_CASE("hit points lie on the boundary") {
  RandomStream rng(5);
  const Domain disk{Disk2D{0.7}, WallTemperature::constant(1.0)};
  const Domain slab{Slab{0.8, 2.0}, WallTemperature::constant(1.0)};
  for (const Domain* dom : {&ball1, &disk, &slab}) {
    Vec3 x = random_inside(*dom, rng);
    for (int i = 0; i < 10000; ++i) {
      const Vec3 v = rng.gaussian_vector(1.0);
      const auto h = first_exit_forward(x, v, *dom);
      REQUIRE(h);
      CHECK(std::abs(dom->level(h->point)) <= 1e-10 * dom->scale());
      CHECK(dot(h->normal, v) >= 0.0);
      // restart from the wall, moving back into the domain
      x = h->point;
      Vec3 inward = rng.gaussian_vector(1.0);
      if (dot(inward, h->normal) > 0) inward = reflect_specular(inward, h->normal);
      const auto h2 = first_exit_forward(x, inward, *dom);
      REQUIRE(h2);
      CHECK(std::abs(dom->level(h2->point)) <= 1e-10 * dom->scale());
      x = random_inside(*dom, rng);
    }
  }
}

TEST_CASE("back-time and forward flights agree") {
  RandomStream rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 x = random_inside(ball1, rng);
    const Vec3 v = rng.gaussian_vector(1.0);
    const auto b = back_time_hit(3.0, x, v, ball1);
    const auto f = first_exit_forward(x, -v, ball1);
    CHECK(3.0 - b.t1 == doctest::Approx(f->time).epsilon(1e-14));
  }
}

TEST_CASE("specular billiard in a ball follows the analytic orbit") {
  RandomStream rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 x0 = random_inside(ball1, rng);
    Vec3 v = rng.gaussian_vector(1.0);
    auto h = first_exit_forward(x0, v, ball1);
    const Vec3 p1 = h->point;
    // plane of motion and the central angle per chord
    const Vec3 e1 = p1;
    const Vec3 axis = normalized(cross(x0, v));
    const Vec3 e2 = cross(axis, e1);
    const double cos_alpha = dot(normalized(v), h->normal);
    const double step = std::numbers::pi - 2.0 * std::acos(cos_alpha);
    Vec3 p = p1;
    for (int k = 1; k <= 100; ++k) {
      v = reflect_specular(v, h->normal);
      h = first_exit_forward(p, v, ball1);
      p = h->point;
    }
    const double ang = 100.0 * step;
    const Vec3 expect = std::cos(ang) * e1 + std::sin(ang) * e2;
    CHECK(norm(p - expect) < 1e-9);
  }
}

TEST_CASE("specular billiard in a slab unfolds") {
  RandomStream rng(11);
  const Domain slab{Slab{1.0, 1.0}, WallTemperature::constant(1.0)};
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 x0 = random_inside(slab, rng);
    const Vec3 v0 = rng.gaussian_vector(1.0);
    Vec3 v = v0;
    Vec3 x = x0;
    double t = 0;
    for (int k = 0; k < 100; ++k) {
      const auto h = first_exit_forward(x, v, slab);
      t += h->time;
      x = h->point;
      v = reflect_specular(v, h->normal);
    }
    // unfolded x1 coordinate: triangle wave of x0.x + t v0.x
    const double u = x0.x + t * v0.x;
    double m = std::fmod(std::abs(u), 2.0);
    if (m > 1.0) m = 2.0 - m;
    CHECK(std::abs(x.x - m) < 1e-9);
    CHECK(std::abs(x.y - (x0.y + t * v0.y)) < 1e-9 * (1 + std::abs(t * v0.y)));
  }
}
