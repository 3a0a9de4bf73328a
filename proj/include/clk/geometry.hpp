#pragma once

#include <optional>
#include <string>
#include <variant>

#include "clk/vec3.hpp"
#include "clk/wall.hpp"

namespace clk::geometry {

struct Ball {
  double radius = 1.0;
};
// Infinite circular cylinder about the x3 axis; x3 is free.
struct Disk2D {
  double radius = 1.0;
};
// Faces x1 = 0 and x1 = width; x2, x3 periodic with length `period`.
struct Slab {
  double width = 1.0;
  double period = 1.0;
};

using Shape = std::variant<Ball, Disk2D, Slab>;

// Wall temperature field: constant, one value per slab face (x1 = 0, x1 = W),
// or T0 + amp cos(theta) on a ball/disk with cos(theta) = x1 / R.
struct WallTemperature {
  enum class Kind { constant, faces, angular };
  Kind kind = Kind::constant;
  double p0 = 1.0;
  double p1 = 0.0;

  static WallTemperature constant(double t) { return {Kind::constant, t, 0.0}; }
  static WallTemperature faces(double t0, double t1) { return {Kind::faces, t0, t1}; }
  static WallTemperature angular(double t0, double amp) { return {Kind::angular, t0, amp}; }
  // "const:<v>", "faces:<v0>,<v1>", "angular:<T0>,<amp>"
  static WallTemperature parse(const std::string& text);
  std::string to_string() const;
};

class Domain {
public:
  Domain(Shape shape, WallTemperature temperature);

  const Shape& shape() const { return shape_; }
  const WallTemperature& temperature_field() const { return temperature_; }
  // Radius or width.
  double scale() const;
  double t_max() const { return t_max_; }
  double t_min() const { return t_min_; }

  double wall_temperature(const Vec3& boundary_point) const;
  Vec3 outward_normal(const Vec3& boundary_point) const;
  wall::WallPatch patch(const Vec3& boundary_point) const;
  // Signed implicit-equation value, in length units (|x| - R, etc.); < 0 inside.
  double level(const Vec3& x) const;
  // Maps x2, x3 of a slab position into [0, period); identity otherwise.
  Vec3 wrap(const Vec3& x) const;

private:
  Shape shape_;
  WallTemperature temperature_;
  double t_max_ = 1.0;
  double t_min_ = 1.0;
};

struct BoundaryHit {
  double time = 0.0;
  Vec3 point{};
  Vec3 normal{};
  wall::WallPatch wall{};
};

// Smallest tau > 0 with x + tau v on the boundary; none if v = 0 or the flight
// never meets the boundary (disk with v along the axis, slab with v1 = 0).
std::optional<BoundaryHit> first_exit_forward(const Vec3& x, const Vec3& v, const Domain& dom);

struct BackTimeHit {
  double t1 = 0.0;  // t - tau; -inf when no boundary is met
  Vec3 x1{};
  bool hits_wall = false;  // t1 > 0
  std::optional<BoundaryHit> hit;
};

// Backward flight X(s) = x - v (t - s) to the boundary.
BackTimeHit back_time_hit(double t, const Vec3& x, const Vec3& v, const Domain& dom);

}  // namespace clk::geometry
