#include "clk/geometry.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "clk/error.hpp"

namespace clk::geometry {

namespace {

double parse_number(const std::string& s) {
  double out = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last) throw ConfigError("not a number: '" + s + "'");
  return out;
}

// Quadratic exit time for |y + tau w|^2 = R^2 in the plane or space, where
// `a` = |w|^2, `b` = y.w, `c` = |y|^2 - R^2. Returns a negative value when
// the discriminant is below the grazing threshold.
double exit_root(double a, double b, double c, double r2) {
  const double disc = b * b - a * c;
  if (disc < 1e-14 * a * r2) return -1.0;
  const double sq = std::sqrt(disc);
  if (b >= 0.0) return -c / (b + sq);
  return (sq - b) / a;
}

}  // namespace

WallTemperature WallTemperature::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("wall_temp must be const:, faces: or angular:");
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  const auto comma = rest.find(',');
  if (kind == "const") {
    if (comma != std::string::npos) throw ConfigError("wall_temp const: takes one value");
    return constant(parse_number(rest));
  }
  if (kind != "faces" && kind != "angular") throw ConfigError("unknown wall_temp kind '" + kind + "'");
  if (comma == std::string::npos) throw ConfigError("wall_temp " + kind + ": takes two values");
  const double a = parse_number(rest.substr(0, comma));
  const double b = parse_number(rest.substr(comma + 1));
  return kind == "faces" ? faces(a, b) : angular(a, b);
}

std::string WallTemperature::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::constant: os << "const:" << p0; break;
    case Kind::faces: os << "faces:" << p0 << ',' << p1; break;
    case Kind::angular: os << "angular:" << p0 << ',' << p1; break;
  }
  return os.str();
}

Domain::Domain(Shape shape, WallTemperature temperature)
    : shape_(shape), temperature_(temperature) {
  std::visit(
      [](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Slab>) {
          if (!(s.width > 0.0) || !(s.period > 0.0))
            throw ConfigError("slab width and period must be positive");
        } else {
          if (!(s.radius > 0.0)) throw ConfigError("radius must be positive");
        }
      },
      shape_);
  const bool slab = std::holds_alternative<Slab>(shape_);
  switch (temperature_.kind) {
    case WallTemperature::Kind::constant:
      t_max_ = t_min_ = temperature_.p0;
      break;
    case WallTemperature::Kind::faces:
      if (!slab) throw ConfigError("wall_temp faces: requires a slab domain");
      t_max_ = std::max(temperature_.p0, temperature_.p1);
      t_min_ = std::min(temperature_.p0, temperature_.p1);
      break;
    case WallTemperature::Kind::angular:
      if (slab) throw ConfigError("wall_temp angular: requires a ball or disk domain");
      t_max_ = temperature_.p0 + std::abs(temperature_.p1);
      t_min_ = temperature_.p0 - std::abs(temperature_.p1);
      break;
  }
  if (!(t_min_ > 0.0) || !std::isfinite(t_max_))
    throw ConfigError("wall temperature must be positive and finite everywhere");
}

double Domain::scale() const {
  return std::visit(
      [](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Slab>) return s.width;
        else return s.radius;
      },
      shape_);
}

double Domain::wall_temperature(const Vec3& p) const {
  switch (temperature_.kind) {
    case WallTemperature::Kind::constant: return temperature_.p0;
    case WallTemperature::Kind::faces: {
      const double w = std::get<Slab>(shape_).width;
      return p.x < 0.5 * w ? temperature_.p0 : temperature_.p1;
    }
    case WallTemperature::Kind::angular: {
      const double c = std::clamp(p.x / scale(), -1.0, 1.0);
      return temperature_.p0 + temperature_.p1 * c;
    }
  }
  return temperature_.p0;
}

Vec3 Domain::outward_normal(const Vec3& p) const {
  if (const auto* s = std::get_if<Slab>(&shape_)) {
    return p.x < 0.5 * s->width ? Vec3{-1.0, 0.0, 0.0} : Vec3{1.0, 0.0, 0.0};
  }
  if (std::holds_alternative<Disk2D>(shape_)) return normalized(Vec3{p.x, p.y, 0.0});
  return normalized(p);
}

wall::WallPatch Domain::patch(const Vec3& p) const {
  return wall::WallPatch::make(wall_temperature(p), outward_normal(p));
}

double Domain::level(const Vec3& x) const {
  return std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) return norm(x) - s.radius;
        else if constexpr (std::is_same_v<S, Disk2D>) return std::hypot(x.x, x.y) - s.radius;
        else return std::max(-x.x, x.x - s.width);
      },
      shape_);
}

Vec3 Domain::wrap(const Vec3& x) const {
  const auto* s = std::get_if<Slab>(&shape_);
  if (s == nullptr) return x;
  auto w = [&](double c) {
    double r = std::fmod(c, s->period);
    if (r < 0.0) r += s->period;
    return r >= s->period ? 0.0 : r;
  };
  return {x.x, w(x.y), w(x.z)};
}

std::optional<BoundaryHit> first_exit_forward(const Vec3& x, const Vec3& v, const Domain& dom) {
  const double scale = dom.scale();
  require(std::isfinite(x.x) && std::isfinite(x.y) && std::isfinite(x.z), "position must be finite");
  require(dom.level(x) <= 1e-9 * scale, "position lies outside the domain");
  if (norm2(v) == 0.0) return std::nullopt;

  BoundaryHit hit;
  if (const auto* s = std::get_if<Slab>(&dom.shape())) {
    if (v.x == 0.0) return std::nullopt;
    const double face = v.x > 0.0 ? s->width : 0.0;
    hit.time = std::max(0.0, (face - x.x) / v.x);
    hit.point = x + hit.time * v;
    hit.point.x = face;
  } else {
    const bool disk = std::holds_alternative<Disk2D>(dom.shape());
    const double r = scale;
    const double r2 = r * r;
    Vec3 y = x;
    auto solve = [&](const Vec3& p) {
      const double a = disk ? v.x * v.x + v.y * v.y : norm2(v);
      const double b = disk ? p.x * v.x + p.y * v.y : dot(p, v);
      const double c = (disk ? p.x * p.x + p.y * p.y : norm2(p)) - r2;
      return std::pair{a, exit_root(a, b, c, r2) };
    };
    auto [a, tau] = solve(y);
    if (a == 0.0) return std::nullopt;
    if (tau < 0.0) {
      // grazing: nudge inward and retry once
      const Vec3 radial = disk ? Vec3{y.x, y.y, 0.0} : y;
      const double len = norm(radial);
      if (len > 0.0) y = y - (1e-12 * r / len) * radial;
      tau = solve(y).second;
      if (tau < 0.0) {
        // still tangent: the chord has zero length
        tau = 0.0;
      }
    }
    hit.time = std::max(0.0, tau);
    hit.point = y + hit.time * v;
    if (disk) {
      const double len = std::hypot(hit.point.x, hit.point.y);
      hit.point.x *= r / len;
      hit.point.y *= r / len;
    } else {
      hit.point = hit.point * (r / norm(hit.point));
    }
  }
  hit.normal = dom.outward_normal(hit.point);
  hit.wall = dom.patch(hit.point);
  return hit;
}

BackTimeHit back_time_hit(double t, const Vec3& x, const Vec3& v, const Domain& dom) {
  BackTimeHit out;
  out.hit = first_exit_forward(x, -v, dom);
  if (!out.hit) {
    out.t1 = -std::numeric_limits<double>::infinity();
    out.x1 = x;
    return out;
  }
  out.t1 = t - out.hit->time;
  out.x1 = out.hit->point;
  out.hits_wall = out.t1 > 0.0;
  return out;
}

}  // namespace clk::geometry
