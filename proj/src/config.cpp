#include "clk/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "clk/collision.hpp"

namespace clk::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> to_int(std::string_view s) {
  Int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string fmt(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

using Setter = std::function<std::optional<std::string>(RunConfig&, std::string_view)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Key {
  std::string name;
  Setter set;
  Getter get;
};

// Real-valued key with an admissible-range predicate.
template <class Pred>
Key real(std::string name, double RunConfig::*field, Pred ok, std::string range) {
  return {name,
          [=](RunConfig& c, std::string_view v) -> std::optional<std::string> {
            const auto x = to_double(v);
            if (!x) return "expected a real number, got '" + std::string(v) + "'";
            if (!ok(*x)) return name + " = " + std::string(v) + " is outside the admissible range " + range;
            c.*field = *x;
            return std::nullopt;
          },
          [=](const RunConfig& c) { return fmt(c.*field); }};
}

template <class Pred>
Key opt_real(std::string name, std::optional<double> RunConfig::*field, Pred ok, std::string range) {
  return {name,
          [=](RunConfig& c, std::string_view v) -> std::optional<std::string> {
            const auto x = to_double(v);
            if (!x) return "expected a real number, got '" + std::string(v) + "'";
            if (!ok(*x)) return name + " = " + std::string(v) + " is outside the admissible range " + range;
            c.*field = *x;
            return std::nullopt;
          },
          [=](const RunConfig& c) { return c.*field ? fmt(*(c.*field)) : std::string("default"); }};
}

template <class Int, class Pred>
Key integer(std::string name, Int RunConfig::*field, Pred ok, std::string range) {
  return {name,
          [=](RunConfig& c, std::string_view v) -> std::optional<std::string> {
            const auto x = to_int<Int>(v);
            if (!x) return "expected an integer, got '" + std::string(v) + "'";
            if (!ok(*x)) return name + " = " + std::string(v) + " is outside the admissible range " + range;
            c.*field = *x;
            return std::nullopt;
          },
          [=](const RunConfig& c) { return std::to_string(c.*field); }};
}

Key choice(std::string name, std::string RunConfig::*field, std::vector<std::string> options) {
  return {name,
          [=](RunConfig& c, std::string_view v) -> std::optional<std::string> {
            for (const auto& o : options)
              if (o == v) {
                c.*field = o;
                return std::nullopt;
              }
            std::string all;
            for (const auto& o : options) all += (all.empty() ? "" : "|") + o;
            return name + " must be one of " + all + ", got '" + std::string(v) + "'";
          },
          [=](const RunConfig& c) { return c.*field; }};
}

const std::vector<Key>& table() {
  auto pos = [](double x) { return x > 0.0; };
  auto nonneg = [](double x) { return x >= 0.0; };
  auto any = [](double) { return true; };
  static const std::vector<Key> keys = {
      integer<std::uint64_t>("seed", &RunConfig::seed, [](std::uint64_t) { return true; }, "[0, 2^64)"),
      integer<int>("threads", &RunConfig::threads, [](int t) { return t >= 1; }, ">= 1"),
      {"out",
       [](RunConfig& c, std::string_view v) -> std::optional<std::string> {
         if (v.empty()) return "out must name a directory";
         c.out = std::string(v);
         return std::nullopt;
       },
       [](const RunConfig& c) { return c.out; }},
      choice("domain", &RunConfig::domain, {"ball", "disk", "slab"}),
      real("radius", &RunConfig::radius, pos, "> 0"),
      real("width", &RunConfig::width, pos, "> 0"),
      real("period", &RunConfig::period, pos, "> 0"),
      {"wall_temp",
       [](RunConfig& c, std::string_view v) -> std::optional<std::string> {
         try {
           geometry::WallTemperature::parse(std::string(v));
         } catch (const ConfigError& e) {
           return e.what();
         }
         c.wall_temp = std::string(v);
         return std::nullopt;
       },
       [](const RunConfig& c) { return c.wall_temp; }},
      choice("model", &RunConfig::model, {"cl", "diffuse", "specular", "bounce_back", "maxwell"}),
      real("r_perp", &RunConfig::r_perp, [](double r) { return r > 0.0 && r <= 1.0; }, "0 < r_perp <= 1"),
      real("r_par", &RunConfig::r_par, [](double r) { return r > 0.0 && r < 2.0; }, "0 < r_par < 2"),
      real("c", &RunConfig::c, [](double x) { return x >= 0.0 && x <= 1.0; }, "0 <= c <= 1"),
      real("Tw", &RunConfig::tw, pos, "> 0"),
      real("theta", &RunConfig::theta, nonneg, ">= 0 (0 selects 1/(8 T_M))"),
      opt_real("TM", &RunConfig::t_max, pos, "> 0"),
      opt_real("minTw", &RunConfig::min_tw, pos, "> 0"),
      {"kappa",
       [](RunConfig& c, std::string_view v) -> std::optional<std::string> {
         const auto x = to_double(v);
         if (!x) return "expected a real number, got '" + std::string(v) + "'";
         try {
           collision::CollisionModel{*x}.validate();
         } catch (const std::exception& e) {
           return e.what();
         }
         c.kappa = *x;
         return std::nullopt;
       },
       [](const RunConfig& c) { return fmt(c.kappa); }},
      real("T0", &RunConfig::t0, pos, "> 0"),
      integer<std::int64_t>("n_particles", &RunConfig::n_particles, [](std::int64_t n) { return n >= 1; }, ">= 1"),
      integer<std::int64_t>("n_samples", &RunConfig::n_samples, [](std::int64_t n) { return n >= 1; }, ">= 1"),
      opt_real("t_end", &RunConfig::t_end, pos, "> 0"),
      choice("mode", &RunConfig::mode, {"transient", "creep"}),
      real("amp", &RunConfig::amp, any, "(any)"),
      real("relax", &RunConfig::relax, nonneg, ">= 0"),
      real("window", &RunConfig::window, pos, "> 0"),
      integer<int>("which", &RunConfig::which, [](int w) { return w >= 1 && w <= 4; }, "1..4"),
      real("u_par", &RunConfig::u_par, any, "(any)"),
      real("u_perp", &RunConfig::u_perp, pos, "> 0"),
      integer<int>("table_points", &RunConfig::table_points, [](int n) { return n >= 2; }, ">= 2"),
      real("table_extent", &RunConfig::table_extent, pos, "> 0"),
      integer<std::int64_t>("trials", &RunConfig::trials, [](std::int64_t n) { return n >= 1; }, ">= 1"),
      integer<int>("k_max", &RunConfig::k_max, [](int k) { return k >= 1; }, ">= 1"),
      real("horizon", &RunConfig::horizon, pos, "> 0"),
      real("census_delta", &RunConfig::census_delta, nonneg, ">= 0"),
      integer<int>("nx", &RunConfig::nx, [](int n) { return n >= 2; }, ">= 2"),
      integer<int>("M", &RunConfig::m, [](int m) { return m >= 3 && m % 2 == 1; }, "odd, >= 3"),
      real("v_max", &RunConfig::v_max, nonneg, ">= 0 (0 selects 6 sqrt(T_M))"),
      real("dt", &RunConfig::dt, nonneg, ">= 0 (0 selects the CFL step)"),
      real("cfl", &RunConfig::cfl, [](double x) { return x > 0.0 && x <= 1.0; }, "0 < cfl <= 1"),
      real("tol", &RunConfig::tol, pos, "> 0"),
      integer<int>("m_max", &RunConfig::m_max, [](int n) { return n >= 1; }, ">= 1"),
      integer<int>("n_mc", &RunConfig::n_mc, [](int n) { return n >= 1; }, ">= 1"),
      choice("datum", &RunConfig::datum, {"zero", "equilibrium", "perturbed", "beam"}),
      real("density", &RunConfig::density, nonneg, ">= 0"),
      real("amplitude", &RunConfig::amplitude, [](double a) { return std::abs(a) < 1.0; }, "|amplitude| < 1"),
  };
  return keys;
}

int line_of(const RunConfig& c, const std::string& key) {
  const auto it = c.origin.find(key);
  return it == c.origin.end() ? 0 : it->second;
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<ConfigIssue> list)
    : ConfigError([&] {
        std::string s;
        for (const auto& i : list)
          s += (s.empty() ? "" : "\n") + (i.line > 0 ? "line " + std::to_string(i.line) + ": " : std::string()) +
               i.message;
        return s;
      }()),
      issues(std::move(list)) {}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& k : table()) n.push_back(k.name);
    return n;
  }();
  return names;
}

std::optional<std::string> apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& k : table())
    if (k.name == key) return k.set(cfg, trim(value));
  return "unknown key '" + std::string(key) + "'";
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::vector<ConfigIssue> issues;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({line_no, "expected 'key = value'"});
    } else {
      const auto key = trim(line.substr(0, eq));
      if (auto err = apply_setting(base, key, line.substr(eq + 1)))
        issues.push_back({line_no, *err});
      else
        base.origin[std::string(key)] = line_no;
    }
    if (end == text.size()) break;
  }
  for (auto& i : validate(base)) issues.push_back(std::move(i));
  if (!issues.empty()) throw ConfigErrors(std::move(issues));
  return base;
}

std::vector<ConfigIssue> validate(const RunConfig& c) {
  std::vector<ConfigIssue> out;
  try {
    c.make_domain();
  } catch (const std::exception& e) {
    out.push_back({line_of(c, "wall_temp"), e.what()});
  }
  if (c.t_max && c.min_tw && *c.min_tw > *c.t_max)
    out.push_back({line_of(c, "minTw"), "minTw must not exceed TM"});
  if (c.command == "solve-slab") {
    const auto t = geometry::WallTemperature::parse(c.wall_temp);
    if (t.kind == geometry::WallTemperature::Kind::angular)
      out.push_back({line_of(c, "wall_temp"), "solve-slab needs wall_temp const:<v> or faces:<v0>,<v1>"});
  }
  if (c.command == "simulate" && c.mode == "creep") {
    if (c.model != "cl" && c.model != "diffuse")
      out.push_back({line_of(c, "model"), "creep runs need model = cl or diffuse"});
    if (c.domain == "slab") out.push_back({line_of(c, "domain"), "creep runs need a ball or disk"});
  }
  return out;
}

geometry::Domain RunConfig::make_domain() const {
  geometry::Shape shape = geometry::Ball{radius};
  if (domain == "disk") shape = geometry::Disk2D{radius};
  if (domain == "slab") shape = geometry::Slab{width, period};
  return geometry::Domain(shape, geometry::WallTemperature::parse(wall_temp));
}

wall::BoundaryModel RunConfig::make_model() const {
  if (model == "diffuse") return wall::Diffuse{};
  if (model == "specular") return wall::Specular{};
  if (model == "bounce_back") return wall::BounceBack{};
  if (model == "maxwell") return wall::make_maxwell(c);
  return wall::ClModel{wall::AccommodationPair(r_perp, r_par)};
}

std::string RunConfig::canonical(bool with_out) const {
  std::ostringstream s;
  s << "command = " << command << '\n';
  for (const auto& k : table())
    if (with_out || k.name != "out") s << k.name << " = " << k.get(*this) << '\n';
  return s.str();
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace clk::cli
