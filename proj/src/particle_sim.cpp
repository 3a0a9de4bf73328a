#include "clk/particle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clk/error.hpp"
#include "clk/parallel.hpp"
#include "clk/random.hpp"

namespace clk::particles {

namespace {

bool is_slab(const geometry::Domain& d) { return std::holds_alternative<geometry::Slab>(d.shape()); }

Vec3 uniform_position(const geometry::Domain& dom, RandomStream& rng) {
  const double r = dom.scale();
  if (const auto* s = std::get_if<geometry::Slab>(&dom.shape()))
    return {s->width * rng.uniform(), s->period * rng.uniform(), s->period * rng.uniform()};
  const bool disk = std::holds_alternative<geometry::Disk2D>(dom.shape());
  for (;;) {
    const Vec3 p{r * (2.0 * rng.uniform() - 1.0), r * (2.0 * rng.uniform() - 1.0),
                 disk ? 0.0 : r * (2.0 * rng.uniform() - 1.0)};
    if (dom.level(p) < 0.0) return p;
  }
}

SimObservables empty_observables(const SimConfig& c, const std::vector<double>& times) {
  SimObservables o;
  o.particles = c.n_particles;
  o.weight = 1.0 / static_cast<double>(c.n_particles);
  o.moments.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) o.moments[k].time = times[k];
  o.walls.resize(is_slab(c.domain) ? 2 : 1);
  o.speed_histogram.assign(static_cast<std::size_t>(c.speed_bins), 0.0);
  o.speed_bin = c.speed_bin;
  return o;
}

void merge_into(SimObservables& a, const SimObservables& b) {
  a.initial_count += b.initial_count;
  a.final_count += b.final_count;
  for (std::size_t k = 0; k < a.moments.size(); ++k) {
    auto& x = a.moments[k];
    const auto& y = b.moments[k];
    for (int d = 0; d < 3; ++d) x.velocity[d].merge(y.velocity[d]);
    x.energy.merge(y.energy);
    x.x1.merge(y.x1);
    x.energy_x1.merge(y.energy_x1);
  }
  for (std::size_t w = 0; w < a.walls.size(); ++w) {
    auto& x = a.walls[w];
    const auto& y = b.walls[w];
    x.incident += y.incident;
    x.emitted += y.emitted;
    x.incident_weight += y.incident_weight;
    x.emitted_weight += y.emitted_weight;
    x.incident_speed.insert(x.incident_speed.end(), y.incident_speed.begin(), y.incident_speed.end());
    x.emitted_speed.insert(x.emitted_speed.end(), y.emitted_speed.begin(), y.emitted_speed.end());
  }
  for (std::size_t k = 0; k < a.speed_histogram.size(); ++k) a.speed_histogram[k] += b.speed_histogram[k];
  a.max_speed_drift = std::max(a.max_speed_drift, b.max_speed_drift);
  a.wall_events += b.wall_events;
}

}  // namespace

void SimConfig::validate() const {
  if (n_particles < 1) throw ConfigError("n_particles must be at least 1");
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (!(initial_temperature > 0.0)) throw ConfigError("initial temperature must be positive");
  if (!(speed_bin > 0.0) || speed_bins < 2) throw ConfigError("speed histogram needs a positive bin and >= 2 bins");
  if (recorded_particles < 0) throw ConfigError("recorded_particles must be non-negative");
  for (double t : sample_times)
    if (!(t >= 0.0 && t <= t_end)) throw ConfigError("sample times must lie in [0, t_end]");
  if (const auto* m = std::get_if<wall::Maxwell>(&model))
    if (!(m->c >= 0.0 && m->c <= 1.0)) throw ConfigError("Maxwell accommodation c must lie in [0, 1]");
}

double SimConfig::flight_time() const { return domain.scale() / std::sqrt(initial_temperature); }

SimObservables run_transient(const SimConfig& config) {
  config.validate();
  std::vector<double> times = config.sample_times;
  times.push_back(config.t_end);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const auto& dom = config.domain;
  const double tau_f = config.flight_time();
  const bool slab = is_slab(dom);
  const double mid = slab ? 0.5 * dom.scale() : 0.0;
  const double nudge = 1e-12 * dom.scale();
  const double t0 = config.initial_temperature;

  const std::size_t workers = static_cast<std::size_t>(std::max(1, config.threads));
  std::vector<SimObservables> partial(workers, empty_observables(config, times));
  const std::size_t n = static_cast<std::size_t>(config.n_particles);
  const std::size_t chunk = (n + workers - 1) / workers;

  parallel_for(workers, config.threads, [&](std::size_t wb, std::size_t we) {
    for (std::size_t w = wb; w < we; ++w) {
      auto& obs = partial[w];
      for (std::size_t id = w * chunk; id < std::min(n, (w + 1) * chunk); ++id) {
        auto rng = RandomStream::derive(config.seed, {id});
        Particle p{uniform_position(dom, rng), rng.gaussian_vector(t0), obs.weight};
        const double speed0 = norm(p.v);
        const bool record = static_cast<std::int64_t>(id) < config.recorded_particles;
        ++obs.initial_count;
        double t = 0.0;  // physical time
        std::size_t next = 0;
        while (next < times.size()) {
          const auto hit = geometry::first_exit_forward(p.x, p.v, dom);
          const double tau = hit ? hit->time : std::numeric_limits<double>::infinity();
          while (next < times.size() && t + tau >= times[next] * tau_f) {
            const Vec3 x = dom.wrap(p.x + (times[next] * tau_f - t) * p.v);
            auto& s = obs.moments[next];
            const double e = norm2(p.v);
            s.velocity[0].add(p.v.x);
            s.velocity[1].add(p.v.y);
            s.velocity[2].add(p.v.z);
            s.energy.add(e);
            s.x1.add(x.x - mid);
            s.energy_x1.add(e * (x.x - mid));
            ++next;
          }
          if (next == times.size()) break;
          t += tau;
          p.x = hit->point;
          const Vec3 u = p.v;
          const double un = dot(u, hit->normal);
          if (!(un > 0.0)) {
            // tangent flight: no interaction, step off the wall
            p.x = p.x - nudge * hit->normal;
            continue;
          }
          auto& tally = obs.walls[slab && p.x.x > mid ? 1 : 0];
          p.v = wall::scatter(config.model, u, hit->wall, rng);
          p.x = dom.wrap(p.x);
          ++obs.wall_events;
          ++tally.incident;
          ++tally.emitted;
          tally.incident_weight += p.weight;
          tally.emitted_weight += p.weight;
          if (record) {
            tally.incident_speed.push_back(norm(u));
            tally.emitted_speed.push_back(norm(p.v));
          }
        }
        const double speed = norm(p.v);
        obs.max_speed_drift = std::max(obs.max_speed_drift, std::abs(speed - speed0) / speed0);
        const auto bin = std::min<std::size_t>(static_cast<std::size_t>(speed / config.speed_bin),
                                               obs.speed_histogram.size() - 1);
        obs.speed_histogram[bin] += 1.0;
        ++obs.final_count;
      }
    }
  });

  SimObservables out = empty_observables(config, times);
  for (const auto& p : partial) merge_into(out, p);
  return out;
}

stats::ChiSquare speed_chi_square(const SimObservables& obs, double temperature) {
  const std::size_t bins = obs.speed_histogram.size();
  double total = 0.0;
  for (double c : obs.speed_histogram) total += c;
  std::vector<double> expected(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double lo = stats::maxwell_speed_cdf(static_cast<double>(k) * obs.speed_bin, temperature);
    const double hi = k + 1 == bins ? 1.0 : stats::maxwell_speed_cdf(static_cast<double>(k + 1) * obs.speed_bin, temperature);
    expected[k] = total * (hi - lo);
  }
  return stats::chi_square_gof(obs.speed_histogram, expected);
}

double BeamHistogram::fraction_within(const std::array<double, 2>& centre, double radius) const {
  if (samples.empty()) return 0.0;
  std::int64_t in = 0;
  for (const auto& s : samples)
    if (std::hypot(s[0] - centre[0], s[1] - centre[1]) <= radius) ++in;
  return static_cast<double>(in) / static_cast<double>(samples.size());
}

BeamHistogram beam_reflection_histogram(const Vec3& u_in, const wall::WallPatch& wall,
                                        const wall::BoundaryModel& model, std::int64_t n,
                                        std::uint64_t seed) {
  if (n < 1000) throw ConfigError("beam histogram needs at least 1000 samples");
  BeamHistogram h;
  h.n = n;
  h.mass.assign(static_cast<std::size_t>(h.bins) * h.bins, 0.0);
  h.samples.reserve(static_cast<std::size_t>(n));
  const Vec3 image = reflect_specular(u_in, wall.normal);
  const auto* maxwell = std::get_if<wall::Maxwell>(&model);
  auto rng = RandomStream::derive(seed, {0xbea3});
  const double unit = 1.0 / static_cast<double>(n);
  for (std::int64_t k = 0; k < n; ++k) {
    Vec3 v;
    bool atom;
    if (maxwell) {
      const auto d = wall::maxwell_sample(u_in, wall, maxwell->c, rng);
      v = d.v;
      atom = d.specular;
    } else {
      v = wall::scatter(model, u_in, wall, rng);
      atom = v.x == image.x && v.y == image.y && v.z == image.z;
    }
    if (atom) ++h.atom_count;
    const std::array<double, 2> p{dot(v, wall.tangent1), -dot(v, wall.normal)};
    h.samples.push_back(p);
    h.tangential.add(p[0]);
    h.normal.add(p[1]);
    const double fx = (p[0] + h.extent) / h.bin;
    const double fy = (p[1] + h.extent) / h.bin;
    if (fx >= 0.0 && fy >= 0.0 && fx < h.bins && fy < h.bins)
      h.mass[static_cast<std::size_t>(fx) * h.bins + static_cast<std::size_t>(fy)] += unit;
  }
  const auto top = std::max_element(h.mass.begin(), h.mass.end()) - h.mass.begin();
  h.mode = {-h.extent + (static_cast<double>(top / h.bins) + 0.5) * h.bin,
            -h.extent + (static_cast<double>(top % h.bins) + 0.5) * h.bin};
  return h;
}

FigureSetup figure_setup(int which) {
  FigureSetup f;
  f.which = which;
  f.wall = wall::WallPatch::make(1.0, {0.0, 0.0, 1.0});
  f.u_in = 2.0 * f.wall.tangent1 + 2.0 * f.wall.normal;
  switch (which) {
    case 1: f.model = wall::make_maxwell(0.5); break;
    case 2: f.model = wall::ClModel{wall::AccommodationPair(0.5, 0.5)}; break;
    case 3: f.model = wall::ClModel{wall::AccommodationPair(0.1, 0.1)}; break;
    case 4: f.model = wall::ClModel{wall::AccommodationPair(1.0 / 30.0, 1.0 / 30.0)}; break;
    default: throw ConfigError("figure number must be 1, 2, 3 or 4");
  }
  return f;
}

void CreepConfig::validate() const {
  if (std::holds_alternative<geometry::Slab>(shape)) throw ConfigError("thermal creep runs need a ball or disk");
  if (!(t0 > 0.0)) throw ConfigError("T0 must be positive");
  if (!(std::abs(amp) <= 0.1 * t0)) throw ConfigError("thermal creep needs |amp| <= 0.1 T0");
  if (std::abs(r.r_perp() - 1.0) > 0.1 + 1e-12 || std::abs(r.r_par() - 1.0) > 0.1 + 1e-12)
    throw ConfigError("thermal creep needs accommodation within 0.1 of (1, 1)");
  if (n_particles < 1 || !(relax >= 0.0) || !(window > 0.0) || samples_per_window < 2)
    throw ConfigError("invalid thermal creep run lengths");
}

double CreepReport::deviation() const { return std::abs(dipole); }

CreepReport thermal_creep_steady(const CreepConfig& c) {
  c.validate();
  SimConfig s;
  s.domain = geometry::Domain(c.shape, geometry::WallTemperature::angular(c.t0, c.amp));
  s.model = wall::ClModel{c.r};
  s.n_particles = c.n_particles;
  s.initial_temperature = c.t0;
  s.t_end = c.relax + 2.0 * c.window;
  s.seed = c.seed;
  s.threads = c.threads;
  s.recorded_particles = 0;
  const double step = c.window / c.samples_per_window;
  for (int w = 0; w < 2; ++w)
    for (int k = 1; k <= c.samples_per_window; ++k) s.sample_times.push_back(c.relax + w * c.window + k * step);

  CreepReport rep;
  rep.observables = run_transient(s);
  const double radius = s.domain.scale();
  stats::Accumulator all;
  for (const auto& m : rep.observables.moments) {
    if (m.time <= c.relax) continue;
    const int w = m.time <= c.relax + c.window * (1.0 + 1e-12) ? 0 : 1;
    rep.windows[w].dipole.add(m.x1.mean() / radius);
    rep.windows[w].energy.add(m.energy.mean() / (3.0 * c.t0));
    all.add(m.x1.mean() / radius);
  }
  rep.dipole = all.mean();
  rep.dipole_se = all.std_error();
  auto z = [](const stats::Accumulator& a, const stats::Accumulator& b) {
    const double se = std::hypot(a.std_error(), b.std_error());
    return se > 0.0 ? std::abs(a.mean() - b.mean()) / se : 0.0;
  };
  rep.stationarity_z = std::max(z(rep.windows[0].dipole, rep.windows[1].dipole),
                                z(rep.windows[0].energy, rep.windows[1].energy));
  rep.stationary = rep.stationarity_z < 3.0;
  return rep;
}

}  // namespace clk::particles
