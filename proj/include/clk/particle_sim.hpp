#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "clk/geometry.hpp"
#include "clk/stats.hpp"
#include "clk/wall.hpp"

namespace clk::particles {

struct Particle {
  Vec3 x{};
  Vec3 v{};
  double weight = 1.0;
};

// Times are measured in mean-flight units tau_f = L / sqrt(T0), with L the
// radius (ball, disk) or width (slab).
struct SimConfig {
  geometry::Domain domain{geometry::Ball{1.0}, geometry::WallTemperature::constant(1.0)};
  wall::BoundaryModel model = wall::Diffuse{};
  std::int64_t n_particles = 100000;
  double initial_temperature = 1.0;  // T0 of the initial Maxwellian
  double t_end = 20.0;
  std::vector<double> sample_times;  // t_end is always sampled
  std::uint64_t seed = 1;
  int threads = 1;
  std::int64_t recorded_particles = 2000;  // ids whose wall events keep speeds
  double speed_bin = 0.1;
  int speed_bins = 80;  // last bin collects the overflow

  void validate() const;
  double flight_time() const;
};

struct MomentSample {
  double time = 0.0;  // mean-flight units
  std::array<stats::Accumulator, 3> velocity;
  stats::Accumulator energy;     // |v|^2
  stats::Accumulator x1;         // first coordinate (slab: offset from mid-plane)
  stats::Accumulator energy_x1;  // |v|^2 x1
};

struct WallTally {
  std::int64_t incident = 0;
  std::int64_t emitted = 0;
  double incident_weight = 0.0;
  double emitted_weight = 0.0;
  std::vector<double> incident_speed;  // recorded particles only
  std::vector<double> emitted_speed;
};

struct SimObservables {
  std::int64_t particles = 0;
  std::int64_t initial_count = 0;
  std::int64_t final_count = 0;
  double weight = 0.0;  // per particle, 1 / N
  double initial_mass() const { return static_cast<double>(initial_count) * weight; }
  double final_mass() const { return static_cast<double>(final_count) * weight; }
  std::vector<MomentSample> moments;  // one per sample time, sorted
  std::vector<WallTally> walls;       // ball/disk: 1, slab: faces x1 = 0 and x1 = W
  std::vector<double> speed_histogram;  // final volume speeds (counts)
  double speed_bin = 0.1;
  double max_speed_drift = 0.0;  // max relative | |v(t_end)| - |v(0)| |
  std::int64_t wall_events = 0;
};

SimObservables run_transient(const SimConfig& config);

// Chi-square of the final speed histogram against the Maxwellian at T.
stats::ChiSquare speed_chi_square(const SimObservables& obs, double temperature);

// Reflected-beam statistics in the figures' 2-D coordinates
// (v . t1, -v . n): the incident beam is (2, -2), its specular image (2, 2).
struct BeamHistogram {
  double bin = 0.1;
  double extent = 6.0;  // histogram covers [-extent, extent]^2
  int bins = 120;
  std::vector<double> mass;  // [ix * bins + iy], normalised to unit mass
  std::vector<std::array<double, 2>> samples;
  std::int64_t n = 0;
  std::int64_t atom_count = 0;  // draws equal to the specular image
  stats::Accumulator tangential;
  stats::Accumulator normal;
  std::array<double, 2> mode{};  // centre of the heaviest bin
  double fraction_within(const std::array<double, 2>& centre, double radius) const;
};

BeamHistogram beam_reflection_histogram(const Vec3& u_in, const wall::WallPatch& wall,
                                        const wall::BoundaryModel& model, std::int64_t n,
                                        std::uint64_t seed);

// Figure setups 1-4: Maxwell c = 1/2 and C-L with r = 1/2, 1/10, 1/30;
// beam (2, -2) on a wall at T_w = 1.
struct FigureSetup {
  int which = 1;
  wall::BoundaryModel model = wall::Diffuse{};
  Vec3 u_in{};
  wall::WallPatch wall;
};
FigureSetup figure_setup(int which);

// Long-run steady state of a ball or disk under T_w = T0 + amp cos(theta).
struct CreepConfig {
  geometry::Shape shape = geometry::Ball{1.0};
  double t0 = 1.0;
  double amp = 0.05;
  wall::AccommodationPair r{1.0, 1.0};
  std::int64_t n_particles = 100000;
  double relax = 20.0;   // discarded, mean-flight units
  double window = 40.0;  // length of each of the two averaging windows
  int samples_per_window = 20;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

struct WindowAverage {
  stats::Accumulator dipole;  // per-snapshot <x1> / R
  stats::Accumulator energy;  // per-snapshot <|v|^2> / (3 T0)
};

struct CreepReport {
  SimObservables observables;
  std::array<WindowAverage, 2> windows;
  double dipole = 0.0;  // <x1>/R over both windows
  double dipole_se = 0.0;
  double stationarity_z = 0.0;  // max window difference in standard errors
  bool stationary = true;
  // Deviation from the uniform Maxwellian: |<x1>| / R.
  double deviation() const;
};

CreepReport thermal_creep_steady(const CreepConfig& config);

}  // namespace clk::particles
