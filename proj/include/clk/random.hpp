#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "clk/vec3.hpp"

namespace clk {

// splitmix64 finalizer; used to turn (seed, key...) tuples into independent
// engine seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// A random stream owned by one worker. Streams are derived from a run seed and
// a tuple of integer keys (trial index, particle id, grid node, ...), so the
// draws seen by a given trial never depend on scheduling.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = mix64(seed);
    for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    return RandomStream(h);
  }

  // Uniform on [0, 1).
  double uniform() { return std::generate_canonical<double, 53>(engine_); }

  double normal() { return normal_(engine_); }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform direction on the unit sphere.
  Vec3 unit_vector() {
    const double cz = 2.0 * uniform() - 1.0;
    const double phi = 2.0 * 3.14159265358979323846 * uniform();
    const double s = std::sqrt(std::max(0.0, 1.0 - cz * cz));
    return {s * std::cos(phi), s * std::sin(phi), cz};
  }

  Vec3 gaussian_vector(double variance) {
    const double s = std::sqrt(variance);
    return {s * normal(), s * normal(), s * normal()};
  }

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace clk
