#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "clk/geometry.hpp"
#include "clk/random.hpp"
#include "clk/stats.hpp"
#include "clk/theorem_constants.hpp"
#include "clk/wall.hpp"

namespace clk::cycles {

inline constexpr int kDefaultKMax = 64;

enum class Termination { reached_datum, truncated };

// Back-time cycle (t_k, x_k, v_k), k = 1..K, stored at index k - 1. Every
// stored entry has t_k > 0, x_k on the boundary and n(x_k).v_k > 0.
struct BackTimeCycle {
  double t0 = 0.0;
  Vec3 x0{};
  Vec3 v0{};
  std::vector<double> t;
  std::vector<Vec3> x;
  std::vector<Vec3> v;
  std::vector<Vec3> normal;
  Termination termination = Termination::reached_datum;
  // Number of boundary interactions with t_k > 0.
  int hits() const { return static_cast<int>(t.size()); }
};

// One step of the d(sigma) chain: -v_k ~ R(-v_{k-1} -> .) at the wall.
Vec3 sigma_step(const wall::BoundaryModel& model, const Vec3& v_prev, const wall::WallPatch& wall,
                RandomStream& rng);

BackTimeCycle sample_cycle(double t, const Vec3& x, const Vec3& v, const geometry::Domain& dom,
                           const wall::BoundaryModel& model, int k_max, RandomStream& rng);

struct Census {
  std::vector<bool> member;  // v_j in V_j^delta: |v_j.n| > delta and |v_j| <= 1/delta
  int count = 0;
  // min of t_j - t_{j+1} over members j with a recorded successor; +inf if none
  double min_gap = 0.0;
};

Census velocity_set_census(const BackTimeCycle& cycle, double delta);

struct DecayConfig {
  geometry::Domain domain{geometry::Ball{1.0}, geometry::WallTemperature::constant(1.0)};
  wall::BoundaryModel model = wall::Diffuse{};
  double horizon = 1.0;  // anchor time t
  Vec3 anchor_x{};
  // Fixed anchor velocity, or (when unset) a Maxwellian draw at temperature
  // `anchor_temperature` per trial.
  std::optional<Vec3> anchor_v;
  double anchor_temperature = 1.0;
  int k_max = kDefaultKMax;
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  double census_delta = 0.0;  // 0 disables the census
  double theta = 0.0;         // 0 means 1/(8 T_M) for the hypothesis report
};

struct CycleStats {
  std::int64_t trials = 0;
  // hits[k-1] = #trials with t_k > 0, k = 1..k_max
  std::vector<std::int64_t> hits;
  std::int64_t truncated = 0;
  std::int64_t census_in = 0;
  std::int64_t census_out = 0;
  double census_min_gap = 0.0;
  double census_fitted_c = 0.0;  // census_min_gap / delta^3

  bool monotone = true;           // hits non-increasing in k
  double max_increase_z = 0.0;    // largest standardized rise p_{k+1} - p_k
  std::optional<theorem::HypothesisReport> hypothesis;  // C-L walls only

  double p_hat(int k) const;
  stats::Interval ci(int k, double z = 1.96) const;
};

CycleStats interaction_decay(const DecayConfig& config);

}  // namespace clk::cycles
