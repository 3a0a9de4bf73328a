#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "clk/collision.hpp"
#include "clk/error.hpp"
#include "clk/theorem_constants.hpp"
#include "clk/wall.hpp"

namespace clk::slab {

enum class Datum { zero, equilibrium, perturbed, beam };

struct WallSpec {
  wall::BoundaryModel model = wall::Diffuse{};
  double temperature = 1.0;
};

struct SlabConfig {
  double width = 1.0;
  int nx = 10;
  int m = 15;            // velocity points per axis
  double v_max = 0.0;    // 0: 6 sqrt(T_M)
  double t_end = 0.1;
  double dt = 0.0;       // 0: largest step with CFL number `cfl`
  double cfl = 0.5;
  double theta = 0.0;    // 0: 1/(8 T_M)
  collision::CollisionModel collision{1.0};
  int n_mc = 32;
  double tol = 1e-8;
  int m_max = 50;
  std::uint64_t seed = 1;
  std::array<WallSpec, 2> walls{};  // faces x = 0 and x = width
  Datum datum = Datum::perturbed;
  double density = 0.1;     // number density of the equilibrium datum
  double amplitude = 0.1;   // perturbation amplitude (perturbed datum)
  Vec3 beam_velocity{1.5, 0.5, 0.0};
  double beam_spread = 0.5;   // standard deviation of the beam
  double beam_fraction = 0.1; // beam density relative to `density`
  int threads = 1;

  double t_max() const;
  void validate() const;
};

struct IterationRecord {
  int m = 0;
  double sup_h = 0.0;          // sup over (t, x, v) of |h^m|
  double diff = 0.0;           // sup |h^m - h^{m-1}|
  double mass = 0.0;           // int int F^m(t_end) dv dx
  double flux_residual = 0.0;  // max over walls and t of |net flux| / incident flux
  double min_f = 0.0;
};

struct SolveReport {
  std::vector<IterationRecord> history;
  bool converged = false;
  int iterations = 0;
  double h0_sup = 0.0;
  double bound_ratio = 0.0;  // sup_t ||h(t)||_inf / ||h_0||_inf
  double initial_mass = 0.0;
  double final_mass = 0.0;
  std::array<double, 2> wall_defect{};  // max |column sum - 1| of the raw wall matrix
  double theta = 0.0;
  double t_max = 0.0;
  double dt = 0.0;
  int nt = 0;
  double dx = 0.0;
  int nx = 0;
  int m = 0;
  double v_max = 0.0;
  std::vector<double> final_f;  // F(t_end) indexed [cell * M^3 + node]
  std::optional<theorem::HypothesisReport> hypothesis;
};

class DivergenceError : public ConsistencyError {
public:
  DivergenceError(const std::string& what, SolveReport partial)
      : ConsistencyError(what), report(std::make_shared<SolveReport>(std::move(partial))) {}
  std::shared_ptr<SolveReport> report;
};

// The iterate F^m on the full space-time grid, F[(n * nx + i) * M^3 + j].
struct IterationState {
  int m = 0;
  std::vector<double> f;
};

class SlabSolver {
public:
  explicit SlabSolver(const SlabConfig& config);
  ~SlabSolver();
  SlabSolver(const SlabSolver&) = delete;
  SlabSolver& operator=(const SlabSolver&) = delete;

  const IterationState& state() const;
  const collision::VelocityGrid& grid() const;
  int time_steps() const;
  double time_step() const;
  // h = e^{(theta - t)|v|^2} F / sqrt(mu) at time level n, cell i, node j.
  double h(int n, int i, std::size_t j) const;

  // One sweep m -> m + 1 of the iteration; returns the record of the new
  // iterate.
  IterationRecord advance_iteration();

  SolveReport solve();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SolveReport solve(const SlabConfig& config);

}  // namespace clk::slab
