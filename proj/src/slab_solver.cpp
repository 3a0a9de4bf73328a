#include "clk/slab_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "clk/parallel.hpp"
#include "clk/random.hpp"

namespace clk::slab {

namespace {

constexpr double kPi = std::numbers::pi;

double wall_t_max(const SlabConfig& c) { return std::max(c.walls[0].temperature, c.walls[1].temperature); }

// Discrete wall operator: emitted flux phi_out[j] = sum_k p[j][k] phi_in[k],
// with incident/emitted node lists.
struct WallOperator {
  std::vector<std::size_t> incident;
  std::vector<std::size_t> emitted;
  std::vector<double> p;  // row-major [emitted][incident]
  double defect = 0.0;
};

}  // namespace

double SlabConfig::t_max() const { return wall_t_max(*this); }

void SlabConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(width > 0.0)) fail("slab width must be positive");
  if (nx < 2) fail("nx must be at least 2");
  if (m < 3 || m % 2 == 0) fail("velocity points per axis must be odd and >= 3");
  if (!(t_end > 0.0)) fail("t_end must be positive");
  if (!(cfl > 0.0 && cfl <= 1.0)) fail("cfl must lie in (0, 1]");
  if (dt < 0.0) fail("dt must be non-negative");
  if (n_mc <= 0) fail("n_mc must be positive");
  if (!(tol > 0.0)) fail("tol must be positive");
  if (m_max < 1) fail("m_max must be at least 1");
  if (!(density >= 0.0)) fail("density must be non-negative");
  if (!(std::abs(amplitude) < 1.0)) fail("perturbation amplitude must satisfy |a| < 1");
  if (!(beam_spread > 0.0) || !(beam_fraction >= 0.0)) fail("beam spread must be positive");
  for (const auto& w : walls)
    if (!(w.temperature > 0.0)) fail("wall temperatures must be positive");
  try {
    collision.validate();
  } catch (const DomainError& e) {
    fail(e.what());
  }
  const double tm = t_max();
  const double th = theta > 0.0 ? theta : 1.0 / (8.0 * tm);
  if (!(th < 1.0 / (4.0 * tm))) fail("theta must satisfy 0 < theta < 1/(4 T_M)");
  const double vm = v_max > 0.0 ? v_max : 6.0 * std::sqrt(tm);
  if (vm < 6.0 * std::sqrt(tm) * (1 - 1e-12)) fail("v_max must be at least 6 sqrt(T_M)");
  if (dt > 0.0 && dt * vm > width / nx * (1 + 1e-12))
    fail("CFL violation: dt * max|v1| exceeds the cell width");
}

struct SlabSolver::Impl {
  SlabConfig cfg;
  collision::VelocityGrid grid;
  double tm, theta, vmax, dx, dt;
  int nt, nx;
  std::size_t nv;
  std::vector<Vec3> nodes;
  std::vector<double> mu;        // e^{-|v|^2/(2 T_M)}
  std::vector<double> weight_h;  // e^{theta |v|^2 + |v|^2/(4 T_M)}; times e^{-t|v|^2}
  std::vector<double> f0;        // initial datum [i * nv + j]
  std::array<WallOperator, 2> walls;

  // Monte Carlo samples per velocity node (common random numbers)
  std::vector<double> samp_b;  // C * B, [j * n_mc + s]
  std::vector<collision::VelocityGrid::Stencil> st_u, st_up, st_vp;

  IterationState state;
  std::vector<double> h0sup_cache;

  explicit Impl(const SlabConfig& c)
      : cfg((c.validate(), c)),
        grid(c.m, c.v_max > 0.0 ? c.v_max : 6.0 * std::sqrt(wall_t_max(c))) {
    tm = cfg.t_max();
    theta = cfg.theta > 0.0 ? cfg.theta : 1.0 / (8.0 * tm);
    vmax = grid.v_max();
    nx = cfg.nx;
    dx = cfg.width / nx;
    if (cfg.dt > 0.0) {
      nt = static_cast<int>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
    } else {
      nt = static_cast<int>(std::ceil(cfg.t_end * vmax / (cfg.cfl * dx) - 1e-9));
    }
    nt = std::max(nt, 1);
    dt = cfg.t_end / nt;
    nv = grid.size();
    nodes.resize(nv);
    mu.resize(nv);
    weight_h.resize(nv);
    for (std::size_t j = 0; j < nv; ++j) {
      nodes[j] = grid.node(j);
      const double v2 = norm2(nodes[j]);
      mu[j] = std::exp(-v2 / (2.0 * tm));
      weight_h[j] = std::exp(theta * v2 + v2 / (4.0 * tm));
    }
    build_datum();
    build_samples();
    for (int w = 0; w < 2; ++w) build_wall(w);
    state.m = 0;
    state.f.assign(static_cast<std::size_t>(nt + 1) * nx * nv, 0.0);
    for (int n = 0; n <= nt; ++n) std::copy(f0.begin(), f0.end(), state.f.begin() + level(n));
  }

  std::size_t level(int n) const { return static_cast<std::size_t>(n) * nx * nv; }

  void build_datum() {
    f0.assign(static_cast<std::size_t>(nx) * nv, 0.0);
    if (cfg.datum == Datum::zero) return;
    const double norm_eq = cfg.density / std::pow(2.0 * kPi * tm, 1.5);
    for (int i = 0; i < nx; ++i) {
      const double x = (i + 0.5) * dx;
      const double mod = cfg.datum == Datum::perturbed ? 1.0 + cfg.amplitude * std::cos(2.0 * kPi * x / cfg.width) : 1.0;
      for (std::size_t j = 0; j < nv; ++j) {
        double f = norm_eq * mu[j] * mod;
        if (cfg.datum == Datum::beam) {
          const double s2 = cfg.beam_spread * cfg.beam_spread;
          f += cfg.density * cfg.beam_fraction * std::exp(-norm2(nodes[j] - cfg.beam_velocity) / (2.0 * s2)) /
               std::pow(2.0 * kPi * s2, 1.5);
        }
        f0[static_cast<std::size_t>(i) * nv + j] = f;
      }
    }
  }

  void build_samples() {
    const int ns = cfg.n_mc;
    samp_b.resize(nv * ns);
    st_u.resize(nv * ns);
    st_up.resize(nv * ns);
    st_vp.resize(nv * ns);
    // mu(u)/g(u) = (2 pi T_M)^{3/2} for the T_M Gaussian importance density;
    // the sphere contributes 4 pi
    const double c = 4.0 * kPi * std::pow(2.0 * kPi * tm, 1.5);
    parallel_for(nv, cfg.threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) {
        auto rng = RandomStream::derive(cfg.seed, {0x51ab, j});
        const Vec3 v = nodes[j];
        for (int s = 0; s < ns; ++s) {
          const std::size_t k = j * ns + s;
          const Vec3 u = rng.gaussian_vector(tm);
          const Vec3 w = rng.unit_vector();
          double bval = collision::kernel_B(u, v, w, cfg.collision);
          if (cfg.collision.kappa < 0.0 && norm(u - v) < collision::kCoincidence) bval = 0.0;
          const auto [up, vp] = collision::post_collision(u, v, w);
          samp_b[k] = c * bval / ns;
          st_u[k] = grid.stencil(u);
          st_up[k] = grid.stencil(up);
          st_vp[k] = grid.stencil(vp);
        }
      }
    });
  }

  void build_wall(int w) {
    auto& op = walls[static_cast<std::size_t>(w)];
    const Vec3 n = w == 0 ? Vec3{-1.0, 0.0, 0.0} : Vec3{1.0, 0.0, 0.0};
    const double tw = cfg.walls[static_cast<std::size_t>(w)].temperature;
    const auto patch = wall::WallPatch::make(tw, n);
    for (std::size_t j = 0; j < nv; ++j) {
      const double vn = dot(nodes[j], n);
      if (vn > 0.0) op.incident.push_back(j);
      if (vn < 0.0) op.emitted.push_back(j);
    }
    const std::size_t ni = op.incident.size();
    const std::size_t ne = op.emitted.size();
    op.p.assign(ne * ni, 0.0);

    std::vector<std::size_t> pos(nv, 0);
    for (std::size_t r = 0; r < ne; ++r) pos[op.emitted[r]] = r;

    auto mirror_row = [&](std::size_t k, bool bounce) {
      const Vec3 u = nodes[op.incident[k]];
      const Vec3 img = bounce ? -u : reflect_specular(u, n);
      const auto s = grid.stencil(img);
      // img lies on a node: pick the stencil entry with unit weight
      for (int c = 0; c < 8; ++c)
        if (s.w[c] > 0.5) return pos[s.idx[c]];
      throw ConsistencyError("mirror image is not a grid node");
    };

    const auto& model = cfg.walls[static_cast<std::size_t>(w)].model;
    double diffuse_part = 0.0;
    std::optional<wall::AccommodationPair> continuous;
    bool bounce = false;
    if (const auto* cl = std::get_if<wall::ClModel>(&model)) {
      continuous = cl->r;
      diffuse_part = 1.0;
    } else if (std::holds_alternative<wall::Diffuse>(model)) {
      continuous = wall::AccommodationPair(1.0, 1.0);
      diffuse_part = 1.0;
    } else if (const auto* mx = std::get_if<wall::Maxwell>(&model)) {
      if (mx->c > 0.0) continuous = wall::AccommodationPair(1.0, 1.0);
      diffuse_part = mx->c;
    } else if (std::holds_alternative<wall::BounceBack>(model)) {
      bounce = true;
    }

    if (continuous) {
      const double cell = grid.weight();
      std::vector<double> phi_in(ni), phi_out(ne);
      for (std::size_t k = 0; k < ni; ++k) {
        const Vec3 u = nodes[op.incident[k]];
        phi_in[k] = std::exp(-norm2(u) / (2.0 * tw)) * std::abs(dot(u, n));
      }
      for (std::size_t r = 0; r < ne; ++r) {
        const Vec3 v = nodes[op.emitted[r]];
        phi_out[r] = std::exp(-norm2(v) / (2.0 * tw)) * std::abs(dot(v, n));
      }
      // raw transfer probabilities R(u_k -> v_r) dv
      std::vector<double> a(ne * ni);
      parallel_for(ne, cfg.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r)
          for (std::size_t k = 0; k < ni; ++k)
            a[r * ni + k] = wall::cl_density(nodes[op.incident[k]], nodes[op.emitted[r]], patch, *continuous) * cell;
      });
      for (std::size_t k = 0; k < ni; ++k) {
        double s = 0.0;
        for (std::size_t r = 0; r < ne; ++r) s += a[r * ni + k];
        if (!(s > 1e-300)) throw ConfigError("accommodation coefficients too small for the velocity grid");
        op.defect = std::max(op.defect, std::abs(s - 1.0));
      }
      // Sinkhorn balancing of A[r][k] = P[r][k] phi_in[k]: column sums phi_in
      // (mass) and row sums phi_out (wall Maxwellian is a fixed point)
      for (std::size_t r = 0; r < ne; ++r)
        for (std::size_t k = 0; k < ni; ++k) a[r * ni + k] *= phi_in[k];
      std::vector<double> rows(ne), cols(ni);
      for (int it = 0; it < 20000; ++it) {
        std::fill(rows.begin(), rows.end(), 0.0);
        for (std::size_t r = 0; r < ne; ++r)
          for (std::size_t k = 0; k < ni; ++k) rows[r] += a[r * ni + k];
        double err = 0.0;
        for (std::size_t r = 0; r < ne; ++r) {
          const double f = phi_out[r] / rows[r];
          err = std::max(err, std::abs(f - 1.0));
          for (std::size_t k = 0; k < ni; ++k) a[r * ni + k] *= f;
        }
        std::fill(cols.begin(), cols.end(), 0.0);
        for (std::size_t r = 0; r < ne; ++r)
          for (std::size_t k = 0; k < ni; ++k) cols[k] += a[r * ni + k];
        for (std::size_t k = 0; k < ni; ++k) {
          const double f = phi_in[k] / cols[k];
          err = std::max(err, std::abs(f - 1.0));
          for (std::size_t r = 0; r < ne; ++r) a[r * ni + k] *= f;
        }
        if (err < 1e-14) break;
      }
      for (std::size_t r = 0; r < ne; ++r)
        for (std::size_t k = 0; k < ni; ++k) op.p[r * ni + k] = diffuse_part * a[r * ni + k] / phi_in[k];
    }
    if (diffuse_part < 1.0) {
      for (std::size_t k = 0; k < ni; ++k) op.p[mirror_row(k, bounce) * ni + k] += 1.0 - diffuse_part;
    }
  }

  // Emitted ghost values F(v) for wall w from the incident values of `f`
  // (one time level, [i * nv + j]).
  void emit(int w, const double* f, std::vector<double>& ghost) const {
    const auto& op = walls[static_cast<std::size_t>(w)];
    const std::size_t cell = w == 0 ? 0 : static_cast<std::size_t>(nx - 1);
    const double* fc = f + cell * nv;
    const std::size_t ni = op.incident.size();
    std::vector<double> phi(ni);
    for (std::size_t k = 0; k < ni; ++k) phi[k] = fc[op.incident[k]] * std::abs(nodes[op.incident[k]].x);
    ghost.assign(nv, 0.0);
    for (std::size_t r = 0; r < op.emitted.size(); ++r) {
      const double* row = op.p.data() + r * ni;
      double s = 0.0;
      for (std::size_t k = 0; k < ni; ++k) s += row[k] * phi[k];
      const std::size_t j = op.emitted[r];
      ghost[j] = s / std::abs(nodes[j].x);
    }
  }

  double incident_flux(int w, const double* f) const {
    const auto& op = walls[static_cast<std::size_t>(w)];
    const std::size_t cell = w == 0 ? 0 : static_cast<std::size_t>(nx - 1);
    double s = 0.0;
    for (std::size_t j : op.incident) s += f[cell * nv + j] * std::abs(nodes[j].x);
    return s * grid.weight();
  }

  // Gain and loss frequency at one cell from the ratio rho = F / mu.
  void collide(const double* rho, std::vector<double>& gain, std::vector<double>& nu) const {
    const int ns = cfg.n_mc;
    for (std::size_t j = 0; j < nv; ++j) {
      double g = 0.0, l = 0.0;
      for (int s = 0; s < ns; ++s) {
        const std::size_t k = j * ns + s;
        const double b = samp_b[k];
        if (b == 0.0) continue;
        g += b * collision::apply(st_up[k], rho) * collision::apply(st_vp[k], rho);
        l += b * collision::apply(st_u[k], rho);
      }
      gain[j] = g * mu[j];
      nu[j] = l;
    }
  }

  IterationRecord sweep() {
    const std::vector<double>& old = state.f;
    std::vector<double> next(old.size(), 0.0);
    std::copy(f0.begin(), f0.end(), next.begin());
    double fmax0 = 0.0;
    for (double v : f0) fmax0 = std::max(fmax0, v);
    double min_f = 0.0;
    double flux_res = 0.0;
    const double courant = dt / dx;

    std::vector<double> ghost0, ghost1;
    for (int n = 0; n < nt; ++n) {
      const double* fo = old.data() + level(n);
      const double* fc = next.data() + level(n);
      double* fn = next.data() + level(n + 1);
      emit(0, fo, ghost0);
      emit(1, fo, ghost1);
      // transport (first-order upwind; exact mass bookkeeping at the faces)
      for (int i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < nv; ++j) {
          const double vx = nodes[j].x;
          const double c = fc[static_cast<std::size_t>(i) * nv + j];
          double up;
          if (vx > 0.0) {
            up = i == 0 ? ghost0[j] : fc[static_cast<std::size_t>(i - 1) * nv + j];
          } else if (vx < 0.0) {
            up = i == nx - 1 ? ghost1[j] : fc[static_cast<std::size_t>(i + 1) * nv + j];
          } else {
            up = c;
          }
          fn[static_cast<std::size_t>(i) * nv + j] = c - std::abs(vx) * courant * (c - up);
        }
      }
      // collisions with gain and loss frequency frozen at F^m(t_n)
      parallel_for(static_cast<std::size_t>(nx), cfg.threads, [&](std::size_t b, std::size_t e) {
        std::vector<double> rho(nv), gain(nv), nu(nv);
        for (std::size_t i = b; i < e; ++i) {
          for (std::size_t j = 0; j < nv; ++j) rho[j] = fo[i * nv + j] / mu[j];
          collide(rho.data(), gain, nu);
          for (std::size_t j = 0; j < nv; ++j) {
            const double z = nu[j] * dt;
            const double decay = std::exp(-z);
            const double phi = z > 1e-8 ? (1.0 - decay) / z : 1.0 - 0.5 * z;
            double& f = fn[i * nv + j];
            f = f * decay + dt * phi * gain[j];
          }
        }
      });
      for (std::size_t q = 0; q < static_cast<std::size_t>(nx) * nv; ++q) min_f = std::min(min_f, fn[q]);
      if (min_f < -1e-12 * fmax0)
        throw ConsistencyError("negative density " + std::to_string(min_f) + " at time level " +
                               std::to_string(n + 1));
    }
    // net wall flux of the new iterate: incident from F^{m+1}, emitted built
    // from F^m (lagged wall)
    for (int n = 0; n <= nt; ++n) {
      for (int w = 0; w < 2; ++w) {
        const double in_new = incident_flux(w, next.data() + level(n));
        const double in_old = incident_flux(w, old.data() + level(n));
        if (in_new > 0.0) flux_res = std::max(flux_res, std::abs(in_new - in_old) / in_new);
      }
    }

    IterationRecord rec;
    rec.m = state.m + 1;
    rec.min_f = min_f;
    rec.flux_residual = flux_res;
    for (int n = 0; n <= nt; ++n) {
      const double t = n * dt;
      for (int i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
          const std::size_t q = level(n) + static_cast<std::size_t>(i) * nv + j;
          const double w = weight_h[j] * std::exp(-t * norm2(nodes[j]));
          rec.sup_h = std::max(rec.sup_h, std::abs(w * next[q]));
          rec.diff = std::max(rec.diff, std::abs(w * (next[q] - old[q])));
        }
    }
    rec.mass = mass_at(next, nt);
    state.f = std::move(next);
    state.m += 1;
    return rec;
  }

  double mass_at(const std::vector<double>& f, int n) const {
    double s = 0.0;
    const double* p = f.data() + level(n);
    for (std::size_t q = 0; q < static_cast<std::size_t>(nx) * nv; ++q) s += p[q];
    return s * grid.weight() * dx;
  }

  double sup_h_level(const std::vector<double>& f, int n) const {
    double s = 0.0;
    const double t = n * dt;
    for (int i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < nv; ++j) {
        const double w = weight_h[j] * std::exp(-t * norm2(nodes[j]));
        s = std::max(s, std::abs(w * f[level(n) + static_cast<std::size_t>(i) * nv + j]));
      }
    return s;
  }
};

SlabSolver::SlabSolver(const SlabConfig& config) : impl_(std::make_unique<Impl>(config)) {}
SlabSolver::~SlabSolver() = default;

const IterationState& SlabSolver::state() const { return impl_->state; }
const collision::VelocityGrid& SlabSolver::grid() const { return impl_->grid; }
int SlabSolver::time_steps() const { return impl_->nt; }
double SlabSolver::time_step() const { return impl_->dt; }

double SlabSolver::h(int n, int i, std::size_t j) const {
  const auto& d = *impl_;
  const double w = d.weight_h[j] * std::exp(-n * d.dt * norm2(d.nodes[j]));
  return w * d.state.f[d.level(n) + static_cast<std::size_t>(i) * d.nv + j];
}

IterationRecord SlabSolver::advance_iteration() { return impl_->sweep(); }

SolveReport SlabSolver::solve() {
  auto& d = *impl_;
  SolveReport rep;
  rep.theta = d.theta;
  rep.t_max = d.tm;
  rep.dt = d.dt;
  rep.nt = d.nt;
  rep.dx = d.dx;
  rep.nx = d.nx;
  rep.m = d.cfg.m;
  rep.v_max = d.vmax;
  rep.wall_defect = {d.walls[0].defect, d.walls[1].defect};
  std::vector<double> level0(d.state.f.begin(), d.state.f.begin() + static_cast<std::ptrdiff_t>(d.nx * d.nv));
  rep.h0_sup = d.sup_h_level(d.state.f, 0);
  rep.initial_mass = d.mass_at(d.state.f, 0);
  const double tmin = std::min(d.cfg.walls[0].temperature, d.cfg.walls[1].temperature);
  for (const auto& w : d.cfg.walls) {
    if (const auto* cl = std::get_if<wall::ClModel>(&w.model)) {
      auto h = theorem::check_hypotheses({d.tm, tmin, cl->r.r_perp(), cl->r.r_par(), d.theta});
      if (!rep.hypothesis || (rep.hypothesis->holds() && !h.holds())) rep.hypothesis = h;
    }
  }

  auto finish = [&] {
    rep.iterations = d.state.m;
    rep.final_mass = d.mass_at(d.state.f, d.nt);
    double sup = 0.0;
    for (int n = 0; n <= d.nt; ++n) sup = std::max(sup, d.sup_h_level(d.state.f, n));
    rep.bound_ratio = rep.h0_sup > 0.0 ? sup / rep.h0_sup : (sup == 0.0 ? 1.0 : INFINITY);
    rep.final_f.assign(d.state.f.begin() + static_cast<std::ptrdiff_t>(d.level(d.nt)), d.state.f.end());
  };

  for (int it = 0; it < d.cfg.m_max; ++it) {
    const auto rec = d.sweep();
    rep.history.push_back(rec);
    if (!std::isfinite(rec.sup_h) || !std::isfinite(rec.diff)) {
      finish();
      throw DivergenceError("non-finite iterate", rep);
    }
    if (rec.diff < d.cfg.tol) {
      rep.converged = true;
      break;
    }
    const auto& hs = rep.history;
    const std::size_t k = hs.size();
    if (k >= 4 && hs[k - 1].diff > hs[k - 2].diff && hs[k - 2].diff > hs[k - 3].diff &&
        hs[k - 3].diff > hs[k - 4].diff && hs[k - 1].diff > 10.0 * hs[k - 4].diff) {
      finish();
      throw DivergenceError("iteration diverges: successive differences grew tenfold over 3 sweeps", rep);
    }
  }
  finish();
  return rep;
}

SolveReport solve(const SlabConfig& config) {
  SlabSolver s(config);
  return s.solve();
}

}  // namespace clk::slab
