#include "clk/cycles.hpp"

#include <cmath>
#include <limits>

#include "clk/error.hpp"

namespace clk::cycles {

Vec3 sigma_step(const wall::BoundaryModel& model, const Vec3& v_prev, const wall::WallPatch& wall,
                RandomStream& rng) {
  return -wall::scatter(model, -v_prev, wall, rng);
}

BackTimeCycle sample_cycle(double t, const Vec3& x, const Vec3& v, const geometry::Domain& dom,
                           const wall::BoundaryModel& model, int k_max, RandomStream& rng) {
  require(k_max > 0, "sample_cycle: k_max must be positive");
  BackTimeCycle c;
  c.t0 = t;
  c.x0 = x;
  c.v0 = v;
  double tk = t;
  Vec3 xk = x;
  Vec3 vk = v;
  for (;;) {
    const auto b = geometry::back_time_hit(tk, xk, vk, dom);
    if (!b.hits_wall) {
      c.termination = Termination::reached_datum;
      return c;
    }
    tk = b.t1;
    xk = b.x1;
    vk = sigma_step(model, vk, b.hit->wall, rng);
    c.t.push_back(tk);
    c.x.push_back(xk);
    c.v.push_back(vk);
    c.normal.push_back(b.hit->normal);
    if (c.hits() == k_max) {
      c.termination = Termination::truncated;
      return c;
    }
  }
}

Census velocity_set_census(const BackTimeCycle& cycle, double delta) {
  require(delta > 0.0 && delta < 1.0, "velocity_set_census: delta must lie in (0, 1)");
  Census out;
  out.min_gap = std::numeric_limits<double>::infinity();
  const int k = cycle.hits();
  out.member.resize(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const auto& v = cycle.v[static_cast<std::size_t>(j)];
    const bool in = std::abs(dot(v, cycle.normal[static_cast<std::size_t>(j)])) > delta &&
                    norm(v) <= 1.0 / delta;
    out.member[static_cast<std::size_t>(j)] = in;
    if (!in) continue;
    ++out.count;
    if (j + 1 < k) {
      out.min_gap = std::min(out.min_gap, cycle.t[static_cast<std::size_t>(j)] -
                                              cycle.t[static_cast<std::size_t>(j + 1)]);
    }
  }
  return out;
}

double CycleStats::p_hat(int k) const {
  return static_cast<double>(hits.at(static_cast<std::size_t>(k - 1))) / static_cast<double>(trials);
}

stats::Interval CycleStats::ci(int k, double z) const {
  return stats::wilson(hits.at(static_cast<std::size_t>(k - 1)), trials, z);
}

CycleStats interaction_decay(const DecayConfig& cfg) {
  require(cfg.trials > 0, "interaction_decay: trials must be positive");
  require(cfg.horizon > 0.0, "interaction_decay: horizon must be positive");
  require(cfg.census_delta >= 0.0 && cfg.census_delta < 1.0, "interaction_decay: census delta in [0, 1)");
  CycleStats st;
  st.trials = cfg.trials;
  st.hits.assign(static_cast<std::size_t>(cfg.k_max), 0);
  st.census_min_gap = std::numeric_limits<double>::infinity();

  for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
    auto rng = RandomStream::derive(cfg.seed, {static_cast<std::uint64_t>(trial)});
    Vec3 v0;
    if (cfg.anchor_v) {
      v0 = *cfg.anchor_v;
    } else {
      do v0 = rng.gaussian_vector(cfg.anchor_temperature);
      while (norm2(v0) == 0.0);
    }
    const auto cyc = sample_cycle(cfg.horizon, cfg.anchor_x, v0, cfg.domain, cfg.model, cfg.k_max, rng);
    for (int k = 0; k < cyc.hits(); ++k) ++st.hits[static_cast<std::size_t>(k)];
    if (cyc.termination == Termination::truncated) ++st.truncated;
    if (cfg.census_delta > 0.0) {
      const auto cen = velocity_set_census(cyc, cfg.census_delta);
      st.census_in += cen.count;
      st.census_out += cyc.hits() - cen.count;
      st.census_min_gap = std::min(st.census_min_gap, cen.min_gap);
    }
  }
  if (cfg.census_delta > 0.0 && std::isfinite(st.census_min_gap))
    st.census_fitted_c = st.census_min_gap / std::pow(cfg.census_delta, 3);

  const double n = static_cast<double>(st.trials);
  for (int k = 1; k < cfg.k_max; ++k) {
    const auto a = st.hits[static_cast<std::size_t>(k - 1)];
    const auto b = st.hits[static_cast<std::size_t>(k)];
    if (b > a) st.monotone = false;
    const double pa = static_cast<double>(a) / n;
    const double pb = static_cast<double>(b) / n;
    const double se = std::sqrt((pa * (1 - pa) + pb * (1 - pb)) / n);
    if (pb > pa && se > 0.0) st.max_increase_z = std::max(st.max_increase_z, (pb - pa) / se);
  }

  if (const auto* cl = std::get_if<wall::ClModel>(&cfg.model)) {
    const double tm = cfg.domain.t_max();
    const double theta = cfg.theta > 0.0 ? cfg.theta : 1.0 / (8.0 * tm);
    st.hypothesis = theorem::check_hypotheses({tm, cfg.domain.t_min(), cl->r.r_perp(), cl->r.r_par(), theta});
  }
  return st;
}

}  // namespace clk::cycles
