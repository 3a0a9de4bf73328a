#include "clk/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "clk/cycles.hpp"
#include "clk/particle_sim.hpp"
#include "clk/slab_solver.hpp"
#include "clk/theorem_constants.hpp"
#include "clk/verify.hpp"

#ifndef CLK_VERSION
#define CLK_VERSION "0.0.0"
#endif

namespace clk::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, p);
}

class Csv {
public:
  Csv(const fs::path& path, std::initializer_list<std::string_view> header) : file_(path, std::ios::binary) {
    if (!file_) throw ConfigError("cannot write " + path.string());
    bool first = true;
    for (auto h : header) {
      file_ << (first ? "" : ",") << h;
      first = false;
    }
    file_ << '\n';
  }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((file_ << (first ? "" : ",") << cell(cells), first = false), ...);
    file_ << '\n';
  }

private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::int64_t v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  std::ofstream file_;
};

void write_manifest(const RunConfig& cfg, const std::string& status) {
  fs::create_directories(cfg.out);
  std::ofstream m(fs::path(cfg.out) / "manifest.txt", std::ios::binary);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(cfg.canonical(false))));
  m << "command = " << cfg.command << '\n'
    << "version = " << CLK_VERSION << '\n'
    << "seed = " << cfg.seed << '\n'
    << "threads = " << cfg.threads << '\n'
    << "config_hash = fnv1a64:" << hash << '\n'
    << "status = " << status << '\n'
    << "# resolved configuration\n";
  std::istringstream lines(cfg.canonical());
  for (std::string line; std::getline(lines, line);) m << "# " << line << '\n';
}

void print_hypothesis(const theorem::HypothesisReport& h, std::ostream& out) {
  out << "hypothesis: r condition " << (h.r_condition ? "holds" : "fails") << ", theta condition "
      << (h.theta_condition ? "holds" : "fails") << ", temperature condition "
      << (h.temperature_condition ? "holds" : "fails") << " (min T_w/T_M = " << h.ratio
      << ", threshold = " << h.threshold << ")\n";
}

fs::path out_file(const RunConfig& c, const std::string& name) { return fs::path(c.out) / name; }

int cmd_verify(const RunConfig& c, std::ostream& out) {
  const auto checks = verify::run_suite(c.seed);
  Csv csv(out_file(c, "verify.csv"), {"check", "pass", "measured", "tolerance", "seconds"});
  bool all = true;
  for (const auto& k : checks) {
    out << verify::format(k) << '\n';
    csv.row(k.name, k.pass ? 1 : 0, k.measured, k.tolerance, k.seconds);
    all = all && k.pass;
  }
  out << (all ? "all checks passed\n" : "some checks FAILED\n");
  return all ? kExitOk : kExitError;
}

int cmd_kernel_table(const RunConfig& c, std::ostream& out) {
  const auto f = particles::figure_setup(c.which);
  Csv csv(out_file(c, "kernel_table.csv"), {"v1", "v2", "density"});
  const int n = c.table_points;
  const double e = c.table_extent;
  for (int i = 0; i < n; ++i) {
    const double v1 = -e + 2.0 * e * i / (n - 1);
    for (int j = 1; j < n; ++j) {
      const double v2 = e * j / (n - 1);
      const Vec3 v = v1 * f.wall.tangent1 - v2 * f.wall.normal;
      double d;
      if (const auto* m = std::get_if<wall::Maxwell>(&f.model))
        d = wall::maxwell_density(f.u_in, v, f.wall, m->c).continuous;
      else
        d = wall::cl_density(f.u_in, v, f.wall, std::get<wall::ClModel>(f.model).r);
      csv.row(v1, v2, d);
    }
  }
  out << "kernel slice at v . t2 = 0 for figure " << c.which << " setup, incident (2, -2), T_w = 1\n";
  if (const auto* m = std::get_if<wall::Maxwell>(&f.model))
    out << "specular atom at (2, 2) with mass " << 1.0 - m->c << " (not in the table)\n";
  return kExitOk;
}

int cmd_sample_wall(const RunConfig& c, std::ostream& out) {
  const auto w = wall::WallPatch::make(c.tw, {0.0, 0.0, 1.0});
  const Vec3 u = c.u_par * w.tangent1 + c.u_perp * w.normal;
  const auto model = c.make_model();
  auto rng = RandomStream::derive(c.seed, {0x5a3});
  Csv csv(out_file(c, "samples.csv"), {"v1", "v2", "v3"});
  for (std::int64_t k = 0; k < c.n_samples; ++k) {
    const Vec3 v = wall::scatter(model, u, w, rng);
    csv.row(dot(v, w.tangent1), dot(v, w.tangent2), -dot(v, w.normal));
  }
  out << c.n_samples << " re-emitted velocities (v . t1, v . t2, -v . n) for incident (" << c.u_par << ", "
      << -c.u_perp << ")\n";
  return kExitOk;
}

int cmd_figures(const RunConfig& c, std::ostream& out) {
  const auto f = particles::figure_setup(c.which);
  const auto h = particles::beam_reflection_histogram(f.u_in, f.wall, f.model, c.n_samples, c.seed);
  const std::string stem = "fig" + std::to_string(c.which);
  {
    Csv csv(out_file(c, stem + ".csv"), {"v1", "v2", "mass"});
    for (int i = 0; i < h.bins; ++i)
      for (int j = 0; j < h.bins; ++j) {
        const double m = h.mass[static_cast<std::size_t>(i) * h.bins + j];
        if (m > 0.0) csv.row((2.0 * i + 1 - h.bins) / (2.0 / h.bin), (2.0 * j + 1 - h.bins) / (2.0 / h.bin), m);
      }
  }
  std::ofstream gp(out_file(c, stem + ".gp"), std::ios::binary);
  gp << "set datafile separator ','\n"
     << "set xlabel 'v_par'\nset ylabel 'v_perp'\nset zlabel 'mass'\n"
     << "set xrange [-" << h.extent << ":" << h.extent << "]\nset yrange [0:" << h.extent << "]\n"
     << "set ticslevel 0\nset view 60,30\n"
     << "set terminal pngcairo size 900,700\nset output '" << stem << ".png'\n"
     << "splot '" << stem << ".csv' every ::1 using 1:2:3 with impulses notitle\n";
  out << stem << ": n = " << h.n << ", specular atom fraction " << static_cast<double>(h.atom_count) / h.n
      << ", tangential mean " << h.tangential.mean() << " +- " << h.tangential.std_error() << ", mode ("
      << h.mode[0] << ", " << h.mode[1] << "), mass within 0.5 of (2, 2): " << h.fraction_within({2.0, 2.0}, 0.5)
      << '\n';
  return kExitOk;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  if (c.mode == "creep") {
    particles::CreepConfig k;
    k.shape = c.make_domain().shape();
    k.t0 = c.t0;
    k.amp = c.amp;
    k.r = c.model == "diffuse" ? wall::AccommodationPair(1.0, 1.0) : wall::AccommodationPair(c.r_perp, c.r_par);
    k.n_particles = c.n_particles;
    k.relax = c.relax;
    k.window = c.window;
    k.seed = c.seed;
    k.threads = c.threads;
    const auto rep = particles::thermal_creep_steady(k);
    Csv csv(out_file(c, "creep.csv"), {"time", "x1", "energy"});
    for (const auto& m : rep.observables.moments) csv.row(m.time, m.x1.mean(), m.energy.mean());
    out << "dipole <x1>/R = " << rep.dipole << " +- " << rep.dipole_se << ", stationarity z = " << rep.stationarity_z
        << (rep.stationary ? " (stationary)\n" : " (NOT stationary)\n");
    return kExitOk;
  }
  particles::SimConfig s;
  s.domain = c.make_domain();
  s.model = c.make_model();
  s.n_particles = c.n_particles;
  s.initial_temperature = c.t0;
  s.t_end = c.t_end.value_or(20.0);
  for (int k = 0; k < 10; ++k) s.sample_times.push_back(s.t_end * k / 10.0);
  s.seed = c.seed;
  s.threads = c.threads;
  const auto obs = particles::run_transient(s);
  {
    Csv csv(out_file(c, "moments.csv"), {"time", "v1", "v2", "v3", "energy", "x1"});
    for (const auto& m : obs.moments)
      csv.row(m.time, m.velocity[0].mean(), m.velocity[1].mean(), m.velocity[2].mean(), m.energy.mean(), m.x1.mean());
  }
  {
    Csv csv(out_file(c, "speed_histogram.csv"), {"speed_low", "speed_high", "count", "maxwell_expected"});
    const std::size_t bins = obs.speed_histogram.size();
    for (std::size_t k = 0; k < bins; ++k) {
      const double lo = static_cast<double>(k) * obs.speed_bin;
      const double hi = k + 1 == bins ? INFINITY : lo + obs.speed_bin;
      const double p = (k + 1 == bins ? 1.0 : stats::maxwell_speed_cdf(hi, c.t0)) - stats::maxwell_speed_cdf(lo, c.t0);
      csv.row(lo, hi, obs.speed_histogram[k], p * static_cast<double>(obs.final_count));
    }
  }
  {
    Csv csv(out_file(c, "walls.csv"), {"wall", "incident", "emitted", "incident_weight", "emitted_weight"});
    for (std::size_t w = 0; w < obs.walls.size(); ++w)
      csv.row(w, obs.walls[w].incident, obs.walls[w].emitted, obs.walls[w].incident_weight, obs.walls[w].emitted_weight);
  }
  const auto chi = particles::speed_chi_square(obs, c.t0);
  out << "particles " << obs.initial_count << " -> " << obs.final_count << ", mass " << obs.initial_mass() << " -> "
      << obs.final_mass() << ", wall events " << obs.wall_events << '\n'
      << "final speeds vs Maxwellian(T0 = " << c.t0 << "): chi2 = " << chi.statistic << ", dof = " << chi.dof
      << ", p = " << chi.p_value << '\n';
  return kExitOk;
}

int cmd_cycles(const RunConfig& c, std::ostream& out) {
  cycles::DecayConfig d;
  d.domain = c.make_domain();
  d.model = c.make_model();
  d.horizon = c.horizon;
  d.anchor_temperature = c.t0;
  d.k_max = c.k_max;
  d.trials = c.trials;
  d.seed = c.seed;
  d.census_delta = c.census_delta;
  d.theta = c.theta;
  const auto st = cycles::interaction_decay(d);
  Csv csv(out_file(c, "cycles.csv"), {"k", "trials", "hits", "p_hat", "ci_low", "ci_high"});
  for (int k = 1; k <= static_cast<int>(st.hits.size()); ++k) {
    const auto ci = st.ci(k);
    csv.row(k, st.trials, st.hits[static_cast<std::size_t>(k - 1)], st.p_hat(k), ci.low, ci.high);
  }
  out << "trials " << st.trials << ", truncated " << st.truncated << ", monotone " << (st.monotone ? "yes" : "no")
      << ", largest rise z = " << st.max_increase_z << '\n';
  if (st.hypothesis) {
    print_hypothesis(*st.hypothesis, out);
    if (!st.hypothesis->holds()) return kExitHypothesisWarning;
  }
  return kExitOk;
}

int cmd_solve_slab(const RunConfig& c, std::ostream& out) {
  slab::SlabConfig s;
  s.width = c.width;
  s.nx = c.nx;
  s.m = c.m;
  s.v_max = c.v_max;
  s.t_end = c.t_end.value_or(0.1);
  s.dt = c.dt;
  s.cfl = c.cfl;
  s.theta = c.theta;
  s.collision = collision::CollisionModel{c.kappa};
  s.n_mc = c.n_mc;
  s.tol = c.tol;
  s.m_max = c.m_max;
  s.seed = c.seed;
  s.threads = c.threads;
  const auto temps = geometry::WallTemperature::parse(c.wall_temp);
  const bool faces = temps.kind == geometry::WallTemperature::Kind::faces;
  s.walls[0] = {c.make_model(), temps.p0};
  s.walls[1] = {c.make_model(), faces ? temps.p1 : temps.p0};
  if (c.datum == "zero") s.datum = slab::Datum::zero;
  if (c.datum == "equilibrium") s.datum = slab::Datum::equilibrium;
  if (c.datum == "perturbed") s.datum = slab::Datum::perturbed;
  if (c.datum == "beam") s.datum = slab::Datum::beam;
  s.density = c.density;
  s.amplitude = c.amplitude;

  auto write_history = [&](const slab::SolveReport& r) {
    Csv csv(out_file(c, "slab_history.csv"), {"m", "sup_h", "diff", "mass", "flux_residual"});
    for (const auto& h : r.history) csv.row(h.m, h.sup_h, h.diff, h.mass, h.flux_residual);
  };
  slab::SolveReport rep;
  try {
    rep = slab::solve(s);
  } catch (const slab::DivergenceError& e) {
    write_history(*e.report);
    throw;
  }
  write_history(rep);
  {
    // v2 = v3 = 0 slice of F(t_end)
    const collision::VelocityGrid grid(rep.m, rep.v_max);
    const int mid = rep.m / 2;
    Csv csv(out_file(c, "slab_slice.csv"), {"x", "v1", "f"});
    for (int i = 0; i < rep.nx; ++i)
      for (int a = 0; a < rep.m; ++a) {
        const std::size_t j = grid.index(a, mid, mid);
        csv.row((i + 0.5) * rep.dx, grid.coord(a), rep.final_f[static_cast<std::size_t>(i) * grid.size() + j]);
      }
  }
  out << "iterations " << rep.iterations << (rep.converged ? " (converged)" : " (m_max reached)") << ", nt = " << rep.nt
      << ", dt = " << rep.dt << ", bound ratio C = " << rep.bound_ratio << ", mass " << rep.initial_mass << " -> "
      << rep.final_mass << '\n';
  if (rep.hypothesis) {
    print_hypothesis(*rep.hypothesis, out);
    if (!rep.hypothesis->holds()) return kExitHypothesisWarning;
  }
  return kExitOk;
}

int cmd_check_theorem(const RunConfig& c, std::ostream& out) {
  const auto dom = c.make_domain();
  const double tm = c.t_max.value_or(dom.t_max());
  const double tmin = c.min_tw.value_or(std::min(dom.t_min(), tm));
  const double theta = c.theta > 0.0 ? c.theta : 1.0 / (8.0 * tm);
  const auto h = theorem::check_hypotheses({tm, tmin, c.r_perp, c.r_par, theta});
  out << "T_M = " << tm << ", min T_w = " << tmin << ", r = (" << c.r_perp << ", " << c.r_par << "), theta = " << theta
      << '\n';
  print_hypothesis(h, out);
  out << "xi = " << h.xi << ", T* = " << h.t_star << ", r_min = " << h.r_min << ", r_max = " << h.r_max
      << ", eps2 = " << h.eps2 << "\nC_{T_M,xi} = " << h.c_tm_xi
      << (h.c_denominator_positive ? "" : " (denominator not positive)") << ", cal C = " << h.cal_c << " (sign "
      << h.cal_c_sign << ")\n";
  if (h.eta)
    out << "eta_par = " << h.eta->eta_par << ", eta_perp = " << h.eta->eta_perp << ", eta = " << h.eta->eta << '\n';
  Csv csv(out_file(c, "theorem.csv"),
          {"T_M", "min_Tw", "r_perp", "r_par", "theta", "r_condition", "theta_condition", "temperature_condition",
           "ratio", "threshold", "xi", "t_star", "r_min", "r_max", "eps2", "c_tm_xi", "cal_c", "cal_c_sign", "eta_par",
           "eta_perp", "eta"});
  csv.row(tm, tmin, c.r_perp, c.r_par, theta, h.r_condition ? 1 : 0, h.theta_condition ? 1 : 0,
          h.temperature_condition ? 1 : 0, h.ratio, h.threshold, h.xi, h.t_star, h.r_min, h.r_max, h.eps2, h.c_tm_xi,
          h.cal_c, h.cal_c_sign, h.eta ? h.eta->eta_par : NAN, h.eta ? h.eta->eta_perp : NAN, h.eta ? h.eta->eta : NAN);
  return h.holds() ? kExitOk : kExitHypothesisWarning;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  int code = kExitError;
  try {
    fs::create_directories(cfg.out);
    write_manifest(cfg, "running");
    if (cfg.command == "verify") code = cmd_verify(cfg, out);
    else if (cfg.command == "kernel-table") code = cmd_kernel_table(cfg, out);
    else if (cfg.command == "sample-wall") code = cmd_sample_wall(cfg, out);
    else if (cfg.command == "figures") code = cmd_figures(cfg, out);
    else if (cfg.command == "simulate") code = cmd_simulate(cfg, out);
    else if (cfg.command == "cycles") code = cmd_cycles(cfg, out);
    else if (cfg.command == "solve-slab") code = cmd_solve_slab(cfg, out);
    else if (cfg.command == "check-theorem") code = cmd_check_theorem(cfg, out);
    else throw ConfigError("unknown command '" + cfg.command + "'");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    try {
      write_manifest(cfg, std::string("error: ") + e.what());
    } catch (...) {
    }
    return kExitError;
  }
  write_manifest(cfg, code == kExitOk ? "ok" : code == kExitHypothesisWarning ? "ok, hypothesis warning" : "failed");
  return code;
}

int main(int argc, char** argv) {
  CLI::App app{"Cercignani-Lampis boundary kinetics toolkit"};
  app.set_version_flag("--version", std::string(CLK_VERSION));
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::vector<std::pair<std::string, std::string>> flags;
  };
  Common common;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", common.sets, "override a configuration key: key=value (repeatable)");
    for (const char* key : {"out", "seed", "threads"}) {
      sub->add_option_function<std::string>(
          std::string("--") + key, [&common, key](const std::string& v) { common.flags.emplace_back(key, v); },
          std::string("config key ") + key);
    }
  };
  auto flag_for = [&](CLI::App* sub, const std::string& flag, const std::string& key) {
    sub->add_option_function<std::string>(
        flag, [&common, key](const std::string& v) { common.flags.emplace_back(key, v); }, "config key " + key);
  };

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"verify", "run the analytics and wall property suites"},
      {"kernel-table", "tabulate the figure kernels on a (v1, v2) grid"},
      {"sample-wall", "draw re-emitted velocities for one incident beam"},
      {"figures", "reflected-beam histogram for figure 1-4 setups"},
      {"simulate", "free-molecular particle simulation"},
      {"cycles", "back-time cycle interaction statistics"},
      {"solve-slab", "iteration scheme on a slab with two walls"},
      {"check-theorem", "evaluate the well-posedness hypotheses and constants"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub);
    subs[name] = sub;
  }
  flag_for(subs["figures"], "--which", "which");
  flag_for(subs["kernel-table"], "--which", "which");
  flag_for(subs["figures"], "--n", "n_samples");
  flag_for(subs["sample-wall"], "--n", "n_samples");
  flag_for(subs["check-theorem"], "--TM", "TM");
  flag_for(subs["check-theorem"], "--minTw", "minTw");
  flag_for(subs["check-theorem"], "--rperp", "r_perp");
  flag_for(subs["check-theorem"], "--rpar", "r_par");
  flag_for(subs["check-theorem"], "--theta", "theta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  RunConfig cfg;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) cfg.command = name;

  try {
    std::vector<ConfigIssue> issues;
    if (!common.config.empty()) {
      std::ifstream in(common.config, std::ios::binary);
      std::stringstream text;
      text << in.rdbuf();
      try {
        cfg = parse_config(text.str(), cfg);
      } catch (const ConfigErrors& e) {
        issues = e.issues;
      }
    }
    if (const char* env = std::getenv("CLK_SEED"))
      if (auto e = apply_setting(cfg, "seed", env)) issues.push_back({0, "CLK_SEED: " + *e});
    for (const auto& s : common.sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        issues.push_back({0, "--set expects key=value, got '" + s + "'"});
        continue;
      }
      if (auto e = apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1))) issues.push_back({0, "--set: " + *e});
    }
    for (const auto& [key, value] : common.flags)
      if (auto e = apply_setting(cfg, key, value)) issues.push_back({0, "--" + key + ": " + *e});
    if (issues.empty())
      for (auto& i : validate(cfg)) issues.push_back(std::move(i));
    if (!issues.empty()) throw ConfigErrors(std::move(issues));
  } catch (const ConfigError& e) {
    std::cerr << "configuration error:\n" << e.what() << '\n';
    try {
      write_manifest(cfg, "error: invalid configuration");
    } catch (...) {
    }
    return kExitError;
  }
  return run(cfg, std::cout, std::cerr);
}

}  // namespace clk::cli
