#pragma once

// Subcommand orchestration: validate, equilibria, speeds, simulate, wave,
// sweep. Every subcommand writes CSV tables and returns a RunReport.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "bistable/config.hpp"
#include "bistable/convolution.hpp"
#include "bistable/errors.hpp"
#include "bistable/format.hpp"
#include "bistable/kernels.hpp"
#include "bistable/model.hpp"
#include "bistable/operator.hpp"
#include "bistable/report.hpp"
#include "bistable/speeds.hpp"
#include "bistable/waves.hpp"

namespace bistable {

enum class Subcommand { validate, equilibria, speeds, simulate, wave, sweep };

inline std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::validate: return "validate";
    case Subcommand::equilibria: return "equilibria";
    case Subcommand::speeds: return "speeds";
    case Subcommand::simulate: return "simulate";
    case Subcommand::wave: return "wave";
    case Subcommand::sweep: return "sweep";
  }
  return "?";
}

inline Subcommand parse_subcommand(const std::string& s) {
  for (auto c : {Subcommand::validate, Subcommand::equilibria, Subcommand::speeds, Subcommand::simulate,
                 Subcommand::wave, Subcommand::sweep})
    if (to_string(c) == s) return c;
  throw ParameterError("unknown subcommand '" + s + "'");
}

struct RunReport {
  CheckReport checks;
  std::vector<std::filesystem::path> artifacts;
  std::vector<std::pair<std::string, double>> timings;  // label, seconds
  bool passed() const { return checks.passed(); }
};

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  static std::string quote(const std::string& f) {
    if (f.find_first_of(",\"\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char c : f) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }

  void write(std::ostream& os, const std::string& digest) const {
    os << "# config_digest: " << digest << "\n";
    os << "# table: " << name << "\n";
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << quote(cells[i]);
      os << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

namespace detail {

/// Routes tables to `<out_dir>/<name>.csv` or, without a directory, to one stream.
class TableSink {
 public:
  TableSink(const ExperimentConfig& cfg, std::ostream& fallback, RunReport& report)
      : dir_(cfg.out_dir), digest_(config_digest(cfg)), fallback_(fallback), report_(report) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  void emit(const CsvTable& t) {
    if (dir_.empty()) {
      t.write(fallback_, digest_);
      return;
    }
    const auto path = dir_ / (t.name + ".csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigurationError("cannot write " + path.string());
    t.write(f, digest_);
    report_.artifacts.push_back(path);
  }

 private:
  std::filesystem::path dir_;
  std::string digest_;
  std::ostream& fallback_;
  RunReport& report_;
};

struct Kernels {
  Kernel k1;
  Kernel k2;
};

inline Kernels build_kernels(const ExperimentConfig& cfg) {
  return {make_kernel(cfg.kernel1), make_kernel(cfg.kernel2)};
}

// Hypothesis checks; returns false when later stages cannot run.
inline bool check_hypotheses(const ModelParams& p, const Kernels& k, CheckReport& out) {
  const auto h1 = validate_params(p);
  out.append(h1);
  bool ok = h1.passed();
  int idx = 1;
  for (const Kernel* kern : {&k.k1, &k.k2}) {
    const auto h = validate_hypotheses(*kern);
    for (const auto& c : h.checks) out.add("kernel" + std::to_string(idx) + "." + c.clause, c.passed, c.detail);
    ok = ok && h.passed();
    ++idx;
  }
  return ok;
}

inline SpatialState random_state(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto s = SpatialState::constant(g, Frame::transformed, {0.0, 0.0});
  for (std::size_t i = 0; i < g.size(); ++i) {
    s.u[i] = unit(rng);
    s.v[i] = unit(rng);
  }
  return s;
}

}  // namespace detail

/// Q(T_j s) - T_j Q(s) on the window at least J + |j| cells from both edges.
inline double translation_defect(const CompetitionOperator& q, const SpatialState& s, std::ptrdiff_t j) {
  const auto a = q.apply(translate(s, j));
  const auto b = translate(q.apply(s), j);
  const auto margin = static_cast<std::size_t>(q.max_half_width()) + static_cast<std::size_t>(std::abs(j));
  const auto win = interior_window(s.grid, margin);
  if (win.empty()) throw RangeError("translation_defect: grid too small for the kernel and shift");
  double worst = 0.0;
  for (std::size_t i = win.first; i <= win.last; ++i)
    worst = std::max({worst, std::abs(a.u[i] - b.u[i]), std::abs(a.v[i] - b.v[i])});
  return worst;
}

/// Largest violation of Q(a) <= Q(b) over `pairs` random ordered pairs a <= b.
inline double order_defect(const CompetitionOperator& q, std::size_t pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Grid& g = q.grid();
  double worst = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    auto a = detail::random_state(g, rng);
    auto b = a;
    for (std::size_t i = 0; i < g.size(); ++i) {
      b.u[i] = a.u[i] + unit(rng) * (1.0 - a.u[i]);
      b.v[i] = a.v[i] + unit(rng) * (1.0 - a.v[i]);
    }
    const auto qa = q.apply(a), qb = q.apply(b);
    for (std::size_t i = 0; i < g.size(); ++i)
      worst = std::max({worst, qa.u[i] - qb.u[i], qa.v[i] - qb.v[i]});
  }
  return worst;
}

/// Largest |fft - direct| over `trials` random fields for one kernel.
inline double fft_direct_defect(const DiscreteKernel& k, std::size_t n, std::size_t trials, std::uint64_t seed) {
  const Convolver fast(k, n, ConvolutionMethod::fft), slow(k, n, ConvolutionMethod::direct);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> f(n);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& x : f) x = unit(rng);
    const auto a = fast(f), b = slow(f);
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

namespace detail {

inline void run_validate(const ExperimentConfig& cfg, TableSink& sink, RunReport& rep) {
  CheckReport& r = rep.checks;
  const auto kernels = build_kernels(cfg);
  if (check_hypotheses(cfg.model, kernels, r)) {
    const Grid grid(cfg.grid.half_length, cfg.grid.dx);
    const auto d1 = discretize(kernels.k1, cfg.grid.dx, cfg.grid.trunc_eps);
    const auto d2 = discretize(kernels.k2, cfg.grid.dx, cfg.grid.trunc_eps);
    const CompetitionOperator q(cfg.model, d1, d2, grid, cfg.grid.method);

    std::mt19937_64 rng(cfg.checks.seed);
    const double a1 = translation_defect(q, random_state(grid, rng), 7);
    r.add("A1", a1 <= 1e-12, "translation defect " + fmt(a1) + " (tol 1e-12)");

    const double a3 = order_defect(q, cfg.checks.pairs, cfg.checks.seed + 1);
    r.add("A3", a3 <= 1e-12,
          "max order violation " + fmt(a3) + " over " + std::to_string(cfg.checks.pairs) + " pairs (tol 1e-12)");

    try {
      const auto cert = strong_stability_vectors(cfg.model);
      r.add("A5", true,
            "delta " + fmt(cert.delta) + ", E4 (" + fmt(cert.e4.u) + "," + fmt(cert.e4.v) + "), E5 (" + fmt(cert.e5.u) +
                "," + fmt(cert.e5.v) + ")");
      r.add("A5.unordered", cert.intermediates_unordered, "F1 and F2 are unordered");
    } catch (const DomainError& e) {
      r.add("A5", false, e.what());
    }

    const auto cp = counter_propagation(cfg.model, kernels.k1, kernels.k2);
    r.add("A6.F1", cp.sum_F1 > 0.0, "c-(F1,F3) + c+(F0,F1) = " + fmt(cp.sum_F1));
    r.add("A6.F2", cp.sum_F2 > 0.0, "c-(F2,F3) + c+(F0,F2) = " + fmt(cp.sum_F2));
    r.append(w_transform_check(cfg.model, d1, cfg.checks.seed));

    const double fd = std::max(fft_direct_defect(d1, grid.size(), 5, cfg.checks.seed),
                               fft_direct_defect(d2, grid.size(), 5, cfg.checks.seed + 1));
    r.add("fft-direct", fd <= 1e-10, "max |fft - direct| " + fmt(fd) + " (tol 1e-10)");
  }

  CsvTable t{"validate", {"clause", "passed", "detail"}, {}};
  for (const auto& c : r.checks) t.add({c.clause, c.passed ? "true" : "false", c.detail});
  sink.emit(t);
}

inline void run_equilibria(const ExperimentConfig& cfg, TableSink& sink, RunReport& rep) {
  const auto eq = equilibria(cfg.model);
  CsvTable t{"equilibria", {"frame", "name", "u", "v", "residual", "spectral_radius", "stability"}, {}};
  for (Frame f : {Frame::transformed, Frame::original}) {
    const auto& pts = f == Frame::transformed ? eq.transformed : eq.original;
    const char prefix = f == Frame::transformed ? 'F' : 'E';
    for (std::size_t i = 0; i < 4; ++i) {
      const std::string name = std::string(1, prefix) + std::to_string(i);
      const Point y = frame_map(cfg.model, pts[i], f);
      const double res = std::max(std::abs(y.u - pts[i].u), std::abs(y.v - pts[i].v));
      rep.checks.add(name + ".residual", res < 1e-12, "fixed-point residual " + fmt(res));
      std::string rho = "nan", kind = "undetermined";
      if (res <= 1e-10) {
        const auto st = classify_stability(cfg.model, pts[i], f);
        rho = fmt(st.spectral_radius);
        kind = to_string(st.kind);
      }
      t.add({to_string(f), name, fmt(pts[i].u), fmt(pts[i].v), fmt(res), rho, kind});
    }
  }
  sink.emit(t);
}

inline void run_speeds(const ExperimentConfig& cfg, TableSink& sink, RunReport& rep) {
  const auto kernels = build_kernels(cfg);
  if (!check_hypotheses(cfg.model, kernels, rep.checks)) return;
  const auto cp = counter_propagation(cfg.model, kernels.k1, kernels.k2);
  CsvTable t{"speeds", {"quantity", "value", "mu_star"}, {}};
  const std::pair<SpeedQuery, const SpeedReport*> rows[] = {{SpeedQuery::cminus_F1F3, &cp.cminus_F1F3},
                                                            {SpeedQuery::cplus_F0F1, &cp.cplus_F0F1},
                                                            {SpeedQuery::cminus_F2F3, &cp.cminus_F2F3},
                                                            {SpeedQuery::cplus_F0F2, &cp.cplus_F0F2}};
  for (const auto& [q, s] : rows) t.add({to_string(q), fmt(s->value), fmt(s->argmin)});
  t.add({"lambda_B0", fmt(cp.cplus_F0F2.lambda_at_zero), fmt(0.0)});
  t.add({"sum_F1", fmt(cp.sum_F1), ""});
  t.add({"sum_F2", fmt(cp.sum_F2), ""});
  sink.emit(t);

  rep.checks.add("lambda_B0", cp.cplus_F0F2.lambda_at_zero > 1.0, "lambda(B_0) = " + fmt(cp.cplus_F0F2.lambda_at_zero));
  rep.checks.add("A6.F1", cp.sum_F1 > 0.0, "sum = " + fmt(cp.sum_F1));
  rep.checks.add("A6.F2", cp.sum_F2 > 0.0, "sum = " + fmt(cp.sum_F2));

  if (cfg.speed_curve) {
    CsvTable c{"speeds_curve", {"quantity", "mu", "objective"}, {}};
    for (const auto& [q, s] : rows)
      for (const auto& pt : s->curve) c.add({to_string(q), fmt(pt.mu), fmt(pt.objective)});
    sink.emit(c);
  }
}

inline std::string step_name(std::size_t step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "simulate_step_%06zu", step);
  return buf;
}

inline double initial_profile(InitialShape shape, double x, double width) {
  switch (shape) {
    case InitialShape::step: return x >= 0.0 ? 1.0 : 0.0;
    case InitialShape::sigmoid: return 1.0 / (1.0 + std::exp(-x / width));
    case InitialShape::bump: return std::exp(-0.5 * (x / width) * (x / width));
  }
  return 0.0;
}

inline void run_simulate_scalar(const ExperimentConfig& cfg, const Grid& grid, TableSink& sink, RunReport& rep) {
  const auto& sc = cfg.simulate;
  const double r = cfg.model.r1;
  if (!(r > 0.0 && r < 1.0)) {
    rep.checks.add("H1", false, "scalar growth rate r1 = " + fmt(r) + " outside (0,1)");
    return;
  }
  const auto dk = discretize(make_kernel(cfg.kernel1), grid.spacing(), cfg.grid.trunc_eps);
  // Zero is unstable for this recursion, so FFT round-off ahead of the front
  // would be amplified; the direct path keeps relative accuracy there.
  const Convolver conv(dk, grid.size(), ConvolutionMethod::direct);
  std::vector<double> p(grid.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = initial_profile(sc.initial, -grid.x(i), sc.width);

  std::vector<FieldSnapshot> traj{{0, p}};
  auto emit = [&](std::size_t step) {
    CsvTable t{step_name(step), {"x", "p"}, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) t.add({fmt(grid.x(i)), fmt(p[i])});
    sink.emit(t);
  };
  emit(0);
  for (std::size_t n = 1; n <= sc.steps; ++n) {
    p = scalar_ricker_step(conv, r, p);
    traj.push_back({n, p});
    if (n % sc.thin == 0 || n == sc.steps) emit(n);
  }

  CsvTable s{"simulate_summary", {"quantity", "value"}, {}};
  s.add({"steps", std::to_string(sc.steps)});
  s.add({"variational_speed", fmt(scalar_speed(r, dk.parent()).value)});
  try {
    const auto fit = measure_front_speed(grid, traj, sc.level, FitWindow{sc.steps / 2, sc.steps});
    s.add({"front_speed", fmt(fit.speed)});
    s.add({"fit_rms", fmt(fit.rms_residual)});
  } catch (const MeasurementError&) {
  }
  sink.emit(s);
}

inline void run_simulate(const ExperimentConfig& cfg, TableSink& sink, RunReport& rep) {
  const auto& sc = cfg.simulate;
  const Grid grid(cfg.grid.half_length, cfg.grid.dx);
  if (sc.system == SimSystem::scalar) {
    run_simulate_scalar(cfg, grid, sink, rep);
    return;
  }
  const auto kernels = build_kernels(cfg);
  if (!check_hypotheses(cfg.model, kernels, rep.checks)) return;
  const auto d1 = discretize(kernels.k1, cfg.grid.dx, cfg.grid.trunc_eps);
  const auto d2 = discretize(kernels.k2, cfg.grid.dx, cfg.grid.trunc_eps);
  const CompetitionOperator q(cfg.model, d1, d2, grid, cfg.grid.method);

  // Initial data lives in the transformed frame and is mapped if needed.
  auto s = SpatialState::constant(grid, sc.frame, {0.0, 0.0});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double y = initial_profile(sc.initial, grid.x(i), sc.width);
    const Point pt = sc.frame == Frame::transformed ? Point{y, y} : change_coordinates({y, y});
    s.u[i] = pt.u;
    s.v[i] = pt.v;
  }

  double excursion = 0.0;
  std::vector<FieldSnapshot> traj{{0, s.u}};
  auto emit = [&](const SpatialState& st) {
    CsvTable t{step_name(st.step), {"x", "U", "V"}, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) t.add({fmt(grid.x(i)), fmt(st.u[i]), fmt(st.v[i])});
    sink.emit(t);
  };
  emit(s);
  for (std::size_t n = 1; n <= sc.steps; ++n) {
    s = q.apply(s);
    excursion = std::max(excursion, s.max_excursion);
    traj.push_back({n, s.u});
    if (n % sc.thin == 0 || n == sc.steps) emit(s);
  }
  rep.checks.add("range", excursion <= 1e-12,
                 "largest excursion outside the invariant range " + fmt(excursion) + " (tol 1e-12)");

  CsvTable summary{"simulate_summary", {"quantity", "value"}, {}};
  summary.add({"steps", std::to_string(sc.steps)});
  summary.add({"max_excursion", fmt(excursion)});
  try {
    const auto fit = measure_front_speed(grid, traj, sc.level, FitWindow{sc.steps / 2, sc.steps});
    summary.add({"front_displacement_per_step", fmt(fit.speed)});
    summary.add({"fit_rms", fmt(fit.rms_residual)});
  } catch (const MeasurementError&) {
  }
  sink.emit(summary);
}

inline void run_wave(const ExperimentConfig& cfg, TableSink& sink, RunReport& rep) {
  const auto kernels = build_kernels(cfg);
  if (!check_hypotheses(cfg.model, kernels, rep.checks)) return;
  const Grid grid(cfg.grid.half_length, cfg.grid.dx);
  const auto d1 = discretize(kernels.k1, cfg.grid.dx, cfg.grid.trunc_eps);
  const auto d2 = discretize(kernels.k2, cfg.grid.dx, cfg.grid.trunc_eps);
  auto opts = cfg.solver;
  opts.method = cfg.grid.method;

  WaveProfile wp{grid, {}, {}, 0.0, 0.0, 0.0, 0, 0, false, {}, {}};
  try {
    wp = find_bistable_wave(cfg.model, d1, d2, grid, opts);
  } catch (const ConvergenceError& e) {
    rep.checks.add("converged", false, e.what());
    return;
  } catch (const MeasurementError& e) {
    rep.checks.add("converged", false, e.what());
    return;
  }
  rep.checks.add("converged", true, "after " + std::to_string(wp.steps) + " steps");
  rep.checks.add("speed-spread", wp.speed_spread < opts.speed_tol,
                 "trailing speed spread " + fmt(wp.speed_spread) + " (tol " + fmt(opts.speed_tol) + ")");
  rep.checks.append(validate_profile(wp, cfg.tolerances));

  CsvTable prof{"wave_profile", {}, {}};
  if (cfg.wave_frame == Frame::transformed) {
    prof.header = {"x", "phi", "psi"};
    for (std::size_t i = 0; i < grid.size(); ++i) prof.add({fmt(grid.x(i)), fmt(wp.phi[i]), fmt(wp.psi[i])});
  } else {
    const auto [u, v] = to_original_frame(wp);
    prof.header = {"x", "U", "V"};
    for (std::size_t i = 0; i < grid.size(); ++i) prof.add({fmt(grid.x(i)), fmt(u[i]), fmt(v[i])});
  }
  sink.emit(prof);

  CsvTable s{"wave_summary", {"quantity", "value"}, {}};
  s.add({"speed", fmt(wp.speed)});
  s.add({"speed_spread", fmt(wp.speed_spread)});
  s.add({"residual", fmt(wp.residual)});
  s.add({"steps", std::to_string(wp.steps)});
  s.add({"integer_cells", std::to_string(wp.ledger.integer_cells)});
  s.add({"fractional_cells", fmt(wp.ledger.fractional_cells)});
  s.add({"total_displacement", fmt(wp.ledger.total_displacement)});
  s.add({"frame", to_string(cfg.wave_frame)});
  sink.emit(s);
}

struct SweepRow {
  ModelParams params;
  double sigma = 0.0;
  CounterPropagationReport cp;
  double delta = 0.0;
  bool unordered = false;
  std::string error;
  bool passed() const { return error.empty() && cp.passed() && delta > 0.0 && unordered; }
};

inline std::vector<SweepRow> sweep_rows(const ExperimentConfig& cfg) {
  auto or_base = [](const std::vector<double>& v, double base) { return v.empty() ? std::vector<double>{base} : v; };
  const auto r1s = or_base(cfg.sweep.r1, cfg.model.r1), r2s = or_base(cfg.sweep.r2, cfg.model.r2);
  const auto a1s = or_base(cfg.sweep.a1, cfg.model.a1), a2s = or_base(cfg.sweep.a2, cfg.model.a2);
  const bool sweep_sigma = !cfg.sweep.sigma.empty();
  if (sweep_sigma && (cfg.kernel1.family != KernelFamily::gaussian || cfg.kernel2.family != KernelFamily::gaussian))
    throw ParameterError("sweep.sigma needs Gaussian kernels for both species");
  const auto sigmas = or_base(cfg.sweep.sigma, cfg.kernel1.sigma);

  std::vector<SweepRow> rows;
  for (double r1 : r1s)
    for (double r2 : r2s)
      for (double a1 : a1s)
        for (double a2 : a2s)
          for (double s : sigmas) rows.push_back({{r1, r2, a1, a2}, sweep_sigma ? s : 0.0, {}, 0.0, false, {}});
  return rows;
}

inline void evaluate_sweep_row(const ExperimentConfig& cfg, SweepRow& row) {
  try {
    KernelSpec s1 = cfg.kernel1, s2 = cfg.kernel2;
    if (row.sigma > 0.0) s1.sigma = s2.sigma = row.sigma;
    const Kernel k1 = make_kernel(s1), k2 = make_kernel(s2);
    const auto h = validate_params(row.params);
    if (!h.passed()) {
      row.error = h.failures().front().detail;
      return;
    }
    row.cp = counter_propagation(row.params, k1, k2);
    const auto cert = strong_stability_vectors(row.params);
    row.delta = cert.delta;
    row.unordered = cert.intermediates_unordered;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
}

inline void run_sweep(const ExperimentConfig& cfg, TableSink& sink, RunReport& rep) {
  auto rows = sweep_rows(cfg);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) evaluate_sweep_row(cfg, rows[i]);
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(rows.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  CsvTable t{"sweep",
             {"index", "r1", "r2", "a1", "a2", "sigma", "cminus_F1F3", "cplus_F0F1", "sum_F1", "cminus_F2F3",
              "cplus_F0F2", "sum_F2", "lambda_B0", "delta", "passed", "error"},
             {}};
  std::size_t good = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto& p = r.params;
    const bool ok = r.passed();
    good += ok ? 1 : 0;
    t.add({std::to_string(i), fmt(p.r1), fmt(p.r2), fmt(p.a1), fmt(p.a2), r.sigma > 0.0 ? fmt(r.sigma) : "",
           fmt(r.cp.cminus_F1F3.value), fmt(r.cp.cplus_F0F1.value), fmt(r.cp.sum_F1), fmt(r.cp.cminus_F2F3.value),
           fmt(r.cp.cplus_F0F2.value), fmt(r.cp.sum_F2), fmt(r.cp.cplus_F0F2.lambda_at_zero), fmt(r.delta),
           ok ? "true" : "false", r.error});
    if (!ok)
      rep.checks.add("sweep[" + std::to_string(i) + "]", false,
                     "r1=" + fmt(p.r1) + " r2=" + fmt(p.r2) + " a1=" + fmt(p.a1) + " a2=" + fmt(p.a2) + ": " +
                         (r.error.empty() ? "sum_F1 " + fmt(r.cp.sum_F1) + ", sum_F2 " + fmt(r.cp.sum_F2) : r.error));
  }
  rep.checks.add("sweep", good == rows.size(),
                 std::to_string(good) + " of " + std::to_string(rows.size()) + " cells pass A5 and A6");
  sink.emit(t);
}

}  // namespace detail

/// Runs one subcommand. Tables go to `cfg.out_dir` when set, else to `csv_out`.
inline RunReport run(Subcommand cmd, const ExperimentConfig& cfg, std::ostream& csv_out) {
  RunReport rep;
  detail::TableSink sink(cfg, csv_out, rep);
  const auto t0 = std::chrono::steady_clock::now();
  switch (cmd) {
    case Subcommand::validate: detail::run_validate(cfg, sink, rep); break;
    case Subcommand::equilibria: detail::run_equilibria(cfg, sink, rep); break;
    case Subcommand::speeds: detail::run_speeds(cfg, sink, rep); break;
    case Subcommand::simulate: detail::run_simulate(cfg, sink, rep); break;
    case Subcommand::wave: detail::run_wave(cfg, sink, rep); break;
    case Subcommand::sweep: detail::run_sweep(cfg, sink, rep); break;
  }
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  rep.timings.emplace_back(to_string(cmd), dt.count());
  return rep;
}

}  // namespace bistable
