#pragma once

// Experiment configuration: flat `section.key = value` lines, '#' comments.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bistable/convolution.hpp"
#include "bistable/errors.hpp"
#include "bistable/kernels.hpp"
#include "bistable/model.hpp"
#include "bistable/waves.hpp"

namespace bistable {

struct GridConfig {
  double half_length = 200.0;
  double dx = 0.1;
  double trunc_eps = 1e-12;
  ConvolutionMethod method = ConvolutionMethod::fft;
};

enum class InitialShape { sigmoid, step, bump };
enum class SimSystem { competition, scalar };

struct SimulateConfig {
  std::size_t steps = 150;
  std::size_t thin = 10;
  InitialShape initial = InitialShape::sigmoid;
  double width = 1.0;
  SimSystem system = SimSystem::competition;
  Frame frame = Frame::transformed;
  double level = 0.5;
};

struct SweepConfig {
  std::vector<double> r1, r2, a1, a2, sigma;
};

struct CheckConfig {
  std::size_t pairs = 1000;  // random ordered pairs for the comparison check
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  ModelParams model;
  KernelSpec kernel1;
  KernelSpec kernel2;
  GridConfig grid;
  WaveOptions solver;
  WaveTolerances tolerances;
  SimulateConfig simulate;
  SweepConfig sweep;
  CheckConfig checks;
  Frame wave_frame = Frame::transformed;
  bool speed_curve = false;
  std::string out_dir;
  unsigned jobs = 1;
};

/// A `key = value` assignment with its source line (0 for flags).
struct Assignment {
  std::string key;
  std::string value;
  int line = 0;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v, int line) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end || !std::isfinite(x))
    throw ParseError("malformed number for " + key + ": '" + v + "'", line);
  return x;
}

inline std::size_t parse_count(const std::string& key, const std::string& v, int line) {
  std::size_t x = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ParseError("malformed integer for " + key + ": '" + v + "'", line);
  return x;
}

inline double parse_positive(const std::string& key, const std::string& v, int line) {
  const double x = parse_double(key, v, line);
  if (!(x > 0.0)) throw ParseError(key + " must be positive, got " + v, line);
  return x;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item), line));
  if (out.empty()) throw ParseError(key + " needs at least one value", line);
  return out;
}

template <class E>
E parse_enum(const std::string& key, const std::string& v, int line, const std::map<std::string, E>& names) {
  if (auto it = names.find(v); it != names.end()) return it->second;
  std::string allowed;
  for (const auto& [n, _] : names) allowed += (allowed.empty() ? "" : "|") + n;
  throw ParseError("bad value for " + key + ": '" + v + "' (expected " + allowed + ")", line);
}

inline const std::map<std::string, KernelFamily>& family_names() {
  static const std::map<std::string, KernelFamily> m{
      {"gaussian", KernelFamily::gaussian}, {"uniform", KernelFamily::uniform}, {"table", KernelFamily::table}};
  return m;
}

using Setter = std::function<void(ExperimentConfig&, const Assignment&)>;

inline void add_kernel_keys(std::map<std::string, Setter>& t, const std::string& prefix,
                            std::vector<KernelSpec ExperimentConfig::*> targets,
                            const std::filesystem::path& base_dir) {
  auto each = [targets](ExperimentConfig& c, auto&& fn) {
    for (auto m : targets) fn(c.*m);
  };
  t[prefix + ".family"] = [=](ExperimentConfig& c, const Assignment& a) {
    const auto f = parse_enum(a.key, a.value, a.line, family_names());
    each(c, [&](KernelSpec& k) { k.family = f; });
  };
  t[prefix + ".sigma"] = [=](ExperimentConfig& c, const Assignment& a) {
    const double x = parse_positive(a.key, a.value, a.line);
    each(c, [&](KernelSpec& k) { k.sigma = x; });
  };
  t[prefix + ".halfwidth"] = [=](ExperimentConfig& c, const Assignment& a) {
    const double x = parse_positive(a.key, a.value, a.line);
    each(c, [&](KernelSpec& k) { k.halfwidth = x; });
  };
  t[prefix + ".table_path"] = [=](ExperimentConfig& c, const Assignment& a) {
    std::filesystem::path p(a.value);
    if (p.is_relative() && a.line > 0) p = base_dir / p;
    each(c, [&](KernelSpec& k) { k.table_path = p.string(); });
  };
  t[prefix + ".support"] = [=](ExperimentConfig& c, const Assignment& a) {
    const auto s = parse_enum(a.key, a.value, a.line,
                              std::map<std::string, Support>{{"compact", Support::compact}, {"unbounded", Support::unbounded}});
    each(c, [&](KernelSpec& k) { k.support = s; });
  };
}

inline std::map<std::string, Setter> key_table(const std::filesystem::path& base_dir) {
  std::map<std::string, Setter> t;
  auto num = [&t](const std::string& key, auto member_fn) {
    t[key] = [member_fn](ExperimentConfig& c, const Assignment& a) { member_fn(c) = parse_double(a.key, a.value, a.line); };
  };
  auto pos = [&t](const std::string& key, auto member_fn) {
    t[key] = [member_fn](ExperimentConfig& c, const Assignment& a) { member_fn(c) = parse_positive(a.key, a.value, a.line); };
  };
  auto count = [&t](const std::string& key, auto member_fn) {
    t[key] = [member_fn](ExperimentConfig& c, const Assignment& a) { member_fn(c) = parse_count(a.key, a.value, a.line); };
  };
  auto list = [&t](const std::string& key, auto member_fn) {
    t[key] = [member_fn](ExperimentConfig& c, const Assignment& a) { member_fn(c) = parse_list(a.key, a.value, a.line); };
  };

  num("model.r1", [](ExperimentConfig& c) -> double& { return c.model.r1; });
  num("model.r2", [](ExperimentConfig& c) -> double& { return c.model.r2; });
  num("model.a1", [](ExperimentConfig& c) -> double& { return c.model.a1; });
  num("model.a2", [](ExperimentConfig& c) -> double& { return c.model.a2; });

  add_kernel_keys(t, "kernel", {&ExperimentConfig::kernel1, &ExperimentConfig::kernel2}, base_dir);
  add_kernel_keys(t, "kernel1", {&ExperimentConfig::kernel1}, base_dir);
  add_kernel_keys(t, "kernel2", {&ExperimentConfig::kernel2}, base_dir);

  pos("grid.L", [](ExperimentConfig& c) -> double& { return c.grid.half_length; });
  pos("grid.dx", [](ExperimentConfig& c) -> double& { return c.grid.dx; });
  pos("grid.trunc_eps", [](ExperimentConfig& c) -> double& { return c.grid.trunc_eps; });
  t["grid.convolution"] = [](ExperimentConfig& c, const Assignment& a) {
    c.grid.method = parse_enum(a.key, a.value, a.line,
                               std::map<std::string, ConvolutionMethod>{{"fft", ConvolutionMethod::fft},
                                                                        {"direct", ConvolutionMethod::direct}});
  };

  pos("solver.profile_tol", [](ExperimentConfig& c) -> double& { return c.solver.profile_tol; });
  pos("solver.speed_tol", [](ExperimentConfig& c) -> double& { return c.solver.speed_tol; });
  pos("solver.init_width", [](ExperimentConfig& c) -> double& { return c.solver.init_width; });
  count("solver.max_steps", [](ExperimentConfig& c) -> std::size_t& { return c.solver.max_steps; });
  count("solver.speed_window", [](ExperimentConfig& c) -> std::size_t& { return c.solver.speed_window; });
  pos("solver.tail_tol", [](ExperimentConfig& c) -> double& { return c.tolerances.tail_tol; });
  pos("solver.residual_tol", [](ExperimentConfig& c) -> double& { return c.tolerances.residual_tol; });
  pos("solver.monotone_slack", [](ExperimentConfig& c) -> double& { return c.tolerances.monotone_slack; });
  t["wave.frame"] = [](ExperimentConfig& c, const Assignment& a) {
    c.wave_frame = parse_enum(a.key, a.value, a.line,
                              std::map<std::string, Frame>{{"original", Frame::original}, {"transformed", Frame::transformed}});
  };

  count("simulate.steps", [](ExperimentConfig& c) -> std::size_t& { return c.simulate.steps; });
  count("simulate.thin", [](ExperimentConfig& c) -> std::size_t& { return c.simulate.thin; });
  pos("simulate.width", [](ExperimentConfig& c) -> double& { return c.simulate.width; });
  num("simulate.level", [](ExperimentConfig& c) -> double& { return c.simulate.level; });
  t["simulate.initial"] = [](ExperimentConfig& c, const Assignment& a) {
    c.simulate.initial = parse_enum(a.key, a.value, a.line,
                                    std::map<std::string, InitialShape>{{"sigmoid", InitialShape::sigmoid},
                                                                        {"step", InitialShape::step},
                                                                        {"bump", InitialShape::bump}});
  };
  t["simulate.system"] = [](ExperimentConfig& c, const Assignment& a) {
    c.simulate.system = parse_enum(a.key, a.value, a.line,
                                   std::map<std::string, SimSystem>{{"competition", SimSystem::competition},
                                                                    {"scalar", SimSystem::scalar}});
  };
  t["simulate.frame"] = [](ExperimentConfig& c, const Assignment& a) {
    c.simulate.frame = parse_enum(a.key, a.value, a.line,
                                  std::map<std::string, Frame>{{"original", Frame::original}, {"transformed", Frame::transformed}});
  };

  list("sweep.r1", [](ExperimentConfig& c) -> std::vector<double>& { return c.sweep.r1; });
  list("sweep.r2", [](ExperimentConfig& c) -> std::vector<double>& { return c.sweep.r2; });
  list("sweep.a1", [](ExperimentConfig& c) -> std::vector<double>& { return c.sweep.a1; });
  list("sweep.a2", [](ExperimentConfig& c) -> std::vector<double>& { return c.sweep.a2; });
  list("sweep.sigma", [](ExperimentConfig& c) -> std::vector<double>& { return c.sweep.sigma; });

  count("checks.pairs", [](ExperimentConfig& c) -> std::size_t& { return c.checks.pairs; });
  t["checks.seed"] = [](ExperimentConfig& c, const Assignment& a) { c.checks.seed = parse_count(a.key, a.value, a.line); };
  t["output.dir"] = [](ExperimentConfig& c, const Assignment& a) { c.out_dir = a.value; };
  t["run.jobs"] = [](ExperimentConfig& c, const Assignment& a) {
    c.jobs = static_cast<unsigned>(std::max<std::size_t>(1, parse_count(a.key, a.value, a.line)));
  };
  t["speeds.curve"] = [](ExperimentConfig& c, const Assignment& a) {
    c.speed_curve = parse_enum(a.key, a.value, a.line, std::map<std::string, bool>{{"true", true}, {"false", false}});
  };
  return t;
}

}  // namespace detail

/// Every key the config format understands.
inline std::vector<std::string> known_config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : detail::key_table({})) keys.push_back(k);
  return keys;
}

inline std::vector<Assignment> parse_assignments(std::istream& in) {
  std::vector<Assignment> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value', got '" + line + "'", lineno);
    Assignment a{detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), lineno};
    if (a.key.empty()) throw ParseError("missing key", lineno);
    if (a.value.empty()) throw ParseError("missing value for " + a.key, lineno);
    out.push_back(std::move(a));
  }
  return out;
}

/// Applies file assignments and then flag overrides on top of the defaults.
/// `kernel.*` keys apply before the species-specific `kernel1.*`/`kernel2.*`.
inline ExperimentConfig build_config(std::vector<Assignment> file, const std::vector<Assignment>& overrides,
                                     bool require_model_keys, const std::filesystem::path& base_dir = {}) {
  const auto table = detail::key_table(base_dir);
  std::set<std::string> seen;
  for (const auto& a : file) {
    if (!table.count(a.key)) throw ParseError("unknown key '" + a.key + "'", a.line);
    seen.insert(a.key);
  }
  for (const auto& a : overrides)
    if (!table.count(a.key)) throw ParseError("unknown key '" + a.key + "'", 0);

  auto generic_first = [](const Assignment& x, const Assignment& y) {
    const bool gx = x.key.rfind("kernel.", 0) == 0, gy = y.key.rfind("kernel.", 0) == 0;
    return gx && !gy;
  };
  std::stable_sort(file.begin(), file.end(), generic_first);
  auto flags = overrides;
  std::stable_sort(flags.begin(), flags.end(), generic_first);

  ExperimentConfig cfg;
  for (const auto& a : file) table.at(a.key)(cfg, a);
  for (const auto& a : flags) table.at(a.key)(cfg, a);

  if (require_model_keys) {
    for (const char* k : {"model.r1", "model.r2", "model.a1", "model.a2"})
      if (!seen.count(k)) throw ParseError(std::string("missing required key '") + k + "'", 0);
    if (!seen.count("kernel.family") && !(seen.count("kernel1.family") && seen.count("kernel2.family")))
      throw ParseError("missing required key 'kernel.family' (or both kernel1.family and kernel2.family)", 0);
  }

  if (cfg.simulate.thin == 0) throw ParseError("simulate.thin must be >= 1", 0);
  if (cfg.solver.speed_window < 2) throw ParseError("solver.speed_window must be >= 2", 0);
  if (!(cfg.grid.trunc_eps < 1.0)) throw ParseError("grid.trunc_eps must lie in (0, 1)", 0);
  return cfg;
}

/// Reads `path` (may be empty for pure defaults) and applies overrides.
inline ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<Assignment>& overrides = {}) {
  if (path.empty()) return build_config({}, overrides, false);
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config file " + path.string(), 0);
  return build_config(parse_assignments(in), overrides, true, path.parent_path());
}

/// Canonical `key = value` dump of every effective setting, sorted by key.
inline std::string canonical_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os.precision(17);
  auto kernel = [&](const std::string& pre, const KernelSpec& k) {
    os << pre << ".family = " << to_string(k.family) << "\n";
    os << pre << ".halfwidth = " << k.halfwidth << "\n";
    os << pre << ".sigma = " << k.sigma << "\n";
    os << pre << ".support = " << (k.support == Support::compact ? "compact" : "unbounded") << "\n";
    os << pre << ".table_path = " << k.table_path << "\n";
  };
  auto list = [&](const std::vector<double>& v) {
    std::string s;
    std::ostringstream t;
    t.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) t << (i ? "," : "") << v[i];
    return t.str();
  };
  os << "checks.pairs = " << c.checks.pairs << "\n";
  os << "checks.seed = " << c.checks.seed << "\n";
  os << "grid.L = " << c.grid.half_length << "\n";
  os << "grid.convolution = " << (c.grid.method == ConvolutionMethod::fft ? "fft" : "direct") << "\n";
  os << "grid.dx = " << c.grid.dx << "\n";
  os << "grid.trunc_eps = " << c.grid.trunc_eps << "\n";
  kernel("kernel1", c.kernel1);
  kernel("kernel2", c.kernel2);
  os << "model.a1 = " << c.model.a1 << "\n";
  os << "model.a2 = " << c.model.a2 << "\n";
  os << "model.r1 = " << c.model.r1 << "\n";
  os << "model.r2 = " << c.model.r2 << "\n";
  os << "simulate.frame = " << to_string(c.simulate.frame) << "\n";
  os << "simulate.initial = " << static_cast<int>(c.simulate.initial) << "\n";
  os << "simulate.level = " << c.simulate.level << "\n";
  os << "simulate.steps = " << c.simulate.steps << "\n";
  os << "simulate.system = " << static_cast<int>(c.simulate.system) << "\n";
  os << "simulate.thin = " << c.simulate.thin << "\n";
  os << "simulate.width = " << c.simulate.width << "\n";
  os << "solver.init_width = " << c.solver.init_width << "\n";
  os << "solver.max_steps = " << c.solver.max_steps << "\n";
  os << "solver.monotone_slack = " << c.tolerances.monotone_slack << "\n";
  os << "solver.profile_tol = " << c.solver.profile_tol << "\n";
  os << "solver.residual_tol = " << c.tolerances.residual_tol << "\n";
  os << "solver.speed_tol = " << c.solver.speed_tol << "\n";
  os << "solver.speed_window = " << c.solver.speed_window << "\n";
  os << "solver.tail_tol = " << c.tolerances.tail_tol << "\n";
  os << "sweep.a1 = " << list(c.sweep.a1) << "\n";
  os << "sweep.a2 = " << list(c.sweep.a2) << "\n";
  os << "sweep.r1 = " << list(c.sweep.r1) << "\n";
  os << "sweep.r2 = " << list(c.sweep.r2) << "\n";
  os << "sweep.sigma = " << list(c.sweep.sigma) << "\n";
  os << "wave.frame = " << to_string(c.wave_frame) << "\n";
  return os.str();
}

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
inline std::string config_digest(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_text(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bistable
