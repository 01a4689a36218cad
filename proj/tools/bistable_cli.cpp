// Command-line front end: bistable <subcommand> [flags]

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bistable/bistable.hpp"

namespace {

struct Flags {
  std::string config;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;  // config key -> raw flag text
  bool curve = false;
};

// Flag name, config key, help text.
struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--out", "output.dir", "write one CSV file per table into DIR (default: stdout)"},
    {"--jobs", "run.jobs", "concurrent sweep cells (default 1)"},
    {"--seed", "checks.seed", "seed for the randomized property checks (default 1)"},
    {"--L", "grid.L", "grid half-length (default 200)"},
    {"--dx", "grid.dx", "grid spacing (default 0.1)"},
    {"--steps", "simulate.steps", "simulation steps (default 150)"},
    {"--thin", "simulate.thin", "keep every N-th step (default 10)"},
    {"--initial", "simulate.initial", "initial data: sigmoid|step|bump (default sigmoid)"},
    {"--system", "simulate.system", "competition|scalar (default competition)"},
    {"--r1", "model.r1", "growth rate of species 1 (default 0.5)"},
    {"--r2", "model.r2", "growth rate of species 2 (default 0.5)"},
    {"--a1", "model.a1", "competition coefficient a1 (default 2)"},
    {"--a2", "model.a2", "competition coefficient a2 (default 3)"},
    {"--sigma", "kernel.sigma", "Gaussian kernel width for both species (default 1)"},
    {"--max-steps", "solver.max_steps", "wave solver step limit (default 2000)"},
    {"--frame", "wave.frame", "wave output coordinates: original|transformed (default transformed)"},
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "config file with `section.key = value` lines");
  for (const auto& spec : kFlags) sub->add_option(spec.flag, f.values[spec.key], spec.help);
  sub->add_option("--set", f.sets, "override any config key: --set key=value (repeatable)");
}

std::vector<bistable::Assignment> overrides(const Flags& f, const std::vector<CLI::App*>& subs) {
  std::vector<bistable::Assignment> out;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw bistable::ParseError("--set expects key=value, got '" + s + "'", 0);
    out.push_back({bistable::detail::trim(s.substr(0, eq)), bistable::detail::trim(s.substr(eq + 1)), 0});
  }
  for (const auto& spec : kFlags) {
    bool given = false;
    for (auto* sub : subs) given = given || (sub->parsed() && sub->count(spec.flag) > 0);
    if (given) out.push_back({spec.key, f.values.at(spec.key), 0});
  }
  if (f.curve) out.push_back({"speeds.curve", "true", 0});
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-species Ricker competition with dispersal: equilibria, spreading speeds, bistable waves"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<CLI::App*> subs;
  const std::pair<const char*, const char*> commands[] = {
      {"validate", "check model and kernel hypotheses and operator properties"},
      {"equilibria", "list equilibria and their stability in both frames"},
      {"speeds", "spreading speeds and counter-propagation sums"},
      {"simulate", "iterate the operator and write snapshots"},
      {"wave", "compute the monotone bistable traveling wave"},
      {"sweep", "counter-propagation over a parameter lattice"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    if (std::string(name) == "speeds") sub->add_flag("--curve", flags.curve, "also write objective samples");
    subs.push_back(sub);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const auto cmd = bistable::parse_subcommand(app.get_subcommands().front()->get_name());
    const auto cfg = bistable::load_config(flags.config, overrides(flags, subs));
    const auto rep = bistable::run(cmd, cfg, std::cout);
    for (const auto& c : rep.checks.checks)
      std::cerr << (c.passed ? "PASS " : "FAIL ") << c.clause << ": " << c.detail << "\n";
    for (const auto& a : rep.artifacts) std::cerr << "wrote " << a.string() << "\n";
    for (const auto& [label, sec] : rep.timings) std::fprintf(stderr, "time %s %.3f s\n", label.c_str(), sec);
    return rep.passed() ? 0 : 1;
  } catch (const bistable::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}
