// femtocli: run multicast and streaming experiments from a JSON config.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "femto/config.hpp"
#include "femto/experiments.hpp"
#include "femto/results.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kOracle = 3 };

struct Options {
  std::string config;
  std::string seeds;
  std::string out;
  std::optional<int> budget;
};

femto::ExperimentConfig load(const Options& o) {
  femto::ExperimentConfig c = o.config.empty() ? femto::ExperimentConfig{} : femto::load_config(o.config);
  if (!o.seeds.empty()) c.seeds = femto::parse_seed_range(o.seeds);
  if (!o.out.empty()) c.output = o.out;
  femto::validate(c);
  return c;
}

void write_outputs(const femto::ExperimentConfig& c, const std::vector<femto::ResultRow>& rows,
                   const femto::StreamTrace& trace) {
  femto::write_text(c.output + "/rows.csv", femto::to_csv(rows));
  femto::write_text(c.output + "/summary.csv", femto::to_csv(femto::aggregate(rows)));
  if (!trace.csv.empty()) femto::write_text(c.output + "/trace.csv", trace.csv);
  std::cout << "wrote " << rows.size() << " rows to " << c.output << "\n";
}

int run_point(const Options& o, bool multicast) {
  femto::ExperimentConfig c = load(o);
  if (femto::is_multicast(c.scenario) != multicast)
    throw femto::ConfigError(std::string("scenario ") + femto::to_string(c.scenario) + " does not belong to the " +
                             (multicast ? "multicast" : "stream") + " command");
  c.sweep.reset();
  femto::StreamTrace trace;
  write_outputs(c, femto::run_experiment(c, c.seeds.list(), o.budget, &trace), trace);
  return kOk;
}

int run_sweep(const Options& o) {
  const femto::ExperimentConfig c = load(o);
  if (!c.sweep) throw femto::ConfigError("the sweep command needs a sweep block in the config");
  femto::StreamTrace trace;
  write_outputs(c, femto::run_experiment(c, c.seeds.list(), o.budget, &trace), trace);
  return kOk;
}

int run_oracles(const Options& o) {
  const auto seeds = o.seeds.empty() ? femto::SeedRange{1, 3}.list() : femto::parse_seed_range(o.seeds).list();
  bool ok = true;
  for (const auto& check : femto::run_oracle_checks(seeds)) {
    std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << "\n";
    ok = ok && check.passed;
  }
  return ok ? kOk : kOracle;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Femtocell multicast and video streaming experiments"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&o](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", o.config, "JSON experiment config");
    if (needs_config) opt->required();
    cmd->add_option("--seeds", o.seeds, "seed range a..b");
    cmd->add_option("--out", o.out, "output directory");
  };
  auto* multicast = app.add_subcommand("multicast", "run a multicast scenario at its base point");
  auto* stream = app.add_subcommand("stream", "run a streaming scenario at its base point");
  auto* sweep = app.add_subcommand("sweep", "run every point of the config's sweep");
  auto* oracle = app.add_subcommand("oracle-check", "compare solvers with brute-force oracles");
  add_common(multicast, true);
  add_common(stream, true);
  add_common(sweep, true);
  oracle->add_option("--seeds", o.seeds, "seed range a..b");
  for (auto* cmd : {stream, sweep})
    cmd->add_option("--budget", o.budget, "dual iteration budget per slot")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (multicast->parsed()) return run_point(o, true);
    if (stream->parsed()) return run_point(o, false);
    if (sweep->parsed()) return run_sweep(o);
    return run_oracles(o);
  } catch (const femto::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
