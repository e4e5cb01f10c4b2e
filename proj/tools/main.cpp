// dirac-entangle: compute entanglement observables for the graphene-Rashba
// single-k-point model and write them as CSV/JSON tables.
//
// Exit codes: 0 success, 2 config error, 3 I/O error, 4 numeric-domain error.

#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dirac/experiments.hpp"

namespace {

struct FlagValues {
  std::optional<std::string> config;
  std::optional<double> lambda_r;
  std::optional<double> epsilon;
  std::optional<std::string> state;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<unsigned> threads;
  std::optional<std::string> plot_script;
};

// Translate command-line flags into the same key space as the config file so
// both paths share one validator.  Flags win over config-file values.
nlohmann::json overrides_json(const std::string& command, const FlagValues& f) {
  nlohmann::json j = nlohmann::json::object();
  if (f.lambda_r) {
    if (command == "eigen-sweep" || command == "avg-sweep")
      j["lambda_r_list"] = {*f.lambda_r};
    else
      j["lambda_r"] = *f.lambda_r;
  }
  if (f.epsilon) {
    if (command == "dynamics")
      j["epsilon_list"] = {*f.epsilon};
    else
      j["epsilon"] = *f.epsilon;
  }
  if (f.state) {
    nlohmann::json s;
    if (!f.state->empty() && f.state->front() == '[')
      s = nlohmann::json::parse(*f.state, nullptr, false);  // bad JSON fails validation later
    else
      s = *f.state;
    j["states"] = nlohmann::json::array({std::move(s)});
  }
  if (f.n) j["n"] = *f.n;
  if (f.seed) j["seed"] = *f.seed;
  if (f.out) j["out"] = *f.out;
  if (f.format) j["format"] = *f.format;
  if (f.threads) j["threads"] = *f.threads;
  if (f.plot_script) j["plot_script"] = *f.plot_script;
  return j;
}

void add_common_flags(CLI::App* cmd, FlagValues& f) {
  cmd->add_option("--config", f.config, "JSON config file (flags override its values)");
  cmd->add_option("--out", f.out, "output path (default <command>.<format>)");
  cmd->add_option("--format", f.format, "output format: csv or json (default csv)");
  cmd->add_option("--threads", f.threads, "worker threads; 0 = all cores (default 0)");
  cmd->add_option("--plot-script", f.plot_script, "also write a gnuplot script to this path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(dirac::kToolName) +
               ": spin-pseudospin entanglement tables for the graphene-Rashba model"};
  app.set_version_flag("--version", std::string(dirac::kToolName) + " " + dirac::kToolVersion);
  app.require_subcommand(1);

  FlagValues f;

  CLI::App* eigen = app.add_subcommand(
      "eigen-sweep", "eigenstate concurrence and Bloch-vector length vs band energy");
  add_common_flags(eigen, f);
  eigen->add_option("--lambda-r", f.lambda_r, "Rashba coupling in ueV (replaces the sweep list)");

  CLI::App* dyn = app.add_subcommand(
      "dynamics", "concurrence and CHSH trajectories for chosen initial states");
  add_common_flags(dyn, f);
  dyn->add_option("--lambda-r", f.lambda_r, "Rashba coupling in ueV (default 37.5)");
  dyn->add_option("--epsilon", f.epsilon, "band energy in ueV (replaces the default list)");
  dyn->add_option("--state", f.state,
                  "initial state: psi_x_up, psi_y_up, bell_1, bell_2, or JSON [re,im] pairs");

  CLI::App* avg = app.add_subcommand(
      "avg-sweep", "time-averaged concurrence over a log-symmetric energy grid");
  add_common_flags(avg, f);
  avg->add_option("--lambda-r", f.lambda_r, "Rashba coupling in ueV (replaces the sweep list)");
  avg->add_option("--state", f.state, "initial state (replaces the default four)");

  CLI::App* ens = app.add_subcommand(
      "ensemble-sweep", "ensemble-averaged time-averaged concurrence vs energy");
  add_common_flags(ens, f);
  ens->add_option("--lambda-r", f.lambda_r, "Rashba coupling in ueV (default 37.5)");
  ens->add_option("--n", f.n, "ensemble members per point (default 1000)");
  ens->add_option("--seed", f.seed, "RNG seed; identical seeds reproduce files byte-for-byte (default 1)");

  CLI::App* chsh = app.add_subcommand(
      "chsh", "CHSH parameter vs time for reference and sampled states");
  add_common_flags(chsh, f);
  chsh->add_option("--lambda-r", f.lambda_r, "Rashba coupling in ueV (default 37.5)");
  chsh->add_option("--epsilon", f.epsilon, "band energy in ueV (default 25000)");
  chsh->add_option("--seed", f.seed, "RNG seed for the sampled instances (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit cleanly; bad flags are config errors
  }

  const CLI::App* sub = app.get_subcommands().front();
  return dirac::run_cli(sub->get_name(), f.config, overrides_json(sub->get_name(), f));
}
