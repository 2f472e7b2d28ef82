// cascade: simulate, optimize, sweep and budget the cascaded transfer.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cascade/commands.hpp"

namespace {

using cascade::cli::RunConfig;

// Flag values; unset ones leave the config-file/default value alone.
struct Flags {
  std::optional<std::string> config;
  std::optional<double> gamma, gamma_loss, eta, omega0, T, dt_cut, gamma1_max, target_f;
  std::optional<std::string> profile, method, engine, sweep, out, circuit1, circuit2, parametrization;
  std::optional<std::size_t> steps, kernel_stride, max_iters;
  std::optional<double> step_size, tolerance, initial_value;
  bool kernels = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file (flags override it)");
  cmd->add_option("--gamma", f.gamma, "coupling rate of oscillator 2");
  cmd->add_option("--gamma-loss", f.gamma_loss, "intrinsic loss rate of each oscillator");
  cmd->add_option("--eta", f.eta, "line power transmission, 0 < eta <= 1");
  cmd->add_option("--omega0", f.omega0, "carrier frequency (validity checks)");
  cmd->add_option("--T", f.T, "transfer time");
  cmd->add_option("--dt-cut", f.dt_cut, "truncation interval before T");
  cmd->add_option("--gamma1-max", f.gamma1_max, "hold/cap value for gamma1 (default 1/(2 dt-cut))");
  cmd->add_option("--profile", f.profile, "constant:<v> | optimal | file:<path>");
  cmd->add_option("--steps", f.steps, "grid intervals");
  cmd->add_option("--method", f.method, "rk4 | heun");
  cmd->add_option("--engine", f.engine, "parallel | serial");
  cmd->add_flag("--kernels", f.kernels, "track noise kernels and write commutator deficits");
  cmd->add_option("--kernel-stride", f.kernel_stride, "store every n-th kernel row");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--sweep", f.sweep, "param:lo:hi:n or param=v1,v2,...");
  cmd->add_option("--target-F", f.target_f, "target fidelity for validity windows");
  cmd->add_option("--circuit1", f.circuit1, "switched oscillator, series:R:L:C or parallel:R:L:C");
  cmd->add_option("--circuit2", f.circuit2, "fixed oscillator; enables SI units");
  cmd->add_option("--max-iters", f.max_iters, "optimizer iteration budget");
  cmd->add_option("--step-size", f.step_size, "optimizer initial step");
  cmd->add_option("--tolerance", f.tolerance, "optimizer improvement threshold");
  cmd->add_option("--parametrization", f.parametrization, "direct | gdot");
  cmd->add_option("--initial", f.initial_value, "optimizer starting value, units of gamma");
}

RunConfig resolve(const Flags& f) {
  RunConfig c;
  if (f.config) c = cascade::cli::load_config_file(*f.config, c);
  if (f.gamma) c.params.gamma = *f.gamma;
  if (f.gamma_loss) c.params.gamma_loss = *f.gamma_loss;
  if (f.eta) c.params.eta = *f.eta;
  if (f.omega0) c.params.omega0 = *f.omega0;
  if (f.T) c.params.transfer_time = *f.T;
  if (f.dt_cut) c.dt_cut = *f.dt_cut;
  if (f.gamma1_max) c.gamma1_max = *f.gamma1_max;
  if (f.target_f) c.target_fidelity = *f.target_f;
  if (f.profile) c.profile = cascade::cli::ProfileSpec::parse(*f.profile);
  if (f.steps) c.integrator.n_steps = *f.steps;
  // Enum-valued flags go through the JSON reader so both paths validate alike.
  if (f.method) c = cascade::cli::from_json_string(R"({"integrator":{"method":")" + *f.method + "\"}}", c);
  if (f.engine) c = cascade::cli::from_json_string(R"({"integrator":{"engine":")" + *f.engine + "\"}}", c);
  if (f.kernels) c.integrator.kernel_tracking = true;
  if (f.kernel_stride) c.integrator.kernel_stride = *f.kernel_stride;
  if (f.out) c.out = *f.out;
  if (f.sweep) c.sweep = *f.sweep;
  if (f.circuit1) c.circuit1 = *f.circuit1;
  if (f.circuit2) c.circuit2 = *f.circuit2;
  if (f.max_iters) c.optimizer.max_iters = *f.max_iters;
  if (f.step_size) c.optimizer.step_size = *f.step_size;
  if (f.tolerance) c.optimizer.tolerance = *f.tolerance;
  if (f.initial_value) c.optimizer.initial_value = *f.initial_value;
  if (f.parametrization)
    c = cascade::cli::from_json_string(R"({"optimizer":{"parametrization":")" + *f.parametrization + "\"}}", c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cascaded oscillator state transfer: simulate, optimize, sweep, budget"};
  app.require_subcommand(1);

  Flags flags;
  using Command = int (*)(const RunConfig&, std::ostream&);
  struct Entry {
    const char* name;
    const char* help;
    Command fn;
  };
  const Entry entries[] = {
      {"simulate", "integrate the transfer and compare against the closed form", cascade::cli::cmd_simulate},
      {"optimize", "optimize the switching profile on a grid", cascade::cli::cmd_optimize},
      {"sweep", "fidelity over a parameter axis", cascade::cli::cmd_sweep},
      {"budget", "infidelity budget and validity windows", cascade::cli::cmd_budget},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    add_flags(sub, flags);
    subs.emplace_back(sub, e.fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cascade::cli::kExitConfig;
  }

  for (const auto& [sub, fn] : subs) {
    if (!sub->parsed()) continue;
    return cascade::cli::run_guarded([&, fn = fn] { return fn(resolve(flags), std::cout); }, std::cerr);
  }
  return cascade::cli::kExitConfig;
}
