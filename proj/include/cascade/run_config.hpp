#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cascade/core.hpp"
#include "cascade/optimizer.hpp"
#include "cascade/profile.hpp"
#include "cascade/simulator.hpp"

namespace cascade::cli {

// Bad configuration (unparseable value, unknown key, empty sweep). Maps to
// exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kDefaultDtCut = 1e-4;

struct ProfileSpec {
  enum class Kind { Constant, Optimal, File };
  Kind kind = Kind::Optimal;
  double value = 0.0;  // Constant
  std::string path;    // File

  static ProfileSpec parse(const std::string& text);
  std::string str() const;

  friend bool operator==(const ProfileSpec&, const ProfileSpec&) = default;
};

struct SweepAxis {
  std::string param;
  std::vector<double> values;

  /// "param:lo:hi:n" (n evenly spaced points, inclusive) or "param=v1,v2,...".
  static SweepAxis parse(const std::string& text);
};

/// Everything a run needs. Flags override config-file values, which
/// override these defaults.
struct RunConfig {
  SystemParams params;
  ProfileSpec profile;
  std::optional<double> dt_cut;      // optimal profile falls back to kDefaultDtCut
  std::optional<double> gamma1_max;  // hold/cap value; default 1/(2 dt_cut)
  sim::IntegratorConfig integrator;
  opt::OptimizerConfig optimizer;
  std::optional<std::string> sweep;
  std::optional<double> target_fidelity;
  std::optional<std::string> circuit1;
  std::optional<std::string> circuit2;
  std::string out = "out";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// dt_cut in effect for the optimal profile (explicit or default).
  double effective_dt_cut() const { return dt_cut.value_or(kDefaultDtCut); }

  /// Params with SI overrides from circuit2 (gamma, omega0) applied.
  SystemParams resolved_params() const;
};

std::string to_json_string(const RunConfig& cfg);
RunConfig from_json_string(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Builds the coupling profile described by the config.
CouplingProfile build_profile(const RunConfig& cfg, const SystemParams& p);

}  // namespace cascade::cli
