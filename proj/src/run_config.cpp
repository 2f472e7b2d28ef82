#include "cascade/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cascade/circuit.hpp"
#include "cascade/csv.hpp"
#include "json.hpp"

namespace cascade::cli {

using nlohmann::json;

namespace {

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + s + "' is not a number");
  }
  if (used != s.size()) throw ConfigError(what + ": '" + s + "' is not a number");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

const char* method_name(sim::Method m) { return m == sim::Method::RK4 ? "rk4" : "heun"; }

sim::Method parse_method(const std::string& s) {
  if (s == "rk4") return sim::Method::RK4;
  if (s == "heun") return sim::Method::Heun;
  throw ConfigError("method must be rk4 or heun, got '" + s + "'");
}

const char* engine_name(sim::Engine e) { return e == sim::Engine::Parallel ? "parallel" : "serial"; }

sim::Engine parse_engine(const std::string& s) {
  if (s == "parallel") return sim::Engine::Parallel;
  if (s == "serial") return sim::Engine::SerialReference;
  throw ConfigError("engine must be parallel or serial, got '" + s + "'");
}

const char* param_name(opt::Parametrization p) {
  return p == opt::Parametrization::DirectGamma1 ? "direct" : "gdot";
}

opt::Parametrization parse_parametrization(const std::string& s) {
  if (s == "direct") return opt::Parametrization::DirectGamma1;
  if (s == "gdot") return opt::Parametrization::GDot;
  throw ConfigError("parametrization must be direct or gdot, got '" + s + "'");
}

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read_into(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
void read_into(const json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    dst.reset();
    return;
  }
  T v{};
  read_into(j, key, v);
  dst = v;
}

}  // namespace

ProfileSpec ProfileSpec::parse(const std::string& text) {
  ProfileSpec s;
  if (text == "optimal") {
    s.kind = Kind::Optimal;
  } else if (text.rfind("constant:", 0) == 0) {
    s.kind = Kind::Constant;
    s.value = parse_number(text.substr(9), "constant profile");
    if (!(s.value >= 0.0) || !std::isfinite(s.value)) throw ConfigError("constant profile rate must be >= 0");
  } else if (text.rfind("file:", 0) == 0 && text.size() > 5) {
    s.kind = Kind::File;
    s.path = text.substr(5);
  } else {
    throw ConfigError("profile must be constant:<v>, optimal or file:<path>, got '" + text + "'");
  }
  return s;
}

std::string ProfileSpec::str() const {
  switch (kind) {
    case Kind::Optimal:
      return "optimal";
    case Kind::Constant:
      return "constant:" + csv::Writer::number(value);
    case Kind::File:
      return "file:" + path;
  }
  return {};
}

SweepAxis SweepAxis::parse(const std::string& text) {
  SweepAxis a;
  const auto eq = text.find('=');
  if (eq != std::string::npos) {
    a.param = text.substr(0, eq);
    const std::string rest = text.substr(eq + 1);
    if (!rest.empty())
      for (const auto& item : split(rest, ',')) a.values.push_back(parse_number(item, "sweep value"));
  } else {
    const auto parts = split(text, ':');
    if (parts.size() != 4) throw ConfigError("sweep must be param:lo:hi:n or param=v1,v2,...");
    a.param = parts[0];
    const double lo = parse_number(parts[1], "sweep lo");
    const double hi = parse_number(parts[2], "sweep hi");
    const double n = parse_number(parts[3], "sweep count");
    if (n < 0 || n != std::floor(n)) throw ConfigError("sweep count must be a non-negative integer");
    const auto count = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < count; ++i)
      a.values.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  static const char* known[] = {"T", "gamma", "gamma_loss", "eta", "omega0", "dt_cut"};
  bool ok = false;
  for (const char* k : known) ok = ok || a.param == k;
  if (!ok) throw ConfigError("unknown sweep parameter '" + a.param + "'");
  if (a.values.empty()) throw ConfigError("empty sweep range");
  for (double v : a.values)
    if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
  return a;
}

SystemParams RunConfig::resolved_params() const {
  SystemParams p = params;
  if (circuit2) {
    const auto r = circuit::circuit_to_rates(circuit::parse_circuit(*circuit2));
    p.gamma = r.gamma;
    p.omega0 = r.omega0;
  }
  return p;
}

std::string to_json_string(const RunConfig& c) {
  json j;
  j["params"] = {{"gamma", c.params.gamma},
                 {"gamma_loss", c.params.gamma_loss},
                 {"eta", c.params.eta},
                 {"omega0", c.params.omega0},
                 {"T", c.params.transfer_time}};
  j["profile"] = c.profile.str();
  j["dt_cut"] = opt_json(c.dt_cut);
  j["gamma1_max"] = opt_json(c.gamma1_max);
  j["integrator"] = {{"method", method_name(c.integrator.method)},
                     {"steps", c.integrator.n_steps},
                     {"kernels", c.integrator.kernel_tracking},
                     {"kernel_stride", c.integrator.kernel_stride},
                     {"engine", engine_name(c.integrator.engine)},
                     {"substep_threshold", c.integrator.substep_threshold}};
  j["optimizer"] = {{"max_iters", c.optimizer.max_iters},
                    {"step_size", c.optimizer.step_size},
                    {"tolerance", c.optimizer.tolerance},
                    {"parametrization", param_name(c.optimizer.parametrization)},
                    {"initial_value", c.optimizer.initial_value},
                    {"snapshot_every", c.optimizer.snapshot_every},
                    {"snapshot_points", c.optimizer.snapshot_points}};
  j["sweep"] = opt_json(c.sweep);
  j["target_fidelity"] = opt_json(c.target_fidelity);
  j["circuit1"] = opt_json(c.circuit1);
  j["circuit2"] = opt_json(c.circuit2);
  j["out"] = c.out;
  return j.dump(2);
}

RunConfig from_json_string(const std::string& text, RunConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"params", "profile", "dt_cut", "gamma1_max", "integrator", "optimizer", "sweep", "target_fidelity",
              "circuit1", "circuit2", "out"},
             "config");
  if (j.contains("params")) {
    const auto& p = j["params"];
    check_keys(p, {"gamma", "gamma_loss", "eta", "omega0", "T"}, "params");
    read_into(p, "gamma", c.params.gamma);
    read_into(p, "gamma_loss", c.params.gamma_loss);
    read_into(p, "eta", c.params.eta);
    read_into(p, "omega0", c.params.omega0);
    read_into(p, "T", c.params.transfer_time);
  }
  if (j.contains("profile")) {
    std::string s;
    read_into(j, "profile", s);
    c.profile = ProfileSpec::parse(s);
  }
  read_into(j, "dt_cut", c.dt_cut);
  read_into(j, "gamma1_max", c.gamma1_max);
  if (j.contains("integrator")) {
    const auto& g = j["integrator"];
    check_keys(g, {"method", "steps", "kernels", "kernel_stride", "engine", "substep_threshold"}, "integrator");
    if (g.contains("method")) c.integrator.method = parse_method(g["method"].get<std::string>());
    read_into(g, "steps", c.integrator.n_steps);
    read_into(g, "kernels", c.integrator.kernel_tracking);
    read_into(g, "kernel_stride", c.integrator.kernel_stride);
    if (g.contains("engine")) c.integrator.engine = parse_engine(g["engine"].get<std::string>());
    read_into(g, "substep_threshold", c.integrator.substep_threshold);
  }
  if (j.contains("optimizer")) {
    const auto& o = j["optimizer"];
    check_keys(o,
               {"max_iters", "step_size", "tolerance", "parametrization", "initial_value", "snapshot_every",
                "snapshot_points"},
               "optimizer");
    read_into(o, "max_iters", c.optimizer.max_iters);
    read_into(o, "step_size", c.optimizer.step_size);
    read_into(o, "tolerance", c.optimizer.tolerance);
    if (o.contains("parametrization"))
      c.optimizer.parametrization = parse_parametrization(o["parametrization"].get<std::string>());
    read_into(o, "initial_value", c.optimizer.initial_value);
    read_into(o, "snapshot_every", c.optimizer.snapshot_every);
    read_into(o, "snapshot_points", c.optimizer.snapshot_points);
  }
  read_into(j, "sweep", c.sweep);
  read_into(j, "target_fidelity", c.target_fidelity);
  read_into(j, "circuit1", c.circuit1);
  read_into(j, "circuit2", c.circuit2);
  read_into(j, "out", c.out);
  return c;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str(), std::move(base));
}

namespace {

CouplingProfile load_profile_file(const std::string& path, const SystemParams& p) {
  const auto table = csv::read(path);
  if (table.rows.size() < 2) throw ConfigError("profile file '" + path + "' needs at least two rows");
  std::vector<double> t, v;
  for (const auto& row : table.rows) {
    if (row.size() < 2) throw ConfigError("profile file rows need t and gamma1 columns");
    t.push_back(parse_number(row[0], "profile file t"));
    v.push_back(parse_number(row[1], "profile file gamma1"));
  }
  const double dt = t[1] - t[0];
  if (std::abs(t[0]) > 1e-12 || !(dt > 0.0)) throw ConfigError("profile file must start at t = 0 and increase");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs(t[i] - static_cast<double>(i) * dt) > 1e-6 * dt)
      throw ConfigError("profile file times must be uniformly spaced");
  const double tol = 1e-6 * dt;
  const double T = p.transfer_time;
  if (std::abs(t.back() - T) <= tol) {
    // One row per node.
    return CouplingProfile::sampled(TimeGrid(T, t.size() - 1), v);
  }
  if (std::abs(t.back() + dt - T) <= tol) {
    // One row per cell.
    return profile_from_cells(TimeGrid(T, t.size()), v);
  }
  throw ConfigError("profile file does not span [0, T] for T = " + csv::Writer::number(T));
}

}  // namespace

CouplingProfile build_profile(const RunConfig& cfg, const SystemParams& p) {
  switch (cfg.profile.kind) {
    case ProfileSpec::Kind::Optimal:
      return CouplingProfile::optimal(cfg.effective_dt_cut(), cfg.gamma1_max);
    case ProfileSpec::Kind::Constant: {
      auto c = CouplingProfile::constant(cfg.profile.value);
      return cfg.dt_cut ? c.with_truncation(*cfg.dt_cut, cfg.gamma1_max) : c;
    }
    case ProfileSpec::Kind::File: {
      auto c = load_profile_file(cfg.profile.path, p);
      return cfg.dt_cut ? c.with_truncation(*cfg.dt_cut, cfg.gamma1_max) : c;
    }
  }
  throw ConfigError("unknown profile kind");
}

}  // namespace cascade::cli
