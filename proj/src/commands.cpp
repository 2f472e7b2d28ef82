#include "cascade/commands.hpp"

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>

#include "cascade/circuit.hpp"
#include "cascade/csv.hpp"
#include "cascade/optimizer.hpp"
#include "cascade/oracles.hpp"
#include "cascade/simulator.hpp"
#include "json.hpp"

namespace cascade::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

SystemParams checked_params(const SystemParams& p) {
  const auto rep = validate_params(p);
  if (!rep.ok()) {
    std::string msg = "invalid parameters:";
    for (const auto& v : rep.violations) msg += " " + v + ";";
    throw ConfigError(msg);
  }
  return p;
}

fs::path prepare_out(const RunConfig& cfg) {
  const fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + cfg.out + "'");
  std::ofstream f(dir / "effective_config.json");
  if (!f) throw ConfigError("output directory '" + cfg.out + "' is not writable");
  f << to_json_string(cfg) << '\n';
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  return f;
}

void write_json(const fs::path& path, const json& j) { open_out(path) << j.dump(2) << '\n'; }

json terms_json(const InfidelityTerms& t) {
  return {{"exponential", t.exponential},
          {"truncation", t.truncation},
          {"loss_line", t.loss_line},
          {"loss_osc", t.loss_osc},
          {"total", t.total()}};
}

json validity_json(const ValidityFlags& v) {
  return {{"margin", v.margin},
          {"target_fidelity", v.target_fidelity},
          {"gamma1_max", v.gamma1_max},
          {"q2", v.q2},
          {"q1_min", v.q1_min},
          {"omega0_over_gamma1_max", v.omega0_over_gamma1_max},
          {"gamma1_max_over_budget", v.gamma1_max_over_budget},
          {"quality_budget_over_q1", v.quality_budget_over_q1},
          {"q1_over_unity", v.q1_over_unity},
          {"first_window", v.first_window()},
          {"second_window", v.second_window()},
          {"all", v.all()}};
}

json report_json(const FidelityReport& r) {
  json j{{"fidelity", r.fidelity}, {"terms", terms_json(r.terms)}, {"warnings", r.warnings}};
  j["validity"] = r.validity ? validity_json(*r.validity) : json(nullptr);
  return j;
}

json opt_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

// Closed-form A21(t) for profiles that have one, valid up to the cut.
std::optional<double> oracle_fidelity(const RunConfig& cfg, const CouplingProfile& c, const SystemParams& p,
                                      double t) {
  const double cut = c.cut_time(p);
  if (t > cut + 1e-12 * p.transfer_time) return std::nullopt;
  const double scale = std::sqrt(p.eta) * std::exp(-p.gamma_loss * t);
  switch (cfg.profile.kind) {
    case ProfileSpec::Kind::Optimal:
      return scale * oracles::fidelity_optimal(p.gamma, p.transfer_time, t);
    case ProfileSpec::Kind::Constant:
      return scale * oracles::fidelity_constant_general(p.gamma, cfg.profile.value, t);
    case ProfileSpec::Kind::File:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<ValidityFlags> maybe_validity(const SystemParams& p, double gamma1_max, double target) {
  if (!(target > 0.0 && target < 1.0)) return std::nullopt;
  return oracles::validity_windows(p, gamma1_max, target);
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const auto p = checked_params(cfg.resolved_params());
  const auto profile = build_profile(cfg, p);
  const auto dir = prepare_out(cfg);
  const auto state = sim::integrate_transfer_lossy(profile, p, cfg.integrator);

  {
    auto f = open_out(dir / "fidelity_curve.csv");
    csv::Writer w(f);
    w.header({"t", "F_sim", "F_oracle", "abs_err"});
    for (const auto& pt : sim::fidelity_curve(state)) {
      const auto o = oracle_fidelity(cfg, profile, p, pt.t);
      w.row({pt.t, pt.fidelity, o, o ? std::optional<double>(std::abs(pt.fidelity - *o)) : std::nullopt});
    }
  }

  json report;
  report["profile"] = cfg.profile.str();
  report["readout_time"] = state.readout_time;
  report["fidelity"] = state.fidelity();
  report["fidelity_held"] = state.fidelity_held();
  const auto oracle = oracle_fidelity(cfg, profile, p, state.readout_time);
  report["oracle_fidelity"] = opt_json(oracle);
  report["abs_err"] = oracle ? json(std::abs(state.fidelity() - *oracle)) : json(nullptr);
  const auto peak = sim::fidelity_peak(state);
  report["peak"] = {{"t", peak.t}, {"fidelity", peak.fidelity}};
  report["coefficients"] = {{"a11", state.readout.a11}, {"a21", state.readout.a21}, {"a22", state.readout.a22}};
  report["param_warnings"] = validate_params(p).warnings;

  if (cfg.profile.kind == ProfileSpec::Kind::Optimal) {
    auto budget = oracles::infidelity_budget(p, cfg.effective_dt_cut());
    budget.validity = maybe_validity(p, profile.hold_value(), budget.fidelity);
    report["budget"] = report_json(budget);
  } else {
    report["budget"] = nullptr;
  }

  if (cfg.integrator.kernel_tracking) {
    const auto d = sim::commutator_check(state);
    auto f = open_out(dir / "deficits.csv");
    csv::Writer w(f);
    w.header({"t", "deficit_a1", "deficit_a2"});
    for (std::size_t i = 0; i < d.t.size(); ++i) w.row({d.t[i], d.a1[i], d.a2[i]});
    report["commutator"] = {{"max_abs_deficit", d.max_abs()}, {"rows", d.t.size()}};
  }

  write_json(dir / "report.json", report);
  log << "fidelity " << csv::Writer::number(state.fidelity()) << " at t = " << csv::Writer::number(state.readout_time)
      << "; peak " << csv::Writer::number(peak.fidelity) << " at t = " << csv::Writer::number(peak.t) << '\n';
  return kExitOk;
}

int cmd_optimize(const RunConfig& cfg, std::ostream& log) {
  const auto p = checked_params(cfg.resolved_params());
  const TimeGrid grid(p.transfer_time, cfg.integrator.n_steps);
  const double dt_cut = cfg.effective_dt_cut();
  if (!(dt_cut > 0.0)) throw ConfigError("optimize needs dt_cut > 0");
  const double cap = cfg.gamma1_max.value_or(0.5 / dt_cut);
  const auto dir = prepare_out(cfg);

  auto ocfg = cfg.optimizer;
  ocfg.gamma1_max = cap;
  const auto res = opt::optimize_profile(p, grid, ocfg);

  const auto closed = CouplingProfile::optimal(dt_cut, cap);
  const auto closed_cells = sample_cells(closed, p, grid);
  // Stationarity and pointwise comparison stop ten cut intervals (or ten
  // cells, if coarser) before T.
  const double window_end = p.transfer_time - kDefaultWindowMargin * std::max(dt_cut, grid.dt());

  double max_rel = 0.0;
  {
    auto f = open_out(dir / "profile.csv");
    csv::Writer w(f);
    w.header({"t", "gamma1_opt", "gamma1_closed_form", "rel_err"});
    for (std::size_t j = 0; j < res.cells.size(); ++j) {
      const double rel = std::abs(res.cells[j] - closed_cells[j]) / closed_cells[j];
      if (grid.t(j) <= window_end) max_rel = std::max(max_rel, rel);
      w.row({grid.t(j), res.cells[j], closed_cells[j], rel});
    }
  }
  {
    auto f = open_out(dir / "trace.csv");
    csv::Writer w(f);
    w.header({"iteration", "functional", "gradient_norm", "step"});
    for (const auto& e : res.trace.entries)
      w.row({static_cast<double>(e.iteration), e.functional, e.gradient_norm, e.step});
  }
  {
    auto f = open_out(dir / "snapshots.csv");
    csv::Writer w(f);
    w.header({"iteration", "t", "gamma1"});
    for (const auto& s : res.trace.snapshots)
      for (std::size_t i = 0; i < s.t.size(); ++i) w.row({static_cast<double>(s.iteration), s.t[i], s.gamma1[i]});
  }

  const auto st = opt::verify_stationarity(res.profile(grid), p, grid, window_end);
  const auto st_closed = opt::verify_stationarity(profile_from_cells(grid, closed_cells), p, grid, window_end);
  const double closed_functional = opt::functional_value(closed_cells, p, grid);
  json j{{"status", opt::to_string(res.trace.status)},
         {"converged", res.trace.converged()},
         {"iterations", res.trace.iterations},
         {"functional", res.functional},
         {"closed_form_functional", closed_functional},
         {"functional_gain", res.functional - closed_functional},
         {"gamma1_max", cap},
         {"window_end", window_end},
         {"max_rel_err_in_window", max_rel},
         {"stationarity",
          {{"max_residual", st.max_residual},
           {"max_relative_residual", st.max_relative_residual},
           {"points", st.points},
           {"threshold", opt::kDefaultStationarityThreshold},
           {"pass", st.pass},
           {"closed_form_max_residual", st_closed.max_residual},
           {"closed_form_max_relative_residual", st_closed.max_relative_residual}}}};
  write_json(dir / "stationarity.json", j);

  log << "functional " << csv::Writer::number(res.functional) << " (closed form "
      << csv::Writer::number(closed_functional) << "), " << opt::to_string(res.trace.status) << " after "
      << res.trace.iterations << " iterations\n";
  return res.trace.converged() ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.sweep) throw ConfigError("sweep needs an axis (--sweep param:lo:hi:n or param=v1,v2,...)");
  const auto axis = SweepAxis::parse(*cfg.sweep);
  const auto base = cfg.resolved_params();

  struct Point {
    RunConfig cfg;
    SystemParams p;
    std::optional<double> analytic, simulated, readout_time;
  };
  std::vector<Point> points;
  for (double v : axis.values) {
    Point pt{cfg, base, {}, {}, {}};
    pt.cfg.integrator.kernel_tracking = false;
    if (axis.param == "T") pt.p.transfer_time = v;
    if (axis.param == "gamma") pt.p.gamma = v;
    if (axis.param == "gamma_loss") pt.p.gamma_loss = v;
    if (axis.param == "eta") pt.p.eta = v;
    if (axis.param == "omega0") pt.p.omega0 = v;
    if (axis.param == "dt_cut") pt.cfg.dt_cut = v;
    checked_params(pt.p);
    points.push_back(std::move(pt));
  }
  const auto dir = prepare_out(cfg);

  std::vector<std::exception_ptr> errors(points.size());
  const auto n = static_cast<long long>(points.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    auto& pt = points[static_cast<std::size_t>(i)];
    try {
      const auto profile = build_profile(pt.cfg, pt.p);
      const auto state = sim::integrate_transfer_lossy(profile, pt.p, pt.cfg.integrator);
      pt.simulated = state.fidelity();
      pt.readout_time = state.readout_time;
      const double T = pt.p.transfer_time;
      const double scale = std::sqrt(pt.p.eta) * std::exp(-pt.p.gamma_loss * T);
      if (pt.cfg.profile.kind == ProfileSpec::Kind::Optimal)
        pt.analytic = scale * oracles::fidelity_optimal_final(pt.p.gamma, T);
      else if (pt.cfg.profile.kind == ProfileSpec::Kind::Constant && !pt.cfg.dt_cut)
        pt.analytic = scale * oracles::fidelity_constant_general(pt.p.gamma, pt.cfg.profile.value, T);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  auto f = open_out(dir / "sweep.csv");
  csv::Writer w(f);
  w.header({axis.param, "T", "gamma", "gamma_loss", "eta", "dt_cut", "readout_time", "F_analytic", "F_sim", "diff",
            "truncation_budget"});
  for (const auto& pt : points) {
    const bool truncated = pt.cfg.profile.kind == ProfileSpec::Kind::Optimal || pt.cfg.dt_cut;
    const std::optional<double> dt = truncated ? std::optional<double>(pt.cfg.effective_dt_cut()) : std::nullopt;
    std::optional<double> diff;
    if (pt.analytic && pt.simulated) diff = *pt.simulated - *pt.analytic;
    std::optional<double> budget;
    if (dt) budget = pt.p.gamma * *dt;
    double value = 0.0;
    if (axis.param == "T") value = pt.p.transfer_time;
    if (axis.param == "gamma") value = pt.p.gamma;
    if (axis.param == "gamma_loss") value = pt.p.gamma_loss;
    if (axis.param == "eta") value = pt.p.eta;
    if (axis.param == "omega0") value = pt.p.omega0;
    if (axis.param == "dt_cut") value = *pt.cfg.dt_cut;
    w.row({value, pt.p.transfer_time, pt.p.gamma, pt.p.gamma_loss, pt.p.eta, dt, pt.readout_time, pt.analytic,
           pt.simulated, diff, budget});
  }
  log << "sweep over " << axis.param << ": " << points.size() << " points\n";
  return kExitOk;
}

int cmd_budget(const RunConfig& cfg, std::ostream& log) {
  if (cfg.circuit1 && !cfg.circuit2) throw ConfigError("circuit1 needs circuit2 (the fixed oscillator)");
  const auto p = checked_params(cfg.resolved_params());
  // With circuits, the switched oscillator's rate is the cap and sets the
  // default cut interval; explicit values still win.
  std::optional<double> cap = cfg.gamma1_max;
  if (cfg.circuit1 && !cap) cap = circuit::circuit_to_rates(circuit::parse_circuit(*cfg.circuit1)).gamma;
  const double dt_cut = cfg.dt_cut ? *cfg.dt_cut : (cfg.circuit1 ? 0.5 / *cap : cfg.effective_dt_cut());
  if (!(dt_cut >= 0.0)) throw ConfigError("dt_cut must be >= 0");
  auto report = oracles::infidelity_budget(p, dt_cut);
  const double gamma1_max = cap.value_or(dt_cut > 0.0 ? 0.5 / dt_cut : std::numeric_limits<double>::infinity());
  const double target = cfg.target_fidelity.value_or(report.fidelity);
  if (cfg.target_fidelity && !(target > 0.0 && target < 1.0))
    throw ConfigError("target fidelity must be in (0, 1)");

  json j;
  if (cfg.circuit1 && cfg.circuit2) {
    const auto c1 = circuit::parse_circuit(*cfg.circuit1);
    const auto c2 = circuit::parse_circuit(*cfg.circuit2);
    if (target > 0.0 && target < 1.0)
      report.validity = circuit::rates_to_validity(gamma1_max, c1, c2, target);
    else
      circuit::rates_to_validity(gamma1_max, c1, c2, 0.5);  // identity check only
  } else {
    report.validity = maybe_validity(p, gamma1_max, target);
  }
  j = report_json(report);
  j["gamma1_max"] = std::isfinite(gamma1_max) ? json(gamma1_max) : json(nullptr);
  j["dt_cut"] = dt_cut;
  j["param_warnings"] = validate_params(p).warnings;
  if (cfg.circuit2) {
    auto rates = [](const circuit::CircuitRates& r) {
      return json{{"gamma", r.gamma}, {"omega0", r.omega0}, {"dx0", r.dx0}, {"q", r.q}};
    };
    j["units"] = "SI";
    j["circuits"] = json::object();
    if (cfg.circuit1) j["circuits"]["osc1"] = rates(circuit::circuit_to_rates(circuit::parse_circuit(*cfg.circuit1)));
    j["circuits"]["osc2"] = rates(circuit::circuit_to_rates(circuit::parse_circuit(*cfg.circuit2)));
  } else {
    j["units"] = "canonical";
  }

  const auto dir = prepare_out(cfg);
  write_json(dir / "budget.json", j);
  log << "predicted fidelity " << csv::Writer::number(report.fidelity) << " (total infidelity "
      << csv::Writer::number(report.terms.total()) << ")\n";
  return kExitOk;
}

int run_guarded(const std::function<int()>& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const IntegrationError& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kExitIntegration;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cascade::cli
