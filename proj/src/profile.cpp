#include "cascade/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cascade/oracles.hpp"

namespace cascade {

CouplingProfile CouplingProfile::constant(double rate) {
  if (!std::isfinite(rate) || rate < 0.0) throw DomainError("constant coupling must be finite and >= 0");
  CouplingProfile c;
  c.kind_ = Kind::Constant;
  c.constant_ = rate;
  return c;
}

CouplingProfile CouplingProfile::optimal(double dt_cut, std::optional<double> gamma1_max) {
  CouplingProfile c;
  c.kind_ = Kind::OptimalClosedForm;
  if (!(dt_cut > 0.0))
    throw DomainError("optimal profile requires a truncation dt_cut > 0 (singular at t = T)");
  return c.with_truncation(dt_cut, gamma1_max);
}

CouplingProfile CouplingProfile::sampled(TimeGrid grid, std::vector<double> node_values) {
  if (node_values.size() != grid.n_points())
    throw DomainError("sampled profile needs one value per grid node");
  for (double v : node_values)
    if (!std::isfinite(v) || v < 0.0) throw DomainError("sampled profile values must be finite and >= 0");
  CouplingProfile c;
  c.kind_ = Kind::SampledGrid;
  c.grid_ = grid;
  c.samples_ = std::move(node_values);
  return c;
}

CouplingProfile CouplingProfile::with_truncation(double dt_cut, std::optional<double> gamma1_max) const {
  if (!std::isfinite(dt_cut) || !(dt_cut > 0.0)) throw DomainError("truncation dt_cut must be > 0");
  if (gamma1_max && (!std::isfinite(*gamma1_max) || *gamma1_max < 0.0))
    throw DomainError("gamma1_max must be finite and >= 0");
  CouplingProfile c = *this;
  c.dt_cut_ = dt_cut;
  c.gamma1_max_ = gamma1_max;
  return c;
}

double CouplingProfile::hold_value() const {
  if (!dt_cut_) throw DomainError("profile has no truncation");
  return gamma1_max_ ? *gamma1_max_ : 1.0 / (2.0 * *dt_cut_);
}

double CouplingProfile::cut_time(const SystemParams& p) const {
  return dt_cut_ ? p.transfer_time - *dt_cut_ : p.transfer_time;
}

double CouplingProfile::base_value(const SystemParams& p, double t, bool left) const {
  switch (kind_) {
    case Kind::Constant:
      return constant_;
    case Kind::OptimalClosedForm:
      return oracles::optimal_profile(p.gamma, p.transfer_time, t);
    case Kind::SampledGrid: {
      const auto& g = *grid_;
      std::size_t j = g.cell_of(t);
      if (t >= g.t_end()) j = g.n_steps();  // the final node carries its own sample
      if (left && j > 0 && g.t(j) == t) --j;
      return samples_[j];
    }
  }
  return 0.0;
}

namespace {
// Times within a few ulps of the cut count as the cut itself, so a cut that
// lands on a grid node is seen consistently whichever way the node was computed.
double cut_slack(const SystemParams& p) {
  return 8.0 * std::numeric_limits<double>::epsilon() * p.transfer_time;
}
}  // namespace

double CouplingProfile::value(const SystemParams& p, double t) const {
  if (dt_cut_ && t >= cut_time(p) - cut_slack(p)) return hold_value();
  return base_value(p, t, false);
}

double CouplingProfile::value_left(const SystemParams& p, double t) const {
  if (dt_cut_ && t > cut_time(p) + cut_slack(p)) return hold_value();
  return base_value(p, t, true);
}

std::vector<double> CouplingProfile::breakpoints(const SystemParams& p) const {
  std::vector<double> out;
  const double T = p.transfer_time;
  if (kind_ == Kind::SampledGrid) {
    for (std::size_t j = 1; j < grid_->n_steps(); ++j) out.push_back(grid_->t(j));
  }
  if (dt_cut_) {
    const double tc = cut_time(p);
    if (tc > 0.0 && tc < T) out.push_back(tc);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double profile_value(const CouplingProfile& c, const SystemParams& p, double t) {
  if (!(t >= 0.0) || t > p.transfer_time) throw DomainError("profile_value needs 0 <= t <= T");
  return c.value(p, t);
}

std::vector<double> sample_cells(const CouplingProfile& c, const SystemParams& p, const TimeGrid& grid) {
  std::vector<double> cells(grid.n_steps());
  for (std::size_t j = 0; j < cells.size(); ++j) cells[j] = c.value(p, grid.t(j));
  return cells;
}

CouplingProfile profile_from_cells(const TimeGrid& grid, const std::vector<double>& cells) {
  if (cells.size() != grid.n_steps()) throw DomainError("need one value per grid cell");
  std::vector<double> nodes(cells);
  nodes.push_back(cells.back());
  return CouplingProfile::sampled(grid, std::move(nodes));
}

}  // namespace cascade
