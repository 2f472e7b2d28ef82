#include "cascade/core.hpp"

#include <cmath>
#include <sstream>

namespace cascade {

ParamReport validate_params(const SystemParams& p) {
  ParamReport r;
  auto finite = [](double x) { return std::isfinite(x); };

  if (!finite(p.gamma) || !(p.gamma > 0.0)) r.violations.emplace_back("gamma > 0 required");
  if (!finite(p.transfer_time) || !(p.transfer_time > 0.0))
    r.violations.emplace_back("transfer_time > 0 required");
  if (!finite(p.eta) || !(p.eta > 0.0)) r.violations.emplace_back("eta > 0 required");
  if (finite(p.eta) && p.eta > 1.0) r.violations.emplace_back("eta <= 1 required");
  if (!finite(p.gamma_loss) || p.gamma_loss < 0.0)
    r.violations.emplace_back("gamma_loss >= 0 required");
  else if (finite(p.gamma) && p.gamma_loss >= p.gamma)
    r.violations.emplace_back("gamma_loss < gamma required for lossy oracle");

  if (!finite(p.omega0) || !(p.omega0 > 0.0)) {
    r.warnings.emplace_back("omega0 not positive; weak-damping check skipped");
  } else if (p.omega0 < kWeakDampingMargin * p.gamma) {
    std::ostringstream os;
    os << "weak damping gamma << omega0 not satisfied (omega0/gamma = " << p.omega0 / p.gamma
       << ")";
    r.warnings.push_back(os.str());
  }
  return r;
}

void require_valid(const SystemParams& p) {
  const auto r = validate_params(p);
  if (r.ok()) return;
  std::string msg = "invalid parameters:";
  for (const auto& v : r.violations) msg += " " + v + ";";
  throw DomainError(msg);
}

TimeGrid::TimeGrid(double t_end, std::size_t n_steps) : t_end_(t_end), n_steps_(n_steps) {
  if (n_steps < 2) throw DomainError("time grid needs n_steps >= 2");
  if (!std::isfinite(t_end) || !(t_end > 0.0)) throw DomainError("time grid needs t_end > 0");
  dt_ = t_end / static_cast<double>(n_steps);
}

std::size_t TimeGrid::cell_of(double t) const noexcept {
  if (!(t > 0.0)) return 0;
  auto j = static_cast<std::size_t>(std::floor(t / dt_));
  if (j >= n_steps_) j = n_steps_ - 1;
  // floor(t/dt) can be off by one against the j*dt node definition
  if (j + 1 < n_steps_ && this->t(j + 1) <= t) ++j;
  if (j > 0 && this->t(j) > t) --j;
  return j;
}

std::size_t TimeGrid::node_near(double t, double rel_tol) const noexcept {
  if (!std::isfinite(t) || t < -rel_tol * dt_) return npos;
  const double x = std::round(t / dt_);
  if (x > static_cast<double>(n_steps_)) return npos;
  const auto j = static_cast<std::size_t>(x);
  return std::abs(this->t(j) - t) <= rel_tol * dt_ ? j : npos;
}

}  // namespace cascade
