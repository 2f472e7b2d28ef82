#include "cascade/oracles.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cascade::oracles {

double fidelity_constant_coupling(double gamma, double t) {
  return 2.0 * gamma * t * std::exp(-gamma * t);
}

double fidelity_constant_general(double gamma, double gamma1, double t) {
  const double diff = gamma - gamma1;
  const double pre = 2.0 * std::sqrt(gamma * gamma1);
  // (e^{-g1 t} - e^{-g t})/(g - g1) = e^{-g t} t * (e^{x} - 1)/x with x = (g - g1) t
  const double x = diff * t;
  if (x == 0.0) return pre * t * std::exp(-gamma * t);
  return pre * std::exp(-gamma * t) * std::expm1(x) / diff;
}

double optimal_profile(double gamma, double transfer_time, double t) {
  if (!(t < transfer_time)) {
    throw SingularityError("optimal profile is singular at t = T");
  }
  return gamma / std::expm1(2.0 * gamma * (transfer_time - t));
}

double fidelity_optimal(double gamma, double transfer_time, double t) {
  const double num = -std::expm1(-2.0 * gamma * t);
  const double den = std::sqrt(-std::expm1(-2.0 * gamma * transfer_time));
  return std::exp(gamma * (t - transfer_time)) * num / den;
}

double fidelity_optimal_final(double gamma, double transfer_time) {
  return std::sqrt(-std::expm1(-2.0 * gamma * transfer_time));
}

namespace {

void add_budget_warnings(FidelityReport& r, double gamma, double transfer_time, double dt_cut) {
  if (gamma * dt_cut > 0.1) {
    std::ostringstream os;
    os << "gamma*dt_cut = " << gamma * dt_cut << " is not << 1; first-order budget unreliable";
    r.warnings.push_back(os.str());
  }
  if (gamma * transfer_time < 2.0) {
    std::ostringstream os;
    os << "gamma*T = " << gamma * transfer_time
       << " < 2; exp(-2 gamma T) is not small and the expansion is unreliable";
    r.warnings.push_back(os.str());
  }
}

}  // namespace

FidelityReport infidelity_budget(double gamma, double transfer_time, double dt_cut) {
  if (!(gamma > 0.0) || !(transfer_time > 0.0) || dt_cut < 0.0)
    throw DomainError("infidelity_budget needs gamma > 0, T > 0, dt_cut >= 0");
  FidelityReport r;
  r.terms.exponential = 0.5 * std::exp(-2.0 * gamma * transfer_time);
  r.terms.truncation = gamma * dt_cut;
  r.fidelity = 1.0 - r.terms.total();
  add_budget_warnings(r, gamma, transfer_time, dt_cut);
  return r;
}

FidelityReport infidelity_budget(const SystemParams& p, double dt_cut) {
  FidelityReport r = infidelity_budget(p.gamma, p.transfer_time, dt_cut);
  r.terms.loss_line = 1.0 - std::sqrt(p.eta);
  r.terms.loss_osc = -std::expm1(-p.gamma_loss * p.transfer_time);
  r.fidelity = 1.0 - r.terms.total();
  return r;
}

double fidelity_lossy(const SystemParams& p, double t) {
  require_valid(p);
  return std::sqrt(p.eta) * std::exp(-p.gamma_loss * t) *
         fidelity_optimal(p.gamma, p.transfer_time, t);
}

ValidityFlags validity_windows(const SystemParams& p, double gamma1_max, double target_fidelity,
                               double margin) {
  if (!(target_fidelity > 0.0 && target_fidelity < 1.0))
    throw DomainError("validity_windows needs 0 < target fidelity < 1");
  if (!(margin > 0.0)) throw DomainError("validity margin must be > 0");
  ValidityFlags f;
  f.margin = margin;
  f.target_fidelity = target_fidelity;
  f.gamma1_max = gamma1_max;
  const double budget = 1.0 - target_fidelity;
  f.q2 = p.omega0 / p.gamma;
  f.q1_min = p.omega0 / gamma1_max;  // 0 when gamma1_max is infinite

  f.omega0_over_gamma1_max = p.omega0 >= margin * gamma1_max;
  f.gamma1_max_over_budget = gamma1_max >= margin * p.gamma / budget;
  f.quality_budget_over_q1 = budget * f.q2 >= margin * f.q1_min;
  f.q1_over_unity = f.q1_min >= margin;
  return f;
}

std::vector<double> euler_lagrange_residual(const CouplingProfile& c, const SystemParams& p,
                                            const TimeGrid& grid) {
  const std::size_t n = grid.n_steps();
  std::vector<double> nodes(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    try {
      nodes[j] = c.value(p, grid.t(j));
    } catch (const SingularityError&) {
      nodes[j] = std::numeric_limits<double>::infinity();
    }
  }
  std::vector<double> r(n + 1, std::numeric_limits<double>::quiet_NaN());
  const double g = p.gamma;
  for (std::size_t j = 1; j < n; ++j) {
    const double v = nodes[j];
    const double dv = (nodes[j + 1] - nodes[j - 1]) / (2.0 * grid.dt());
    r[j] = 2.0 * v * v + 2.0 * g * v - dv;
  }
  return r;
}

}  // namespace cascade::oracles
