#pragma once

#include <vector>

#include "cascade/core.hpp"
#include "cascade/profile.hpp"
#include "cascade/report.hpp"

// Closed-form expressions for the cascaded transfer. Everything here is a
// pure function of its arguments and serves as ground truth for the
// simulator and optimizer.
//
// "Fidelity" F is the coefficient of a1(0) in a2(t): an amplitude transfer
// coefficient, independent of the oscillator states. It is not the overlap
// fidelity of the transferred state.
namespace cascade::oracles {

/// 2 gamma t exp(-gamma t): both oscillators coupled at the same constant rate.
double fidelity_constant_coupling(double gamma, double t);

/// Constant gamma1 on oscillator 1, constant gamma on oscillator 2:
/// 2 sqrt(gamma gamma1) (exp(-gamma1 t) - exp(-gamma t)) / (gamma - gamma1).
double fidelity_constant_general(double gamma, double gamma1, double t);

/// gamma / (exp(2 gamma (T - t)) - 1). Throws SingularityError for t >= T.
double optimal_profile(double gamma, double transfer_time, double t);

/// 2 sinh(gamma t) / sqrt(exp(2 gamma T) - 1), evaluated without overflow as
/// exp(gamma (t - T)) (1 - exp(-2 gamma t)) / sqrt(1 - exp(-2 gamma T)).
double fidelity_optimal(double gamma, double transfer_time, double t);

/// sqrt(1 - exp(-2 gamma T)), the value of fidelity_optimal at t = T.
double fidelity_optimal_final(double gamma, double transfer_time);

/// First-order infidelity budget of the truncated optimal protocol.
/// Warns (in the report) when gamma*dt_cut > 0.1 or gamma*T < 2.
FidelityReport infidelity_budget(double gamma, double transfer_time, double dt_cut);

/// Same budget with the loss terms 1 - sqrt(eta) and 1 - exp(-gamma' T).
FidelityReport infidelity_budget(const SystemParams& p, double dt_cut);

/// sqrt(eta) exp(-gamma' t) fidelity_optimal(gamma, T, t). Requires valid
/// params including gamma' < gamma (DomainError otherwise).
double fidelity_lossy(const SystemParams& p, double t);

/// Window checks omega0 >> gamma1_max >> gamma/(1-F) and
/// (1-F) Q2 >> Q1min >> 1, each ">>" meaning ">= margin x".
ValidityFlags validity_windows(const SystemParams& p, double gamma1_max, double target_fidelity,
                               double margin = kDefaultWindowMargin);

/// r(t) = 2 gamma1^2 + 2 gamma gamma1 - dgamma1/dt at interior nodes
/// j = 1..n-1 of `grid` (index 0 and n are NaN), derivative by central
/// differences of node values.
std::vector<double> euler_lagrange_residual(const CouplingProfile& c, const SystemParams& p,
                                            const TimeGrid& grid);

}  // namespace cascade::oracles
