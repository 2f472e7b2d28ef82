#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cascade/core.hpp"
#include "cascade/profile.hpp"

// Variational optimization of the switching profile on a grid.
//
// The profile is piecewise constant, gamma1_j on [t_j, t_{j+1}). For such a
// profile the transfer coefficient
//
//   F = 2 sqrt(gamma) Int_0^T exp(-gamma (T - t)) sqrt(gamma1(t)) exp(-G(t)) dt
//
// integrates exactly cell by cell:
//
//   F = sum_j 2 sqrt(gamma gamma1_j) exp(-G_j) exp(-gamma (T - t_j)) dt phi((gamma1_j - gamma) dt)
//
// with G_j = dt sum_{i<j} gamma1_i and phi(x) = (1 - exp(-x)) / x. This is
// the discretized functional; it equals the ODE transfer coefficient of the
// same sampled profile.
namespace cascade::opt {

enum class Parametrization {
  DirectGamma1,  // gamma1_j, steps scaled by the inverse diagonal curvature
  GDot,          // r_j = sqrt(dG/dt) on each cell; dG/dt >= 0 by construction
};

struct OptimizerConfig {
  std::size_t max_iters = 20000;
  double step_size = 1.0;
  double tolerance = 1e-10;  // stop when an accepted step improves F by less
  Parametrization parametrization = Parametrization::DirectGamma1;
  double initial_value = 1.0;                // constant starting profile, units of gamma
  std::optional<double> gamma1_max;          // cap; none means unbounded
  std::size_t snapshot_every = 50;           // trace profile snapshots
  std::size_t snapshot_points = 100;

  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

// Lower bound applied to gamma1 (relative to gamma) so the sqrt gradient stays
// finite. Values at the floor are reported as 0.
inline constexpr double kFloorRelative = 1e-12;

struct TraceEntry {
  std::size_t iteration = 0;
  double functional = 0.0;
  double gradient_norm = 0.0;  // max |projected gradient|
  double step = 0.0;
};

struct Snapshot {
  std::size_t iteration = 0;
  std::vector<double> t;
  std::vector<double> gamma1;
};

enum class Status { Converged, MaxIterations, LineSearchStalled };

struct OptimizerTrace {
  std::vector<TraceEntry> entries;
  std::vector<Snapshot> snapshots;
  Status status = Status::MaxIterations;
  std::size_t iterations = 0;

  bool converged() const noexcept { return status != Status::MaxIterations; }
};

struct OptimizeResult {
  std::vector<double> cells;  // floored values replaced by 0
  double functional = 0.0;
  OptimizerTrace trace;

  CouplingProfile profile(const TimeGrid& grid) const { return profile_from_cells(grid, cells); }
};

/// Discretized functional for cell values on `grid`. Throws DomainError on
/// negative values or a grid that does not span [0, T].
double functional_value(std::span<const double> cells, const SystemParams& p, const TimeGrid& grid);

/// Functional of any profile sampled at the cell left endpoints.
double functional_value(const CouplingProfile& c, const SystemParams& p, const TimeGrid& grid);

/// dF/dgamma1_j by reverse accumulation. Values below the floor are raised
/// to it first.
std::vector<double> functional_gradient(std::span<const double> cells, const SystemParams& p,
                                        const TimeGrid& grid);

/// Projected-gradient ascent with backtracking (Armijo) line search on the
/// box [floor, gamma1_max].
OptimizeResult optimize_profile(const SystemParams& p, const TimeGrid& grid, const OptimizerConfig& cfg);

struct StationarityReport {
  double max_residual = 0.0;           // max |r| over the window
  double max_relative_residual = 0.0;  // max |r| / (2 g1^2 + 2 g g1)
  double window_end = 0.0;
  std::size_t points = 0;
  bool pass = false;
};

inline constexpr double kDefaultStationarityThreshold = 0.05;

/// Euler-Lagrange residual over interior nodes with t <= window_end (the
/// non-truncated interior). Passes when the relative residual stays below
/// `threshold`.
StationarityReport verify_stationarity(const CouplingProfile& c, const SystemParams& p, const TimeGrid& grid,
                                       double window_end, double threshold = kDefaultStationarityThreshold);

std::string to_string(Status s);

}  // namespace cascade::opt
