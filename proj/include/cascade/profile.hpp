#pragma once

#include <optional>
#include <vector>

#include "cascade/core.hpp"

namespace cascade {

/// Time-dependent coupling gamma1(t) of oscillator 1.
///
/// Three shapes are supported: a constant rate, the Euler-Lagrange optimal
/// switching function gamma/(exp(2 gamma (T - t)) - 1), and samples on a
/// TimeGrid interpreted as piecewise constant with the left endpoint value
/// on each cell. Any shape may carry a truncation interval dt_cut: for
/// t >= T - dt_cut the rate is held at `hold_value()` (default 1/(2 dt_cut)).
///
/// Evaluation is right-continuous; `value_left` gives the left limit, which
/// the integrator needs at segment ends.
class CouplingProfile {
 public:
  enum class Kind { Constant, OptimalClosedForm, SampledGrid };

  static CouplingProfile constant(double rate);
  /// Optimal profile cut at T - dt_cut; dt_cut must be > 0.
  static CouplingProfile optimal(double dt_cut, std::optional<double> gamma1_max = {});
  /// `node_values` has grid.n_points() entries; cell j uses node_values[j].
  static CouplingProfile sampled(TimeGrid grid, std::vector<double> node_values);

  /// Adds (or replaces) a hold segment on [T - dt_cut, T].
  CouplingProfile with_truncation(double dt_cut, std::optional<double> gamma1_max = {}) const;

  Kind kind() const noexcept { return kind_; }
  double constant_rate() const noexcept { return constant_; }
  const std::optional<TimeGrid>& grid() const noexcept { return grid_; }
  const std::vector<double>& samples() const noexcept { return samples_; }
  std::optional<double> truncation() const noexcept { return dt_cut_; }
  std::optional<double> gamma1_max_override() const noexcept { return gamma1_max_; }

  /// Rate used on the held segment; requires a truncation.
  double hold_value() const;

  /// T - dt_cut if truncated, T otherwise.
  double cut_time(const SystemParams& p) const;

  double value(const SystemParams& p, double t) const;
  double value_left(const SystemParams& p, double t) const;

  /// Times in (0, T) where the profile may jump. Integration segments are
  /// split there.
  std::vector<double> breakpoints(const SystemParams& p) const;

 private:
  CouplingProfile() = default;
  double base_value(const SystemParams& p, double t, bool left) const;

  Kind kind_ = Kind::Constant;
  double constant_ = 0.0;
  std::optional<TimeGrid> grid_;
  std::vector<double> samples_;
  std::optional<double> dt_cut_;
  std::optional<double> gamma1_max_;
};

/// gamma1(t) for the profile; throws SingularityError for the untruncated
/// optimal form at t >= T and DomainError for t outside [0, T].
double profile_value(const CouplingProfile& c, const SystemParams& p, double t);

/// Left-endpoint cell values gamma1(t_j), j = 0..n_steps-1, of any profile on
/// `grid`; the piecewise-constant representation used by the optimizer.
std::vector<double> sample_cells(const CouplingProfile& c, const SystemParams& p,
                                 const TimeGrid& grid);

/// Wraps cell values as a SampledGrid profile (last node repeats the last cell).
CouplingProfile profile_from_cells(const TimeGrid& grid, const std::vector<double>& cells);

}  // namespace cascade
