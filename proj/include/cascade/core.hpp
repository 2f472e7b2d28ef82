#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cascade {

// Error hierarchy. Everything thrown by the library derives from Error so
// front ends can map categories onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the domain of an operation (negative rates, eta > 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Evaluation of the untruncated optimal profile at or past t = T.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Requested a feature the inputs were not prepared for (e.g. commutator
// check on a run without kernel tracking).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced during time stepping.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, std::size_t step)
      : Error(what + " (grid step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Physical parameters of the cascaded pair. Rates are in 1/time, any
/// consistent unit system; the CLI uses gamma = 1.
struct SystemParams {
  double gamma = 1.0;          // coupling of oscillator 2 to the line
  double gamma_loss = 0.0;     // intrinsic loss rate of each oscillator
  double eta = 1.0;            // power transmission of the line
  double omega0 = 1.0e6;       // carrier frequency, validity checks only
  double transfer_time = 5.0;  // T

  bool lossy() const noexcept { return gamma_loss > 0.0 || eta < 1.0; }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

struct ParamReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return violations.empty(); }
};

// Ratio used to decide "gamma << omega0" for the weak-damping warning.
inline constexpr double kWeakDampingMargin = 10.0;

ParamReport validate_params(const SystemParams& p);

/// Throws DomainError listing the violations if any hard invariant fails.
void require_valid(const SystemParams& p);

/// Uniform grid t_j = j * dt on [0, T] with n_steps intervals.
class TimeGrid {
 public:
  TimeGrid(double t_end, std::size_t n_steps);

  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t n_points() const noexcept { return n_steps_ + 1; }
  double t_end() const noexcept { return t_end_; }
  double dt() const noexcept { return dt_; }
  double t(std::size_t j) const noexcept { return static_cast<double>(j) * dt_; }

  /// Index of the cell [t_j, t_{j+1}) containing t, consistent with the
  /// node definition t_j = j * dt. Clamped to [0, n_steps - 1].
  std::size_t cell_of(double t) const noexcept;

  /// Node index j with t_j == t up to `rel_tol * dt`, or npos.
  std::size_t node_near(double t, double rel_tol = 1e-9) const noexcept;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double t_end_;
  std::size_t n_steps_;
  double dt_;
};

}  // namespace cascade
