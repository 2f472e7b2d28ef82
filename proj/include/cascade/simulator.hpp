#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cascade/column_kernels.hpp"
#include "cascade/core.hpp"
#include "cascade/profile.hpp"

// Coefficient-level integration of the cascaded input-output equations.
//
// With b1_out = sqrt(2 gamma1) a1 - b1_in feeding oscillator 2 through a
// line of power transmission eta, and intrinsic loss gamma' on both
// oscillators,
//
//   a1' = -(gamma1 + gamma') a1 + sqrt(2 gamma1) b1_in + sqrt(2 gamma') b1'_in
//   a2' = -(gamma + gamma') a2 + 2 sqrt(eta gamma gamma1) a1
//         - sqrt(2 gamma eta) b1_in + sqrt(2 gamma (1 - eta)) v + sqrt(2 gamma') b2'_in
//
// where v is the vacuum entering through the discarded (1 - eta) branch.
// The operators never appear explicitly: a_i(t) is a linear combination of
// a1(0), a2(0) and the input fields, and only the weights are evolved.
namespace cascade::sim {

using kernels::Method;

enum class Engine { Parallel, SerialReference };

struct IntegratorConfig {
  Method method = Method::RK4;
  std::size_t n_steps = 10000;
  bool kernel_tracking = false;
  // Store every kernel_stride-th kernel row (the final row is always kept).
  std::size_t kernel_stride = 1;
  Engine engine = Engine::Parallel;
  // Substeps are halved until (max rate) * h <= substep_threshold.
  double substep_threshold = 0.05;

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

inline constexpr std::size_t kMinSteps = 10;
// Substeps per grid step above which a segment is reported as too stiff.
inline constexpr std::size_t kMaxSubsteps = std::size_t{1} << 20;

struct Coefficients {
  double a11 = 0.0;
  double a21 = 0.0;
  double a22 = 0.0;
};

/// Noise kernels on the grid. Row r holds k(t_i, t_j) for i = row_index[r]
/// and j = 0..i, packed contiguously.
///
/// Channels: b1_in (k1 in a1, k2 in a2), b1' (loss1_a1, loss1_a2),
/// b2' (loss2_a2) and the discarded line branch (discard_a2). The loss
/// arrays are empty for lossless runs.
///
/// When the truncation time falls on a node c, the b1_in source jumps there;
/// `edge_k1/edge_k2` hold the column born with the left-limit source so the
/// sum rule can integrate [0, t_c] and [t_c, t] separately.
struct KernelTable {
  std::vector<std::size_t> row_index;
  std::vector<std::size_t> offset;
  std::vector<double> k1, k2;
  std::vector<double> loss1_a1, loss1_a2, loss2_a2, discard_a2;
  std::optional<std::size_t> cut_node;
  std::vector<double> edge_k1, edge_k2;  // per stored row, 0 before cut_node
  kernels::Drift hold;                   // constant drift after cut_node

  std::size_t rows() const noexcept { return row_index.size(); }
  bool lossy() const noexcept { return !loss2_a2.empty(); }

  std::span<const double> row(const std::vector<double>& channel, std::size_t r) const {
    return {channel.data() + offset[r], row_index[r] + 1};
  }
};

struct TransferState {
  TimeGrid grid;
  std::vector<double> a11, a21, a22;  // one per node
  double readout_time = 0.0;          // T - dt_cut for truncated profiles, else T
  Coefficients readout;               // coefficients at readout_time
  std::optional<KernelTable> kernels;

  /// Transfer coefficient at the readout time.
  double fidelity() const noexcept { return readout.a21; }
  /// A21(T), including the held segment of a truncated profile.
  double fidelity_held() const noexcept { return a21.back(); }
};

TransferState integrate_transfer(const CouplingProfile& c, const SystemParams& p,
                                 const IntegratorConfig& cfg);

/// Same integration with gamma' and eta taken from `p`. With gamma' = 0 and
/// eta = 1 the result is identical to integrate_transfer.
TransferState integrate_transfer_lossy(const CouplingProfile& c, const SystemParams& p,
                                       const IntegratorConfig& cfg);

struct CommutatorDeficit {
  std::vector<double> t;
  std::vector<double> a1;  // 1 - [A11^2 + |k1|^2 + |loss1_a1|^2]
  std::vector<double> a2;  // 1 - [A21^2 + A22^2 + |k2|^2 + losses + discard]

  double max_abs() const;
};

/// Sum-rule deficit at each stored kernel row. Throws UnsupportedError if
/// the run did not track kernels.
CommutatorDeficit commutator_check(const TransferState& s);

struct CurvePoint {
  double t = 0.0;
  double fidelity = 0.0;
};

std::vector<CurvePoint> fidelity_curve(const TransferState& s);

/// Grid maximum of A21 refined by a parabola through the neighbours.
CurvePoint fidelity_peak(const TransferState& s);

}  // namespace cascade::sim
