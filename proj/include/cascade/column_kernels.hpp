#pragma once

#include <cstddef>
#include <span>

// Every coefficient of the cascaded pair is a two-component column
// x = (weight in a1, weight in a2) obeying the same linear ODE
//
//   x' = M(t) x,   M = [[-d1, 0], [c, -d2]],
//
// only the initial value (or the source at its birth time) differs between
// columns. Two engines advance a batch of columns over one step:
//
//  * step_reference runs the literal stage scheme on each column, serially.
//  * StepMap composes the scheme into a lower-triangular 2x2 map once per
//    step and apply_parallel applies it to every column in an OpenMP loop.
//
// Both produce the same numbers up to rounding; the reference is kept for
// tests and the benchmark.
namespace cascade::kernels {

enum class Method { RK4, Heun };

struct Drift {
  double d1 = 0.0;  // decay of the a1 weight
  double c = 0.0;   // a1 -> a2 feed
  double d2 = 0.0;  // decay of the a2 weight
};

/// Lower-triangular map [[p11, 0], [p21, p22]].
struct StepMap {
  double p11 = 1.0;
  double p21 = 0.0;
  double p22 = 1.0;

  static StepMap identity() noexcept { return {}; }
};

/// One substep of `method` from t to t + h; `mid` is used by RK4 only.
StepMap substep_map(Method method, const Drift& start, const Drift& mid, const Drift& end, double h);

/// later * earlier.
StepMap compose(const StepMap& later, const StepMap& earlier) noexcept;

/// x <- P x for all columns. An empty `x1` means the a1 weights are zero.
void apply_parallel(const StepMap& map, std::span<double> x1, std::span<double> x2);

/// Literal stage-by-stage update of each column (serial).
void step_reference(Method method, const Drift& start, const Drift& mid, const Drift& end, double h,
                    std::span<double> x1, std::span<double> x2);

// Column counts below this run the parallel engine without spawning threads.
inline constexpr std::size_t kParallelThreshold = 4096;

}  // namespace cascade::kernels
