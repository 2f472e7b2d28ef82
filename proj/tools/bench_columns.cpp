// Times the serial reference engine against the OpenMP engine, both on raw
// column batches and on a full kernel-tracking transfer.
//
//   bench_columns [n_columns] [n_steps] [repeats]
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "cascade/column_kernels.hpp"
#include "cascade/simulator.hpp"

namespace {

using Clock = std::chrono::steady_clock;
namespace k = cascade::kernels;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t columns = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 200000;
  const std::size_t steps = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 200;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;
  std::printf("threads %d, columns %zu, steps %zu, repeats %d\n", omp_get_max_threads(), columns, steps, repeats);

  const double h = 1e-3;
  auto drift = [](double t) { return k::Drift{1.0 + t, 2.0 * std::sqrt(1.0 + t), 1.0}; };

  double best_ref = 1e300, best_par = 1e300, max_diff = 0.0;
  for (int r = 0; r < repeats; ++r) {
    std::vector<double> a1(columns), a2(columns), b1, b2;
    for (std::size_t i = 0; i < columns; ++i) {
      a1[i] = 1.0 / static_cast<double>(i + 1);
      a2[i] = 0.5;
    }
    b1 = a1;
    b2 = a2;

    auto t0 = Clock::now();
    for (std::size_t s = 0; s < steps; ++s) {
      const double t = static_cast<double>(s) * h;
      k::step_reference(k::Method::RK4, drift(t), drift(t + h / 2), drift(t + h), h, a1, a2);
    }
    best_ref = std::min(best_ref, seconds_since(t0));

    t0 = Clock::now();
    for (std::size_t s = 0; s < steps; ++s) {
      const double t = static_cast<double>(s) * h;
      k::apply_parallel(k::substep_map(k::Method::RK4, drift(t), drift(t + h / 2), drift(t + h), h), b1, b2);
    }
    best_par = std::min(best_par, seconds_since(t0));

    for (std::size_t i = 0; i < columns; ++i)
      max_diff = std::max({max_diff, std::abs(a1[i] - b1[i]), std::abs(a2[i] - b2[i])});
  }
  std::printf("columns   serial %.4f s   parallel %.4f s   speedup %.2fx   max|diff| %.2e\n", best_ref, best_par,
              best_ref / best_par, max_diff);

  // End-to-end: kernel-tracking transfer of the truncated optimal profile.
  cascade::SystemParams p;
  const auto profile = cascade::CouplingProfile::optimal(0.05);
  cascade::sim::IntegratorConfig cfg;
  cfg.n_steps = 2000;
  cfg.kernel_tracking = true;
  cfg.kernel_stride = 50;
  double ref_t = 1e300, par_t = 1e300, f_ref = 0.0, f_par = 0.0;
  for (int r = 0; r < repeats; ++r) {
    cfg.engine = cascade::sim::Engine::SerialReference;
    auto t0 = Clock::now();
    f_ref = cascade::sim::integrate_transfer(profile, p, cfg).fidelity();
    ref_t = std::min(ref_t, seconds_since(t0));
    cfg.engine = cascade::sim::Engine::Parallel;
    t0 = Clock::now();
    f_par = cascade::sim::integrate_transfer(profile, p, cfg).fidelity();
    par_t = std::min(par_t, seconds_since(t0));
  }
  std::printf("transfer  serial %.4f s   parallel %.4f s   speedup %.2fx   |dF| %.2e\n", ref_t, par_t, ref_t / par_t,
              std::abs(f_ref - f_par));
  return 0;
}
