#include "cascade/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cascade/oracles.hpp"

namespace cascade::opt {

namespace {

// phi(x) = (1 - e^{-x}) / x and its derivative, with series near 0.
double phi(double x) {
  if (std::abs(x) < 0.05) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 9; ++k) {
      term *= -x / static_cast<double>(k + 1);
      sum += term;
    }
    return sum;
  }
  return -std::expm1(-x) / x;
}

double dphi(double x) {
  if (std::abs(x) < 0.05) {
    // sum_{k>=1} (-1)^k k x^{k-1} / (k+1)!
    double fact = 1.0, xp = 1.0, sum = 0.0;
    for (int k = 1; k <= 9; ++k) {
      fact *= static_cast<double>(k + 1);
      sum += ((k % 2) ? -1.0 : 1.0) * static_cast<double>(k) * xp / fact;
      xp *= x;
    }
    return sum;
  }
  return (std::exp(-x) * (1.0 + x) - 1.0) / (x * x);
}

void check_grid(const SystemParams& p, const TimeGrid& grid) {
  if (!(p.gamma > 0.0)) throw DomainError("gamma > 0 required");
  if (std::abs(grid.t_end() - p.transfer_time) > 1e-12 * p.transfer_time)
    throw DomainError("optimizer grid must span [0, transfer_time]");
}

// Per-cell pieces shared by the value and the gradient.
struct CellTerms {
  std::vector<double> contrib;  // c_j
  std::vector<double> amp;      // 2 sqrt(gamma) exp(-G_j) E_j dt
};

CellTerms cell_terms(std::span<const double> v, const SystemParams& p, const TimeGrid& grid) {
  const double g = p.gamma, dt = grid.dt(), T = grid.t_end();
  const std::size_t n = v.size();
  CellTerms out{std::vector<double>(n), std::vector<double>(n)};
  double G = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double amp = 2.0 * std::sqrt(g) * std::exp(-G - g * (T - grid.t(j))) * dt;
    out.amp[j] = amp;
    out.contrib[j] = amp * std::sqrt(v[j]) * phi((v[j] - g) * dt);
    G += v[j] * dt;
  }
  return out;
}

double floor_value(const SystemParams& p) { return kFloorRelative * p.gamma; }

// Inverse of the local curvature |d^2 c_j / dv_j^2| ~ amp_j / (4 v^{3/2}),
// up to a constant the line search absorbs: v^{3/2} dt / amp_j. The
// exponent is capped so cells deep in the held segment stay finite.
std::vector<double> step_metric(std::span<const double> v, const SystemParams& p, const TimeGrid& grid) {
  const double g = p.gamma, T = grid.t_end(), dt = grid.dt();
  std::vector<double> m(v.size());
  double G = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double expo = std::min(G + g * (T - grid.t(j)), 600.0);
    m[j] = v[j] * std::sqrt(v[j]) * std::exp(expo) / (2.0 * std::sqrt(g));
    G += v[j] * dt;
  }
  return m;
}

}  // namespace

double functional_value(std::span<const double> cells, const SystemParams& p, const TimeGrid& grid) {
  check_grid(p, grid);
  if (cells.size() != grid.n_steps()) throw DomainError("need one gamma1 value per grid cell");
  for (double v : cells)
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("gamma1 grid values must be finite and >= 0");
  const auto terms = cell_terms(cells, p, grid);
  double F = 0.0;
  for (double c : terms.contrib) F += c;
  return F;
}

double functional_value(const CouplingProfile& c, const SystemParams& p, const TimeGrid& grid) {
  const auto cells = sample_cells(c, p, grid);
  return functional_value(cells, p, grid);
}

std::vector<double> functional_gradient(std::span<const double> cells, const SystemParams& p,
                                        const TimeGrid& grid) {
  check_grid(p, grid);
  if (cells.size() != grid.n_steps()) throw DomainError("need one gamma1 value per grid cell");
  const double lo = floor_value(p);
  std::vector<double> v(cells.begin(), cells.end());
  for (auto& x : v) x = std::max(x, lo);

  const double g = p.gamma, dt = grid.dt();
  const auto terms = cell_terms(v, p, grid);
  const std::size_t n = v.size();
  std::vector<double> grad(n);
  double tail = 0.0;  // sum_{k>j} c_k
  for (std::size_t jj = n; jj-- > 0;) {
    const double x = (v[jj] - g) * dt;
    const double local = terms.amp[jj] * (0.5 / std::sqrt(v[jj]) * phi(x) + std::sqrt(v[jj]) * dt * dphi(x));
    grad[jj] = local - dt * tail;
    tail += terms.contrib[jj];
  }
  return grad;
}

OptimizeResult optimize_profile(const SystemParams& p, const TimeGrid& grid, const OptimizerConfig& cfg) {
  check_grid(p, grid);
  if (!(cfg.tolerance > 0.0)) throw DomainError("optimizer tolerance must be > 0");
  if (!(cfg.step_size > 0.0)) throw DomainError("optimizer step_size must be > 0");
  if (!(cfg.initial_value > 0.0)) throw DomainError("optimizer initial value must be > 0");

  const std::size_t n = grid.n_steps();
  const double lo = floor_value(p);
  const double hi = cfg.gamma1_max ? *cfg.gamma1_max : std::numeric_limits<double>::infinity();
  if (!(hi > lo)) throw DomainError("gamma1_max must exceed the floor");
  const bool gdot = cfg.parametrization == Parametrization::GDot;

  std::vector<double> v(n, std::clamp(cfg.initial_value * p.gamma, lo, hi));
  double F = functional_value(v, p, grid);

  OptimizeResult res;
  auto snapshot = [&](std::size_t it) {
    Snapshot s;
    s.iteration = it;
    const std::size_t stride = std::max<std::size_t>(1, n / std::max<std::size_t>(1, cfg.snapshot_points));
    for (std::size_t j = 0; j < n; j += stride) {
      s.t.push_back(grid.t(j));
      s.gamma1.push_back(v[j]);
    }
    res.trace.snapshots.push_back(std::move(s));
  };
  snapshot(0);

  double alpha = cfg.step_size;
  std::vector<double> trial(n);
  Status status = Status::MaxIterations;
  std::size_t it = 0;
  for (; it < cfg.max_iters; ++it) {
    const auto grad = functional_gradient(v, p, grid);
    const auto metric = step_metric(v, p, grid);

    double pg = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const bool blocked = (v[j] <= lo && grad[j] < 0.0) || (v[j] >= hi && grad[j] > 0.0);
      if (!blocked) pg = std::max(pg, std::abs(grad[j]));
    }

    bool accepted = false;
    double F_new = F;
    while (alpha > 1e-30 * cfg.step_size) {
      double predicted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (gdot) {
          // Same metric expressed in r = sqrt(v): dr = m g / (2 r).
          const double r = std::sqrt(v[j]);
          const double rn = std::clamp(r + alpha * metric[j] * grad[j] / (2.0 * r), std::sqrt(lo), std::sqrt(hi));
          trial[j] = std::clamp(rn * rn, lo, hi);
        } else {
          trial[j] = std::clamp(v[j] + alpha * metric[j] * grad[j], lo, hi);
        }
        predicted += grad[j] * (trial[j] - v[j]);
      }
      F_new = functional_value(trial, p, grid);
      if (F_new >= F + 1e-4 * predicted && F_new >= F) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      status = Status::LineSearchStalled;
      break;
    }
    const double improvement = F_new - F;
    v.swap(trial);
    F = F_new;
    res.trace.entries.push_back({it + 1, F, pg, alpha});
    alpha = std::min(alpha * 2.0, 1e12 * cfg.step_size);
    if (cfg.snapshot_every > 0 && (it + 1) % cfg.snapshot_every == 0) snapshot(it + 1);
    if (improvement < cfg.tolerance) {
      status = Status::Converged;
      ++it;
      break;
    }
  }
  if (res.trace.snapshots.back().iteration != it) snapshot(it);

  res.trace.status = status;
  res.trace.iterations = it;
  res.functional = F;
  res.cells = v;
  for (auto& x : res.cells)
    if (x <= lo * (1.0 + 1e-9)) x = 0.0;
  return res;
}

StationarityReport verify_stationarity(const CouplingProfile& c, const SystemParams& p, const TimeGrid& grid,
                                       double window_end, double threshold) {
  const auto r = oracles::euler_lagrange_residual(c, p, grid);
  StationarityReport rep;
  rep.window_end = window_end;
  for (std::size_t j = 1; j < grid.n_steps(); ++j) {
    if (grid.t(j) > window_end) break;
    if (!std::isfinite(r[j])) continue;
    const double v = c.value(p, grid.t(j));
    const double scale = 2.0 * v * v + 2.0 * p.gamma * v;
    rep.max_residual = std::max(rep.max_residual, std::abs(r[j]));
    rep.max_relative_residual = std::max(
        rep.max_relative_residual, scale > 0.0 ? std::abs(r[j]) / scale : std::numeric_limits<double>::infinity());
    ++rep.points;
  }
  rep.pass = rep.points > 0 && rep.max_relative_residual <= threshold;
  return rep;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Converged:
      return "converged";
    case Status::MaxIterations:
      return "max_iterations";
    case Status::LineSearchStalled:
      return "line_search_stalled";
  }
  return "unknown";
}

}  // namespace cascade::opt
