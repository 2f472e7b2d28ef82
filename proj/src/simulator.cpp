#include "cascade/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cascade/quadrature.hpp"

namespace cascade::sim {

namespace {

using kernels::Drift;
using kernels::StepMap;

struct Batch {
  std::vector<double> x1;  // empty when the a1 weight is identically zero
  std::vector<double> x2;
};

// Live columns of one run. `coef` holds the two deterministic columns
// (a1(0) -> (A11, A21) and a2(0) -> (0, A22)); the rest are kernel columns,
// one per birth node.
struct Columns {
  Batch coef;
  Batch in, loss1, loss2, discard, edge;
  bool track = false;
  bool lossy = false;

  template <typename F>
  void for_each(F&& f) {
    f(coef);
    if (!track) return;
    f(in);
    f(edge);
    if (lossy) {
      f(loss1);
      f(loss2);
      f(discard);
    }
  }
};

struct Sources {
  double in1, in2, loss, discard;
};

class Integrator {
 public:
  Integrator(const CouplingProfile& c, const SystemParams& p, const IntegratorConfig& cfg)
      : profile_(c), p_(p), cfg_(cfg), grid_(p.transfer_time, cfg.n_steps) {}

  TransferState run();

 private:
  Drift drift(double rate) const {
    return {rate + p_.gamma_loss, 2.0 * std::sqrt(p_.eta * p_.gamma * rate), p_.gamma + p_.gamma_loss};
  }
  Sources sources(double rate) const {
    return {std::sqrt(2.0 * rate), -std::sqrt(2.0 * p_.gamma * p_.eta), std::sqrt(2.0 * p_.gamma_loss),
            std::sqrt(2.0 * p_.gamma * (1.0 - p_.eta))};
  }

  void birth(std::size_t node);
  void advance_segment(double s0, double s1, StepMap& accumulated);
  void store_row(std::size_t node);
  void check_finite(std::size_t step) const;

  const CouplingProfile& profile_;
  SystemParams p_;
  IntegratorConfig cfg_;
  TimeGrid grid_;
  Columns cols_;
  std::optional<std::size_t> cut_node_;
  KernelTable table_;
};

void Integrator::birth(std::size_t node) {
  const Sources s = sources(profile_.value(p_, grid_.t(node)));
  cols_.in.x1.push_back(s.in1);
  cols_.in.x2.push_back(s.in2);
  if (cols_.lossy) {
    cols_.loss1.x1.push_back(s.loss);
    cols_.loss1.x2.push_back(0.0);
    cols_.loss2.x2.push_back(s.loss);
    cols_.discard.x2.push_back(s.discard);
  }
  if (cut_node_ && *cut_node_ == node) {
    const Sources left = sources(profile_.value_left(p_, grid_.t(node)));
    cols_.edge.x1.assign(1, left.in1);
    cols_.edge.x2.assign(1, left.in2);
  }
}

void Integrator::advance_segment(double s0, double s1, StepMap& accumulated) {
  const double len = s1 - s0;
  const double r_start = profile_.value(p_, s0);
  const double r_end = profile_.value_left(p_, s1);
  const double r_mid = profile_.value(p_, 0.5 * (s0 + s1));
  const double rate_max = std::max({r_start, r_mid, r_end}) + p_.gamma + p_.gamma_loss;

  std::size_t m = 1;
  while (rate_max * len / static_cast<double>(m) > cfg_.substep_threshold) {
    if (m >= kMaxSubsteps || !std::isfinite(rate_max))
      throw IntegrationError("rate " + std::to_string(rate_max) + " too stiff for the step", grid_.cell_of(s0));
    m *= 2;
  }
  const double h = len / static_cast<double>(m);

  for (std::size_t k = 0; k < m; ++k) {
    const double t0 = s0 + static_cast<double>(k) * h;
    const double t1 = (k + 1 == m) ? s1 : s0 + static_cast<double>(k + 1) * h;
    const Drift d0 = drift(k == 0 ? r_start : profile_.value(p_, t0));
    const Drift dm = drift(profile_.value(p_, 0.5 * (t0 + t1)));
    const Drift d1 = drift(k + 1 == m ? r_end : profile_.value(p_, t1));
    const double hk = t1 - t0;
    if (cfg_.engine == Engine::Parallel) {
      accumulated = kernels::compose(kernels::substep_map(cfg_.method, d0, dm, d1, hk), accumulated);
    } else {
      cols_.for_each([&](Batch& b) {
        if (!b.x2.empty()) kernels::step_reference(cfg_.method, d0, dm, d1, hk, b.x1, b.x2);
      });
    }
  }
}

void Integrator::store_row(std::size_t node) {
  auto& t = table_;
  t.row_index.push_back(node);
  t.offset.push_back(t.k1.size());
  t.k1.insert(t.k1.end(), cols_.in.x1.begin(), cols_.in.x1.end());
  t.k2.insert(t.k2.end(), cols_.in.x2.begin(), cols_.in.x2.end());
  if (cols_.lossy) {
    t.loss1_a1.insert(t.loss1_a1.end(), cols_.loss1.x1.begin(), cols_.loss1.x1.end());
    t.loss1_a2.insert(t.loss1_a2.end(), cols_.loss1.x2.begin(), cols_.loss1.x2.end());
    t.loss2_a2.insert(t.loss2_a2.end(), cols_.loss2.x2.begin(), cols_.loss2.x2.end());
    t.discard_a2.insert(t.discard_a2.end(), cols_.discard.x2.begin(), cols_.discard.x2.end());
  }
  const bool has_edge = !cols_.edge.x2.empty();
  t.edge_k1.push_back(has_edge ? cols_.edge.x1[0] : 0.0);
  t.edge_k2.push_back(has_edge ? cols_.edge.x2[0] : 0.0);
}

void Integrator::check_finite(std::size_t step) const {
  for (double v : cols_.coef.x1)
    if (!std::isfinite(v)) throw IntegrationError("non-finite coefficient", step);
  for (double v : cols_.coef.x2)
    if (!std::isfinite(v)) throw IntegrationError("non-finite coefficient", step);
}

TransferState Integrator::run() {
  const double T = p_.transfer_time;
  if (profile_.kind() == CouplingProfile::Kind::SampledGrid &&
      std::abs(profile_.grid()->t_end() - T) > 1e-12 * T)
    throw DomainError("sampled profile grid does not end at transfer_time");
  if (cfg_.n_steps < kMinSteps) throw DomainError("integrator needs n_steps >= 10");
  if (cfg_.kernel_stride == 0) throw DomainError("kernel_stride must be >= 1");
  if (!(cfg_.substep_threshold > 0.0)) throw DomainError("substep_threshold must be > 0");

  const double cut = profile_.cut_time(p_);
  if (profile_.truncation() && !(cut > 0.0)) throw DomainError("truncation dt_cut must be < T");
  const bool truncated = profile_.truncation().has_value();
  if (truncated) {
    const std::size_t node = grid_.node_near(cut);
    if (node != TimeGrid::npos && node > 0 && node < grid_.n_steps()) cut_node_ = node;
  }

  cols_.track = cfg_.kernel_tracking;
  cols_.lossy = p_.lossy();
  cols_.coef.x1 = {1.0, 0.0};
  cols_.coef.x2 = {0.0, 1.0};
  const std::size_t n = grid_.n_steps();
  if (cols_.track) {
    cols_.in.x1.reserve(n + 1);
    cols_.in.x2.reserve(n + 1);
    table_.cut_node = cut_node_;
    if (cut_node_) table_.hold = drift(profile_.value(p_, grid_.t(*cut_node_)));
  }

  TransferState s{grid_, {}, {}, {}, T, {}, std::nullopt};
  s.a11.reserve(n + 1);
  s.a21.reserve(n + 1);
  s.a22.reserve(n + 1);
  auto record = [&] {
    s.a11.push_back(cols_.coef.x1[0]);
    s.a21.push_back(cols_.coef.x2[0]);
    s.a22.push_back(cols_.coef.x2[1]);
  };
  record();
  if (cols_.track) {
    birth(0);
    store_row(0);
  }

  // Interior breakpoints that are not grid nodes split their cell.
  std::vector<double> splits;
  for (double b : profile_.breakpoints(p_))
    if (grid_.node_near(b) == TimeGrid::npos) splits.push_back(b);
  auto next_split = splits.begin();

  bool have_readout = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = grid_.t(i);
    const double b = (i + 1 == n) ? T : grid_.t(i + 1);
    StepMap acc = StepMap::identity();
    double s0 = a;
    while (next_split != splits.end() && *next_split < b) {
      if (*next_split > a) {
        advance_segment(s0, *next_split, acc);
        s0 = *next_split;
        if (truncated && s0 == cut) {
          Batch probe = cols_.coef;
          if (cfg_.engine == Engine::Parallel) kernels::apply_parallel(acc, probe.x1, probe.x2);
          s.readout = {probe.x1[0], probe.x2[0], probe.x2[1]};
          have_readout = true;
        }
      }
      ++next_split;
    }
    advance_segment(s0, b, acc);
    if (cfg_.engine == Engine::Parallel) {
      cols_.for_each([&](Batch& batch) {
        if (!batch.x2.empty()) kernels::apply_parallel(acc, batch.x1, batch.x2);
      });
    }
    check_finite(i);
    record();
    if (cols_.track) {
      birth(i + 1);
      if ((i + 1) % cfg_.kernel_stride == 0 || i + 1 == n) store_row(i + 1);
    }
    if (cut_node_ && *cut_node_ == i + 1) {
      s.readout = {s.a11.back(), s.a21.back(), s.a22.back()};
      have_readout = true;
    }
  }

  if (truncated) {
    s.readout_time = cut;
    if (!have_readout) s.readout = {s.a11.back(), s.a21.back(), s.a22.back()};
    if (cut_node_) s.readout_time = grid_.t(*cut_node_);
  } else {
    s.readout = {s.a11.back(), s.a21.back(), s.a22.back()};
  }
  if (cols_.track) s.kernels = std::move(table_);
  return s;
}

void require_integrable(const SystemParams& p) {
  if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) throw DomainError("gamma > 0 required");
  if (!(p.transfer_time > 0.0) || !std::isfinite(p.transfer_time))
    throw DomainError("transfer_time > 0 required");
  if (!(p.eta > 0.0 && p.eta <= 1.0)) throw DomainError("0 < eta <= 1 required");
  if (!(p.gamma_loss >= 0.0) || !std::isfinite(p.gamma_loss)) throw DomainError("gamma_loss >= 0 required");
}

}  // namespace

TransferState integrate_transfer(const CouplingProfile& c, const SystemParams& p, const IntegratorConfig& cfg) {
  SystemParams lossless = p;
  lossless.gamma_loss = 0.0;
  lossless.eta = 1.0;
  return integrate_transfer_lossy(c, lossless, cfg);
}

TransferState integrate_transfer_lossy(const CouplingProfile& c, const SystemParams& p,
                                       const IntegratorConfig& cfg) {
  require_integrable(p);
  return Integrator(c, p, cfg).run();
}

double CommutatorDeficit::max_abs() const {
  double m = 0.0;
  for (double v : a1) m = std::max(m, std::abs(v));
  for (double v : a2) m = std::max(m, std::abs(v));
  return m;
}

CommutatorDeficit commutator_check(const TransferState& s) {
  if (!s.kernels) throw UnsupportedError("commutator check needs a run with kernel tracking");
  const KernelTable& k = *s.kernels;
  const double dt = s.grid.dt();
  const std::size_t rows = k.rows();

  CommutatorDeficit out;
  out.t.resize(rows);
  out.a1.resize(rows);
  out.a2.resize(rows);

  const auto nrows = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t rr = 0; rr < nrows; ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    const std::size_t i = k.row_index[r];
    // Weights for the continuous channels and for b1_in (which may jump at c).
    std::vector<double> w(i + 1, 0.0);
    std::vector<double> w_in(i + 1, 0.0);
    double w_edge = 0.0;
    const bool split = k.cut_node && *k.cut_node > 0 && *k.cut_node <= i;
    if (split) {
      const std::size_t c = *k.cut_node;
      quadrature::add_segment_weights(w, 0, c);
      quadrature::add_segment_weights(w, c, i);
      quadrature::add_segment_weights(w_in, c, i);
      std::vector<double> left(c + 1, 0.0);
      quadrature::add_segment_weights(left, 0, c);
      for (std::size_t j = 0; j < c; ++j) w_in[j] += left[j];
      w_edge = left[c];
    } else {
      quadrature::add_segment_weights(w, 0, i);
      w_in = w;
    }

    auto sq = [](std::span<const double> x, const std::vector<double>& wt) {
      double acc = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) acc += wt[j] * x[j] * x[j];
      return acc;
    };
    double n1 = sq(k.row(k.k1, r), w_in) + w_edge * k.edge_k1[r] * k.edge_k1[r];
    double n2 = sq(k.row(k.k2, r), w_in) + w_edge * k.edge_k2[r] * k.edge_k2[r];
    if (k.lossy()) {
      n1 += sq(k.row(k.loss1_a1, r), w);
      n2 += sq(k.row(k.loss1_a2, r), w) + sq(k.row(k.loss2_a2, r), w) + sq(k.row(k.discard_a2, r), w);
    }
    // A single interval after the cut gets the trapezoid end correction. The
    // drift is constant there, so d/ds k = -M k gives the end slopes exactly.
    if (split && i == *k.cut_node + 1) {
      const kernels::Drift& d = k.hold;
      const std::size_t c = *k.cut_node;
      auto slope1 = [&](double x1) { return 2.0 * d.d1 * x1 * x1; };
      auto slope2 = [&](double x1, double x2) { return 2.0 * (d.d2 * x2 * x2 - d.c * x1 * x2); };
      auto fix = [&](double g_end, double g_start) { return -dt / 12.0 * (g_end - g_start); };
      const auto k1 = k.row(k.k1, r), k2 = k.row(k.k2, r);
      n1 += fix(slope1(k1[i]), slope1(k1[c]));
      n2 += fix(slope2(k1[i], k2[i]), slope2(k1[c], k2[c]));
      if (k.lossy()) {
        const auto l1 = k.row(k.loss1_a1, r), l2 = k.row(k.loss1_a2, r);
        const auto m2 = k.row(k.loss2_a2, r), v2 = k.row(k.discard_a2, r);
        n1 += fix(slope1(l1[i]), slope1(l1[c]));
        n2 += fix(slope2(l1[i], l2[i]), slope2(l1[c], l2[c]));
        n2 += fix(slope2(0.0, m2[i]) + slope2(0.0, v2[i]), slope2(0.0, m2[c]) + slope2(0.0, v2[c]));
      }
    }
    const double A11 = s.a11[i], A21 = s.a21[i], A22 = s.a22[i];
    out.t[r] = s.grid.t(i);
    out.a1[r] = 1.0 - (A11 * A11 + dt * n1);
    out.a2[r] = 1.0 - (A21 * A21 + A22 * A22 + dt * n2);
  }
  return out;
}

std::vector<CurvePoint> fidelity_curve(const TransferState& s) {
  std::vector<CurvePoint> out(s.a21.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = {s.grid.t(j), s.a21[j]};
  return out;
}

CurvePoint fidelity_peak(const TransferState& s) {
  const auto it = std::max_element(s.a21.begin(), s.a21.end());
  const auto j = static_cast<std::size_t>(it - s.a21.begin());
  CurvePoint peak{s.grid.t(j), *it};
  if (j > 0 && j + 1 < s.a21.size()) {
    const double ym = s.a21[j - 1], y0 = s.a21[j], yp = s.a21[j + 1];
    const double denom = ym - 2.0 * y0 + yp;
    if (denom < 0.0) {
      const double off = 0.5 * (ym - yp) / denom;
      peak.t = s.grid.t(j) + off * s.grid.dt();
      peak.fidelity = y0 - 0.25 * (ym - yp) * off;
    }
  }
  return peak;
}

}  // namespace cascade::sim
