#include "cascade/column_kernels.hpp"

#include <cstddef>

namespace cascade::kernels {

namespace {

// Lower-triangular 2x2 algebra for composing stage schemes.
struct L2 {
  double a = 0.0, b = 0.0, c = 0.0;  // [[a, 0], [b, c]]
};

L2 mul(const L2& x, const L2& y) noexcept {
  return {x.a * y.a, x.b * y.a + x.c * y.b, x.c * y.c};
}
L2 add(const L2& x, const L2& y) noexcept { return {x.a + y.a, x.b + y.b, x.c + y.c}; }
L2 scale(double s, const L2& x) noexcept { return {s * x.a, s * x.b, s * x.c}; }
L2 eye() noexcept { return {1.0, 0.0, 1.0}; }
L2 drift(const Drift& d) noexcept { return {-d.d1, d.c, -d.d2}; }

}  // namespace

StepMap substep_map(Method method, const Drift& start, const Drift& mid, const Drift& end, double h) {
  const L2 m0 = drift(start);
  const L2 m1 = drift(end);
  L2 p;
  if (method == Method::RK4) {
    const L2 mh = drift(mid);
    const L2 k1 = m0;
    const L2 k2 = mul(mh, add(eye(), scale(0.5 * h, k1)));
    const L2 k3 = mul(mh, add(eye(), scale(0.5 * h, k2)));
    const L2 k4 = mul(m1, add(eye(), scale(h, k3)));
    p = add(eye(), scale(h / 6.0, add(add(k1, scale(2.0, k2)), add(scale(2.0, k3), k4))));
  } else {
    const L2 k1 = m0;
    const L2 k2 = mul(m1, add(eye(), scale(h, k1)));
    p = add(eye(), scale(0.5 * h, add(k1, k2)));
  }
  return {p.a, p.b, p.c};
}

StepMap compose(const StepMap& later, const StepMap& earlier) noexcept {
  const L2 r = mul({later.p11, later.p21, later.p22}, {earlier.p11, earlier.p21, earlier.p22});
  return {r.a, r.b, r.c};
}

void apply_parallel(const StepMap& map, std::span<double> x1, std::span<double> x2) {
  const auto n = static_cast<std::ptrdiff_t>(x2.size());
  double* a = x1.data();
  double* b = x2.data();
  const double p11 = map.p11, p21 = map.p21, p22 = map.p22;
  if (x1.empty()) {
#pragma omp parallel for schedule(static) if (x2.size() >= kParallelThreshold)
    for (std::ptrdiff_t j = 0; j < n; ++j) b[j] *= p22;
    return;
  }
#pragma omp parallel for schedule(static) if (x2.size() >= kParallelThreshold)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const double u = a[j];
    a[j] = p11 * u;
    b[j] = p21 * u + p22 * b[j];
  }
}

void step_reference(Method method, const Drift& start, const Drift& mid, const Drift& end, double h,
                    std::span<double> x1, std::span<double> x2) {
  auto f = [](const Drift& m, double u, double v, double& du, double& dv) {
    du = -m.d1 * u;
    dv = m.c * u - m.d2 * v;
  };
  const bool has_a1 = !x1.empty();
  for (std::size_t j = 0; j < x2.size(); ++j) {
    const double u = has_a1 ? x1[j] : 0.0;
    const double v = x2[j];
    double nu = 0.0, nv = 0.0;
    if (method == Method::RK4) {
      double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
      f(start, u, v, k1u, k1v);
      f(mid, u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v);
      f(mid, u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v);
      f(end, u + h * k3u, v + h * k3v, k4u, k4v);
      nu = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      nv = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    } else {
      double k1u, k1v, k2u, k2v;
      f(start, u, v, k1u, k1v);
      f(end, u + h * k1u, v + h * k1v, k2u, k2v);
      nu = u + 0.5 * h * (k1u + k2u);
      nv = v + 0.5 * h * (k1v + k2v);
    }
    if (has_a1) x1[j] = nu;
    x2[j] = nv;
  }
}

}  // namespace cascade::kernels
