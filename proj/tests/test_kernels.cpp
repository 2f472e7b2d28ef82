#include <cmath>
#include <vector>

#include "cascade/column_kernels.hpp"
#include "doctest.h"

using namespace cascade::kernels;

namespace {

Drift drift(double t) { return {1.0 + t, 2.0 * std::sqrt(1.0 + t), 0.5 + 0.1 * t}; }

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("step map equals the literal stages") {
    for (Method m : {Method::RK4, Method::Heun}) {
      const double h = 0.01, t = 0.3;
      const auto map = substep_map(m, drift(t), drift(t + h / 2), drift(t + h), h);
      std::vector<double> x1{1.0, 0.0, -0.4}, x2{0.0, 1.0, 0.7};
      std::vector<double> y1 = x1, y2 = x2;
      step_reference(m, drift(t), drift(t + h / 2), drift(t + h), h, x1, x2);
      apply_parallel(map, y1, y2);
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(y1[i] == doctest::Approx(x1[i]).epsilon(1e-15));
        CHECK(y2[i] == doctest::Approx(x2[i]).epsilon(1e-15));
      }
      CHECK(map.p11 == doctest::Approx(x1[0]).epsilon(1e-15));
      CHECK(map.p21 == doctest::Approx(x2[0]).epsilon(1e-15));
      CHECK(map.p22 == doctest::Approx(x2[1]).epsilon(1e-15));
    }
  }

  TEST_CASE("RK4 map matches the exact propagator for constant drift") {
    const Drift d{2.0, 3.0, 0.5};
    const double h = 1e-3;
    const auto m = substep_map(Method::RK4, d, d, d, h);
    CHECK(m.p11 == doctest::Approx(std::exp(-2.0 * h)).epsilon(1e-14));
    CHECK(m.p22 == doctest::Approx(std::exp(-0.5 * h)).epsilon(1e-14));
    const double p21 = 3.0 * (std::exp(-0.5 * h) - std::exp(-2.0 * h)) / 1.5;
    CHECK(m.p21 == doctest::Approx(p21).epsilon(1e-12));
  }

  TEST_CASE("composition") {
    const auto a = substep_map(Method::RK4, drift(0), drift(0.05), drift(0.1), 0.1);
    const auto b = substep_map(Method::RK4, drift(0.1), drift(0.15), drift(0.2), 0.1);
    const auto c = compose(b, a);
    std::vector<double> x1{1.0}, x2{0.25}, y1 = x1, y2 = x2;
    apply_parallel(a, x1, x2);
    apply_parallel(b, x1, x2);
    apply_parallel(c, y1, y2);
    CHECK(y1[0] == doctest::Approx(x1[0]).epsilon(1e-15));
    CHECK(y2[0] == doctest::Approx(x2[0]).epsilon(1e-15));
    const auto id = compose(StepMap::identity(), a);
    CHECK(id.p11 == a.p11);
    CHECK(id.p21 == a.p21);
    CHECK(id.p22 == a.p22);
  }

  TEST_CASE("parallel engine agrees with the reference on large batches") {
    const std::size_t n = 3 * kParallelThreshold + 17;
    std::vector<double> x1(n), x2(n);
    for (std::size_t i = 0; i < n; ++i) {
      x1[i] = std::sin(static_cast<double>(i));
      x2[i] = std::cos(static_cast<double>(i));
    }
    auto y1 = x1, y2 = x2;
    for (int s = 0; s < 20; ++s) {
      const double t = 0.01 * s, h = 0.01;
      step_reference(Method::RK4, drift(t), drift(t + h / 2), drift(t + h), h, x1, x2);
      apply_parallel(substep_map(Method::RK4, drift(t), drift(t + h / 2), drift(t + h), h), y1, y2);
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max({diff, std::abs(x1[i] - y1[i]), std::abs(x2[i] - y2[i])});
    CHECK(diff < 1e-14);
  }

  TEST_CASE("columns without an a1 weight") {
    const auto m = substep_map(Method::Heun, drift(0), drift(0.005), drift(0.01), 0.01);
    std::vector<double> x2{1.0, 2.0};
    apply_parallel(m, {}, x2);
    CHECK(x2[0] == doctest::Approx(m.p22));
    CHECK(x2[1] == doctest::Approx(2.0 * m.p22));
  }
}
