#include <cmath>
#include <random>

#include "cascade/optimizer.hpp"
#include "cascade/oracles.hpp"
#include "doctest.h"

using namespace cascade;
using doctest::Approx;

namespace {

SystemParams params(double T, double gamma = 1.0) {
  SystemParams p;
  p.gamma = gamma;
  p.transfer_time = T;
  return p;
}

opt::OptimizerConfig capped(double dt_cut, double init = 1.0) {
  opt::OptimizerConfig c;
  c.gamma1_max = 0.5 / dt_cut;
  c.initial_value = init;
  return c;
}

}  // namespace

TEST_SUITE("optimizer") {
  TEST_CASE("functional of a constant profile is exact") {
    const auto p = params(5.0);
    const TimeGrid g(5.0, 50);
    const std::vector<double> ones(50, 1.0);
    CHECK(opt::functional_value(ones, p, g) == Approx(oracles::fidelity_constant_coupling(1.0, 5.0)).epsilon(1e-13));
    const std::vector<double> other(50, 0.3);
    CHECK(opt::functional_value(other, p, g) ==
          Approx(oracles::fidelity_constant_general(1.0, 0.3, 5.0)).epsilon(1e-13));
    const std::vector<double> zeros(50, 0.0);
    CHECK(opt::functional_value(zeros, p, g) == 0.0);
  }

  TEST_CASE("functional input checks") {
    const auto p = params(1.0);
    const TimeGrid g(1.0, 10);
    CHECK_THROWS_AS(opt::functional_value(std::vector<double>(9, 1.0), p, g), DomainError);
    std::vector<double> v(10, 1.0);
    v[3] = -1.0;
    CHECK_THROWS_AS(opt::functional_value(v, p, g), DomainError);
    CHECK_THROWS_AS(opt::functional_value(std::vector<double>(10, 1.0), params(2.0), g), DomainError);
  }

  TEST_CASE("gradient matches central differences") {
    const auto p = params(3.0);
    const TimeGrid g(3.0, 60);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.05, 4.0);
    std::uniform_int_distribution<std::size_t> pick(0, 59);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> v(60);
      for (auto& x : v) x = u(rng);
      const auto grad = opt::functional_gradient(v, p, g);
      for (int k = 0; k < 10; ++k) {
        const std::size_t j = pick(rng);
        const double h = 1e-5 * v[j];
        auto vp = v, vm = v;
        vp[j] += h;
        vm[j] -= h;
        const double fd = (opt::functional_value(vp, p, g) - opt::functional_value(vm, p, g)) / (2 * h);
        CHECK(std::abs(grad[j] - fd) <= 1e-6 * std::abs(grad[j]));
      }
    }
  }

  TEST_CASE("zero iteration budget returns the initial profile") {
    const auto p = params(3.0);
    const TimeGrid g(3.0, 100);
    auto c = capped(5e-3);
    c.max_iters = 0;
    const auto r = opt::optimize_profile(p, g, c);
    CHECK(r.trace.status == opt::Status::MaxIterations);
    CHECK_FALSE(r.trace.converged());
    CHECK(r.trace.iterations == 0);
    CHECK(r.cells == std::vector<double>(100, 1.0));
    CHECK(r.functional == Approx(oracles::fidelity_constant_coupling(1.0, 3.0)));
    CHECK(r.trace.snapshots.size() == 1);
  }

  TEST_CASE("ascent and convergence at the reference resolution") {
    const auto p = params(3.0);
    const TimeGrid g(3.0, 600);
    const auto r = opt::optimize_profile(p, g, capped(5e-3));
    CHECK(r.trace.converged());
    for (std::size_t i = 1; i < r.trace.entries.size(); ++i)
      CHECK(r.trace.entries[i].functional >= r.trace.entries[i - 1].functional);
    const auto closed = sample_cells(CouplingProfile::optimal(5e-3), p, g);
    CHECK(r.functional >= opt::functional_value(closed, p, g) - 1e-4);
    CHECK(r.functional <= oracles::fidelity_optimal_final(1.0, 3.0));
    for (double v : r.cells) CHECK(v <= 100.0);
    CHECK(opt::verify_stationarity(r.profile(g), p, g, 3.0 - 10 * 5e-3).pass);
  }

  TEST_CASE("initialization and parametrization do not change the optimum") {
    const auto p = params(3.0);
    const TimeGrid g(3.0, 600);
    const auto a = opt::optimize_profile(p, g, capped(5e-3, 1.0));
    const auto b = opt::optimize_profile(p, g, capped(5e-3, 0.1));
    CHECK(std::abs(a.functional - b.functional) < 1e-8);
    auto c = capped(5e-3);
    c.parametrization = opt::Parametrization::GDot;
    const auto d = opt::optimize_profile(p, g, c);
    CHECK(d.trace.converged());
    CHECK(std::abs(a.functional - d.functional) < 1e-4);
  }

  TEST_CASE("short transfer time") {
    const auto p = params(0.2);
    const TimeGrid g(0.2, 400);
    const auto r = opt::optimize_profile(p, g, capped(1e-4));
    CHECK(std::abs(r.functional - std::sqrt(-std::expm1(-0.4))) < 1e-3);
  }

  TEST_CASE("scale invariance") {
    const TimeGrid g1(3.0, 300), g2(1.5, 300);
    auto c1 = capped(1e-2);
    auto c2 = c1;
    c2.gamma1_max = 2.0 * *c1.gamma1_max;
    const auto a = opt::optimize_profile(params(3.0, 1.0), g1, c1);
    const auto b = opt::optimize_profile(params(1.5, 2.0), g2, c2);
    CHECK(a.functional == Approx(b.functional).epsilon(1e-8));
    for (std::size_t j = 0; j < 300; j += 29) CHECK(b.cells[j] == Approx(2.0 * a.cells[j]).epsilon(1e-4));
  }

  TEST_CASE("stationarity of reference profiles") {
    const auto p = params(3.0);
    const TimeGrid g(3.0, 600);
    const auto constant = opt::verify_stationarity(CouplingProfile::constant(1.0), p, g, 2.95);
    CHECK_FALSE(constant.pass);
    CHECK(constant.max_residual == Approx(4.0));
    const auto closed = opt::verify_stationarity(CouplingProfile::optimal(5e-3), p, g, 2.95);
    CHECK(closed.pass);
    CHECK(closed.points == 590);
  }

  TEST_CASE("config checks") {
    const auto p = params(1.0);
    const TimeGrid g(1.0, 20);
    opt::OptimizerConfig c;
    c.tolerance = 0.0;
    CHECK_THROWS_AS(opt::optimize_profile(p, g, c), DomainError);
    c = {};
    c.step_size = -1.0;
    CHECK_THROWS_AS(opt::optimize_profile(p, g, c), DomainError);
    CHECK(opt::to_string(opt::Status::Converged) == "converged");
  }
}
