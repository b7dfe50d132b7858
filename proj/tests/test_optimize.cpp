#include <doctest.h>

#include <cmath>

#include "qkdguess/error.hpp"
#include "qkdguess/optimize.hpp"

using namespace qkdguess;

TEST_CASE("golden section on a parabola") {
  const auto r = golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3) + 2.0; }, 0.0, 1.0, 1e-10);
  CHECK(r.x == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("grid then golden finds the global peak of a bimodal function") {
  auto f = [](double x) { return std::exp(-100 * (x - 0.2) * (x - 0.2)) + 1.5 * std::exp(-100 * (x - 0.8) * (x - 0.8)); };
  const auto r = grid_then_golden_max(f, 0.0, 1.0, 21, 1e-10);
  CHECK(r.x == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(r.value >= 1.5 - 1e-10);
}

TEST_CASE("grid then golden keeps a boundary maximum") {
  const auto r = grid_then_golden_max([](double x) { return x; }, 0.0, 2.0, 5, 1e-10);
  CHECK(r.value == doctest::Approx(2.0));
  const auto d = grid_then_golden_max([](double x) { return 3.0 - x; }, 1.0, 1.0, 5, 1e-10);
  CHECK(d.value == doctest::Approx(2.0));
}

TEST_CASE("bisection") {
  const double root = bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-12);
  CHECK(root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
  CHECK(bisect_root([](double x) { return x; }, 0.0, 1.0, 1e-12) == 0.0);
  try {
    bisect_root([](double x) { return x + 1.0; }, 0.0, 1.0, 1e-12);
    FAIL("expected NoCrossing");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoCrossing);
  }
}

TEST_CASE("Nelder-Mead maximizes a quadratic bowl") {
  auto f = [](const Eigen::VectorXd& x) {
    return 1.0 - (x(0) - 1.0) * (x(0) - 1.0) - 2.0 * (x(1) + 0.5) * (x(1) + 0.5) - 0.5 * x(2) * x(2);
  };
  SimplexOptions opt;
  opt.ftol = 1e-14;
  opt.xtol = 1e-10;
  const auto r = nelder_mead_max(f, Eigen::VectorXd::Zero(3), opt);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x(1) == doctest::Approx(-0.5).epsilon(1e-4));
  CHECK(r.evaluations <= opt.max_evaluations);
}

TEST_CASE("Nelder-Mead respects the evaluation budget") {
  SimplexOptions opt;
  opt.max_evaluations = 50;
  opt.ftol = 0.0;
  opt.xtol = 0.0;
  const auto r = nelder_mead_max([](const Eigen::VectorXd& x) { return -x.squaredNorm(); }, Eigen::VectorXd::Ones(6), opt);
  CHECK_FALSE(r.converged);
  CHECK(r.evaluations <= 50 + 8);
}
