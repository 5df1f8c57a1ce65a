#include "elyte/simd/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace elyte::simd;

namespace {

std::vector<double> random_vec(std::mt19937_64& g, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(g);
  return v;
}

bool close(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); }

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("every available kernel table agrees with the scalar reference") {
    const auto& ref = scalar::table();
    std::mt19937_64 g(11);
    for (const auto* t : available()) {
      CAPTURE(to_string(t->isa));
      for (std::size_t n = 0; n <= 67; ++n) {
        const auto a = random_vec(g, n, -5.0, 5.0);
        const auto b = random_vec(g, n, 0.5, 9.0);
        CHECK(close(t->dot(a, b), ref.dot(a, b)));
        CHECK(close(t->sum(a), ref.sum(a)));
        CHECK(close(t->sum_squares(a), ref.sum_squares(a)));
        CHECK(close(t->squared_distance(a, b), ref.squared_distance(a, b)));
        CHECK(close(t->sum_abs_diff(a, b), ref.sum_abs_diff(a, b)));
        CHECK(close(t->sum_squared_diff(a, b), ref.sum_squared_diff(a, b)));
        CHECK(close(t->sum_abs_relative_error(b, a), ref.sum_abs_relative_error(b, a)));
        CHECK(close(t->sum_squared_deviation(a, 0.3), ref.sum_squared_deviation(a, 0.3)));
        auto y1 = b;
        auto y2 = b;
        t->axpy(1.7, a, y1);
        ref.axpy(1.7, a, y2);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i]));
      }
    }
  }

  TEST_CASE("scalar kernels match hand values") {
    const auto& s = scalar::table();
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{2, 2, 2};
    CHECK(s.dot(a, b) == 12.0);
    CHECK(s.sum(a) == 6.0);
    CHECK(s.squared_distance(a, b) == 2.0);
    CHECK(s.sum_abs_diff(a, b) == 2.0);
    CHECK(s.sum_abs_relative_error(a, b) == doctest::Approx(1.0 + 0.0 + 1.0 / 3.0));
    CHECK(s.sum_squared_deviation(a, 2.0) == 2.0);
  }

  TEST_CASE("dispatch can be pinned to scalar and restored") {
    const Isa before = active().isa;
    CHECK(force(Isa::Scalar));
    CHECK(active().isa == Isa::Scalar);
    CHECK(force(before));
    CHECK(active().isa == before);
    CHECK(available().front()->isa == Isa::Scalar);
  }
}
