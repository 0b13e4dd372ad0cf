#include <doctest.h>

#include <cmath>

#include "afem/quadrature.hpp"

using namespace afem;

TEST_CASE("gauss rules integrate polynomials at their stated exactness") {
    // 3 points: degree 5, so t^5 on [0,1] is exact
    const QuadratureRule r3 = edge_gauss_rule(3);
    double v = 0.0;
    for (std::size_t q = 0; q < r3.points.size(); ++q)
        v += r3.weights[q] * std::pow(r3.points[q], 5);
    CHECK(v == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

    for (int n = 1; n <= 16; ++n) {
        const QuadratureRule r = edge_gauss_rule(n);
        double wsum = 0.0;
        for (const double w : r.weights) {
            CHECK(w > 0.0);
            wsum += w;
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
        // highest exact monomial
        double hi = 0.0;
        for (std::size_t q = 0; q < r.points.size(); ++q)
            hi += r.weights[q] * std::pow(r.points[q], r.exactness);
        CHECK(hi == doctest::Approx(1.0 / (r.exactness + 1)).epsilon(1e-12));
    }
    CHECK_THROWS(edge_gauss_rule(0));
    CHECK_THROWS(edge_gauss_rule(17));
}

TEST_CASE("7-point rule handles the exponential boundary law") {
    const QuadratureRule r = edge_gauss_rule(7);
    double v = 0.0;
    for (std::size_t q = 0; q < r.points.size(); ++q)
        v += r.weights[q] * std::exp(5.0 * r.points[q]);
    const double exact = (std::exp(5.0) - 1.0) / 5.0;
    // exact Gauss-Legendre already sits at ~1.8e-10 for this integrand
    CHECK(std::abs(v - exact) / exact < 1e-9);

    const QuadratureRule r12 = edge_gauss_rule(12);
    double v12 = 0.0;
    for (std::size_t q = 0; q < r12.points.size(); ++q)
        v12 += r12.weights[q] * std::exp(5.0 * r12.points[q]);
    CHECK(std::abs(v12 - exact) / exact < 1e-13);
}

TEST_CASE("triangle rules") {
    for (const int degree : {1, 2, 4, 5}) {
        const TriangleRule r = triangle_rule(degree);
        CHECK(r.degree >= degree);
        double wsum = 0.0;
        for (const double w : r.weights) {
            CHECK(w > 0.0);
            wsum += w;
        }
        CHECK(wsum == doctest::Approx(0.5).epsilon(1e-14));
        // int over reference triangle of l0^degree
        auto exact_pow = [](int k) { // int_T l0^k = 1/((k+1)(k+2)) * 1... on unit triangle: k!*2!/(k+2)! * 1/2 * 2 = 1/((k+1)(k+2))
            return 1.0 / ((k + 1.0) * (k + 2.0));
        };
        double v = 0.0;
        for (std::size_t q = 0; q < r.points.size(); ++q)
            v += r.weights[q] * std::pow(r.points[q].l0, degree);
        CHECK(v == doctest::Approx(exact_pow(degree)).epsilon(1e-13));
    }
    CHECK_THROWS(triangle_rule(6));
}
