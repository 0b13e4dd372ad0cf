#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "afem/problem.hpp"

using namespace afem;

TEST_CASE("cubic law values") {
    const NonlinearLaw law = NonlinearLaw::cubic(1.0, 1.0);
    CHECK(law.f(2.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(law.f_prime(2.0) == doctest::Approx(13.0).epsilon(1e-15));
    CHECK(law.antiderivative(2.0) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(law.f(0.0) == 0.0);
    CHECK(law.antiderivative(0.0) == 0.0);
}

TEST_CASE("butler-volmer law against finite differences") {
    const NonlinearLaw law = NonlinearLaw::butler_volmer(5.0, 5.0, 1.0);
    CHECK(law.f(0.0) == 0.0);
    CHECK(law.antiderivative(0.0) == 0.0);
    const double h = 1e-6;
    for (const double t : {-1.0, 0.3, 2.0}) {
        const double fd = (law.f(t + h) - law.f(t - h)) / (2.0 * h);
        CHECK(std::abs(fd - law.f_prime(t)) / std::abs(law.f_prime(t)) < 1e-6);
        const double fd2 = (law.antiderivative(t + h) - law.antiderivative(t - h)) / (2.0 * h);
        CHECK(std::abs(fd2 - law.f(t)) / std::max(1.0, std::abs(law.f(t))) < 1e-6);
    }
    CHECK_THROWS_AS(law.f(141.0), std::domain_error);
    CHECK_THROWS_AS(law.f(-141.0), std::domain_error);
}

TEST_CASE("law shape properties on a sampled grid") {
    for (const auto& law :
         {NonlinearLaw::cubic(1.0, 1.0), NonlinearLaw::butler_volmer(5.0, 5.0, 1.0),
          NonlinearLaw::cubic(0.5, 2.0), NonlinearLaw::butler_volmer(2.0, 7.0, 0.3)}) {
        const double lim = std::min(10.0, 0.5 * law.argument_limit());
        double prev = law.f(-lim);
        for (int i = 1; i <= 200; ++i) {
            const double t = -lim + 2.0 * lim * i / 200.0;
            CHECK(law.f_prime(t) > 0.0);
            CHECK(law.f(t) > prev); // strictly increasing
            prev = law.f(t);
        }
        // F convex: midpoint below the chord
        for (int i = 0; i < 40; ++i) {
            const double a = -lim + 2.0 * lim * i / 41.0;
            const double b = a + 2.0 * lim / 41.0;
            CHECK(law.antiderivative(0.5 * (a + b)) <=
                  0.5 * (law.antiderivative(a) + law.antiderivative(b)) + 1e-12);
        }
        // f' convex: second difference of f' stays nonnegative
        const double h = 1e-3;
        for (int i = 1; i < 60; ++i) {
            const double t = -0.9 * lim + 1.8 * lim * i / 60.0;
            const double second = (law.f_prime(t + h) - 2.0 * law.f_prime(t) + law.f_prime(t - h)) / (h * h);
            CHECK(second >= -1e-8);
        }
    }
}

TEST_CASE("law constructor guards") {
    CHECK_THROWS(NonlinearLaw::cubic(0.0, 1.0));
    CHECK_THROWS(NonlinearLaw::cubic(-1.0, 1.0));
    CHECK_NOTHROW(NonlinearLaw::cubic(1.0, 0.0)); // linear f(u) = c1 u is allowed
    CHECK_THROWS(NonlinearLaw::butler_volmer(0.0, 5.0, 1.0));
    CHECK_THROWS(NonlinearLaw::butler_volmer(5.0, 5.0, 0.0));
}

TEST_CASE("example configurations") {
    const ProblemSpec ex1 = example_config(1);
    CHECK(ex1.law.is_cubic());
    CHECK(ex1.law.f(1.0) == doctest::Approx(2.0));
    CHECK(ex1.sigma_default == 1.0);
    CHECK(ex1.flux.eval({0.5, -0.5}) == doctest::Approx(0.5));
    // left side is the cathode
    int cathode_segments = 0;
    for (const auto& seg : ex1.boundary_partition)
        if (seg.label == BoundaryLabel::GammaC) {
            ++cathode_segments;
            CHECK(seg.a.x == -1.0);
            CHECK(seg.b.x == -1.0);
        }
    CHECK(cathode_segments == 1);

    const ProblemSpec ex2 = example_config(2);
    CHECK_FALSE(ex2.law.is_cubic());
    CHECK(ex2.law.c3 == 5.0);
    CHECK(ex2.law.c4 == 5.0);
    CHECK(ex2.law.c5 == 1.0);
    CHECK(ex2.flux.eval({-1.0, 0.1}) == doctest::Approx(std::sin(2.0)).epsilon(1e-12));
    CHECK(ex2.flux.eval({0.3, 1.0}) == doctest::Approx(std::sin(0.3) + std::cos(1.0)).epsilon(1e-12));
    int inner = 0;
    for (const auto& seg : ex2.boundary_partition)
        if (seg.label == BoundaryLabel::GammaC) ++inner;
    CHECK(inner == 2);

    CHECK_THROWS(example_config(3));
}

TEST_CASE("config text overrides") {
    const ProblemSpec spec = parse_problem_config_text("# comment\n"
                                                       "example = 2\n"
                                                       "c3 = 4.0\n"
                                                       "sigma = 2.5\n");
    CHECK_FALSE(spec.law.is_cubic());
    CHECK(spec.law.c3 == 4.0);
    CHECK(spec.law.c4 == 5.0);
    CHECK(spec.sigma_default == 2.5);

    const ProblemSpec swapped = parse_problem_config_text("example = 1\nlaw = butler_volmer\nc5 = 2\n");
    CHECK_FALSE(swapped.law.is_cubic());
    CHECK(swapped.law.c5 == 2.0);

    const ProblemSpec seg = parse_problem_config_text(
        "example = 1\n"
        "segment = -1 -1 -1 1 GammaC\n"
        "segment = -1 1 1 1 GammaC\n");
    CHECK(seg.boundary_partition.size() == 2);
    CHECK(seg.boundary_partition[1].label == BoundaryLabel::GammaC);

    CHECK_THROWS(parse_problem_config_text("bogus_key = 1\n"));
    CHECK_THROWS(parse_problem_config_text("example\n"));
}
