#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "afem/bench.hpp"

using namespace afem;

TEST_CASE("rate fitting") {
    std::vector<std::pair<double, double>> exact;
    for (int i = 0; i < 8; ++i) {
        const double n = 100.0 * std::pow(2.0, i);
        exact.emplace_back(n, 3.0 * std::pow(n, -0.5));
    }
    CHECK(fit_rate(exact, 99.0).slope == doctest::Approx(-0.5).epsilon(1e-12));

    std::vector<std::pair<double, double>> flat;
    for (int i = 0; i < 8; ++i) flat.emplace_back(100.0 * std::pow(2.0, i), 7.5);
    CHECK(fit_rate(flat, 99.0).slope == doctest::Approx(0.0));

    // noisy synthetic decay, fixed seed
    std::mt19937 rng(31415);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<std::pair<double, double>> noisy;
    for (int i = 0; i < 40; ++i) {
        const double n = 50.0 * std::pow(1.35, i);
        noisy.emplace_back(n, 2.0 * std::pow(n, -0.54) * std::exp(noise(rng)));
    }
    const RateFit fit = fit_rate(noisy, 99.0);
    CHECK(std::abs(fit.slope + 0.54) < 0.02);

    // trailing window drops the head but spans at least a decade of dofs
    const RateFit tail = fit_rate(noisy, 1.0);
    CHECK(tail.n_points >= 6);
    CHECK(tail.n_points < static_cast<int>(noisy.size()));
    CHECK(tail.n_max / tail.n_min >= 10.0 - 1e-9);

    CHECK_THROWS(fit_rate(std::vector<std::pair<double, double>>(4, {10.0, 1.0}), 1.0));
    std::vector<std::pair<double, double>> negative(8, {10.0, -1.0});
    CHECK_THROWS(fit_rate(negative, 1.0));
}

TEST_CASE("zero flux reference is identically zero") {
    ProblemSpec spec = example_config(1);
    spec.flux.kind = FluxData::Kind::Zero;
    const ReferenceSolution ref = reference_solve(spec, 1.0 / 8.0);
    for (const double v : ref.u.coeffs) CHECK(v == 0.0);
    CHECK(ref.h1_norm == 0.0);
}

TEST_CASE("reference solutions are self-consistent under refinement") {
    const ProblemSpec spec = example_config(1);
    const ReferenceSolution r32 = reference_solve(spec, 1.0 / 32.0);
    const ReferenceSolution r64 = reference_solve(spec, 1.0 / 64.0);
    const ReferenceSolution r128 = reference_solve(spec, 1.0 / 128.0);
    const double d_coarse = h1_error_vs_reference(r32.mesh, r32.u, r64).abs_sq;
    const double d_fine = h1_error_vs_reference(r64.mesh, r64.u, r128).abs_sq;
    CHECK(d_fine < d_coarse);
    CHECK(d_fine > 0.0);
}

TEST_CASE("error against the reference vanishes for its own interpolant") {
    const ProblemSpec spec = example_config(1);
    const ReferenceSolution ref = reference_solve(spec, 1.0 / 16.0);
    const ErrorVsReference err = h1_error_vs_reference(ref.mesh, ref.u, ref);
    CHECK(err.abs_sq <= 1e-24);
    CHECK(err.rel <= 1e-12);
}

TEST_CASE("closure ratio and contraction bookkeeping") {
    std::vector<IterationRecord> records(5);
    for (int k = 0; k < 5; ++k) {
        records[k].k = k;
        records[k].n_elements = 100 + 40 * k;
        records[k].n_marked = 10;
        records[k].eta_sq_sum = std::pow(0.5, k);
        records[k].energy = -1.0 + std::pow(0.25, k + 1);
    }
    // (n_k - n_0) / (10 k) = 4
    CHECK(closure_ratio_max(records) == doctest::Approx(4.0));

    const ContractionFit fit = contraction_search(records, -1.0, 2);
    CHECK(fit.valid);
    CHECK(fit.mu < 1.0);
}

TEST_CASE("snapshot targets") {
    CHECK(snapshot_dof_target(1) == 3248.0);
    CHECK(snapshot_dof_target(2) == 3070.0);
}

TEST_CASE("svg plot writer emits both series and fit lines") {
    std::vector<PlotSeries> series;
    series.push_back({"data", "#1f77b4", false, {{100, 1.0}, {1000, 0.3}, {10000, 0.1}}});
    series.push_back({"slope -0.50", "#555555", true, {{100, 1.1}, {10000, 0.11}}});
    const std::string path = "svg_writer_test.svg";
    write_loglog_svg(path, "dofs", "error", series);
    std::ifstream is(path);
    REQUIRE(is.good());
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    CHECK(text.rfind("<svg", 0) == 0);
    CHECK(text.find("<polyline") != std::string::npos);
    CHECK(text.find("stroke-dasharray") != std::string::npos);
    CHECK(text.find("slope -0.50") != std::string::npos);
    CHECK(text.find("</svg>") != std::string::npos);
    std::remove(path.c_str());

    CHECK_THROWS(write_loglog_svg(path, "x", "y", std::vector<PlotSeries>{}));
}
