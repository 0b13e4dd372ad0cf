#include <doctest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "afem/estimator.hpp"
#include "afem/solver.hpp"
#include "support/oracles.hpp"

using namespace afem;

namespace {

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-30}); }

} // namespace

TEST_CASE("edge residuals of simple states") {
    const ProblemSpec spec = example_config(1);
    const Mesh m = build_lshape_initial(0.5, spec.boundary_partition);
    const QuadratureRule rule = edge_gauss_rule(3);

    // globally linear function, uniform sigma: interior jumps vanish
    FeFunction lin = FeFunction::zeros(m);
    for (std::int32_t v = 0; v < m.num_vertices(); ++v)
        lin.coeffs[v] = 1.0 + 2.0 * m.vertices[v].x + 3.0 * m.vertices[v].y;
    for (std::int32_t e = 0; e < m.num_edges(); ++e) {
        if (m.is_boundary_edge(e)) continue;
        for (const double j : edge_residual(m, spec, lin, e, rule))
            CHECK(j == doctest::Approx(0.0).epsilon(1e-12));
    }

    // u = 0: anode residual is g, cathode residual is f(0) = 0
    const FeFunction zero = FeFunction::zeros(m);
    for (std::int32_t e = 0; e < m.num_edges(); ++e) {
        const auto values = edge_residual(m, spec, zero, e, rule);
        if (m.edges[e].label == BoundaryLabel::GammaA) {
            const Vec2 a = m.pos(m.edges[e].v[0]), b = m.pos(m.edges[e].v[1]);
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const Vec2 x = a + rule.points[q] * (b - a);
                CHECK(values[q] == doctest::Approx(spec.flux.eval(x)).epsilon(1e-14));
            }
        } else if (m.edges[e].label == BoundaryLabel::GammaC) {
            for (const double j : values) CHECK(j == 0.0);
        }
    }
}

TEST_CASE("zero data gives a zero estimator") {
    ProblemSpec spec = example_config(1);
    spec.flux.kind = FluxData::Kind::Zero;
    const Mesh m = build_lshape_initial(0.5, spec.boundary_partition);
    const IndicatorField field = compute_indicators(m, spec, FeFunction::zeros(m));
    for (const double v : field.eta_sq) CHECK(v == 0.0);
    for (const double v : field.osc_sq) CHECK(v == 0.0);
}

TEST_CASE("constant interior jump contributes h_T J^2 |F| / 2") {
    // square split along the diagonal, kinked hat function
    std::vector<Vertex> verts{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<Triangle> tris{Triangle{{0, 1, 2}, 2, 1.0}, Triangle{{0, 2, 3}, 0, 1.0}};
    ProblemSpec spec = example_config(1);
    spec.flux.kind = FluxData::Kind::Zero;
    const Mesh m = build_mesh(std::move(verts), std::move(tris),
                              [](const Mesh&, std::int32_t, std::int32_t) { return BoundaryLabel::Gamma0; });

    FeFunction u = FeFunction::zeros(m);
    u.coeffs = {0.0, 1.0, 0.0, 0.0}; // gradient (1,-1) on T0, (0,0) on T1
    // diagonal edge: n = (-1,1)/sqrt(2) (out of T0); J = sigma grad(u0).n - 0 = -sqrt(2)
    const double j_expected = std::sqrt(2.0);
    const double len = std::sqrt(2.0);
    const double h_t = std::sqrt(0.5);

    std::int32_t diag = -1;
    for (std::int32_t e = 0; e < m.num_edges(); ++e)
        if (!m.is_boundary_edge(e)) diag = e;
    REQUIRE(diag >= 0);
    const EdgeQuantities eq = edge_quantities(m, spec, u, diag);
    CHECK(eq.jump_sq == doctest::Approx(j_expected * j_expected * len).epsilon(1e-13));
    CHECK(eq.osc_sq == doctest::Approx(0.0));

    // each neighbor picks up half the weighted jump plus its own boundary terms
    const double contrib = 0.5 * h_t * eq.jump_sq;
    double eta0 = local_indicator(m, spec, u, 0);
    // subtract the Gamma0 boundary faces of T0: edges (0,1) and (1,2)
    for (const std::int32_t e : m.tri_edges[0]) {
        if (m.is_boundary_edge(e)) eta0 -= h_t * edge_quantities(m, spec, u, e).jump_sq;
    }
    CHECK(eta0 == doctest::Approx(contrib).epsilon(1e-12));
}

TEST_CASE("full indicator matches the dense oracle on the 6-triangle mesh") {
    const ProblemSpec spec = example_config(1);
    const Mesh m = build_lshape_initial(1.0, spec.boundary_partition);
    std::mt19937 rng(81);
    const FeFunction u = testing::random_function(m, rng);
    for (std::int32_t t = 0; t < m.num_triangles(); ++t) {
        const double fast = local_indicator(m, spec, u, t);
        const double oracle = testing::dense_indicator_oracle(m, spec, u, t);
        CHECK(rel_diff(fast, oracle) < 1e-10);
    }
    // the field sweep agrees with the per-element path
    const IndicatorField field = compute_indicators(m, spec, u);
    for (std::int32_t t = 0; t < m.num_triangles(); ++t) {
        CHECK(field.eta_sq[t] == doctest::Approx(local_indicator(m, spec, u, t)).epsilon(1e-14));
        CHECK(field.osc_sq[t] == doctest::Approx(local_oscillation(m, spec, u, t)).epsilon(1e-14));
    }
}

TEST_CASE("oscillation vanishes where the projection is exact") {
    // constant g on an anode edge
    ProblemSpec spec = example_config(1);
    const Mesh m = build_lshape_initial(0.5, spec.boundary_partition);
    std::mt19937 rng(91);
    const FeFunction zero = FeFunction::zeros(m);
    ProblemSpec const_flux = spec;
    const_flux.flux.kind = FluxData::Kind::Zero; // g = 0 is constant
    for (std::int32_t e = 0; e < m.num_edges(); ++e)
        if (m.edges[e].label == BoundaryLabel::GammaA)
            CHECK(edge_quantities(m, const_flux, zero, e).osc_sq == doctest::Approx(0.0));

    // cathode edge with the cubic law: residual is cubic, degree-3 projection exact
    const FeFunction u = testing::random_function(m, rng);
    for (std::int32_t e = 0; e < m.num_edges(); ++e)
        if (m.edges[e].label == BoundaryLabel::GammaC) {
            const EdgeQuantities eq = edge_quantities(m, spec, u, e);
            CHECK(eq.osc_sq <= 1e-14 * std::max(1.0, eq.jump_sq));
        }
}

TEST_CASE("oscillation of sin(20y) on an anode edge matches the closed form") {
    const ProblemSpec spec = example_config(2);
    const Mesh m = build_lshape_initial(0.2, spec.boundary_partition);
    const FeFunction zero = FeFunction::zeros(m);
    for (std::int32_t e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges[e];
        if (ed.label != BoundaryLabel::GammaA) continue;
        if (std::abs(m.edge_midpoint(e).x + 1.0) > 1e-12) continue; // left side only
        const double ya = std::min(m.pos(ed.v[0]).y, m.pos(ed.v[1]).y);
        const double yb = ya + 0.2;
        // int (g - mean)^2 over [ya, yb] with g = sin(20y)
        const double mean = (std::cos(20.0 * ya) - std::cos(20.0 * yb)) / (20.0 * 0.2);
        const double int_g2 = 0.1 - (std::sin(40.0 * yb) - std::sin(40.0 * ya)) / 80.0;
        const double closed = int_g2 - 0.2 * mean * mean;
        const EdgeQuantities eq = edge_quantities(m, spec, zero, e);
        CHECK(rel_diff(eq.osc_sq, closed) < 1e-8);
    }
}

TEST_CASE("projection is optimal among polynomials of its degree") {
    const ProblemSpec spec = example_config(2);
    const Mesh m = build_lshape_initial(0.2, spec.boundary_partition);
    const FeFunction zero = FeFunction::zeros(m);
    const QuadratureRule rule = edge_gauss_rule(16);
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::int32_t e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges[e];
        if (ed.label != BoundaryLabel::GammaA) continue;
        if (std::abs(m.edge_midpoint(e).x + 1.0) > 1e-12) continue;
        const double osc = edge_quantities(m, spec, zero, e).osc_sq;
        const auto values = edge_residual(m, spec, zero, e, rule);
        const double len = m.edge_length(e);
        for (int trial = 0; trial < 20; ++trial) {
            const double c = dist(rng); // random constant, the P0 competitor
            double dist_sq = 0.0;
            for (std::size_t q = 0; q < rule.points.size(); ++q)
                dist_sq += len * rule.weights[q] * (values[q] - c) * (values[q] - c);
            CHECK(osc <= dist_sq + 1e-9);
        }
    }
}

TEST_CASE("global estimator drops by at least 1/sqrt(2) under full refinement") {
    for (const int example : {1, 2}) {
        const ProblemSpec spec = example_config(example);
        Mesh m = build_lshape_initial(0.5, spec.boundary_partition);
        std::mt19937 rng(111 + example);
        FeFunction u = testing::random_function(m, rng, 0.4);

        const IndicatorField before = compute_indicators(m, spec, u);
        const double sum_before = global_indicator(before).eta_sq;

        std::vector<std::int32_t> all(m.num_triangles());
        std::iota(all.begin(), all.end(), 0);
        const Mesh fine = refine(m, all, RefineMode::AllEdges);
        const FeFunction uf = interpolate(u, fine);
        const IndicatorField after = compute_indicators(fine, spec, uf);
        const double sum_after = global_indicator(after).eta_sq;

        CHECK(sum_after <= sum_before / std::sqrt(2.0) + 1e-12);
    }
}

TEST_CASE("conductivity jumps show up in the interior residual") {
    // square split along the diagonal, sigma 1 below and 3 above; a globally
    // linear u then has flux jump (1 - 3) grad(u) . n across the diagonal
    std::vector<Vertex> verts{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<Triangle> tris{Triangle{{0, 1, 2}, 2, 1.0}, Triangle{{0, 2, 3}, 0, 3.0}};
    ProblemSpec spec = example_config(1);
    spec.flux.kind = FluxData::Kind::Zero;
    const Mesh m = build_mesh(std::move(verts), std::move(tris),
                              [](const Mesh&, std::int32_t, std::int32_t) { return BoundaryLabel::Gamma0; });
    FeFunction u = FeFunction::zeros(m);
    for (std::int32_t v = 0; v < m.num_vertices(); ++v)
        u.coeffs[v] = 2.0 * m.vertices[v].x - m.vertices[v].y;

    std::int32_t diag = -1;
    for (std::int32_t e = 0; e < m.num_edges(); ++e)
        if (!m.is_boundary_edge(e)) diag = e;
    REQUIRE(diag >= 0);
    const Vec2 n = m.edge_normal(diag);
    const double expected = (1.0 - 3.0) * (2.0 * n.x - n.y);
    const EdgeQuantities eq = edge_quantities(m, spec, u, diag);
    CHECK(eq.jump_sq ==
          doctest::Approx(expected * expected * m.edge_length(diag)).epsilon(1e-13));
    CHECK(eq.osc_sq == doctest::Approx(0.0)); // constant jump, P0 projection exact
}

TEST_CASE("indicator csv dump") {
    const ProblemSpec spec = example_config(1);
    const Mesh m = build_lshape_initial(1.0, spec.boundary_partition);
    std::mt19937 rng(131);
    const IndicatorField field = compute_indicators(m, spec, testing::random_function(m, rng));
    std::ostringstream os;
    write_indicator_csv(field, os);
    const std::string csv = os.str();
    CHECK(csv.rfind("element_id,eta_sq,osc_sq\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == m.num_triangles() + 1);
}

TEST_CASE("global sums and subsets") {
    const ProblemSpec spec = example_config(1);
    const Mesh m = build_lshape_initial(0.5, spec.boundary_partition);
    std::mt19937 rng(121);
    const FeFunction u = testing::random_function(m, rng);
    const IndicatorField field = compute_indicators(m, spec, u);

    CHECK(global_indicator(field, std::span<const std::int32_t>{}).eta_sq == 0.0);

    std::vector<std::int32_t> all(m.num_triangles());
    std::iota(all.begin(), all.end(), 0);
    CHECK(global_indicator(field, all).eta_sq ==
          doctest::Approx(global_indicator(field).eta_sq).epsilon(1e-15));

    std::vector<std::int32_t> evens, odds;
    for (std::int32_t t = 0; t < m.num_triangles(); ++t) (t % 2 ? odds : evens).push_back(t);
    const double split =
        global_indicator(field, evens).eta_sq + global_indicator(field, odds).eta_sq;
    CHECK(rel_diff(split, global_indicator(field).eta_sq) < 1e-15);

    // global oscillation is dominated by the global estimator
    CHECK(global_indicator(field).osc_sq <= global_indicator(field).eta_sq + 1e-12);
}
