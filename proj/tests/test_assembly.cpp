#include <doctest.h>

#include <random>
#include <sstream>

#include "afem/assembly.hpp"
#include "support/oracles.hpp"

using namespace afem;

namespace {

ProblemSpec zero_flux_spec() {
    ProblemSpec spec = example_config(1);
    spec.flux.kind = FluxData::Kind::Zero;
    return spec;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-30}); }

} // namespace

TEST_CASE("element stiffness closed forms") {
    const auto k = element_stiffness({0, 0}, {1, 0}, {0, 1}, 1.0);
    const double expect[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(k[i][j] == doctest::Approx(expect[i][j]).epsilon(1e-15));

    // scale invariance in 2d
    const auto k2 = element_stiffness({0, 0}, {2, 0}, {0, 2}, 1.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(k2[i][j] == doctest::Approx(k[i][j]).epsilon(1e-14));

    // linear in sigma
    const auto k3 = element_stiffness({0, 0}, {1, 0}, {0, 1}, 3.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(k3[i][j] == doctest::Approx(3.0 * k[i][j]).epsilon(1e-14));

    CHECK_THROWS(element_stiffness({0, 0}, {1, 0}, {2, 0}, 1.0));
}

TEST_CASE("residual vanishes for zero data") {
    const ProblemSpec spec = zero_flux_spec();
    const Mesh m = build_lshape_initial(1.0, spec.boundary_partition);
    const FeFunction u = FeFunction::zeros(m);
    for (const double g : assemble_residual(m, spec, u)) CHECK(g == 0.0);
    CHECK(energy_functional(m, spec, u) == 0.0);
}

TEST_CASE("residual matches the dense oracle on the 6-triangle mesh") {
    const ProblemSpec spec = example_config(1);
    const Mesh m = build_lshape_initial(1.0, spec.boundary_partition);
    std::mt19937 rng(11);
    const FeFunction u = testing::random_function(m, rng);
    const auto fast = assemble_residual(m, spec, u);
    const auto oracle = testing::dense_residual_oracle(m, spec, u);
    double scale = 0.0;
    for (const double v : oracle) scale = std::max(scale, std::abs(v));
    REQUIRE(scale > 0.0);
    for (std::size_t i = 0; i < fast.size(); ++i) CHECK(std::abs(fast[i] - oracle[i]) <= 1e-12 * scale);
}

TEST_CASE("linear law gives a linear residual") {
    ProblemSpec spec = example_config(1);
    spec.law = NonlinearLaw::cubic(1.0, 0.0); // f(u) = u
    const Mesh m = build_lshape_initial(0.5, spec.boundary_partition);
    std::mt19937 rng(12);
    const FeFunction u = testing::random_function(m, rng);
    const FeFunction v = testing::random_function(m, rng);
    FeFunction upv = u;
    for (std::size_t i = 0; i < upv.coeffs.size(); ++i) upv.coeffs[i] += v.coeffs[i];

    const auto g0 = assemble_residual(m, spec, FeFunction::zeros(m));
    const auto gu = assemble_residual(m, spec, u);
    const auto gv = assemble_residual(m, spec, v);
    const auto gs = assemble_residual(m, spec, upv);
    for (std::size_t i = 0; i < gs.size(); ++i)
        CHECK((gs[i] - g0[i]) == doctest::Approx((gu[i] - g0[i]) + (gv[i] - g0[i])).epsilon(1e-10));
}

TEST_CASE("jacobian is the derivative of the residual") {
    for (const int example : {1, 2}) {
        const ProblemSpec spec = example_config(example);
        const Mesh m = build_lshape_initial(1.0, spec.boundary_partition);
        std::mt19937 rng(21 + example);
        const double h = 1e-6;
        for (int trial = 0; trial < 5; ++trial) {
            const FeFunction u = testing::random_function(m, rng, 0.5);
            const FeFunction v = testing::random_function(m, rng, 1.0);
            const SparseMatrix j = assemble_jacobian(m, spec, u);

            FeFunction up = u, um = u;
            for (std::size_t i = 0; i < u.coeffs.size(); ++i) {
                up.coeffs[i] += h * v.coeffs[i];
                um.coeffs[i] -= h * v.coeffs[i];
            }
            const auto gp = assemble_residual(m, spec, up);
            const auto gm = assemble_residual(m, spec, um);
            std::vector<double> jv(u.coeffs.size());
            j.multiply(v.coeffs.data(), jv.data());
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < jv.size(); ++i) {
                const double fd = (gp[i] - gm[i]) / (2.0 * h);
                num += (fd - jv[i]) * (fd - jv[i]);
                den += jv[i] * jv[i];
            }
            CHECK(std::sqrt(num / den) < 1e-6);
        }
    }
}

TEST_CASE("jacobian boundary block at u = 0 is the scaled edge mass matrix") {
    ProblemSpec spec = example_config(1);
    spec.law = NonlinearLaw::cubic(2.5, 1.0); // f'(0) = 2.5
    const Mesh m = build_lshape_initial(0.5, spec.boundary_partition);
    const FeFunction u = FeFunction::zeros(m);
    const SparseMatrix j = assemble_jacobian(m, spec, u);
    const Assembler assembler(m, spec);
    const SparseMatrix& k = assembler.stiffness();
    for (std::int32_t e = 0; e < m.num_edges(); ++e) {
        if (m.edges[e].label != BoundaryLabel::GammaC) continue;
        const auto [a, b] = std::pair(m.edges[e].v[0], m.edges[e].v[1]);
        const double len = m.edge_length(e);
        CHECK(j.get(a, b) - k.get(a, b) == doctest::Approx(2.5 * len / 6.0).epsilon(1e-13));
    }
}

TEST_CASE("jacobian is symmetric positive definite on the coarse mesh") {
    const ProblemSpec spec = example_config(1);
    const Mesh m = build_lshape_initial(1.0, spec.boundary_partition);
    std::mt19937 rng(31);
    const FeFunction u = testing::random_function(m, rng, 0.5);
    const SparseMatrix j = assemble_jacobian(m, spec, u);
    CHECK(j.symmetry_defect() <= 1e-12 * j.max_abs());

    std::vector<std::vector<double>> dense(j.n, std::vector<double>(j.n, 0.0));
    for (std::int32_t i = 0; i < j.n; ++i)
        for (std::int32_t k2 = j.row_ptr[i]; k2 < j.row_ptr[i + 1]; ++k2)
            dense[i][j.cols[k2]] = j.vals[k2];
    const auto ev = testing::dense_sym_eigenvalues(dense);
    for (const double lambda : ev) CHECK(lambda > 0.0);
}

TEST_CASE("residual is the gradient of the energy functional") {
    for (const int example : {1, 2}) {
        const ProblemSpec spec = example_config(example);
        const Mesh m = build_lshape_initial(1.0, spec.boundary_partition);
        std::mt19937 rng(41 + example);
        const FeFunction u = testing::random_function(m, rng, 0.5);
        const auto g = assemble_residual(m, spec, u);
        const double h = 1e-6;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < u.coeffs.size(); ++i) {
            FeFunction up = u, um = u;
            up.coeffs[i] += h;
            um.coeffs[i] -= h;
            const double fd = (energy_functional(m, spec, up) - energy_functional(m, spec, um)) / (2.0 * h);
            num += (fd - g[i]) * (fd - g[i]);
            den += g[i] * g[i];
        }
        CHECK(std::sqrt(num / den) < 1e-6);
    }
}

TEST_CASE("cathode quadrature of the exponential law agrees with a 16-point reference") {
    const ProblemSpec spec = example_config(2);
    const Mesh m = build_lshape_initial(0.2, spec.boundary_partition);
    // moderate nodal values, the regime the solver visits
    std::mt19937 rng(55);
    const FeFunction u = testing::random_function(m, rng, 0.4);
    const auto g7 = assemble_residual(m, spec, u);
    const auto g16 = testing::dense_residual_oracle(m, spec, u);
    double scale = 0.0;
    for (const double v : g16) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < g7.size(); ++i) CHECK(std::abs(g7[i] - g16[i]) <= 1e-10 * scale);
}

TEST_CASE("fe function serialization round trip") {
    const Mesh m = build_lshape_initial(0.5, example_config(1).boundary_partition);
    std::mt19937 rng(59);
    const FeFunction u = testing::random_function(m, rng);
    std::stringstream ss;
    write_fe_function(u, ss);
    const FeFunction back = read_fe_function(ss);
    CHECK(back.generation == u.generation);
    REQUIRE(back.coeffs.size() == u.coeffs.size());
    for (std::size_t i = 0; i < u.coeffs.size(); ++i) CHECK(back.coeffs[i] == u.coeffs[i]);

    std::stringstream bad("afem-fn v2\n0 1\n0\n");
    CHECK_THROWS(read_fe_function(bad));
}

TEST_CASE("h1 norms") {
    const Mesh m = build_lshape_initial(0.25, example_config(1).boundary_partition);
    FeFunction u = FeFunction::zeros(m);
    for (std::int32_t v = 0; v < m.num_vertices(); ++v) u.coeffs[v] = m.vertices[v].x;
    CHECK(h1_seminorm_sq(m, u) == doctest::Approx(3.0).epsilon(1e-13));

    FeFunction c = FeFunction::zeros(m);
    for (auto& x : c.coeffs) x = 2.5;
    CHECK(h1_seminorm_sq(m, c) == doctest::Approx(0.0));
    CHECK(h1_norm_sq(m, c) == doctest::Approx(3.0 * 2.5 * 2.5).epsilon(1e-13));

    // random function against a dense quadrature oracle
    const Mesh small = build_lshape_initial(1.0, example_config(1).boundary_partition);
    std::mt19937 rng(61);
    const FeFunction r = testing::random_function(small, rng);
    const TriangleRule tri = triangle_rule(4);
    double oracle = 0.0;
    for (std::int32_t t = 0; t < small.num_triangles(); ++t) {
        const auto& tr = small.triangles[t];
        const auto grads = small.basis_gradients(t);
        Vec2 g{0, 0};
        for (int k = 0; k < 3; ++k) g = g + r.coeffs[tr.v[k]] * grads[k];
        for (std::size_t q = 0; q < tri.points.size(); ++q) {
            const double uval = tri.points[q].l0 * r.coeffs[tr.v[0]] +
                                tri.points[q].l1 * r.coeffs[tr.v[1]] +
                                tri.points[q].l2 * r.coeffs[tr.v[2]];
            oracle += 2.0 * small.area(t) * tri.weights[q] * (dot(g, g) + uval * uval);
        }
    }
    CHECK(rel_diff(h1_norm_sq(small, r), oracle) < 1e-12);
}
