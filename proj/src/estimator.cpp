#include "afem/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "afem/parallel.hpp"

namespace afem {

namespace {

// Flux sigma grad(u) . n of the element adjacent to edge e on side `side`,
// with n the fixed edge normal (out of tri[0]).
double side_flux(const Mesh& mesh, const FeFunction& u, std::int32_t e, int side, Vec2 n) {
    const std::int32_t t = mesh.edges[e].tri[side];
    const auto& tr = mesh.triangles[t];
    const auto g = mesh.basis_gradients(t);
    Vec2 grad{0.0, 0.0};
    for (int k = 0; k < 3; ++k) grad = grad + u.coeffs[tr.v[k]] * g[k];
    return tr.sigma * dot(grad, n);
}

// Shifted Legendre polynomials on [0,1]; int_0^1 P_k^2 = 1/(2k+1).
double legendre01(int k, double t) {
    const double x = 2.0 * t - 1.0;
    switch (k) {
    case 0: return 1.0;
    case 1: return x;
    case 2: return 0.5 * (3.0 * x * x - 1.0);
    default: return 0.5 * x * (5.0 * x * x - 3.0);
    }
}

// Norm quadrature for the boundary residuals. 12 points keep the cubic-law
// integrands (degree 6) and the Legendre projection products exact, and
// resolve sin(20 y) on edges up to the coarsest meshes in use.
const QuadratureRule& norm_rule() {
    static const QuadratureRule rule = edge_gauss_rule(12);
    return rule;
}

struct EdgeWork {
    double jump_sq = 0.0;
    double osc_sq = 0.0;
};

EdgeWork eval_edge(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u, std::int32_t e) {
    const Edge& ed = mesh.edges[e];
    const double len = mesh.edge_length(e);
    const Vec2 n = mesh.edge_normal(e);

    if (ed.label == BoundaryLabel::Interior) {
        const double j = side_flux(mesh, u, e, 0, n) - side_flux(mesh, u, e, 1, n);
        return {j * j * len, 0.0}; // constant jump, P0 projection is exact
    }
    if (ed.label == BoundaryLabel::Gamma0) {
        const double j = side_flux(mesh, u, e, 0, n);
        return {j * j * len, 0.0};
    }

    const QuadratureRule& rule = norm_rule();
    const std::size_t nq = rule.points.size();
    double jv[16];
    const double flux = side_flux(mesh, u, e, 0, n);
    const Vec2 a = mesh.pos(ed.v[0]), b = mesh.pos(ed.v[1]);
    const double ua = u.coeffs[ed.v[0]], ub = u.coeffs[ed.v[1]];
    for (std::size_t q = 0; q < nq; ++q) {
        const double t = rule.points[q];
        if (ed.label == BoundaryLabel::GammaA)
            jv[q] = spec.flux.eval(a + t * (b - a)) - flux;
        else
            jv[q] = spec.law.f(ua + t * (ub - ua)) + flux;
    }

    // projection degree: 3 on cathode edges for the cubic law, 0 otherwise
    const int degree = (ed.label == BoundaryLabel::GammaC && spec.law.is_cubic()) ? 3 : 0;
    double coef[4] = {};
    for (int k = 0; k <= degree; ++k) {
        double c = 0.0;
        for (std::size_t q = 0; q < nq; ++q)
            c += rule.weights[q] * jv[q] * legendre01(k, rule.points[q]);
        coef[k] = (2 * k + 1) * c;
    }

    EdgeWork out;
    for (std::size_t q = 0; q < nq; ++q) {
        double p = 0.0;
        for (int k = 0; k <= degree; ++k) p += coef[k] * legendre01(k, rule.points[q]);
        const double d = jv[q] - p;
        out.jump_sq += rule.weights[q] * jv[q] * jv[q];
        out.osc_sq += rule.weights[q] * d * d;
    }
    out.jump_sq *= len;
    out.osc_sq *= len;
    return out;
}

} // namespace

std::vector<double> edge_residual(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u,
                                  std::int32_t edge, const QuadratureRule& rule) {
    check_bound(u, mesh, "edge_residual");
    const Edge& ed = mesh.edges[edge];
    const Vec2 n = mesh.edge_normal(edge);
    std::vector<double> values(rule.points.size());
    if (ed.label == BoundaryLabel::Interior) {
        const double j = side_flux(mesh, u, edge, 0, n) - side_flux(mesh, u, edge, 1, n);
        std::fill(values.begin(), values.end(), j);
        return values;
    }
    const double flux = side_flux(mesh, u, edge, 0, n);
    const Vec2 a = mesh.pos(ed.v[0]), b = mesh.pos(ed.v[1]);
    const double ua = u.coeffs[ed.v[0]], ub = u.coeffs[ed.v[1]];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const double t = rule.points[q];
        switch (ed.label) {
        case BoundaryLabel::Gamma0: values[q] = flux; break;
        case BoundaryLabel::GammaA: values[q] = spec.flux.eval(a + t * (b - a)) - flux; break;
        default: values[q] = spec.law.f(ua + t * (ub - ua)) + flux; break;
        }
    }
    return values;
}

EdgeQuantities edge_quantities(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u,
                               std::int32_t edge) {
    check_bound(u, mesh, "edge_quantities");
    const EdgeWork w = eval_edge(mesh, spec, u, edge);
    return {w.jump_sq, w.osc_sq};
}

namespace {

void accumulate_element(const Mesh& mesh, const std::vector<EdgeWork>& per_edge, std::int32_t t,
                        double& eta_sq, double& osc_sq) {
    const double h_t = std::sqrt(mesh.area(t));
    eta_sq = 0.0;
    osc_sq = 0.0;
    for (const std::int32_t e : mesh.tri_edges[t]) {
        const EdgeWork& w = per_edge[e];
        const double weight = mesh.is_boundary_edge(e) ? 1.0 : 0.5;
        eta_sq += weight * h_t * w.jump_sq;
        osc_sq += h_t * w.osc_sq;
    }
    // h_T^2 ||R_T||^2 term: div(sigma grad v) vanishes elementwise for P1
}

} // namespace

double local_indicator(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u, std::int32_t t) {
    check_bound(u, mesh, "local_indicator");
    const double h_t = std::sqrt(mesh.area(t));
    double eta_sq = 0.0;
    for (const std::int32_t e : mesh.tri_edges[t]) {
        const EdgeWork w = eval_edge(mesh, spec, u, e);
        eta_sq += (mesh.is_boundary_edge(e) ? 1.0 : 0.5) * h_t * w.jump_sq;
    }
    return eta_sq;
}

double local_oscillation(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u, std::int32_t t) {
    check_bound(u, mesh, "local_oscillation");
    const double h_t = std::sqrt(mesh.area(t));
    double osc_sq = 0.0;
    for (const std::int32_t e : mesh.tri_edges[t]) osc_sq += h_t * eval_edge(mesh, spec, u, e).osc_sq;
    return osc_sq;
}

IndicatorField compute_indicators(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u) {
    check_bound(u, mesh, "compute_indicators");
    IndicatorField field;
    field.mesh_generation = mesh.generation;

    std::vector<EdgeWork> per_edge(mesh.edges.size());
    parallel_blocks(mesh.edges.size(), 2048, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            per_edge[i] = eval_edge(mesh, spec, u, static_cast<std::int32_t>(i));
    });

    field.eta_sq.resize(mesh.triangles.size());
    field.osc_sq.resize(mesh.triangles.size());
    parallel_blocks(mesh.triangles.size(), 2048, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t)
            accumulate_element(mesh, per_edge, static_cast<std::int32_t>(t), field.eta_sq[t],
                               field.osc_sq[t]);
    });
    return field;
}

GlobalIndicator global_indicator(const IndicatorField& field) {
    GlobalIndicator g;
    for (const double v : field.eta_sq) g.eta_sq += v;
    for (const double v : field.osc_sq) g.osc_sq += v;
    return g;
}

GlobalIndicator global_indicator(const IndicatorField& field, std::span<const std::int32_t> subset) {
    std::vector<std::int32_t> ids(subset.begin(), subset.end());
    std::sort(ids.begin(), ids.end());
    GlobalIndicator g;
    for (const std::int32_t t : ids) {
        g.eta_sq += field.eta_sq.at(t);
        g.osc_sq += field.osc_sq.at(t);
    }
    return g;
}

void write_indicator_csv(const IndicatorField& field, std::ostream& os) {
    os << "element_id,eta_sq,osc_sq\n";
    char buf[80];
    for (std::size_t t = 0; t < field.eta_sq.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", t, field.eta_sq[t], field.osc_sq[t]);
        os << buf;
    }
}

} // namespace afem
