#include "afem/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace afem {

FeFunction FeFunction::zeros(const Mesh& mesh) {
    FeFunction u;
    u.generation = mesh.generation;
    u.coeffs.assign(mesh.vertices.size(), 0.0);
    return u;
}

void check_bound(const FeFunction& u, const Mesh& mesh, const char* where) {
    if (u.generation != mesh.generation ||
        u.coeffs.size() != static_cast<std::size_t>(mesh.num_vertices()))
        throw std::invalid_argument(std::string(where) + ": function not bound to this mesh");
}

void write_fe_function(const FeFunction& u, std::ostream& os) {
    os << "afem-fn v1\n" << u.generation << " " << u.coeffs.size() << "\n";
    char buf[32];
    for (const double v : u.coeffs) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << "\n";
    }
}

FeFunction read_fe_function(std::istream& is) {
    std::string magic, version;
    is >> magic >> version;
    if (magic != "afem-fn" || version != "v1") throw std::runtime_error("afem-fn: bad header");
    FeFunction u;
    std::size_t n = 0;
    is >> u.generation >> n;
    u.coeffs.resize(n);
    for (auto& v : u.coeffs) is >> v;
    if (!is) throw std::runtime_error("afem-fn: truncated file");
    return u;
}

std::array<std::array<double, 3>, 3> element_stiffness(Vec2 p0, Vec2 p1, Vec2 p2, double sigma) {
    const double a2 = signed_area2(p0, p1, p2);
    if (!(a2 > 0.0)) throw std::invalid_argument("element_stiffness: degenerate triangle");
    const Vec2 g[3] = {{(p1.y - p2.y) / a2, (p2.x - p1.x) / a2},
                       {(p2.y - p0.y) / a2, (p0.x - p2.x) / a2},
                       {(p0.y - p1.y) / a2, (p1.x - p0.x) / a2}};
    std::array<std::array<double, 3>, 3> k{};
    const double area = 0.5 * a2;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) k[i][j] = sigma * area * dot(g[i], g[j]);
    return k;
}

Assembler::Assembler(const Mesh& mesh, const ProblemSpec& spec)
    : mesh_(mesh), spec_(spec), rule_c_(edge_gauss_rule(spec.law.is_cubic() ? 3 : 7)) {
    stiffness_ = vertex_pattern(mesh);
    for (std::int32_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        const auto k =
            element_stiffness(mesh.pos(tr.v[0]), mesh.pos(tr.v[1]), mesh.pos(tr.v[2]), tr.sigma);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) stiffness_.at(tr.v[i], tr.v[j]) += k[i][j];
    }

    load_a_.assign(mesh.vertices.size(), 0.0);
    const QuadratureRule rule_a = edge_gauss_rule(7);
    for (std::int32_t e = 0; e < mesh.num_edges(); ++e) {
        const Edge& ed = mesh.edges[e];
        if (ed.label == BoundaryLabel::GammaC) cathode_edges_.push_back(e);
        if (ed.label != BoundaryLabel::GammaA) continue;
        const Vec2 a = mesh.pos(ed.v[0]), b = mesh.pos(ed.v[1]);
        const double len = norm(b - a);
        for (std::size_t q = 0; q < rule_a.points.size(); ++q) {
            const double t = rule_a.points[q];
            const double w = len * rule_a.weights[q];
            const double g = spec.flux.eval(a + t * (b - a));
            load_a_[ed.v[0]] += w * g * (1.0 - t);
            load_a_[ed.v[1]] += w * g * t;
        }
    }
}

std::vector<double> Assembler::residual(const FeFunction& u) const {
    check_bound(u, mesh_, "assemble_residual");
    std::vector<double> g(u.coeffs.size());
    stiffness_.multiply(u.coeffs.data(), g.data());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= load_a_[i];
    for (const std::int32_t e : cathode_edges_) {
        const Edge& ed = mesh_.edges[e];
        const double ua = u.coeffs[ed.v[0]], ub = u.coeffs[ed.v[1]];
        const double len = mesh_.edge_length(e);
        double fa = 0.0, fb = 0.0;
        for (std::size_t q = 0; q < rule_c_.points.size(); ++q) {
            const double t = rule_c_.points[q];
            const double fv = spec_.law.f(ua + t * (ub - ua));
            fa += rule_c_.weights[q] * fv * (1.0 - t);
            fb += rule_c_.weights[q] * fv * t;
        }
        g[ed.v[0]] += len * fa;
        g[ed.v[1]] += len * fb;
    }
    return g;
}

SparseMatrix Assembler::jacobian(const FeFunction& u) const {
    check_bound(u, mesh_, "assemble_jacobian");
    SparseMatrix j = stiffness_;
    for (const std::int32_t e : cathode_edges_) {
        const Edge& ed = mesh_.edges[e];
        const double ua = u.coeffs[ed.v[0]], ub = u.coeffs[ed.v[1]];
        const double len = mesh_.edge_length(e);
        double m00 = 0.0, m01 = 0.0, m11 = 0.0;
        for (std::size_t q = 0; q < rule_c_.points.size(); ++q) {
            const double t = rule_c_.points[q];
            const double fp = rule_c_.weights[q] * spec_.law.f_prime(ua + t * (ub - ua));
            m00 += fp * (1.0 - t) * (1.0 - t);
            m01 += fp * (1.0 - t) * t;
            m11 += fp * t * t;
        }
        j.at(ed.v[0], ed.v[0]) += len * m00;
        j.at(ed.v[0], ed.v[1]) += len * m01;
        j.at(ed.v[1], ed.v[0]) += len * m01;
        j.at(ed.v[1], ed.v[1]) += len * m11;
    }
    return j;
}

double Assembler::energy(const FeFunction& u) const {
    check_bound(u, mesh_, "energy_functional");
    double acc = 0.0;
    for (std::int32_t t = 0; t < mesh_.num_triangles(); ++t) {
        const auto& tr = mesh_.triangles[t];
        const auto g = mesh_.basis_gradients(t);
        Vec2 grad{0.0, 0.0};
        for (int k = 0; k < 3; ++k) grad = grad + u.coeffs[tr.v[k]] * g[k];
        acc += 0.5 * tr.sigma * mesh_.area(t) * dot(grad, grad);
    }
    for (const std::int32_t e : cathode_edges_) {
        const Edge& ed = mesh_.edges[e];
        const double ua = u.coeffs[ed.v[0]], ub = u.coeffs[ed.v[1]];
        const double len = mesh_.edge_length(e);
        double s = 0.0;
        for (std::size_t q = 0; q < rule_c_.points.size(); ++q)
            s += rule_c_.weights[q] *
                 spec_.law.antiderivative(ua + rule_c_.points[q] * (ub - ua));
        acc += len * s;
    }
    // int_{GammaA} g u = u . load (exact for nodal u)
    for (std::size_t i = 0; i < u.coeffs.size(); ++i) acc -= load_a_[i] * u.coeffs[i];
    return acc;
}

std::vector<double> assemble_residual(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u) {
    return Assembler(mesh, spec).residual(u);
}

SparseMatrix assemble_jacobian(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u) {
    return Assembler(mesh, spec).jacobian(u);
}

double energy_functional(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u) {
    return Assembler(mesh, spec).energy(u);
}

double h1_seminorm_sq(const Mesh& mesh, const FeFunction& u) {
    check_bound(u, mesh, "h1_seminorm_sq");
    double acc = 0.0;
    for (std::int32_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        const auto g = mesh.basis_gradients(t);
        Vec2 grad{0.0, 0.0};
        for (int k = 0; k < 3; ++k) grad = grad + u.coeffs[tr.v[k]] * g[k];
        acc += mesh.area(t) * dot(grad, grad);
    }
    return acc;
}

double h1_norm_sq(const Mesh& mesh, const FeFunction& u) {
    check_bound(u, mesh, "h1_norm_sq");
    // edge-midpoint rule integrates the square of a P1 function exactly
    double l2 = 0.0;
    for (std::int32_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        const double u0 = u.coeffs[tr.v[0]], u1 = u.coeffs[tr.v[1]], u2 = u.coeffs[tr.v[2]];
        const double m01 = 0.5 * (u0 + u1), m12 = 0.5 * (u1 + u2), m20 = 0.5 * (u2 + u0);
        l2 += mesh.area(t) / 3.0 * (m01 * m01 + m12 * m12 + m20 * m20);
    }
    return h1_seminorm_sq(mesh, u) + l2;
}

double flux_l2_sq(const Mesh& mesh, const ProblemSpec& spec) {
    const QuadratureRule rule = edge_gauss_rule(12);
    double acc = 0.0;
    for (std::int32_t e = 0; e < mesh.num_edges(); ++e) {
        const Edge& ed = mesh.edges[e];
        if (ed.label != BoundaryLabel::GammaA) continue;
        const Vec2 a = mesh.pos(ed.v[0]), b = mesh.pos(ed.v[1]);
        const double len = norm(b - a);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double g = spec.flux.eval(a + rule.points[q] * (b - a));
            acc += len * rule.weights[q] * g * g;
        }
    }
    return acc;
}

} // namespace afem
