#include "afem/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "afem/kernels.hpp"

namespace afem {

CgResult linear_solve(const SparseMatrix& a, const std::vector<double>& b, double tol) {
    if (a.n != static_cast<std::int32_t>(b.size()))
        throw std::invalid_argument("linear_solve: dimension mismatch");
    const std::size_t n = b.size();
    CgResult out;
    out.x.assign(n, 0.0);
    const double bnorm = std::sqrt(kernels::dot(b.data(), b.data(), n));
    if (bnorm == 0.0) return out;

    std::vector<double> dinv(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a.get(static_cast<std::int32_t>(i), static_cast<std::int32_t>(i));
        if (!(d > 0.0)) throw std::runtime_error("linear_solve: non-positive diagonal, matrix not SPD");
        dinv[i] = 1.0 / d;
    }

    std::vector<double> r = b, z(n), p(n), q(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    p = z;
    double rz = kernels::dot(r.data(), z.data(), n);
    const long max_iter = 10L * static_cast<long>(n);

    for (long it = 1; it <= max_iter; ++it) {
        const double pq = a.multiply_dot(p.data(), q.data());
        if (!(pq > 0.0)) throw std::runtime_error("linear_solve: breakdown, p'Ap <= 0");
        const double alpha = rz / pq;
        const auto upd = kernels::cg_update_range(0, n, alpha, p.data(), q.data(), dinv.data(),
                                                  out.x.data(), r.data(), z.data());
        out.iterations = static_cast<int>(it);
        out.rel_residual = std::sqrt(upd.rr) / bnorm;
        if (out.rel_residual <= tol) return out;
        kernels::aypx(upd.rz / rz, z.data(), p.data(), n);
        rz = upd.rz;
    }
    throw std::runtime_error("linear_solve: iteration cap exceeded (10 * dim)");
}

std::pair<FeFunction, NewtonReport> newton_solve(const Mesh& mesh, const ProblemSpec& spec,
                                                 FeFunction u0, const NewtonOptions& opts) {
    check_bound(u0, mesh, "newton_solve");
    if (!(opts.eps > 0.0)) throw std::invalid_argument("newton_solve: eps must be positive");

    const Assembler assembler(mesh, spec);
    FeFunction u = std::move(u0);
    NewtonReport report;
    report.energies.push_back(assembler.energy(u));

    FeFunction step;
    step.generation = mesh.generation;
    for (int n = 1; n <= opts.max_iter; ++n) {
        std::vector<double> g = assembler.residual(u);
        for (auto& v : g) v = -v;
        const SparseMatrix j = assembler.jacobian(u);
        CgResult cg = linear_solve(j, g, opts.cg_tol);
        kernels::axpy(1.0, cg.x.data(), u.coeffs.data(), u.coeffs.size());

        step.coeffs = std::move(cg.x);
        report.iterations = n;
        report.inner_iterations.push_back(cg.iterations);
        report.energies.push_back(assembler.energy(u));
        report.final_step_h1 = std::sqrt(h1_norm_sq(mesh, step));
        if (report.final_step_h1 <= opts.eps) {
            report.converged = true;
            break;
        }
    }

    double rmax = 0.0;
    for (const double v : assembler.residual(u)) rmax = std::max(rmax, std::abs(v));
    report.final_residual_inf = rmax;
    return {std::move(u), std::move(report)};
}

FeFunction interpolate(const FeFunction& coarse, const Mesh& fine_mesh) {
    if (coarse.generation != fine_mesh.parent_generation ||
        coarse.coeffs.size() != static_cast<std::size_t>(fine_mesh.parent_vertex_count))
        throw std::invalid_argument("interpolate: mesh is not a refinement of the function's mesh");
    FeFunction out;
    out.generation = fine_mesh.generation;
    out.coeffs = coarse.coeffs;
    out.coeffs.reserve(fine_mesh.vertices.size());
    for (const auto& parents : fine_mesh.midpoint_parents)
        out.coeffs.push_back(0.5 * (coarse.coeffs[parents[0]] + coarse.coeffs[parents[1]]));
    return out;
}

} // namespace afem
