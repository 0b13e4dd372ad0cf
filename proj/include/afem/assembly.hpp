#pragma once

#include <array>

#include "afem/fe_function.hpp"
#include "afem/mesh.hpp"
#include "afem/problem.hpp"
#include "afem/quadrature.hpp"
#include "afem/sparse.hpp"

namespace afem {

// Exact P1 element stiffness sigma * |T| * grad(phi_i) . grad(phi_j).
std::array<std::array<double, 3>, 3> element_stiffness(Vec2 p0, Vec2 p1, Vec2 p2, double sigma);

// Caches everything that does not depend on the iterate: the stiffness
// matrix, the anode load vector and the cathode edge list. Newton reuses one
// instance across its iterations; the free functions below build a fresh one.
class Assembler {
public:
    Assembler(const Mesh& mesh, const ProblemSpec& spec);

    const Mesh& mesh() const { return mesh_; }
    const SparseMatrix& stiffness() const { return stiffness_; }
    const std::vector<double>& anode_load() const { return load_a_; }

    // G(u)_i = int sigma grad(u).grad(phi_i) + int_{GammaC} f(u) phi_i - int_{GammaA} g phi_i
    std::vector<double> residual(const FeFunction& u) const;
    // J(u) = stiffness + int_{GammaC} f'(u) phi_i phi_j
    SparseMatrix jacobian(const FeFunction& u) const;
    // J(v) = 1/2 int sigma |grad v|^2 + int_{GammaC} F(v) - int_{GammaA} g v
    double energy(const FeFunction& u) const;

private:
    const Mesh& mesh_;
    const ProblemSpec& spec_;
    SparseMatrix stiffness_;
    std::vector<double> load_a_;
    std::vector<std::int32_t> cathode_edges_;
    QuadratureRule rule_c_; // 3-point for the cubic law (exact), 7-point for Butler-Volmer
};

std::vector<double> assemble_residual(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u);
SparseMatrix assemble_jacobian(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u);
double energy_functional(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u);

double h1_seminorm_sq(const Mesh& mesh, const FeFunction& u);
double h1_norm_sq(const Mesh& mesh, const FeFunction& u);

// ||g||^2 over the GammaA part of the boundary.
double flux_l2_sq(const Mesh& mesh, const ProblemSpec& spec);

} // namespace afem
