#pragma once

#include <utility>
#include <vector>

#include "afem/assembly.hpp"

namespace afem {

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    double rel_residual = 0.0;
};

// Jacobi-preconditioned conjugate gradient for SPD systems. Stops when
// ||b - A x|| <= tol * ||b||; throws on indefiniteness or when 10*n
// iterations are exceeded.
CgResult linear_solve(const SparseMatrix& a, const std::vector<double>& b, double tol = 1e-12);

struct NewtonOptions {
    double eps = 1e-7; // H1 norm of the increment
    int max_iter = 50;
    double cg_tol = 1e-12;
};

struct NewtonReport {
    int iterations = 0;
    double final_step_h1 = 0.0;
    bool converged = false;
    std::vector<int> inner_iterations;
    std::vector<double> energies; // J(u) after each applied increment; [0] is J(u0)
    double final_residual_inf = 0.0;
};

// Plain Newton iteration u <- u - J(u)^{-1} G(u); stops once the H1 norm of
// the increment drops to eps. Non-convergence is reported via the flag.
std::pair<FeFunction, NewtonReport> newton_solve(const Mesh& mesh, const ProblemSpec& spec,
                                                 FeFunction u0, const NewtonOptions& opts = {});

// Nodal transfer onto a mesh produced from u's mesh by refine(): surviving
// vertices copy their value, bisection midpoints average their parent edge.
FeFunction interpolate(const FeFunction& coarse, const Mesh& fine_mesh);

} // namespace afem
