#pragma once

#include <iosfwd>
#include <span>

#include "afem/assembly.hpp"

namespace afem {

// Per-element squared indicator and oscillation for one mesh/solution pair.
struct IndicatorField {
    int mesh_generation = 0;
    std::vector<double> eta_sq;
    std::vector<double> osc_sq;
};

struct GlobalIndicator {
    double eta_sq = 0.0;
    double osc_sq = 0.0;
};

// Edge residual J_F of v at the given quadrature points:
//   interior:  [sigma grad(v) . n_F]           (fixed normal, out of tri[0])
//   Gamma0:    sigma grad(v) . n
//   GammaA:    g - sigma grad(v) . n
//   GammaC:    f(v) + sigma grad(v) . n
std::vector<double> edge_residual(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u,
                                  std::int32_t edge, const QuadratureRule& rule);

// ||J_F||^2_{L2(F)} and ||J_F - pi(J_F)||^2_{L2(F)} where pi projects onto
// P0, except on GammaC edges under the cubic law where the degree is 3 (the
// residual itself is cubic there, so that oscillation vanishes).
struct EdgeQuantities {
    double jump_sq = 0.0;
    double osc_sq = 0.0;
};
EdgeQuantities edge_quantities(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u,
                               std::int32_t edge);

// eta_T^2 = h_T^2 ||R_T||^2 + 1/2 sum_{interior F in dT} h_T ||J_F||^2
//                           +     sum_{boundary F in dT} h_T ||J_F||^2
// with h_T = sqrt(|T|). R_T = div(sigma grad v) vanishes identically for P1
// elements with per-element-constant sigma.
double local_indicator(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u, std::int32_t t);

// osc_T^2 = h_T^2 ||R_T - mean||^2 + sum_{F in dT} h_T ||J_F - pi(J_F)||^2.
double local_oscillation(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u, std::int32_t t);

// Whole-mesh sweep; one edge pass shared by all elements.
IndicatorField compute_indicators(const Mesh& mesh, const ProblemSpec& spec, const FeFunction& u);

GlobalIndicator global_indicator(const IndicatorField& field);
GlobalIndicator global_indicator(const IndicatorField& field, std::span<const std::int32_t> subset);

// CSV dump: element_id, eta_sq, osc_sq.
void write_indicator_csv(const IndicatorField& field, std::ostream& os);

} // namespace afem
