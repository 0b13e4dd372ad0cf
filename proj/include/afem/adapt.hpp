#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>

#include "afem/estimator.hpp"
#include "afem/solver.hpp"

namespace afem {

// Minimal-cardinality bulk marking: smallest element set whose squared
// indicators reach theta times the total. Sort-descending prefix with
// ascending-id tie break; deterministic.
std::vector<std::int32_t> doerfler_mark(std::span<const double> eta_sq, double theta);

struct AdaptiveConfig {
    double theta = 0.1;
    double tau = 1e-3; // stop once sum eta_T^2 <= tau
    NewtonOptions newton;
    RefineMode mode = RefineMode::AllEdges;
    int max_k = 200;
};

struct IterationRecord {
    int k = 0;
    std::int32_t n_elements = 0;
    std::int32_t dofs = 0;
    double eta_sq_sum = 0.0;
    double osc_sq_sum = 0.0;
    std::int32_t n_marked = 0;
    int newton_iterations = 0;
    double h1_err_sq = std::numeric_limits<double>::quiet_NaN(); // filled by the observer
    double energy = 0.0;
};

struct AdaptiveRun {
    AdaptiveConfig config;
    std::vector<IterationRecord> records;
    bool reached_tau = false;
    std::string abort_reason; // set when Newton fails to converge
};

// Called after SOLVE+ESTIMATE of every iteration; may fill rec.h1_err_sq.
using IterationObserver =
    std::function<void(int k, const Mesh& mesh, const FeFunction& u, const IndicatorField& field,
                       IterationRecord& rec)>;

// SOLVE -> ESTIMATE -> MARK -> REFINE until the estimator reaches tau or
// max_k iterations ran. Newton is warm-started by nodal interpolation from
// the previous mesh.
AdaptiveRun adaptive_loop(const ProblemSpec& spec, Mesh initial, const AdaptiveConfig& config,
                          const IterationObserver& observer = {});

// CSV columns: k,n_elem,dofs,eta_sq_sum,osc_sq_sum,n_marked,newton_iters,h1_err_sq,energy
void write_run_csv(const AdaptiveRun& run, std::ostream& os);
void write_records_csv(std::span<const IterationRecord> records, std::ostream& os);

} // namespace afem
