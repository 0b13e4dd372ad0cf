#pragma once

#include <optional>
#include <string>
#include <utility>

#include "afem/adapt.hpp"

namespace afem {

// Converged solution on a fine uniform mesh, used as ground truth.
struct ReferenceSolution {
    Mesh mesh;
    FeFunction u;
    double newton_eps = 1e-11;
    double h1_norm = 0.0;  // ||u||_{H1}
    double energy = 0.0;   // J(u)
    std::vector<Vec2> element_gradients;
};

// Uniform mesh of size h_ref solved to eps, warm-started through a cascade
// of uniformly refined meshes. Requires 1/h_ref integral.
ReferenceSolution reference_solve(const ProblemSpec& spec, double h_ref, double eps = 1e-11,
                                  bool log_progress = false);

struct ErrorVsReference {
    double abs_sq = 0.0; // ||u_ref - u||^2_{H1}, integrated on the reference mesh
    double rel = 0.0;    // sqrt(abs_sq) / ||u_ref||_{H1}
};

ErrorVsReference h1_error_vs_reference(const Mesh& mesh, const FeFunction& u,
                                       const ReferenceSolution& ref);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;       // log10 Q = slope * log10 N + intercept
    double n_min = 0.0, n_max = 0.0;
    int n_points = 0;
    double residual = 0.0;        // rms of log10 residuals
};

// Least-squares slope of log10 Q against log10 N over the trailing
// `window_decades` of N; the window widens until it holds at least six
// points spanning a decade. Requires >= 6 positive data points in total.
RateFit fit_rate(std::span<const std::pair<double, double>> points, double window_decades = 1.0);

struct ContractionFit {
    double beta = 0.0;
    double mu = 0.0;   // max ratio of E_k + beta eta_k^2 over consecutive iterations
    bool valid = false; // all tested quantities were positive
};

// Searches beta over a log grid in [1e-6, 1e2] minimizing the worst
// consecutive ratio of E_k + beta eta_k^2, for k >= k_min.
ContractionFit contraction_search(std::span<const IterationRecord> records, double energy_ref,
                                  int k_min = 2);

// max over k of (#T_k - #T_0) / sum_{j<k} #M_j
double closure_ratio_max(std::span<const IterationRecord> records);

struct ExperimentConfig {
    int example = 1;
    double theta = 0.1;
    double tau = 1e-3;
    RefineMode mode = RefineMode::AllEdges;
    double h0 = 0.2;              // initial mesh size
    double h_ref = 1.0 / 512.0;   // reference mesh size
    double newton_eps = 1e-7;
    double reference_eps = 1e-11;
    int max_k = 200;
    std::int32_t uniform_dof_cap = 100000; // last uniform baseline level
    double fit_window_decades = 1.0;
    std::string out_dir;          // empty = no files
    bool write_vtk = false;
    bool log_progress = false;
    const ReferenceSolution* reference = nullptr; // reuse a precomputed reference
};

struct ExperimentResult {
    AdaptiveRun run;
    std::vector<IterationRecord> uniform;
    RateFit eta_fit;       // sqrt(sum eta^2) vs dofs
    RateFit err_fit;       // H1 error vs dofs, floor-limited records excluded
    RateFit err_fit_full;  // same fit over every record
    RateFit uniform_fit;   // H1 error vs dofs, uniform baseline
    double error_floor = 0.0;    // estimated H1 error of the reference itself
    int err_points_excluded = 0; // trailing records inside 3x the floor
    ContractionFit contraction;
    double closure_max = 0.0;
    double effectivity_min = 0.0, effectivity_max = 0.0; // err^2/eta^2 over k >= 5
    double reference_h1_norm = 0.0;
    double reference_energy = 0.0;
    double snapshot_dof = 0.0, snapshot_rel_err = 0.0; // record nearest snapshot_target
    double runtime_seconds = 0.0;
};

// Full protocol for one configuration: adaptive run with per-iteration
// errors against the reference, uniform-refinement baseline, rate fits and
// report files (run.csv, uniform.csv, rates.txt, convergence.svg).
ExperimentResult run_experiment(const ExperimentConfig& config);

// Snapshot dof targets used in the reports (3248 for example 1, 3070 for 2).
double snapshot_dof_target(int example);

void write_rates_report(const ExperimentResult& result, const ExperimentConfig& config,
                        std::ostream& os);

struct PlotSeries {
    std::string name;
    std::string color;
    bool dashed = false;
    std::vector<std::pair<double, double>> points; // (N, Q), log-log
};

void write_loglog_svg(const std::string& path, const std::string& x_label,
                      const std::string& y_label, std::span<const PlotSeries> series);

} // namespace afem
