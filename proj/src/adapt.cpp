#include "afem/adapt.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace afem {

std::vector<std::int32_t> doerfler_mark(std::span<const double> eta_sq, double theta) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("doerfler_mark: theta must lie in (0, 1]");
    double total = 0.0;
    for (const double v : eta_sq) {
        if (v < 0.0) throw std::invalid_argument("doerfler_mark: negative indicator");
        total += v;
    }
    if (!(total > 0.0)) return {};

    std::vector<std::int32_t> order(eta_sq.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        if (eta_sq[a] != eta_sq[b]) return eta_sq[a] > eta_sq[b];
        return a < b;
    });

    const double target = theta * total;
    std::vector<std::int32_t> marked;
    double acc = 0.0;
    for (const std::int32_t id : order) {
        if (eta_sq[id] <= 0.0) break; // zero indicators can never help
        marked.push_back(id);
        acc += eta_sq[id];
        if (acc >= target) break;
    }
    std::sort(marked.begin(), marked.end());
    return marked;
}

AdaptiveRun adaptive_loop(const ProblemSpec& spec, Mesh initial, const AdaptiveConfig& config,
                          const IterationObserver& observer) {
    if (!(config.tau > 0.0)) throw std::invalid_argument("adaptive_loop: tau must be positive");
    AdaptiveRun run;
    run.config = config;

    Mesh mesh = std::move(initial);
    FeFunction u = FeFunction::zeros(mesh);
    for (int k = 0; k <= config.max_k; ++k) {
        NewtonReport newton;
        std::tie(u, newton) = newton_solve(mesh, spec, std::move(u), config.newton);
        if (!newton.converged) {
            run.abort_reason = "Newton did not converge within " +
                               std::to_string(config.newton.max_iter) + " iterations at k = " +
                               std::to_string(k);
            break;
        }
        const IndicatorField field = compute_indicators(mesh, spec, u);
        const GlobalIndicator global = global_indicator(field);

        IterationRecord rec;
        rec.k = k;
        rec.n_elements = mesh.num_triangles();
        rec.dofs = mesh.num_vertices();
        rec.eta_sq_sum = global.eta_sq;
        rec.osc_sq_sum = global.osc_sq;
        rec.newton_iterations = newton.iterations;
        rec.energy = newton.energies.back();
        if (observer) observer(k, mesh, u, field, rec);

        if (global.eta_sq <= config.tau) {
            run.records.push_back(rec);
            run.reached_tau = true;
            break;
        }
        if (k == config.max_k) {
            run.records.push_back(rec);
            break;
        }

        const std::vector<std::int32_t> marked = doerfler_mark(field.eta_sq, config.theta);
        rec.n_marked = static_cast<std::int32_t>(marked.size());
        run.records.push_back(rec);

        Mesh next = refine(mesh, marked, config.mode);
        u = interpolate(u, next);
        mesh = std::move(next);
    }
    return run;
}

void write_records_csv(std::span<const IterationRecord> records, std::ostream& os) {
    os << "k,n_elem,dofs,eta_sq_sum,osc_sq_sum,n_marked,newton_iters,h1_err_sq,energy\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%d,%d,%.17g,%.17g\n", r.k, r.n_elements,
                      r.dofs, r.eta_sq_sum, r.osc_sq_sum, r.n_marked, r.newton_iterations,
                      r.h1_err_sq, r.energy);
        os << buf;
    }
}

void write_run_csv(const AdaptiveRun& run, std::ostream& os) { write_records_csv(run.records, os); }

} // namespace afem
