#include "afem/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "afem/parallel.hpp"

namespace afem {

namespace {

std::vector<Vec2> element_gradients_of(const Mesh& mesh, const FeFunction& u) {
    std::vector<Vec2> grads(mesh.triangles.size());
    for (std::int32_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        const auto g = mesh.basis_gradients(t);
        Vec2 grad{0.0, 0.0};
        for (int k = 0; k < 3; ++k) grad = grad + u.coeffs[tr.v[k]] * g[k];
        grads[t] = grad;
    }
    return grads;
}

} // namespace

ReferenceSolution reference_solve(const ProblemSpec& spec, double h_ref, double eps,
                                  bool log_progress) {
    const double inv = 1.0 / h_ref;
    const auto n = static_cast<std::int64_t>(std::llround(inv));
    if (n < 1 || std::abs(inv - static_cast<double>(n)) > 1e-9 * inv)
        throw std::invalid_argument("reference_solve: 1/h_ref must be an integer");

    // warm-start cascade: halve n while it stays integral
    std::vector<std::int64_t> levels{n};
    while (levels.back() % 2 == 0 && levels.back() > 2) levels.push_back(levels.back() / 2);
    std::reverse(levels.begin(), levels.end());

    NewtonOptions opts;
    opts.eps = eps;

    ReferenceSolution ref;
    ref.newton_eps = eps;
    ref.mesh = build_lshape_initial(1.0 / static_cast<double>(levels.front()),
                                    spec.boundary_partition, spec.sigma_default);
    ref.u = FeFunction::zeros(ref.mesh);
    for (std::size_t lvl = 0;; ++lvl) {
        NewtonReport report;
        std::tie(ref.u, report) = newton_solve(ref.mesh, spec, std::move(ref.u), opts);
        if (!report.converged)
            throw std::runtime_error("reference_solve: Newton failed at level 1/" +
                                     std::to_string(levels[lvl]));
        if (log_progress)
            std::fprintf(stderr, "reference: h=1/%lld dofs=%d newton=%d\n",
                         static_cast<long long>(levels[lvl]), ref.mesh.num_vertices(),
                         report.iterations);
        if (lvl + 1 == levels.size()) break;
        std::vector<std::int32_t> all(ref.mesh.num_triangles());
        std::iota(all.begin(), all.end(), 0);
        Mesh next = refine(ref.mesh, all, RefineMode::AllEdges);
        ref.u = interpolate(ref.u, next);
        ref.mesh = std::move(next);
    }
    ref.h1_norm = std::sqrt(h1_norm_sq(ref.mesh, ref.u));
    ref.energy = energy_functional(ref.mesh, spec, ref.u);
    ref.element_gradients = element_gradients_of(ref.mesh, ref.u);
    return ref;
}

ErrorVsReference h1_error_vs_reference(const Mesh& mesh, const FeFunction& u,
                                       const ReferenceSolution& ref) {
    check_bound(u, mesh, "h1_error_vs_reference");
    const PointLocator locator(mesh);
    const std::vector<Vec2> grads = element_gradients_of(mesh, u);

    // Degree-2 edge-midpoint rule on every reference element. Midpoints lie
    // on mesh edges where gradients are multivalued; nudging each sample a
    // hair towards the element centroid picks the limit from inside the
    // reference element on both meshes.
    constexpr double kNudge = 1e-9;
    const std::size_t nt = ref.mesh.triangles.size();
    constexpr std::size_t grain = 4096;
    std::vector<double> partial((nt + grain - 1) / grain, 0.0);
    parallel_blocks(nt, grain, [&](std::size_t blk, std::size_t tb, std::size_t te) {
        double acc = 0.0;
        PointLocation loc;
        for (std::size_t t = tb; t < te; ++t) {
            const auto& tr = ref.mesh.triangles[t];
            const Vec2 p0 = ref.mesh.pos(tr.v[0]), p1 = ref.mesh.pos(tr.v[1]),
                       p2 = ref.mesh.pos(tr.v[2]);
            const double u0 = ref.u.coeffs[tr.v[0]], u1 = ref.u.coeffs[tr.v[1]],
                         u2 = ref.u.coeffs[tr.v[2]];
            const Vec2 centroid = (1.0 / 3.0) * (p0 + p1 + p2);
            const Vec2 gr = ref.element_gradients[t];
            const Vec2 mids[3] = {0.5 * (p0 + p1), 0.5 * (p1 + p2), 0.5 * (p2 + p0)};
            const double umid[3] = {0.5 * (u0 + u1), 0.5 * (u1 + u2), 0.5 * (u2 + u0)};
            const double w = ref.mesh.area(static_cast<std::int32_t>(t)) / 3.0;
            for (int q = 0; q < 3; ++q) {
                const Vec2 x = mids[q] + kNudge * (centroid - mids[q]);
                if (!locator.try_locate(x, loc))
                    throw std::domain_error("h1_error_vs_reference: reference point outside mesh");
                const auto& atr = mesh.triangles[loc.tri];
                const double ua = loc.bary[0] * u.coeffs[atr.v[0]] +
                                  loc.bary[1] * u.coeffs[atr.v[1]] +
                                  loc.bary[2] * u.coeffs[atr.v[2]];
                const double ur = umid[q] + kNudge * dot(gr, centroid - mids[q]);
                const Vec2 dg = gr - grads[loc.tri];
                const double dv = ur - ua;
                acc += w * (dot(dg, dg) + dv * dv);
            }
        }
        partial[blk] = acc;
    });
    ErrorVsReference out;
    for (const double v : partial) out.abs_sq += v;
    out.rel = ref.h1_norm > 0.0 ? std::sqrt(out.abs_sq) / ref.h1_norm : std::sqrt(out.abs_sq);
    return out;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points, double window_decades) {
    if (points.size() < 6) throw std::invalid_argument("fit_rate: need at least 6 points");
    double n_max = 0.0;
    for (const auto& [n, q] : points) {
        if (!(n > 0.0) || !(q > 0.0))
            throw std::invalid_argument("fit_rate: points must be positive");
        n_max = std::max(n_max, n);
    }

    std::vector<std::pair<double, double>> window;
    double w = std::max(window_decades, 1e-3);
    for (;; w *= 1.5) {
        window.clear();
        const double n_lo = n_max * std::pow(10.0, -w);
        for (const auto& pt : points)
            if (pt.first >= n_lo) window.push_back(pt);
        double lo = n_max, hi = 0.0;
        for (const auto& pt : window) {
            lo = std::min(lo, pt.first);
            hi = std::max(hi, pt.first);
        }
        if ((window.size() >= 6 && hi / lo >= 10.0) || window.size() == points.size()) break;
    }
    if (window.size() < 2) throw std::invalid_argument("fit_rate: degenerate window");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, q] : window) {
        const double x = std::log10(n), y = std::log10(q);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(window.size());
    const double denom = m * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) throw std::invalid_argument("fit_rate: degenerate window");

    RateFit fit;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    fit.n_points = static_cast<int>(window.size());
    fit.n_min = window.front().first;
    fit.n_max = window.front().first;
    double ss = 0.0;
    for (const auto& [n, q] : window) {
        fit.n_min = std::min(fit.n_min, n);
        fit.n_max = std::max(fit.n_max, n);
        const double r = std::log10(q) - (fit.slope * std::log10(n) + fit.intercept);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / m);
    return fit;
}

ContractionFit contraction_search(std::span<const IterationRecord> records, double energy_ref,
                                  int k_min) {
    ContractionFit best;
    best.mu = std::numeric_limits<double>::infinity();
    std::vector<const IterationRecord*> tail;
    for (const auto& r : records)
        if (r.k >= k_min) tail.push_back(&r);
    if (tail.size() < 2) return best;

    for (int i = 0; i <= 80; ++i) {
        const double beta = std::pow(10.0, -6.0 + 0.1 * i);
        double mu = 0.0;
        bool valid = true;
        for (std::size_t k = 0; k + 1 < tail.size(); ++k) {
            const double a = (tail[k]->energy - energy_ref) + beta * tail[k]->eta_sq_sum;
            const double b = (tail[k + 1]->energy - energy_ref) + beta * tail[k + 1]->eta_sq_sum;
            if (!(a > 0.0) || !(b > 0.0)) {
                valid = false;
                break;
            }
            mu = std::max(mu, b / a);
        }
        if (valid && mu < best.mu) {
            best.beta = beta;
            best.mu = mu;
            best.valid = true;
        }
    }
    return best;
}

double closure_ratio_max(std::span<const IterationRecord> records) {
    if (records.empty()) return 0.0;
    double worst = 0.0;
    double marked_sum = 0.0;
    const double n0 = records.front().n_elements;
    for (std::size_t k = 1; k < records.size(); ++k) {
        marked_sum += records[k - 1].n_marked;
        if (marked_sum > 0.0)
            worst = std::max(worst, (records[k].n_elements - n0) / marked_sum);
    }
    return worst;
}

double snapshot_dof_target(int example) { return example == 2 ? 3070.0 : 3248.0; }

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const auto t_start = std::chrono::steady_clock::now();
    const ProblemSpec spec = example_config(config.example);

    ExperimentResult result;
    std::optional<ReferenceSolution> owned_ref;
    const ReferenceSolution* ref = config.reference;
    if (!ref) {
        owned_ref = reference_solve(spec, config.h_ref, config.reference_eps, config.log_progress);
        ref = &*owned_ref;
    }
    result.reference_h1_norm = ref->h1_norm;
    result.reference_energy = ref->energy;

    // adaptive run, errors against the reference at every iteration
    AdaptiveConfig acfg;
    acfg.theta = config.theta;
    acfg.tau = config.tau;
    acfg.newton.eps = config.newton_eps;
    acfg.mode = config.mode;
    acfg.max_k = config.max_k;
    Mesh initial = build_lshape_initial(config.h0, spec.boundary_partition, spec.sigma_default);
    Mesh final_mesh;
    FeFunction final_u;
    IndicatorField final_field;
    const auto observer = [&](int k, const Mesh& mesh, const FeFunction& u,
                              const IndicatorField& field, IterationRecord& rec) {
        rec.h1_err_sq = h1_error_vs_reference(mesh, u, *ref).abs_sq;
        if (config.write_vtk) {
            final_mesh = mesh;
            final_u = u;
            final_field = field;
        }
        if (config.log_progress)
            std::fprintf(stderr, "adaptive k=%d dofs=%d eta2=%.3e err2=%.3e\n", k,
                         mesh.num_vertices(), rec.eta_sq_sum, rec.h1_err_sq);
    };
    result.run = adaptive_loop(spec, std::move(initial), acfg, observer);
    if (!result.run.abort_reason.empty())
        throw std::runtime_error("run_experiment: " + result.run.abort_reason);

    // uniform-refinement baseline from the same initial mesh
    {
        Mesh mesh = build_lshape_initial(config.h0, spec.boundary_partition, spec.sigma_default);
        FeFunction u = FeFunction::zeros(mesh);
        NewtonOptions opts;
        opts.eps = config.newton_eps;
        for (int level = 0;; ++level) {
            NewtonReport report;
            std::tie(u, report) = newton_solve(mesh, spec, std::move(u), opts);
            if (!report.converged)
                throw std::runtime_error("run_experiment: uniform baseline Newton failed");
            const IndicatorField field = compute_indicators(mesh, spec, u);
            const GlobalIndicator global = global_indicator(field);
            IterationRecord rec;
            rec.k = level;
            rec.n_elements = mesh.num_triangles();
            rec.dofs = mesh.num_vertices();
            rec.eta_sq_sum = global.eta_sq;
            rec.osc_sq_sum = global.osc_sq;
            rec.newton_iterations = report.iterations;
            rec.energy = report.energies.back();
            rec.h1_err_sq = h1_error_vs_reference(mesh, u, *ref).abs_sq;
            result.uniform.push_back(rec);
            if (config.log_progress)
                std::fprintf(stderr, "uniform level=%d dofs=%d err2=%.3e\n", level, rec.dofs,
                             rec.h1_err_sq);
            if (static_cast<std::int64_t>(mesh.num_vertices()) * 4 > config.uniform_dof_cap) break;
            std::vector<std::int32_t> all(mesh.num_triangles());
            std::iota(all.begin(), all.end(), 0);
            Mesh next = refine(mesh, all, RefineMode::AllEdges);
            u = interpolate(u, next);
            mesh = std::move(next);
        }
    }

    // rate fits: estimator and error over the trailing window, uniform over everything
    std::vector<std::pair<double, double>> eta_pts, err_pts, uni_pts;
    for (const auto& r : result.run.records) {
        eta_pts.emplace_back(r.dofs, std::sqrt(r.eta_sq_sum));
        err_pts.emplace_back(r.dofs, std::sqrt(r.h1_err_sq));
    }
    for (const auto& r : result.uniform) uni_pts.emplace_back(r.dofs, std::sqrt(r.h1_err_sq));
    result.eta_fit = fit_rate(eta_pts, config.fit_window_decades);
    result.err_fit_full = fit_rate(err_pts, config.fit_window_decades);
    result.uniform_fit = fit_rate(uni_pts, 99.0);

    // The measured error bottoms out at the reference's own accuracy. Its
    // scale follows from extrapolating the uniform baseline to the reference
    // dof count; trailing records inside 3x that floor measure the reference,
    // not the adaptive method, and are excluded from the error-rate fit.
    result.error_floor = std::pow(
        10.0, result.uniform_fit.intercept +
                  result.uniform_fit.slope * std::log10(static_cast<double>(ref->mesh.num_vertices())));
    std::vector<std::pair<double, double>> err_clean;
    for (const auto& [n, e] : err_pts)
        if (e * e >= 9.0 * result.error_floor * result.error_floor) err_clean.emplace_back(n, e);
    result.err_points_excluded = static_cast<int>(err_pts.size() - err_clean.size());
    result.err_fit =
        err_clean.size() >= 6 ? fit_rate(err_clean, config.fit_window_decades) : result.err_fit_full;

    result.contraction = contraction_search(result.run.records, result.reference_energy);
    result.closure_max = closure_ratio_max(result.run.records);

    bool first = true;
    for (const auto& r : result.run.records) {
        if (r.k < 5) continue;
        const double ratio = r.h1_err_sq / r.eta_sq_sum;
        if (first) {
            result.effectivity_min = result.effectivity_max = ratio;
            first = false;
        } else {
            result.effectivity_min = std::min(result.effectivity_min, ratio);
            result.effectivity_max = std::max(result.effectivity_max, ratio);
        }
    }

    const double target = snapshot_dof_target(config.example);
    double best_gap = std::numeric_limits<double>::infinity();
    for (const auto& r : result.run.records) {
        const double gap = std::abs(r.dofs - target);
        if (gap < best_gap) {
            best_gap = gap;
            result.snapshot_dof = r.dofs;
            result.snapshot_rel_err = std::sqrt(r.h1_err_sq) / ref->h1_norm;
        }
    }

    result.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    if (!config.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(config.out_dir);
        {
            std::ofstream os(config.out_dir + "/run.csv");
            write_run_csv(result.run, os);
        }
        {
            std::ofstream os(config.out_dir + "/uniform.csv");
            write_records_csv(result.uniform, os);
        }
        {
            std::ofstream os(config.out_dir + "/rates.txt");
            write_rates_report(result, config, os);
        }
        std::vector<PlotSeries> series;
        series.push_back({"estimator (adaptive)", "#1f77b4", false, eta_pts});
        series.push_back({"H1 error (adaptive)", "#d62728", false, err_pts});
        series.push_back({"H1 error (uniform)", "#2ca02c", false, uni_pts});
        auto fit_series = [](const RateFit& fit) {
            char label[48];
            std::snprintf(label, sizeof label, "slope %.2f", fit.slope);
            PlotSeries s{label, "#555555", true, {}};
            s.points.emplace_back(fit.n_min,
                                  std::pow(10.0, fit.intercept + fit.slope * std::log10(fit.n_min)));
            s.points.emplace_back(fit.n_max,
                                  std::pow(10.0, fit.intercept + fit.slope * std::log10(fit.n_max)));
            return s;
        };
        series.push_back(fit_series(result.eta_fit));
        series.push_back(fit_series(result.err_fit));
        series.push_back(fit_series(result.uniform_fit));
        write_loglog_svg(config.out_dir + "/convergence.svg", "dofs", "estimator / H1 error", series);
        if (config.write_vtk && final_mesh.num_vertices() > 0) {
            write_vtk(final_mesh, config.out_dir + "/final_mesh.vtk", &final_u.coeffs);
            std::ofstream os(config.out_dir + "/indicators.csv");
            write_indicator_csv(final_field, os);
        }
    }
    return result;
}

void write_rates_report(const ExperimentResult& result, const ExperimentConfig& config,
                        std::ostream& os) {
    char buf[256];
    auto line = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        os << buf << "\n";
    };
    line("example %d  theta %.3g  tau %.3g  mode %s  h0 %.6g  h_ref %.6g", config.example,
         config.theta, config.tau, to_string(config.mode), config.h0, config.h_ref);
    line("iterations %zu  final_k %d  reached_tau %d", result.run.records.size(),
         result.run.records.empty() ? -1 : result.run.records.back().k,
         result.run.reached_tau ? 1 : 0);
    line("estimator_slope %.6f  (window %g..%g, %d points, rms %.3g)", result.eta_fit.slope,
         result.eta_fit.n_min, result.eta_fit.n_max, result.eta_fit.n_points,
         result.eta_fit.residual);
    line("adaptive_error_slope %.6f  (window %g..%g, %d points, rms %.3g)", result.err_fit.slope,
         result.err_fit.n_min, result.err_fit.n_max, result.err_fit.n_points,
         result.err_fit.residual);
    line("adaptive_error_slope_full_window %.6f  (reference floor ~%.3g, %d trailing points excluded)",
         result.err_fit_full.slope, result.error_floor, result.err_points_excluded);
    line("uniform_error_slope %.6f  (window %g..%g, %d points, rms %.3g)", result.uniform_fit.slope,
         result.uniform_fit.n_min, result.uniform_fit.n_max, result.uniform_fit.n_points,
         result.uniform_fit.residual);
    line("contraction beta %.6g  mu %.6f  valid %d", result.contraction.beta, result.contraction.mu,
         result.contraction.valid ? 1 : 0);
    line("closure_ratio_max %.6f", result.closure_max);
    line("effectivity_band %.6g .. %.6g  (err^2/eta^2, k >= 5)", result.effectivity_min,
         result.effectivity_max);
    line("snapshot dof %g  rel_h1_error %.6f", result.snapshot_dof, result.snapshot_rel_err);
    line("reference_h1_norm %.12g  reference_energy %.12g", result.reference_h1_norm,
         result.reference_energy);
}

} // namespace afem
