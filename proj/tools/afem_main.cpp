// afem: adaptive FEM driver for the cathodic-protection model problem.
//
//   afem run        adaptive + uniform experiment, reports and plots
//   afem reference  fine uniform reference solve
//   afem rates      slope fits for an existing run CSV
//   afem mesh-check conformity / quality report for a mesh file

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "afem/bench.hpp"
#include "afem/kernels.hpp"

namespace {

afem::ProblemSpec load_spec(int example, const std::string& config_path) {
    if (config_path.empty()) return afem::example_config(example);
    std::ifstream is(config_path);
    if (!is) throw std::runtime_error("cannot open config file " + config_path);
    return afem::parse_problem_config(is);
}

int cmd_run(int example, double theta, double tau, const std::string& mode_text,
            const std::string& out_dir, double h0, double h_ref, int max_k, bool vtk,
            const std::string& config_path, bool quiet) {
    afem::ExperimentConfig config;
    config.example = example;
    config.theta = theta;
    config.tau = tau;
    config.mode = afem::parse_refine_mode(mode_text);
    config.h0 = h0;
    config.h_ref = h_ref;
    config.max_k = max_k;
    config.out_dir = out_dir;
    config.write_vtk = vtk;
    config.log_progress = !quiet;

    std::optional<afem::ReferenceSolution> ref;
    if (!config_path.empty()) {
        // config overrides replace the bundled example; solve the reference on them
        const afem::ProblemSpec spec = load_spec(example, config_path);
        ref = afem::reference_solve(spec, h_ref, config.reference_eps, !quiet);
        config.reference = &*ref;
    }

    const afem::ExperimentResult result = afem::run_experiment(config);
    afem::write_rates_report(result, config, std::cout);
    std::printf("runtime_seconds %.1f  (simd: %s)\n", result.runtime_seconds,
                afem::kernels::isa_name(afem::kernels::active_isa()));
    if (!out_dir.empty())
        std::printf("wrote %s/run.csv, uniform.csv, rates.txt, convergence.svg\n", out_dir.c_str());
    return 0;
}

int cmd_reference(int example, double h, const std::string& out_path, double eps,
                  const std::string& config_path, bool quiet) {
    const afem::ProblemSpec spec = load_spec(example, config_path);
    const afem::ReferenceSolution ref = afem::reference_solve(spec, h, eps, !quiet);
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot open " + out_path + " for writing");
    os << "afem-ref v1\n";
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", ref.newton_eps, ref.h1_norm, ref.energy);
    os << buf;
    afem::write_mesh(ref.mesh, os);
    afem::write_fe_function(ref.u, os);
    std::printf("reference: dofs=%d  h1_norm=%.12g  energy=%.12g -> %s\n", ref.mesh.num_vertices(),
                ref.h1_norm, ref.energy, out_path.c_str());
    return 0;
}

int cmd_rates(const std::string& csv_path, double window_decades) {
    std::ifstream is(csv_path);
    if (!is) throw std::runtime_error("cannot open " + csv_path);
    std::string header;
    std::getline(is, header);
    std::vector<std::pair<double, double>> eta_pts, err_pts;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        for (auto& c : line)
            if (c == ',') c = ' ';
        std::istringstream ls(line);
        double k, n_elem, dofs, eta_sq, osc_sq, n_marked, newton, err_sq, energy;
        if (!(ls >> k >> n_elem >> dofs >> eta_sq >> osc_sq >> n_marked >> newton >> err_sq >> energy))
            throw std::runtime_error("rates: malformed CSV line: " + line);
        if (eta_sq > 0.0) eta_pts.emplace_back(dofs, std::sqrt(eta_sq));
        if (err_sq > 0.0) err_pts.emplace_back(dofs, std::sqrt(err_sq));
    }
    const afem::RateFit eta_fit = afem::fit_rate(eta_pts, window_decades);
    std::printf("estimator_slope %.6f  (window %g..%g, %d points)\n", eta_fit.slope, eta_fit.n_min,
                eta_fit.n_max, eta_fit.n_points);
    if (err_pts.size() >= 6) {
        const afem::RateFit err_fit = afem::fit_rate(err_pts, window_decades);
        std::printf("error_slope %.6f  (window %g..%g, %d points)\n", err_fit.slope, err_fit.n_min,
                    err_fit.n_max, err_fit.n_points);
    }
    return 0;
}

int cmd_mesh_check(const std::string& path) {
    const afem::Mesh mesh = afem::read_mesh_file(path);
    const afem::ConformityReport report = afem::validate_conformity(mesh);
    std::printf("vertices %d  triangles %d  edges %d\n", mesh.num_vertices(), mesh.num_triangles(),
                mesh.num_edges());
    std::printf("total_area %.15g\n", mesh.total_area());
    std::printf("shape_regularity %.6f\n", afem::shape_regularity(mesh));
    if (report.ok) {
        std::printf("conformity: pass\n");
        return 0;
    }
    std::printf("conformity: FAIL (%s)\n", report.diagnostic.c_str());
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive FEM for the cathodic-protection model problem"};
    app.require_subcommand(1);

    int example = 1;
    double theta = 0.1, tau = 1e-3, h0 = 0.2, h_ref = 1.0 / 512.0, eps = 1e-11;
    double window_decades = 1.0;
    int max_k = 200;
    bool vtk = false, quiet = false;
    std::string mode = "all-edges", out_dir = "afem-out", out_file = "reference.txt";
    std::string csv_path, mesh_path, config_path;

    CLI::App* run = app.add_subcommand("run", "adaptive refinement experiment");
    run->add_option("--example", example, "example id (1 or 2)")->check(CLI::Range(1, 2));
    run->add_option("--theta", theta, "bulk marking parameter in (0,1]");
    run->add_option("--tau", tau, "stopping tolerance for sum eta^2");
    run->add_option("--mode", mode, "all-edges | single-edge");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--h0", h0, "initial mesh size (1/h0 integral)");
    run->add_option("--href", h_ref, "reference mesh size (1/href integral)");
    run->add_option("--max-k", max_k, "iteration cap");
    run->add_option("--config", config_path, "problem config file (key = value)");
    run->add_flag("--vtk", vtk, "write the final mesh as legacy VTK");
    run->add_flag("--quiet", quiet, "suppress progress logging");

    CLI::App* reference = app.add_subcommand("reference", "fine uniform reference solve");
    reference->set_help_flag("--help", "print help"); // frees -h for the mesh-size option
    reference->add_option("--example", example, "example id (1 or 2)")->check(CLI::Range(1, 2));
    reference->add_option("--h", h_ref, "mesh size (1/h integral)")->required();
    reference->add_option("--out", out_file, "output file")->required();
    reference->add_option("--eps", eps, "Newton tolerance");
    reference->add_option("--config", config_path, "problem config file");
    reference->add_flag("--quiet", quiet, "suppress progress logging");

    CLI::App* rates = app.add_subcommand("rates", "slope fits for a run CSV");
    rates->add_option("--csv", csv_path, "run CSV path")->required();
    rates->add_option("--window-decades", window_decades, "trailing dof window for the fit");

    CLI::App* mesh_check = app.add_subcommand("mesh-check", "validate a mesh file");
    mesh_check->add_option("file", mesh_path, "afem-mesh v1 file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(example, theta, tau, mode, out_dir, h0, h_ref, max_k, vtk, config_path,
                           quiet);
        if (reference->parsed()) return cmd_reference(example, h_ref, out_file, eps, config_path, quiet);
        if (rates->parsed()) return cmd_rates(csv_path, window_decades);
        if (mesh_check->parsed()) return cmd_mesh_check(mesh_path);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
