#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pxlap/runner.hpp"

using namespace pxlap;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    double h = 0.0;
    int order = 0;
    int levels = 0;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->set_help_flag("--help", "print help");  // frees -h / --h for the mesh size
    cmd->add_option("--config", o.config_path, "key=value config file");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--order", o.order, "element order")->check(CLI::IsMember({1, 2}));
    cmd->add_option("--h", o.h, "target mesh size");
    cmd->add_option("--levels", o.levels, "refinement levels (study)");
    cmd->add_option("overrides", o.overrides, "key=value overrides");
}

RunConfig build_config(const CommonOpts& o) {
    RunConfig cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.h > 0.0) cfg.h = o.h;
    if (o.order > 0) cfg.order = o.order;
    if (o.levels > 0) cfg.levels = o.levels;
    for (const std::string& kv : o.overrides) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override '" + kv + "' is not key=value");
        set_config_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

int do_solve(const CommonOpts& o) {
    const RunConfig cfg = build_config(o);
    const SolveArtifacts art = run_solve(cfg);
    std::printf("lambda1      = %.12g\n", art.result.lambda1);
    std::printf("Lambda1      = %.12g\n", art.result.Lambda1);
    std::printf("el_residual  = %.3e\n", art.result.el_residual);
    std::printf("iterations   = %d\n", art.result.iterations);
    std::printf("summary      : %s\n", art.summary_path.c_str());
    std::printf("eigenfunction: %s, %s\n", art.csv_path.c_str(), art.vtk_path.c_str());
    return art.result.converged ? 0 : 1;
}

int do_study(const CommonOpts& o) {
    const RunConfig cfg = build_config(o);
    const StudyResult study = run_convergence_study(cfg, cfg.levels);
    std::printf("level          h    dofs          lambda1    order\n");
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        const StudyRow& r = study.rows[i];
        std::printf("%5d %10.5f %7d %16.10f", r.level, r.h_max, r.dofs, r.lambda1);
        if (i >= 2) std::printf(" %8.3f", study.orders[i - 2]);
        std::printf("\n");
    }
    std::printf("report: %s\n", study.csv_path.c_str());
    return 0;
}

int do_scan(const CommonOpts& o) {
    const RunConfig cfg = build_config(o);
    const QuotientScan scan = run_scan(cfg);
    std::printf("# %s\n", scan.description.c_str());
    std::printf("%12s %16s %16s\n", "t", "mubar", "homog");
    for (std::size_t i = 0; i < scan.t.size(); ++i)
        std::printf("%12.5g %16.8g %16.8g\n", scan.t[i], scan.mubar[i], scan.homog[i]);
    return 0;
}

int do_diagnose(const CommonOpts& o) {
    RunConfig cfg = build_config(o);
    cfg.diagnostics = false;  // written explicitly below
    const SolveArtifacts art = run_solve(cfg);
    const DiagnosticsReport rep = run_diagnostics(art.result, cfg);
    const std::string path = cfg.out_dir + "/diagnostics.txt";
    write_diagnostics(rep, path);
    std::printf("lambda1 = %.12g\n", art.result.lambda1);
    if (rep.has_center)
        std::printf("center_symmetry_defect = %.6g\n", rep.center_defect);
    if (rep.has_xreflect)
        std::printf("x_reflection_defect = %.6g\n", rep.xreflect_defect);
    std::printf("log_concavity_positive_second_diffs = %d / %d\n",
                rep.positive_second_diffs, rep.second_diffs);
    std::printf("report: %s\n", path.c_str());
    return art.result.converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"first eigenpair of the variable-exponent p-Laplacian"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    CommonOpts solve_opts, study_opts, scan_opts, diag_opts;
    CLI::App* solve = app.add_subcommand("solve", "solve one configuration");
    add_common(solve, solve_opts);
    CLI::App* study = app.add_subcommand("study", "convergence study over refinements");
    add_common(study, study_opts);
    CLI::App* scan = app.add_subcommand("scan", "amplitude scan of the quotients");
    add_common(scan, scan_opts);
    CLI::App* diagnose =
        app.add_subcommand("diagnose", "solve plus symmetry/concavity diagnostics");
    add_common(diagnose, diag_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return do_solve(solve_opts);
        if (study->parsed()) return do_study(study_opts);
        if (scan->parsed()) return do_scan(scan_opts);
        if (diagnose->parsed()) return do_diagnose(diag_opts);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
