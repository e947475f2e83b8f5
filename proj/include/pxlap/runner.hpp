#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pxlap/comparison.hpp"
#include "pxlap/eigensolver.hpp"
#include "pxlap/expr.hpp"
#include "pxlap/mesh.hpp"

namespace pxlap {

// flat key=value run description; geometry keys are resolved into a DomainSpec
// lazily so command-line overrides can arrive in any order
struct RunConfig {
    std::string domain_kind = "square";  // square|rectangle|interval|disk|annulus
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    double cx = 0.0, cy = 0.0, radius = 1.0, r_inner = 0.25, r_outer = 1.0;
    std::string p_text;  // exponent expression over x, y
    double h = 0.1;
    int order = 1;
    SolverConfig solver;
    std::string out_dir = "out";
    bool diagnostics = false;
    int levels = 4;
    double scan_center = 0.0, scan_half_width = 0.0, scan_plateau = 0.0;
    std::vector<double> scan_amplitudes;

    DomainSpec domain() const;
    Expression exponent() const;  // parses p_text; throws on syntax errors
    // parses the exponent and checks p > 1 on a dense sample of the domain,
    // before any mesh is generated
    void validate() const;
};

// key=value text (one per line, '#' comments); unknown keys are errors
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value);

struct SolveArtifacts {
    std::unique_ptr<Mesh> mesh;  // keeps result.u valid
    EigenpairResult result;
    std::string summary_path, csv_path, vtk_path;
};

SolveArtifacts run_solve(const RunConfig& cfg);

struct StudyRow {
    int level;
    double h_max;
    int dofs;
    double lambda1;
};

struct StudyResult {
    std::vector<StudyRow> rows;
    std::vector<double> orders;  // log2 ratios of successive lambda1 differences
    std::string csv_path;
};

StudyResult run_convergence_study(const RunConfig& cfg, int levels);

struct DiagnosticsReport {
    bool has_center = false, has_xreflect = false;
    double center_defect = 0.0, xreflect_defect = 0.0;
    int second_diffs = 0, positive_second_diffs = 0;  // 1D log-concavity scan
    double max_second_diff = 0.0;
    std::string note;
};

DiagnosticsReport run_diagnostics(const EigenpairResult& result, const RunConfig& cfg);
void write_diagnostics(const DiagnosticsReport& rep, const std::string& path);

// collapse scan driven by the scan_* config keys; writes scan.csv in out_dir
QuotientScan run_scan(const RunConfig& cfg);

// io helpers (fixed key order, %.17g numerics, deterministic byte-for-byte)
void write_summary(const EigenpairResult& r, const RunConfig& cfg, const std::string& path);
std::map<std::string, std::string> read_key_values(const std::string& path);
void write_eigenfunction_csv(const ScalarField& u, const std::string& path);
ScalarField read_eigenfunction_csv(const Mesh& mesh, const std::string& path);

}  // namespace pxlap
