#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lzsm/sweep.hpp"

namespace lzsm::cli {

// Arithmetic over one free variable x: numbers, x, pi, + - * / ^, parens,
// sqrt exp log sinh cosh tanh asinh abs. Used for profile parameters that
// depend on the grid variable.
double eval_expression(const std::string& expr, double x);

struct MethodSpec {
    enum class Kind { Integrator, DdpN, DdpStandard, ClosedForm } kind;
    int n_zeros = 1;       // DdpN
    std::string form_id;   // ClosedForm
    std::string label;     // CSV column suffix
};

MethodSpec parse_method(const std::string& token);

struct ExperimentSpec {
    std::string family;
    std::map<std::string, std::string> profile; // param -> expression in x
    std::string grid_axis = "x";
    double grid_min = 0.0, grid_max = 0.0;
    int grid_points = 0;
    bool grid_log = false;
    std::vector<MethodSpec> methods;
    double rtol = 1e-10;
    double window_tol = 1e-6;
    int ddp_n_zeros = 1;
    std::string output_path; // empty = stdout
    int threads = 0;         // 0 = hardware default

    void validate() const;
    std::vector<double> grid_values() const;
    SweepProfile make_profile(double x) const;
};

// Flat key = value text, '#' comments. "[series <name>]" opens a section that
// inherits every key set above it; parse_config returns the base spec plus
// one named spec per section.
struct ConfigSet {
    ExperimentSpec base;
    std::vector<std::pair<std::string, ExperimentSpec>> series;
};
ConfigSet parse_config(std::istream& in);
ConfigSet load_config(const std::string& path);
void apply_override(ExperimentSpec& spec, const std::string& key, const std::string& value);

struct ResultRow {
    double grid_value = 0.0;
    std::vector<double> probability; // one per method, NaN on failure
    std::vector<double> delta_p;     // P - exp(-2 pi delta), NaN if no delta
    std::string status;              // "ok" or semicolon-joined errors
    // diagnostics
    bool converged = false;
    double window = 0.0;
    int n_zeros_used = 0;
};

// One row per grid point, computed independently (worker pool), emitted in
// grid order. Writes CSV to spec.output_path (or the stream) as
// grid_value, P per method, delta_p per method, status.
std::vector<ResultRow> run_grid(const ExperimentSpec& spec);
void write_csv(const ExperimentSpec& spec, const std::vector<ResultRow>& rows,
               std::ostream& out);

struct PairSummary {
    std::string a, b;
    double max_abs = 0.0;
    double mean_abs = 0.0;
};
std::vector<PairSummary> compare_methods(const ExperimentSpec& spec,
                                         const std::vector<ResultRow>& rows);

// Figure presets: runs data/presets/<id>.cfg, one CSV per series, named
// <id>-<series>.csv under out_dir. Returns the file paths written.
std::vector<std::string> reproduce(const std::string& figure_id,
                                   const std::string& preset_dir,
                                   const std::string& out_dir);

// Sampled (t~, t, bias~, gap~) table of the constant-gap equivalent profile.
void transform_gap_table(const ExperimentSpec& spec, std::ostream& out);

// Rotating-field transition probability by direct integration from t = 0 to
// t_end (project onto the instantaneous ground state at t_end).
double rotating_transition_probability(const SweepProfile& p, double t_end, double rtol);

std::string format_double(double v); // %.17g, deterministic

} // namespace lzsm::cli
