#include "lzsm/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "lzsm/closed_form.hpp"
#include "lzsm/ddp.hpp"
#include "lzsm/errors.hpp"
#include "lzsm/gap_transform.hpp"
#include "lzsm/schrodinger.hpp"

namespace lzsm::cli {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s)
{
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// ---- expression evaluator -------------------------------------------------

struct ExprParser {
    const std::string& s;
    std::size_t i = 0;
    double x;

    double parse()
    {
        double v = sum();
        skip_ws();
        if (i != s.size())
            throw ValidationError("expression: unexpected '" + s.substr(i) + "'");
        return v;
    }

    void skip_ws()
    {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }

    bool eat(char c)
    {
        skip_ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }

    double sum()
    {
        double v = term();
        for (;;) {
            if (eat('+'))
                v += term();
            else if (eat('-'))
                v -= term();
            else
                return v;
        }
    }

    double term()
    {
        double v = unary();
        for (;;) {
            if (eat('*'))
                v *= unary();
            else if (eat('/'))
                v /= unary();
            else
                return v;
        }
    }

    // -x^2 means -(x^2); the exponent may itself carry a sign
    double unary()
    {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    double power()
    {
        double base = atom();
        if (eat('^')) return std::pow(base, unary()); // right associative
        return base;
    }

    double atom()
    {
        skip_ws();
        if (i >= s.size()) throw ValidationError("expression: unexpected end");
        if (s[i] == '(') {
            ++i;
            double v = sum();
            if (!eat(')')) throw ValidationError("expression: missing ')'");
            return v;
        }
        if (std::isdigit((unsigned char)s[i]) || s[i] == '.') {
            char* end = nullptr;
            double v = std::strtod(s.c_str() + i, &end);
            i = end - s.c_str();
            return v;
        }
        if (std::isalpha((unsigned char)s[i]) || s[i] == '_') {
            std::size_t a = i;
            while (i < s.size() &&
                   (std::isalnum((unsigned char)s[i]) || s[i] == '_'))
                ++i;
            std::string name = s.substr(a, i - a);
            if (name == "x") return x;
            if (name == "pi") return kPi;
            if (!eat('('))
                throw ValidationError("expression: unknown symbol '" + name + "'");
            double arg = sum();
            if (!eat(')')) throw ValidationError("expression: missing ')'");
            if (name == "sqrt") return std::sqrt(arg);
            if (name == "exp") return std::exp(arg);
            if (name == "log") return std::log(arg);
            if (name == "sinh") return std::sinh(arg);
            if (name == "cosh") return std::cosh(arg);
            if (name == "tanh") return std::tanh(arg);
            if (name == "asinh") return std::asinh(arg);
            if (name == "abs") return std::abs(arg);
            throw ValidationError("expression: unknown function '" + name + "'");
        }
        throw ValidationError("expression: unexpected character '" +
                              std::string(1, s[i]) + "'");
    }
};
} // namespace

double eval_expression(const std::string& expr, double x)
{
    ExprParser p{expr, 0, x};
    return p.parse();
}

MethodSpec parse_method(const std::string& token)
{
    MethodSpec m;
    if (token == "integrator") {
        m.kind = MethodSpec::Kind::Integrator;
        m.label = "integrator";
        return m;
    }
    if (token.rfind("ddp:", 0) == 0) {
        std::string arg = token.substr(4);
        if (arg == "standard") {
            m.kind = MethodSpec::Kind::DdpStandard;
            m.label = "ddpstd";
            return m;
        }
        m.kind = MethodSpec::Kind::DdpN;
        m.n_zeros = std::stoi(arg);
        if (m.n_zeros < 1) throw ValidationError("method: ddp:<n> needs n >= 1");
        m.label = "ddp" + arg;
        return m;
    }
    if (token.rfind("closed-form:", 0) == 0) {
        m.kind = MethodSpec::Kind::ClosedForm;
        m.form_id = token.substr(12);
        std::string lbl = m.form_id;
        std::replace(lbl.begin(), lbl.end(), '-', '_');
        m.label = "cf_" + lbl;
        return m;
    }
    throw ValidationError("unknown method '" + token + "'");
}

void ExperimentSpec::validate() const
{
    if (family.empty()) throw ValidationError("spec: profile.family not set");
    if (!(grid_min < grid_max)) throw ValidationError("spec: grid.min must be < grid.max");
    if (grid_points < 2) throw ValidationError("spec: grid.points must be >= 2");
    if (methods.empty()) throw ValidationError("spec: no methods selected");
    if (grid_log && !(grid_min > 0.0))
        throw ValidationError("spec: log grid needs grid.min > 0");
}

std::vector<double> ExperimentSpec::grid_values() const
{
    std::vector<double> out(grid_points);
    for (int k = 0; k < grid_points; ++k) {
        double f = double(k) / (grid_points - 1);
        out[k] = grid_log ? grid_min * std::pow(grid_max / grid_min, f)
                          : grid_min + f * (grid_max - grid_min);
    }
    return out;
}

SweepProfile ExperimentSpec::make_profile(double x) const
{
    Params params;
    for (const auto& [k, v] : profile) params[k] = eval_expression(v, x);
    return SweepProfile::make(family, params);
}

void apply_override(ExperimentSpec& spec, const std::string& key, const std::string& value)
{
    if (key == "profile.family")
        spec.family = value;
    else if (key.rfind("profile.", 0) == 0)
        spec.profile[key.substr(8)] = value;
    else if (key == "grid.axis")
        spec.grid_axis = value;
    else if (key == "grid.min")
        spec.grid_min = eval_expression(value, 0.0);
    else if (key == "grid.max")
        spec.grid_max = eval_expression(value, 0.0);
    else if (key == "grid.points")
        spec.grid_points = std::stoi(value);
    else if (key == "grid.scale") {
        if (value == "log")
            spec.grid_log = true;
        else if (value == "linear")
            spec.grid_log = false;
        else
            throw ValidationError("grid.scale must be linear or log");
    } else if (key == "methods") {
        spec.methods.clear();
        for (const auto& tok : split_list(value)) spec.methods.push_back(parse_method(tok));
    } else if (key == "integrator.rtol")
        spec.rtol = eval_expression(value, 0.0);
    else if (key == "window.tol")
        spec.window_tol = eval_expression(value, 0.0);
    else if (key == "ddp.n_zeros")
        spec.ddp_n_zeros = std::stoi(value);
    else if (key == "output.path")
        spec.output_path = value;
    else if (key == "threads")
        spec.threads = std::stoi(value);
    else
        throw ValidationError("unknown config key '" + key + "'");
}

ConfigSet parse_config(std::istream& in)
{
    ConfigSet cfg;
    ExperimentSpec* cur = &cfg.base;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError("config: bad section header");
            std::string name = trim(line.substr(1, line.size() - 2));
            if (name.rfind("series", 0) == 0) name = trim(name.substr(6));
            if (name.empty()) throw ValidationError("config: empty series name");
            cfg.series.emplace_back(name, cfg.base);
            cur = &cfg.series.back().second;
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config: expected key = value, got '" + line + "'");
        apply_override(*cur, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ConfigSet load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    return parse_config(in);
}

double rotating_transition_probability(const SweepProfile& p, double t_end, double rtol)
{
    auto [u0, u1] = adiabatic_excited(p, 0.0);
    TwoLevelState psi0{u0, u1, 0.0};
    EvolveResult r = evolve(p, 0.0, t_end, psi0, rtol);
    auto [g0, g1] = adiabatic_ground(p, t_end);
    return std::norm(std::conj(g0) * r.state.up + std::conj(g1) * r.state.down);
}

namespace {

double closed_form_value(const ExperimentSpec& spec, const SweepProfile& p,
                         const std::string& id, double x)
{
    auto cd = [&]() { return p.crossing_derivatives(); };
    auto chi = [&]() { return p.nonlinearity_params(); };
    if (id == "lzsm") return lzsm(cd().delta);
    if (id == "quadratic") return quadratic_corrected(cd().delta, chi().first);
    if (id == "quadratic-alt") return quadratic_corrected_alt(cd().delta, chi().first);
    if (id == "cubic") return cubic_corrected(cd().delta, chi().second);
    if (id == "cubic-linearized")
        return cubic_corrected_linearized(cd().delta, chi().second);
    if (id == "unified") {
        auto [c2, c3] = chi();
        return unified_corrected(cd().delta, c2, c3);
    }
    if (id == "variable-gap") {
        CrossingData c = cd();
        return variable_gap_corrected(c.delta, c.gap1 / c.v0);
    }
    if (id == "demkov-kunike")
        return demkov_kunike(p.param("A"), p.param("B"), p.param("T"));
    if (id == "rosen-zener")
        return rosen_zener(p.param("a"), p.param("b"), p.param("T"));
    if (id == "rotating") {
        double Om = p.param("Omega"), om = p.param("omega");
        auto it = spec.profile.find("t_end");
        if (it == spec.profile.end())
            throw ValidationError("closed-form:rotating needs profile.t_end");
        double t_end = eval_expression(it->second, x);
        return rotating_field(om / Om, std::sqrt(Om * Om + om * om) * t_end);
    }
    if (id == "square-pulse")
        return square_pulse_limit(p.param("A"), p.param("delta"));
    if (id == "sinh-large-xi")
        return sinh_large_xi(p.param("A"), p.param("T"), p.param("delta"));
    throw ValidationError("unknown closed-form id '" + id + "'");
}

ResultRow compute_row(const ExperimentSpec& spec, double x)
{
    ResultRow row;
    row.grid_value = x;
    row.probability.assign(spec.methods.size(), kNaN);
    row.delta_p.assign(spec.methods.size(), kNaN);
    std::vector<std::string> errors;

    SweepProfile p = [&]() -> SweepProfile {
        try {
            return spec.make_profile(x);
        } catch (const std::exception& e) {
            errors.push_back(std::string("profile:") + e.what());
            throw;
        }
    }();

    double p_lzsm = kNaN;
    try {
        p_lzsm = lzsm(p.crossing_derivatives().delta);
    } catch (const std::exception&) {
    }

    for (std::size_t m = 0; m < spec.methods.size(); ++m) {
        const MethodSpec& ms = spec.methods[m];
        try {
            double prob = kNaN;
            switch (ms.kind) {
            case MethodSpec::Kind::Integrator:
                if (p.family() == Family::Rotating) {
                    auto it = spec.profile.find("t_end");
                    if (it == spec.profile.end())
                        throw ValidationError("rotating profile needs profile.t_end");
                    prob = rotating_transition_probability(
                        p, eval_expression(it->second, x), spec.rtol);
                    row.converged = true;
                } else {
                    TransitionResult tr =
                        diabatic_persistence_probability(p, spec.rtol, spec.window_tol);
                    prob = tr.probability;
                    row.converged = tr.converged;
                    row.window = tr.window;
                }
                break;
            case MethodSpec::Kind::DdpN:
                prob = generalized_probability(p, ms.n_zeros).probability;
                row.n_zeros_used = ms.n_zeros;
                break;
            case MethodSpec::Kind::DdpStandard:
                prob = standard_probability(p).probability;
                row.n_zeros_used = 1;
                break;
            case MethodSpec::Kind::ClosedForm:
                prob = closed_form_value(spec, p, ms.form_id, x);
                break;
            }
            row.probability[m] = prob;
            row.delta_p[m] = prob - p_lzsm;
        } catch (const std::exception& e) {
            errors.push_back(ms.label + ":" + e.what());
        }
    }
    row.status = errors.empty() ? "ok" : [&]() {
        std::string s;
        for (const auto& e : errors) s += (s.empty() ? "" : ";") + e;
        return s;
    }();
    std::replace(row.status.begin(), row.status.end(), ',', ';');
    return row;
}

} // namespace

std::vector<ResultRow> run_grid(const ExperimentSpec& spec)
{
    spec.validate();
    std::vector<double> xs = spec.grid_values();
    std::vector<ResultRow> rows(xs.size());
    unsigned n_workers = spec.threads > 0
                             ? unsigned(spec.threads)
                             : std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    n_workers = std::min<unsigned>(n_workers, xs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= xs.size()) return;
            try {
                rows[k] = compute_row(spec, xs[k]);
            } catch (const std::exception& e) {
                rows[k].grid_value = xs[k];
                rows[k].probability.assign(spec.methods.size(), kNaN);
                rows[k].delta_p.assign(spec.methods.size(), kNaN);
                rows[k].status = std::string("error:") + e.what();
                std::replace(rows[k].status.begin(), rows[k].status.end(), ',', ';');
            }
        }
    };
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    if (!spec.output_path.empty()) {
        std::ofstream out(spec.output_path);
        if (!out) throw ValidationError("cannot write '" + spec.output_path + "'");
        write_csv(spec, rows, out);
    }
    return rows;
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const ExperimentSpec& spec, const std::vector<ResultRow>& rows,
               std::ostream& out)
{
    out << "grid_value";
    for (const auto& m : spec.methods) out << ",P_" << m.label;
    for (const auto& m : spec.methods) out << ",delta_p_" << m.label;
    out << ",status\n";
    for (const auto& r : rows) {
        out << format_double(r.grid_value);
        for (double v : r.probability) out << ',' << format_double(v);
        for (double v : r.delta_p) out << ',' << format_double(v);
        out << ',' << r.status << '\n';
    }
}

std::vector<PairSummary> compare_methods(const ExperimentSpec& spec,
                                         const std::vector<ResultRow>& rows)
{
    if (spec.methods.size() < 2)
        throw ValidationError("compare_methods: need at least 2 methods");
    std::vector<PairSummary> out;
    for (std::size_t a = 0; a < spec.methods.size(); ++a)
        for (std::size_t b = a + 1; b < spec.methods.size(); ++b) {
            PairSummary s;
            s.a = spec.methods[a].label;
            s.b = spec.methods[b].label;
            int n = 0;
            for (const auto& r : rows) {
                double d = std::abs(r.probability[a] - r.probability[b]);
                if (std::isnan(d)) continue;
                s.max_abs = std::max(s.max_abs, d);
                s.mean_abs += d;
                ++n;
            }
            if (n > 0) s.mean_abs /= n;
            out.push_back(s);
        }
    return out;
}

std::vector<std::string> reproduce(const std::string& figure_id,
                                   const std::string& preset_dir,
                                   const std::string& out_dir)
{
    ConfigSet cfg = load_config(preset_dir + "/" + figure_id + ".cfg");
    std::vector<std::pair<std::string, ExperimentSpec>> runs;
    if (cfg.series.empty())
        runs.emplace_back(figure_id, cfg.base);
    else
        for (auto& [name, spec] : cfg.series)
            runs.emplace_back(figure_id + "-" + name, std::move(spec));

    std::vector<std::string> paths;
    for (auto& [name, spec] : runs) {
        spec.output_path = out_dir + "/" + name + ".csv";
        run_grid(spec);
        paths.push_back(spec.output_path);
    }
    return paths;
}

void transform_gap_table(const ExperimentSpec& spec, std::ostream& out)
{
    if (spec.family.empty()) throw ValidationError("transform-gap: profile.family not set");
    if (!(spec.grid_min < spec.grid_max) || spec.grid_points < 2)
        throw ValidationError("transform-gap: needs a valid grid for the t~ samples");
    SweepProfile p = spec.make_profile(0.0);
    double target = p.gap(0.0);
    auto it = spec.profile.find("target_gap");
    if (it != spec.profile.end()) target = eval_expression(it->second, 0.0);
    TimeMap map = build_time_map(p, target);
    SweepProfile eq = equivalent_profile(p, target);
    out << "t_tilde,t,bias_equiv,gap_equiv\n";
    for (double tt : spec.grid_values()) {
        double t = map.forward(tt);
        out << format_double(tt) << ',' << format_double(t) << ','
            << format_double(eq.bias(tt)) << ',' << format_double(eq.gap(tt)) << '\n';
    }
}

} // namespace lzsm::cli
