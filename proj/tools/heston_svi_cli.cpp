// heston-svi: command-line access to the SVI / large-maturity Heston toolkit.
//
//   heston-svi asymptote    --kappa 1 --theta 0.04 --sigma 0.25 --rho -0.5 --v0 0.04
//   heston-svi verify       ... [--random 100 --seed 42]
//   heston-svi saddle-check ...
//   heston-svi smile        ... --T 50 --xmin -0.25 --xmax 0.25 --n 21 > smile.csv
//   heston-svi converge     ... --T 1,5,20,50
//   heston-svi fit          --in smile.csv
//   heston-svi map-params   ... --T 10
//
// Exit codes: 0 success/pass, 1 verification failed, 2 invalid input,
// 3 numerical-accuracy failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hsvi/errors.hpp"
#include "hsvi/finite_t_pricer.hpp"
#include "hsvi/heston_lt_smile.hpp"
#include "hsvi/io.hpp"
#include "hsvi/model_params.hpp"
#include "hsvi/saddle.hpp"
#include "hsvi/sampling.hpp"
#include "hsvi/svi_fit.hpp"
#include "hsvi/svi_surface.hpp"

namespace {

using nlohmann::json;
using namespace hsvi;

enum Exit { kOk = 0, kFail = 1, kInvalid = 2, kAccuracy = 3 };

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct Options {
    double kappa = kUnset, theta = kUnset, sigma = kUnset, rho = kUnset, v0 = kUnset;
    std::string T;
    double xmin = kUnset, xmax = kUnset;
    int n = 0;
    std::string grid;
    std::uint64_t seed = 42;
    std::string form = "closed";
    double tol = kUnset;
    std::string out;
    std::string in;
    int random = 0;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw MalformedInputError(std::string("cannot parse ") + what + " entry '" + item + "'");
        }
    }
    if (values.empty()) throw MalformedInputError(std::string(what) + " is empty");
    return values;
}

std::string config_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s;
        for (const auto& e : v) s += (s.empty() ? "" : ",") + config_string(e);
        return s;
    }
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
}

// Config values are written into the bound variables before the command
// line is parsed, so explicit flags win.
void apply_config(const std::string& path, Options& o) {
    std::ifstream f(path);
    if (!f) throw MalformedInputError("cannot open config file " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw MalformedInputError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw MalformedInputError("config file must hold a JSON object");
    auto num = [](const json& v, const std::string& key) {
        if (!v.is_number()) throw MalformedInputError("config key '" + key + "' must be a number");
        return v.get<double>();
    };
    for (const auto& [key, v] : j.items()) {
        if (key == "kappa") o.kappa = num(v, key);
        else if (key == "theta") o.theta = num(v, key);
        else if (key == "sigma") o.sigma = num(v, key);
        else if (key == "rho") o.rho = num(v, key);
        else if (key == "v0") o.v0 = num(v, key);
        else if (key == "T") o.T = config_string(v);
        else if (key == "xmin") o.xmin = num(v, key);
        else if (key == "xmax") o.xmax = num(v, key);
        else if (key == "n") o.n = static_cast<int>(num(v, key));
        else if (key == "grid") o.grid = config_string(v);
        else if (key == "seed") o.seed = static_cast<std::uint64_t>(num(v, key));
        else if (key == "form") o.form = config_string(v);
        else if (key == "tol") o.tol = num(v, key);
        else if (key == "out") o.out = config_string(v);
        else if (key == "in") o.in = config_string(v);
        else if (key == "random") o.random = static_cast<int>(num(v, key));
        else throw MalformedInputError("unknown config key '" + key + "'");
    }
}

HestonParams heston_from(const Options& o) {
    const std::pair<const char*, double> fields[] = {
        {"kappa", o.kappa}, {"theta", o.theta}, {"sigma", o.sigma}, {"rho", o.rho}, {"v0", o.v0}};
    for (const auto& [name, value] : fields) {
        if (std::isnan(value)) throw MalformedInputError(std::string("missing --") + name);
    }
    return {o.kappa, o.theta, o.sigma, o.rho, o.v0};
}

std::vector<double> grid_from(const Options& o, double default_lo, double default_hi, int default_n) {
    if (!o.grid.empty()) return parse_list(o.grid, "--grid");
    const double lo = std::isnan(o.xmin) ? default_lo : o.xmin;
    const double hi = std::isnan(o.xmax) ? default_hi : o.xmax;
    const int n = o.n > 0 ? o.n : default_n;
    if (o.n < 0 || n < 1) throw MalformedInputError("--n must be >= 1");
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
        throw MalformedInputError("grid bounds must be finite with xmin <= xmax");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return g;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw MalformedInputError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

json heston_json(const HestonParams& p) { return json(p); }

struct Report {
    std::string command;
    json inputs = json::object();
    json outputs = json::object();
    std::optional<bool> pass;
    std::optional<double> max_deviation;
};

int emit(const Report& r, const Options& o, std::chrono::steady_clock::time_point start) {
    json j;
    j["command"] = r.command;
    j["inputs"] = r.inputs;
    j["outputs"] = r.outputs;
    if (r.pass) j["pass"] = *r.pass;
    if (r.max_deviation) j["max_deviation"] = *r.max_deviation;
    j["duration_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Output out(o.out);
    out.stream() << j.dump(2) << '\n';
    if (r.pass && !*r.pass) return kFail;
    return kOk;
}

// Asymptotic commands reject parameter sets the limit does not cover, with
// the validation report as the message.
void require_asymptotic_params(const HestonParams& p) {
    auto report = validate_heston(p);
    if (!report.ok()) throw ValidationError("invalid Heston parameters: " + report.describe());
}

int cmd_asymptote(const Options& o) {
    const auto p = heston_from(o);
    require_asymptotic_params(p);
    if (o.form != "closed" && o.form != "pipeline")
        throw MalformedInputError("--form must be 'closed' or 'pipeline'");
    const AsymptoticPipeline ctx(p);
    const auto grid = grid_from(o, -10 * p.theta, 10 * p.theta, 101);
    Output out(o.out);
    auto& os = out.stream();
    os << "# form=" << o.form << '\n';
    os << "# kappa=" << format_double(p.kappa) << " theta=" << format_double(p.theta)
       << " sigma=" << format_double(p.sigma) << " rho=" << format_double(p.rho) << '\n';
    os << "x,variance\n";
    for (double x : grid) {
        const double v = o.form == "closed" ? ctx.asymptotic_variance_closed(x)
                                            : ctx.asymptotic_variance_pipeline(x);
        os << format_double(x) << ',' << format_double(v) << '\n';
    }
    return kOk;
}

int cmd_verify(const Options& o, std::chrono::steady_clock::time_point start) {
    const auto p = heston_from(o);
    require_asymptotic_params(p);
    const double tol = std::isnan(o.tol) ? kEquivalenceTolerance : o.tol;
    Report r;
    r.command = "verify";
    r.inputs = {{"heston", heston_json(p)}, {"tol", tol}, {"random", o.random}, {"seed", o.seed}};

    const auto grid = grid_from(o, -10 * p.theta, 10 * p.theta, 1001);
    r.inputs["grid_points"] = grid.size();
    const auto main = verify_equivalence(AsymptoticPipeline(p), grid, tol);
    r.outputs["max_rel_deviation"] = main.max_rel_deviation;
    r.outputs["max_abs_deviation"] = main.max_abs_deviation;
    r.outputs["worst_x"] = main.worst_x;
    bool pass = main.pass;
    double worst = main.max_rel_deviation;

    if (o.random > 0) {
        json sets = json::array();
        int failures = 0;
        for (const auto& q : sample_heston_params(static_cast<std::size_t>(o.random), o.seed)) {
            std::vector<double> g(1001);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] = -10 * q.theta + 20 * q.theta * i / 1000.0;
            const auto rep = verify_equivalence(AsymptoticPipeline(q), g, tol);
            worst = std::max(worst, rep.max_rel_deviation);
            if (!rep.pass) ++failures;
            sets.push_back({{"heston", heston_json(q)}, {"max_rel_deviation", rep.max_rel_deviation},
                            {"pass", rep.pass}});
        }
        r.outputs["random_sets"] = sets;
        r.outputs["random_failures"] = failures;
        pass = pass && failures == 0;
    }
    r.pass = pass;
    r.max_deviation = worst;
    return emit(r, o, start);
}

int cmd_saddle_check(const Options& o, std::chrono::steady_clock::time_point start) {
    const auto p = heston_from(o);
    require_asymptotic_params(p);
    const double tol = std::isnan(o.tol) ? 1e-10 : o.tol;
    Report r;
    r.command = "saddle-check";
    r.inputs = {{"heston", heston_json(p)}, {"tol", tol}, {"random", o.random}, {"seed", o.seed}};

    auto check = [&](const HestonParams& q, const std::vector<double>& grid, json& points) {
        const SaddleContext ctx(q);
        double worst = 0.0;
        for (double x : grid) {
            const auto s = saddle_residual(ctx, x);
            worst = std::max(worst, s.rel_residual);
            points.push_back({{"x", x}, {"rel_residual", s.rel_residual},
                              {"saddle_equation_residual", s.saddle_equation_residual}});
        }
        return worst;
    };

    const auto grid = grid_from(o, -10 * p.theta, 10 * p.theta, 21);
    json points = json::array();
    double worst = check(p, grid, points);
    const SaddleContext ctx(p);
    const auto u0 = ctx.u_tilde(0.0);
    r.outputs["points"] = points;
    r.outputs["u_tilde_at_0"] = {{"re", u0.real()}, {"im", u0.imag()}};

    if (o.random > 0) {
        json sets = json::array();
        for (const auto& q : sample_heston_params(static_cast<std::size_t>(o.random), o.seed)) {
            std::vector<double> g(21);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] = -10 * q.theta + 20 * q.theta * i / 20.0;
            json ignored = json::array();
            const double w = check(q, g, ignored);
            worst = std::max(worst, w);
            sets.push_back({{"heston", heston_json(q)}, {"max_rel_residual", w}});
        }
        r.outputs["random_sets"] = sets;
    }
    r.outputs["max_rel_residual"] = worst;
    r.pass = worst <= tol;
    r.max_deviation = worst;
    return emit(r, o, start);
}

QuadratureConfig quadrature_from(const Options& o) {
    QuadratureConfig q;
    if (!std::isnan(o.tol)) q.tolerance = o.tol;
    return q;
}

int cmd_smile(const Options& o) {
    const auto p = heston_from(o);
    const auto T = parse_list(o.T.empty() ? "1" : o.T, "--T");
    if (T.size() != 1) throw MalformedInputError("smile takes a single --T");
    const auto grid = grid_from(o, -0.1, 0.1, 21);
    const auto result = heston_smile(p, T.front(), grid, quadrature_from(o));
    Output out(o.out);
    write_smile_csv(out.stream(), result.smile);
    for (const auto& f : result.failures) {
        std::cerr << "failed at x=" << format_double(f.x) << ": " << f.message << '\n';
    }
    return result.failures.empty() ? kOk : kAccuracy;
}

int cmd_converge(const Options& o, std::chrono::steady_clock::time_point start) {
    const auto p = heston_from(o);
    require_asymptotic_params(p);
    const auto Ts = parse_list(o.T.empty() ? "1,5,20,50" : o.T, "--T");
    const auto grid = grid_from(o, -0.05, 0.05, 11);
    const auto rep = convergence_study(p, Ts, grid, quadrature_from(o));
    Report r;
    r.command = "converge";
    r.inputs = {{"heston", heston_json(p)}, {"T", Ts}, {"grid", grid}};
    json rows = json::array();
    for (const auto& row : rep.rows) {
        rows.push_back({{"T", row.T}, {"max_rel_error", row.max_rel_error},
                        {"worst_x", row.worst_x}, {"rel_errors", row.rel_errors}});
    }
    r.outputs["rows"] = rows;
    r.outputs["strictly_decreasing"] = rep.strictly_decreasing;
    r.pass = rep.strictly_decreasing;
    r.max_deviation = rep.rows.back().max_rel_error;
    return emit(r, o, start);
}

int cmd_fit(const Options& o, std::chrono::steady_clock::time_point start) {
    if (o.in.empty()) throw MalformedInputError("fit needs --in <smile.csv> ('-' for stdin)");
    Smile smile;
    if (o.in == "-") {
        smile = read_smile_csv(std::cin);
    } else {
        std::ifstream f(o.in);
        if (!f) throw MalformedInputError("cannot open " + o.in);
        smile = read_smile_csv(f);
    }
    const auto fit = fit_svi(smile);
    Report r;
    r.command = "fit";
    r.inputs = {{"in", o.in}, {"T", smile.maturity()}, {"points", smile.size()}};
    r.outputs = json(fit);
    const int code = emit(r, o, start);
    return fit.converged ? code : kAccuracy;
}

int cmd_map_params(const Options& o, std::chrono::steady_clock::time_point start) {
    const auto p = heston_from(o);
    require_asymptotic_params(p);
    const auto T = parse_list(o.T.empty() ? "1" : o.T, "--T");
    if (T.size() != 1) throw MalformedInputError("map-params takes a single --T");
    const auto omega = heston_to_svi_omega(p);
    Report r;
    r.command = "map-params";
    r.inputs = {{"heston", heston_json(p)}, {"T", T.front()}};
    r.outputs = {{"constants", derive_constants(p)},
                 {"omega", omega},
                 {"raw", svi_omega_to_raw(omega, T.front())},
                 {"diagnostics", diagnostics(omega)}};
    return emit(r, o, start);
}

}  // namespace

int main(int argc, char** argv) {
    const auto start = std::chrono::steady_clock::now();
    Options o;
    CLI::App app{"SVI and large-maturity Heston smile toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config;
    app.add_option("--config", config, "JSON file supplying any flag; the command line wins");
    app.add_option("--kappa", o.kappa, "mean-reversion speed");
    app.add_option("--theta", o.theta, "long-run variance");
    app.add_option("--sigma", o.sigma, "volatility of variance");
    app.add_option("--rho", o.rho, "spot/variance correlation");
    app.add_option("--v0", o.v0, "initial variance");
    app.add_option("--T", o.T, "maturity, or comma-separated maturities for converge");
    app.add_option("--xmin", o.xmin, "lower end of the x grid");
    app.add_option("--xmax", o.xmax, "upper end of the x grid");
    app.add_option("--n", o.n, "number of grid points");
    app.add_option("--grid", o.grid, "explicit comma-separated x grid");
    app.add_option("--seed", o.seed, "seed for randomized suites");
    app.add_option("--form", o.form, "asymptote evaluation path: closed | pipeline");
    app.add_option("--tol", o.tol, "verification tolerance, or quadrature tolerance for smile/converge");
    app.add_option("--out", o.out, "output file (stdout when omitted)");
    app.add_option("--in", o.in, "input smile CSV for fit ('-' for stdin)");
    app.add_option("--random", o.random, "number of seeded random parameter sets to add");

    auto* asymptote = app.add_subcommand("asymptote", "sample the large-maturity implied variance");
    auto* verify = app.add_subcommand("verify", "check pipeline = closed form = SVI");
    auto* saddle = app.add_subcommand("saddle-check", "check the exponent-matching condition");
    auto* smile = app.add_subcommand("smile", "finite-maturity Heston smile as CSV");
    auto* converge = app.add_subcommand("converge", "finite-T smile vs SVI asymptote");
    auto* fit = app.add_subcommand("fit", "fit raw SVI to a smile CSV");
    auto* map = app.add_subcommand("map-params", "Heston -> omega-form -> raw SVI parameters");

    try {
        for (int i = 1; i < argc; ++i) {
            const std::string a = argv[i];
            if (a == "--config" && i + 1 < argc) apply_config(argv[i + 1], o);
            else if (a.rfind("--config=", 0) == 0) apply_config(a.substr(9), o);
        }
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    } catch (const hsvi::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }

    try {
        if (*asymptote) return cmd_asymptote(o);
        if (*verify) return cmd_verify(o, start);
        if (*saddle) return cmd_saddle_check(o, start);
        if (*smile) return cmd_smile(o);
        if (*converge) return cmd_converge(o, start);
        if (*fit) return cmd_fit(o, start);
        if (*map) return cmd_map_params(o, start);
    } catch (const AccuracyError& e) {
        std::cerr << "accuracy error: " << e.what() << '\n';
        return kAccuracy;
    } catch (const hsvi::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    return kInvalid;
}
