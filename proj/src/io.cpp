#include "hsvi/io.hpp"

#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "hsvi/errors.hpp"

namespace hsvi {

using nlohmann::json;

namespace {

double number_field(const json& j, const char* key) {
    if (!j.is_object()) throw MalformedInputError("expected a JSON object");
    auto it = j.find(key);
    if (it == j.end()) throw MalformedInputError(std::string("missing field '") + key + "'");
    if (!it->is_number()) throw MalformedInputError(std::string("field '") + key + "' must be a number");
    return it->get<double>();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (trim(s.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw MalformedInputError("cannot parse number '" + s + "' in " + context);
}

}  // namespace

void to_json(json& j, const HestonParams& p) {
    j = json{{"kappa", p.kappa}, {"theta", p.theta}, {"sigma", p.sigma}, {"rho", p.rho}, {"v0", p.v0}};
}
void from_json(const json& j, HestonParams& p) {
    p = {number_field(j, "kappa"), number_field(j, "theta"), number_field(j, "sigma"),
         number_field(j, "rho"), number_field(j, "v0")};
}
void to_json(json& j, const SVIOmegaParams& p) {
    j = json{{"omega1", p.omega1}, {"omega2", p.omega2}, {"rho", p.rho}};
}
void from_json(const json& j, SVIOmegaParams& p) {
    p = {number_field(j, "omega1"), number_field(j, "omega2"), number_field(j, "rho")};
}
void to_json(json& j, const SVIRawParams& p) {
    j = json{{"a", p.a}, {"b", p.b}, {"rho_tilde", p.rho_tilde},
             {"m", p.m}, {"sigma_tilde", p.sigma_tilde}, {"T", p.T}};
}
void from_json(const json& j, SVIRawParams& p) {
    p = {number_field(j, "a"), number_field(j, "b"), number_field(j, "rho_tilde"),
         number_field(j, "m"), number_field(j, "sigma_tilde"), number_field(j, "T")};
}

void to_json(json& j, const DerivedConstants& c) {
    j = json{{"eta", c.eta}, {"rho_bar", c.rho_bar}, {"theta_bar", c.theta_bar},
             {"p_minus", c.p_minus}, {"p_plus", c.p_plus}};
}
void to_json(json& j, const SmileDiagnostics& d) {
    j = json{{"atm_variance", d.atm_variance}, {"min_location", d.min_location},
             {"left_slope", d.left_slope}, {"right_slope", d.right_slope},
             {"orientation", d.orientation}};
}
void to_json(json& j, const WingSlopes& w) { j = json{{"left", w.left}, {"right", w.right}}; }
void to_json(json& j, const FitInterpretation& f) {
    j = json{{"orientation", f.orientation},
             {"omega", f.omega},
             {"diagnostics", f.diagnostics},
             {"min_location_k", f.min_location_k},
             {"raw_slopes", f.raw_slopes},
             {"atm_variance", f.atm_variance},
             {"consistency_residual", f.consistency_residual}};
}
void to_json(json& j, const FitResult& f) {
    j = json{{"params", f.params},
             {"objective", f.objective},
             {"iterations", f.iterations},
             {"converged", f.converged},
             {"gradient_norm", f.gradient_norm}};
    j["interpretation"] = f.interpretation ? json(*f.interpretation) : json(nullptr);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_smile_csv(std::ostream& os, const Smile& smile) {
    os << "# T=" << format_double(smile.maturity()) << '\n';
    os << "k,vol\n";
    for (const auto& pt : smile.points()) {
        os << format_double(pt.k) << ',' << format_double(pt.vol) << '\n';
    }
}

Smile read_smile_csv(std::istream& is) {
    std::optional<double> T;
    bool header = false;
    std::vector<SmilePoint> points;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (t[0] == '#') {
            const std::string body = trim(t.substr(1));
            if (body.rfind("T=", 0) == 0) T = parse_number(body.substr(2), where);
            continue;
        }
        if (!header) {
            if (t != "k,vol") throw MalformedInputError("expected header 'k,vol' at " + where);
            header = true;
            continue;
        }
        const auto comma = t.find(',');
        if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
            throw MalformedInputError("expected two columns at " + where);
        points.push_back({parse_number(t.substr(0, comma), where),
                          parse_number(t.substr(comma + 1), where)});
    }
    if (!T) throw MalformedInputError("smile CSV lacks a '# T=<value>' line");
    if (!header) throw MalformedInputError("smile CSV lacks the 'k,vol' header");
    return Smile(*T, std::move(points), SmileSource::file);
}

}  // namespace hsvi
