#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hsvi/errors.hpp"
#include "hsvi/finite_t_pricer.hpp"
#include "hsvi/heston_lt_smile.hpp"
#include "hsvi/io.hpp"
#include "hsvi/model_params.hpp"
#include "hsvi/saddle.hpp"
#include "hsvi/sampling.hpp"
#include "hsvi/svi_fit.hpp"
#include "hsvi/svi_surface.hpp"

namespace py = pybind11;
using namespace hsvi;

namespace {

template <class T>
std::string json_repr(const char* name, const T& v) {
    std::ostringstream os;
    os << name << '(' << nlohmann::json(v).dump() << ')';
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Large-maturity Heston smiles and their SVI form";

    auto base = py::register_exception<Error>(m, "HestonSviError", PyExc_RuntimeError);
    py::register_exception<MalformedInputError>(m, "MalformedInputError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());
    py::register_exception<AccuracyError>(m, "AccuracyError", base.ptr());
    py::register_exception<ArbitrageError>(m, "ArbitrageError", base.ptr());
    py::register_exception<BoundaryError>(m, "BoundaryError", base.ptr());
    py::register_exception<UnderdeterminedError>(m, "UnderdeterminedError", base.ptr());

    py::class_<HestonParams>(m, "HestonParams")
        .def(py::init<double, double, double, double, double>(), py::arg("kappa"), py::arg("theta"),
             py::arg("sigma"), py::arg("rho"), py::arg("v0"))
        .def_readwrite("kappa", &HestonParams::kappa)
        .def_readwrite("theta", &HestonParams::theta)
        .def_readwrite("sigma", &HestonParams::sigma)
        .def_readwrite("rho", &HestonParams::rho)
        .def_readwrite("v0", &HestonParams::v0)
        .def("__repr__", [](const HestonParams& p) { return json_repr("HestonParams", p); });

    py::class_<SVIOmegaParams>(m, "SVIOmegaParams")
        .def(py::init<double, double, double>(), py::arg("omega1"), py::arg("omega2"), py::arg("rho"))
        .def_readwrite("omega1", &SVIOmegaParams::omega1)
        .def_readwrite("omega2", &SVIOmegaParams::omega2)
        .def_readwrite("rho", &SVIOmegaParams::rho)
        .def("__repr__", [](const SVIOmegaParams& p) { return json_repr("SVIOmegaParams", p); });

    py::class_<SVIRawParams>(m, "SVIRawParams")
        .def(py::init<double, double, double, double, double, double>(), py::arg("a"), py::arg("b"),
             py::arg("rho_tilde"), py::arg("m"), py::arg("sigma_tilde"), py::arg("T"))
        .def_readwrite("a", &SVIRawParams::a)
        .def_readwrite("b", &SVIRawParams::b)
        .def_readwrite("rho_tilde", &SVIRawParams::rho_tilde)
        .def_readwrite("m", &SVIRawParams::m)
        .def_readwrite("sigma_tilde", &SVIRawParams::sigma_tilde)
        .def_readwrite("T", &SVIRawParams::T)
        .def("__repr__", [](const SVIRawParams& p) { return json_repr("SVIRawParams", p); });

    py::class_<DerivedConstants>(m, "DerivedConstants")
        .def_readonly("eta", &DerivedConstants::eta)
        .def_readonly("rho_bar", &DerivedConstants::rho_bar)
        .def_readonly("theta_bar", &DerivedConstants::theta_bar)
        .def_readonly("p_minus", &DerivedConstants::p_minus)
        .def_readonly("p_plus", &DerivedConstants::p_plus);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_property_readonly("ok", &ValidationReport::ok)
        .def_property_readonly("ok_for_pricing", &ValidationReport::ok_for_pricing)
        .def_property_readonly("violations",
                               [](const ValidationReport& r) {
                                   std::vector<std::string> names;
                                   for (auto c : r.violations) names.emplace_back(constraint_name(c));
                                   return names;
                               })
        .def("describe", &ValidationReport::describe);

    py::class_<WingSlopes>(m, "WingSlopes")
        .def_readonly("left", &WingSlopes::left)
        .def_readonly("right", &WingSlopes::right);

    py::class_<SmileDiagnostics>(m, "SmileDiagnostics")
        .def_readonly("atm_variance", &SmileDiagnostics::atm_variance)
        .def_readonly("min_location", &SmileDiagnostics::min_location)
        .def_readonly("left_slope", &SmileDiagnostics::left_slope)
        .def_readonly("right_slope", &SmileDiagnostics::right_slope)
        .def_readonly("orientation", &SmileDiagnostics::orientation);

    m.def("validate_heston", &validate_heston, py::arg("params"));
    m.def("derive_constants", &derive_constants, py::arg("params"));
    m.def("heston_to_svi_omega", &heston_to_svi_omega, py::arg("params"));
    m.def("svi_omega_to_raw", &svi_omega_to_raw, py::arg("omega"), py::arg("T"));
    m.def("svi_raw_to_omega", &svi_raw_to_omega, py::arg("raw"));
    m.def("sample_heston_params", &sample_heston_params, py::arg("count"), py::arg("seed"));

    m.def("svi_omega_variance", py::vectorize([](SVIOmegaParams s, double x) {
              return svi_omega_variance(s, x);
          }),
          py::arg("omega"), py::arg("x"));
    m.def("svi_raw_total_variance", py::vectorize([](SVIRawParams r, double k) {
              return svi_raw_total_variance(r, k);
          }),
          py::arg("raw"), py::arg("k"));
    m.def("smile_minimum", &smile_minimum, py::arg("omega"));
    m.def("wing_slopes", &wing_slopes, py::arg("omega"));
    m.def("diagnostics", &diagnostics, py::arg("omega"));
    m.def("omega1_small_vvol_approx", &omega1_small_vvol_approx, py::arg("params"));
    m.def("omega1_large_vvol_approx", &omega1_large_vvol_approx, py::arg("params"));

    py::class_<AsymptoticPipeline>(m, "AsymptoticPipeline")
        .def(py::init<const HestonParams&>(), py::arg("params"))
        .def_property_readonly("params", &AsymptoticPipeline::params)
        .def_property_readonly("constants", &AsymptoticPipeline::constants)
        .def("d_of_p", &AsymptoticPipeline::d_of_p)
        .def("v_of_p", &AsymptoticPipeline::v_of_p)
        .def("p_star", &AsymptoticPipeline::p_star)
        .def("v_star", &AsymptoticPipeline::v_star)
        .def("phi_of_x", &AsymptoticPipeline::phi_of_x)
        .def("sign_polynomial_roots", &AsymptoticPipeline::sign_polynomial_roots)
        .def("variance", py::vectorize([](AsymptoticPipeline c, double x) {
                 return c.asymptotic_variance_closed(x);
             }),
             py::arg("x"))
        .def("variance_pipeline", py::vectorize([](AsymptoticPipeline c, double x) {
                 return c.asymptotic_variance_pipeline(x);
             }),
             py::arg("x"));

    py::class_<EquivalenceReport>(m, "EquivalenceReport")
        .def_readonly("max_abs_deviation", &EquivalenceReport::max_abs_deviation)
        .def_readonly("max_rel_deviation", &EquivalenceReport::max_rel_deviation)
        .def_readonly("worst_x", &EquivalenceReport::worst_x)
        .def_readonly("passed", &EquivalenceReport::pass);
    m.def(
        "verify_equivalence",
        [](const AsymptoticPipeline& ctx, std::vector<double> grid, double tol) {
            return verify_equivalence(ctx, grid, tol);
        },
        py::arg("pipeline"), py::arg("grid"), py::arg("tolerance") = kEquivalenceTolerance);

    py::class_<SaddleContext>(m, "SaddleContext")
        .def(py::init<const HestonParams&>(), py::arg("params"))
        .def("v_complex", &SaddleContext::v_complex)
        .def("psi", &SaddleContext::psi)
        .def("u_tilde", &SaddleContext::u_tilde);
    py::class_<SaddleResidual>(m, "SaddleResidual")
        .def_readonly("x", &SaddleResidual::x)
        .def_readonly("svi_variance", &SaddleResidual::svi_variance)
        .def_readonly("lhs", &SaddleResidual::lhs)
        .def_readonly("rhs", &SaddleResidual::rhs)
        .def_readonly("rel_residual", &SaddleResidual::rel_residual)
        .def_readonly("saddle_equation_residual", &SaddleResidual::saddle_equation_residual);
    m.def("saddle_residual", &saddle_residual, py::arg("context"), py::arg("x"));

    py::class_<QuadratureConfig>(m, "QuadratureConfig")
        .def(py::init<>())
        .def_readwrite("truncation", &QuadratureConfig::truncation)
        .def_readwrite("tolerance", &QuadratureConfig::tolerance)
        .def_readwrite("max_subdivisions", &QuadratureConfig::max_subdivisions)
        .def_readwrite("max_truncation", &QuadratureConfig::max_truncation)
        .def_readwrite("contour", &QuadratureConfig::contour);

    m.def("heston_cf", &heston_cf, py::arg("params"), py::arg("z"), py::arg("T"));
    m.def("price_call_fourier", &price_call_fourier, py::arg("params"), py::arg("k"), py::arg("T"),
          py::arg("quadrature") = QuadratureConfig{});
    m.def("bs_call_price", py::vectorize(&bs_call_price), py::arg("vol"), py::arg("k"), py::arg("T"));
    m.def("implied_vol", &implied_vol, py::arg("price"), py::arg("k"), py::arg("T"));

    py::class_<Smile>(m, "Smile")
        .def(py::init([](double T, const std::vector<double>& k, const std::vector<double>& vol) {
                 if (k.size() != vol.size()) throw MalformedInputError("k and vol differ in length");
                 std::vector<SmilePoint> pts;
                 for (std::size_t i = 0; i < k.size(); ++i) pts.push_back({k[i], vol[i]});
                 return Smile(T, std::move(pts), SmileSource::synthetic);
             }),
             py::arg("T"), py::arg("k"), py::arg("vol"))
        .def_property_readonly("T", &Smile::maturity)
        .def_property_readonly("source", [](const Smile& s) { return to_string(s.source()); })
        .def_property_readonly("k",
                               [](const Smile& s) {
                                   std::vector<double> out;
                                   for (const auto& p : s.points()) out.push_back(p.k);
                                   return out;
                               })
        .def_property_readonly("vol",
                               [](const Smile& s) {
                                   std::vector<double> out;
                                   for (const auto& p : s.points()) out.push_back(p.vol);
                                   return out;
                               })
        .def("__len__", &Smile::size);

    m.def(
        "heston_smile",
        [](const HestonParams& p, double T, std::vector<double> x, const QuadratureConfig& q) {
            auto r = heston_smile(p, T, x, q);
            if (!r.failures.empty()) {
                const auto& f = r.failures.front();
                throw AccuracyError("pricing failed at x = " + format_double(f.x) + ": " + f.message, 0.0, 0.0);
            }
            return r.smile;
        },
        py::arg("params"), py::arg("T"), py::arg("x_grid"), py::arg("quadrature") = QuadratureConfig{});

    py::class_<FitInterpretation>(m, "FitInterpretation")
        .def_readonly("orientation", &FitInterpretation::orientation)
        .def_readonly("omega", &FitInterpretation::omega)
        .def_readonly("diagnostics", &FitInterpretation::diagnostics)
        .def_readonly("min_location_k", &FitInterpretation::min_location_k)
        .def_readonly("raw_slopes", &FitInterpretation::raw_slopes)
        .def_readonly("atm_variance", &FitInterpretation::atm_variance)
        .def_readonly("consistency_residual", &FitInterpretation::consistency_residual);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("params", &FitResult::params)
        .def_readonly("objective", &FitResult::objective)
        .def_readonly("iterations", &FitResult::iterations)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("interpretation", &FitResult::interpretation)
        .def("to_json", [](const FitResult& r) { return nlohmann::json(r).dump(); });

    m.def(
        "fit_svi",
        [](const Smile& s, std::optional<SVIRawParams> initial) { return fit_svi(s, initial); },
        py::arg("smile"), py::arg("initial") = py::none());
    m.def("interpret_fit", &interpret_fit, py::arg("result"));
}
