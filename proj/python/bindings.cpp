#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pii/asymp_series.hpp"
#include "pii/connection.hpp"
#include "pii/pii_ode.hpp"
#include "pii/specfun.hpp"
#include "pii/verifier.hpp"

namespace py = pybind11;
using namespace pii;

namespace {

PIIParams make_params(const std::string& family, cplx alpha, cplx k) {
    if (family != "real" && family != "imag")
        throw py::value_error("family must be 'real' or 'imag'");
    PIIParams p{alpha, k, family == "real" ? Family::RealAS : Family::ImagAS};
    p.check_family();
    return p;
}

py::dict connection_dict(const ConnectionData& c) {
    py::dict d;
    d["d"] = c.d;
    d["phi"] = c.phi;
    d["nu"] = c.nu;
    return d;
}

}  // namespace

PYBIND11_MODULE(_pii, m) {
    m.doc() = "Ablowitz-Segur solutions of inhomogeneous Painleve II";

    py::register_exception<InvalidParams>(m, "InvalidParams", PyExc_ValueError);
    py::register_exception<FitFailure>(m, "FitFailure", PyExc_RuntimeError);

    m.def("airy_ai", [](double x) {
        const AiryValue a = airy_ai(x);
        return py::make_tuple(a.ai, a.ai_prime, a.rel_err_est);
    }, py::arg("x"), "Ai(x), Ai'(x) and the truncation estimate for x >= 8.");
    m.def("log_gamma", &log_gamma, py::arg("z"));
    m.def("arg_gamma_imag", &arg_gamma_imag, py::arg("y"));

    m.def("series_coeffs", [](cplx alpha, int n_max) { return series_coeffs(alpha, n_max).coeffs; },
          py::arg("alpha"), py::arg("n_max"));
    m.def("eval_B", [](cplx alpha, double x, int n) {
        const BValue b = eval_B(alpha, x, n < 0 ? Truncation::optimal() : Truncation::fixed(n));
        return py::make_tuple(b.value, b.err_est);
    }, py::arg("alpha"), py::arg("x"), py::arg("n") = -1, "Truncated series; n < 0 selects optimal truncation.");

    m.def("connect", [](const std::string& family, cplx alpha, cplx k) -> py::object {
        const Connection c = connect(make_params(family, alpha, k));
        if (std::holds_alternative<TrivialConnection>(c)) {
            py::dict d;
            d["trivial"] = true;
            return std::move(d);
        }
        return connection_dict(std::get<ConnectionData>(c));
    }, py::arg("family"), py::arg("alpha"), py::arg("k"));

    m.def("oscillatory_leading_term", [](double x, const std::string& family, cplx alpha, cplx k) {
        return oscillatory_leading_term(x, make_params(family, alpha, k));
    }, py::arg("x"), py::arg("family"), py::arg("alpha"), py::arg("k"));

    m.def("integrate", [](const std::string& family, cplx alpha, cplx k, double x0, double x_end, double tol,
                          double spacing) {
        const PIIParams p = make_params(family, alpha, k);
        IntegrateOptions o;
        o.sample_spacing = spacing;
        Trajectory t;
        {
            py::gil_scoped_release release;
            t = integrate(p, x0, x_end, init_plus(p, x0), tol, o);
        }
        std::vector<double> xs;
        std::vector<cplx> us, ups;
        for (const State& s : t.samples) {
            xs.push_back(s.x);
            us.push_back(s.u);
            ups.push_back(s.up);
        }
        py::dict d;
        d["x"] = xs;
        d["u"] = us;
        d["u_prime"] = ups;
        d["status"] = to_string(t.status);
        d["x_pole"] = t.x_pole;
        return d;
    }, py::arg("family"), py::arg("alpha"), py::arg("k"), py::arg("x0") = kDefaultX0, py::arg("x_end") = -150.0,
       py::arg("tol") = 1e-11, py::arg("spacing") = 0.5);

    m.def("verify_connection", [](const std::string& family, cplx alpha, cplx k, double x_end, double tol) {
        const PIIParams p = make_params(family, alpha, k);
        VerifyConfig cfg;
        cfg.x_end = x_end;
        cfg.tol = tol;
        VerificationReport r;
        {
            py::gil_scoped_release release;
            r = verify_connection(p, cfg);
        }
        py::dict d;
        d["pass"] = r.pass;
        d["predicted"] = connection_dict(r.predicted);
        d["d_fit"] = r.fitted.d_fit;
        d["phi_fit"] = r.fitted.phi_fit;
        d["err_d_rel"] = r.err_d_rel;
        d["err_phi_abs"] = r.err_phi_abs;
        d["pole_status"] = to_string(r.pole_status);
        d["error"] = r.error;
        return d;
    }, py::arg("family"), py::arg("alpha"), py::arg("k"), py::arg("x_end") = -150.0, py::arg("tol") = 1e-11);

    m.def("scan_pole_free", [](const std::vector<std::tuple<std::string, cplx, cplx>>& grid, double x_min,
                               double x_max) {
        std::vector<PIIParams> ps;
        for (const auto& [f, a, k] : grid)
            ps.push_back(make_params(f, a, k));
        std::vector<ScanRow> rows;
        {
            py::gil_scoped_release release;
            rows = scan_pole_free(ps, x_min, x_max);
        }
        py::list out;
        for (const ScanRow& r : rows)
            out.append(py::make_tuple(to_string(r.params.family), r.params.alpha, r.params.k, to_string(r.status),
                                      r.x_pole));
        return out;
    }, py::arg("grid"), py::arg("x_min") = -60.0, py::arg("x_max") = 15.0);
}
