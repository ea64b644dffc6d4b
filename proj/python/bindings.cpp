#include "vplab/precoder.hpp"
#include "vplab/replica.hpp"
#include "vplab/spectral.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace vplab;

namespace {

RelaxationScheme make_scheme(const std::string& name, int L) {
    if (name == "lattice") return RelaxationScheme::lattice(L);
    if (name == "convex") return RelaxationScheme::convex();
    throw std::invalid_argument("scheme must be 'lattice' or 'convex'");
}

py::dict rsb_dict(const OneRsbSolution& s) {
    py::dict d;
    d["alpha"] = s.alpha;
    d["L"] = s.L;
    d["q1"] = s.q1;
    d["p1"] = s.p1;
    d["chi1"] = s.chi1;
    d["mu1"] = s.mu1;
    d["energy"] = s.energy;
    d["energy_db"] = s.energy_db();
    d["method"] = s.method;
    return d;
}

}  // namespace

PYBIND11_MODULE(_vplab, m) {
    m.doc() = "Vector precoding energy penalties, Monte Carlo and spectral efficiency";

    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<TooLargeError>(m, "TooLargeError", PyExc_RuntimeError);
    py::register_exception<SingularChannelError>(m, "SingularChannelError", PyExc_RuntimeError);

    m.def("gauss_hermite", [](int n) {
        const auto r = gauss_hermite(n);
        return py::make_tuple(r.nodes, r.weights);
    }, py::arg("n"), "Nodes and weights for the weight exp(-x^2)/sqrt(pi).");
    m.def("q_function", &q_function, py::arg("x"));
    m.def("lattice_lower_bound", &lattice_lower_bound, py::arg("alpha"));
    m.def("r_gaussian", &r_gaussian, py::arg("w"), py::arg("alpha"));

    m.def("sample_gaussian_channel", &sample_gaussian_channel, py::arg("K"), py::arg("N"), py::arg("seed"));
    m.def("zf_gram", &zf_gram, py::arg("H"), py::arg("max_condition") = 1e12);
    m.def("enumerate_points", [](const std::string& scheme, int L, std::complex<double> u) {
        return enumerate_points(make_scheme(scheme, L), u);
    }, py::arg("scheme"), py::arg("L"), py::arg("u"));
    m.def("min_energy", [](const ComplexMatrix& J, const ComplexVector& u, const std::string& scheme, int L) {
        const auto r = min_energy(J, u, make_scheme(scheme, L));
        return py::make_tuple(r.x, r.energy_per_symbol);
    }, py::arg("J"), py::arg("u"), py::arg("scheme") = "lattice", py::arg("L") = 2,
       "Returns (x, energy per symbol).");

    m.def("run_mc", [](int K, double alpha, int trials, const std::string& scheme, int L, std::uint64_t seed,
                       int threads) {
        McConfig c;
        c.K = K;
        c.alpha = alpha;
        c.trials = trials;
        c.scheme = make_scheme(scheme, L);
        c.seed = seed;
        c.threads = threads;
        const auto r = run_mc(c);
        py::dict d;
        d["K"] = r.K;
        d["N"] = r.N;
        d["mean"] = r.mean;
        d["mean_db"] = to_db(r.mean);
        d["std_error"] = r.std_error;
        d["per_trial"] = r.per_trial;
        d["failures"] = r.failures;
        return d;
    }, py::arg("K"), py::arg("alpha"), py::arg("trials"), py::arg("scheme") = "lattice", py::arg("L") = 2,
       py::arg("seed") = 1, py::arg("threads") = 0);

    m.def("solve_rs", [](const std::string& scheme, double alpha, int L) {
        const auto s = solve_rs(make_scheme(scheme, L), alpha);
        py::dict d;
        d["alpha"] = s.alpha;
        d["q0"] = s.q0;
        d["chi0"] = s.chi0;
        d["energy"] = s.energy;
        d["energy_db"] = s.energy_db();
        return d;
    }, py::arg("scheme"), py::arg("alpha"), py::arg("L") = 2);
    m.def("solve_1rsb_lattice", [](double alpha, int L) { return rsb_dict(solve_1rsb_lattice(alpha, L)); },
          py::arg("alpha"), py::arg("L") = 2);
    m.def("solve_crqpsk_energy", [](double alpha) { return solve_crqpsk_energy(alpha); }, py::arg("alpha"));
    m.def("entropy_gaussian", [](double chi, double alpha) { return entropy_gaussian(chi, alpha).entropy; },
          py::arg("chi"), py::arg("alpha"));

    m.def("se_at_snr", [](const std::string& scheme, double snr, double alpha, int L) {
        SpectralOptions o;
        o.L = L;
        return se_at_snr(parse_se_scheme(scheme), snr, alpha, o);
    }, py::arg("scheme"), py::arg("snr"), py::arg("alpha"), py::arg("L") = 2);
    m.def("se_at_ebno", [](const std::string& scheme, double ebno_db, double alpha, int L) {
        SpectralOptions o;
        o.L = L;
        const auto p = se_at_ebno(parse_se_scheme(scheme), ebno_db, alpha, o);
        return py::make_tuple(p.C, p.snr_db);
    }, py::arg("scheme"), py::arg("ebno_db"), py::arg("alpha"), py::arg("L") = 2, "Returns (C, snr_db).");
}
