// Command-line front end: energy, Monte Carlo, spectral-efficiency and
// entropy sweeps written as CSV with a '#' manifest header.

#include "vplab/numerics.hpp"
#include "vplab/precoder.hpp"
#include "vplab/random_matrix.hpp"
#include "vplab/replica.hpp"
#include "vplab/spectral.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef VPLAB_VERSION
#define VPLAB_VERSION "0.0.0"
#endif

using namespace vplab;

namespace {

std::string fmt(double v) {
    if (!std::isfinite(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

struct Csv {
    std::ostringstream body;
    std::vector<std::pair<std::string, std::string>> manifest;

    void meta(const std::string& k, const std::string& v) { manifest.emplace_back(k, v); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) body << ',';
            const std::string& c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos) {
                body << '"';
                for (char ch : c) body << (ch == '"' ? std::string("\"\"") : std::string(1, ch));
                body << '"';
            } else {
                body << c;
            }
        }
        body << '\n';
    }

    void write(const std::string& path) const {
        std::ostringstream out;
        for (const auto& [k, v] : manifest) out << "# " << k << ": " << v << '\n';
        out << body.str();
        if (path.empty() || path == "-") {
            std::cout << out.str();
        } else {
            std::ofstream f(path, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open " + path);
            f << out.str();
        }
    }
};

struct Common {
    std::string command_line;
    std::string out;
    bool timestamp = false;
    SolverConfig solver;
};

void add_common_manifest(Csv& csv, const Common& c, const std::string& cmd) {
    csv.meta("command", c.command_line);
    csv.meta("subcommand", cmd);
    csv.meta("library_version", VPLAB_VERSION);
    csv.meta("rng_algorithm", kRngAlgorithm);
    csv.meta("solver", "tolerance=" + fmt(c.solver.tolerance) + " max_iterations=" +
                           std::to_string(c.solver.max_iterations) + " damping=" + fmt(c.solver.damping) +
                           " quadrature_order=" + std::to_string(c.solver.quadrature_order));
    csv.meta("units", "energies and Eb/N0 in dB (10 log10); C in bit/s/Hz per transmit antenna");
    if (c.timestamp) {
        const std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        csv.meta("timestamp", buf);
    } else {
        csv.meta("timestamp", "not recorded (use --timestamp)");
    }
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw CLI::ValidationError("steps", "must be >= 1");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    if (n > 1) v[n - 1] = b;  // exact endpoint so alpha=1 hits the unit-load branch
    return v;
}

// Each command returns the number of failed rows.
int cmd_energy_sweep(const Common& c, const std::string& scheme, double a0, double a1, int steps, int L) {
    Csv csv;
    add_common_manifest(csv, c, "energy-sweep");
    csv.meta("scheme", scheme);
    csv.meta("grid", "alpha " + fmt(a0) + ".." + fmt(a1) + " steps=" + std::to_string(steps) + " L=" +
                         std::to_string(L));
    csv.row({"alpha", "energy_rs_db", "energy_rsb1_db", "energy_crqpsk_db", "lower_bound_db", "rs_below_bound",
             "rsb1_method", "status"});
    const bool lattice = scheme == "lattice";
    if (!lattice && scheme != "convex") throw CLI::ValidationError("--scheme", "must be lattice or convex");
    int failures = 0;
    std::optional<OneRsbSolution> prev;
    for (double a : linspace(a0, a1, steps)) {
        std::optional<double> rs, rsb1, cr, lb;
        std::string method, status = "ok";
        try {
            if (lattice) {
                if (a < 1.0) rs = solve_rs(RelaxationScheme::lattice(L), a, c.solver).energy_db();
                OneRsbSolution s = solve_1rsb_lattice(a, L, c.solver, prev ? &*prev : nullptr);
                rsb1 = s.energy_db();
                method = s.method;
                prev = s;
                lb = to_db(lattice_lower_bound(a));
            } else {
                rs = solve_rs(RelaxationScheme::convex(), a, c.solver).energy_db();
                cr = to_db(solve_crqpsk_energy(a, c.solver));
                if (a <= 1.0) lb = to_db(lattice_lower_bound(a));
            }
        } catch (const std::exception& e) {
            status = std::string("error: ") + e.what();
            ++failures;
        }
        std::string below = (rs && lb) ? (*rs < *lb ? "1" : "0") : "";
        csv.row({fmt(a), fmt(rs), fmt(rsb1), fmt(cr), fmt(lb), below, method, status});
    }
    csv.write(c.out);
    return failures;
}

int cmd_mc(const Common& c, int K, double alpha, int trials, const std::string& scheme, int L,
           std::uint64_t seed, int threads, const std::string& hist) {
    McConfig cfg;
    cfg.K = K;
    cfg.alpha = alpha;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.threads = threads;
    if (scheme == "lattice") {
        cfg.scheme = RelaxationScheme::lattice(L);
        if (K > 16) std::cerr << "warning: lattice Monte Carlo with K > 16 may be slow\n";
    } else if (scheme == "convex") {
        cfg.scheme = RelaxationScheme::convex();
    } else {
        throw CLI::ValidationError("--scheme", "must be lattice or convex");
    }
    McResult r = run_mc(cfg);
    Csv csv;
    add_common_manifest(csv, c, "mc");
    csv.meta("scheme", scheme);
    csv.meta("seed", std::to_string(seed));
    csv.meta("grid", "K=" + std::to_string(K) + " N=" + std::to_string(r.N) + " alpha=" + fmt(alpha) +
                         " alpha_eff=" + fmt(double(K) / r.N) + " trials=" + std::to_string(trials) +
                         (scheme == "lattice" ? " L=" + std::to_string(L) : ""));
    csv.row({"trial", "energy", "energy_db", "std_error", "status"});
    std::size_t j = 0;
    for (int t = 0; t < trials; ++t) {
        if (j < r.trial_ids.size() && r.trial_ids[j] == t) {
            csv.row({std::to_string(t), fmt(r.per_trial[j]), fmt(to_db(r.per_trial[j])), "", "ok"});
            ++j;
        } else {
            csv.row({std::to_string(t), "", "", "", "failed"});
        }
    }
    csv.row({"mean", fmt(r.mean), fmt(to_db(r.mean)), fmt(r.std_error),
             r.failures ? std::to_string(r.failures) + " failed" : "ok"});
    csv.write(c.out);

    if (!hist.empty()) {
        Csv h;
        add_common_manifest(h, c, "mc-histogram");
        h.meta("note", "empirical law of the output given u = 1+j");
        ConditionalDist d = mc_conditional_hist(r);
        h.row({"x_re", "x_im", "probability"});
        for (std::size_t i = 0; i < d.points.size(); ++i)
            h.row({fmt(d.points[i].real()), fmt(d.points[i].imag()), fmt(d.probabilities[i])});
        if (d.continuous_mass > 0.0) h.row({"continuous", "", fmt(d.continuous_mass)});
        h.write(hist);
    }
    return r.failures;
}

int cmd_se_sweep(const Common& c, const std::vector<std::string>& schemes, double e0, double e1, int steps,
                 bool optimize, double alpha, int L, int alpha_points) {
    std::vector<SeScheme> ss;
    for (const auto& n : schemes) {
        try {
            ss.push_back(parse_se_scheme(n));
        } catch (const std::invalid_argument&) {
            throw CLI::ValidationError("--schemes", "unknown scheme " + n);
        }
    }
    SpectralOptions opt;
    opt.L = L;
    opt.solver = c.solver;
    Csv csv;
    add_common_manifest(csv, c, "se-sweep");
    std::string joined;
    for (const auto& n : schemes) joined += (joined.empty() ? "" : ",") + n;
    csv.meta("scheme", joined);
    csv.meta("grid", "ebno " + fmt(e0) + ".." + fmt(e1) + " dB steps=" + std::to_string(steps) +
                         (optimize ? " optimize-load alpha_points=" + std::to_string(alpha_points)
                                   : " alpha=" + fmt(alpha)) +
                         " L=" + std::to_string(L));
    std::vector<std::string> head{"ebno_db"};
    for (const auto& n : schemes) {
        head.push_back("C_" + n);
        head.push_back("alpha_" + n);
    }
    head.push_back("status");
    csv.row(head);
    int failures = 0;
    for (double e : linspace(e0, e1, steps)) {
        std::vector<std::string> row{fmt(e)};
        std::string status = "ok";
        for (SeScheme s : ss) {
            try {
                if (optimize) {
                    LoadOptimum o = optimize_load(s, e, default_alpha_grid(s, alpha_points), opt);
                    row.push_back(fmt(o.C_star));
                    row.push_back(fmt(o.alpha_star));
                } else {
                    SePoint p = se_at_ebno(s, e, alpha, opt);
                    row.push_back(fmt(p.C));
                    row.push_back(fmt(alpha));
                }
            } catch (const std::exception& ex) {
                row.push_back("");
                row.push_back("");
                status = se_scheme_name(s) + ": " + ex.what();
            }
        }
        if (status != "ok") ++failures;
        row.push_back(status);
        csv.row(row);
    }
    csv.write(c.out);
    return failures;
}

int cmd_entropy_sweep(const Common& c, double a0, double a1, int steps, int L) {
    Csv csv;
    add_common_manifest(csv, c, "entropy-sweep");
    csv.meta("scheme", "lattice");
    csv.meta("grid", "alpha " + fmt(a0) + ".." + fmt(a1) + " steps=" + std::to_string(steps) + " L=" +
                         std::to_string(L));
    csv.row({"alpha", "chi_rs", "entropy_rs", "chi_rsb1", "entropy_rsb1", "rsb1_method", "status"});
    int failures = 0;
    std::optional<OneRsbSolution> prev;
    for (double a : linspace(a0, a1, steps)) {
        std::optional<double> xr, sr, x1, s1;
        std::string method, status = "ok";
        try {
            if (a < 1.0) {
                RsSolution rs = solve_rs(RelaxationScheme::lattice(L), a, c.solver);
                xr = rs.chi0;
                sr = entropy_gaussian(rs.chi0, a).entropy;
            }
            OneRsbSolution s = solve_1rsb_lattice(a, L, c.solver, prev ? &*prev : nullptr);
            prev = s;
            x1 = s.chi1;
            s1 = entropy_gaussian(s.chi1, a).entropy;
            method = s.method;
        } catch (const std::exception& e) {
            status = std::string("error: ") + e.what();
            ++failures;
        }
        csv.row({fmt(a), fmt(xr), fmt(sr), fmt(x1), fmt(s1), method, status});
    }
    csv.write(c.out);
    return failures;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vector precoding analysis: replica energies, Monte Carlo and spectral efficiency"};
    app.require_subcommand(1);
    Common common;
    for (int i = 0; i < argc; ++i) common.command_line += (i ? " " : "") + std::string(argv[i]);

    auto add_shared = [&](CLI::App* sub) {
        sub->add_option("--out", common.out, "output CSV path (default stdout)");
        sub->add_flag("--timestamp", common.timestamp, "record the wall-clock time in the manifest");
        sub->add_option("--tolerance", common.solver.tolerance, "solver tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--quadrature-order", common.solver.quadrature_order, "quadrature order")
            ->check(CLI::Range(1, 400));
    };

    double a0 = 0.1, a1 = 1.0;
    int asteps = 10, L = 2;
    std::string scheme = "lattice";

    auto* es = app.add_subcommand("energy-sweep", "energy penalty versus load");
    es->add_option("--scheme", scheme, "lattice or convex");
    es->add_option("--alpha-start", a0)->check(CLI::PositiveNumber);
    es->add_option("--alpha-end", a1)->check(CLI::PositiveNumber);
    es->add_option("--alpha-steps", asteps)->check(CLI::PositiveNumber);
    es->add_option("--L", L)->check(CLI::Range(1, 32));
    add_shared(es);

    int K = 8, trials = 1000, threads = 0;
    double alpha = 0.5;
    std::uint64_t seed = 1;
    std::string hist;
    auto* mc = app.add_subcommand("mc", "Monte Carlo energy penalty");
    mc->add_option("--K", K)->check(CLI::Range(1, 4096));
    mc->add_option("--alpha", alpha)->check(CLI::Range(1e-6, 2.0));
    mc->add_option("--trials", trials)->check(CLI::PositiveNumber);
    mc->add_option("--scheme", scheme, "lattice or convex");
    mc->add_option("--L", L)->check(CLI::Range(1, 8));
    mc->add_option("--seed", seed);
    mc->add_option("--threads", threads)->check(CLI::NonNegativeNumber);
    mc->add_option("--hist", hist, "write the empirical conditional law here");
    add_shared(mc);

    std::vector<std::string> schemes{"dpc", "zf-gauss", "zf-qpsk", "lattice", "cr-qpsk"};
    double e0 = 0.0, e1 = 12.0;
    int esteps = 13, apoints = 64;
    bool optimize = false;
    auto* se = app.add_subcommand("se-sweep", "spectral efficiency versus Eb/N0");
    se->add_option("--schemes", schemes, "dpc, zf-gauss, zf-qpsk, lattice, cr-qpsk, gthp")->delimiter(',');
    se->add_option("--ebno-start", e0);
    se->add_option("--ebno-end", e1);
    se->add_option("--ebno-steps", esteps)->check(CLI::PositiveNumber);
    se->add_flag("--optimize-load", optimize);
    se->add_option("--alpha", alpha, "load when not optimizing")->check(CLI::Range(1e-6, 2.0));
    se->add_option("--alpha-points", apoints)->check(CLI::Range(3, 1024));
    se->add_option("--L", L)->check(CLI::Range(1, 32));
    add_shared(se);

    auto* en = app.add_subcommand("entropy-sweep", "zero-temperature entropy versus load");
    en->add_option("--alpha-start", a0)->check(CLI::PositiveNumber);
    en->add_option("--alpha-end", a1)->check(CLI::PositiveNumber);
    en->add_option("--alpha-steps", asteps)->check(CLI::PositiveNumber);
    en->add_option("--L", L)->check(CLI::Range(1, 32));
    add_shared(en);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        common.solver.validate();
        int failures = 0;
        if (*es) failures = cmd_energy_sweep(common, scheme, a0, a1, asteps, L);
        if (*mc) failures = cmd_mc(common, K, alpha, trials, scheme, L, seed, threads, hist);
        if (*se) failures = cmd_se_sweep(common, schemes, e0, e1, esteps, optimize, alpha, L, apoints);
        if (*en) failures = cmd_entropy_sweep(common, a0, a1, asteps, L);
        return failures ? 1 : 0;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
