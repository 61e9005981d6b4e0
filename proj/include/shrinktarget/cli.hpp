#pragma once
// Command-line front end: one verb per module operation, JSON/CSV/PGM
// artifacts, and a batch manifest runner.  dispatch() is the whole program;
// the binary is a two-line wrapper around it.  Exit codes: 0 success, 2 for
// any validation or domain error (the message names the violated
// precondition), 1 for unexpected failures.  Given --seed, every artifact is
// byte-identical across runs.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "boxcount.hpp"
#include "dimension.hpp"
#include "diophantine.hpp"
#include "errors.hpp"
#include "jsonio.hpp"
#include "measure.hpp"
#include "preimage.hpp"
#include "raster.hpp"
#include "scenarios.hpp"
#include "singular.hpp"
#include "spectral.hpp"

namespace st {

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open output file '" + path + "'");
    f.write(content.data(), std::streamsize(content.size()));
    if (!f) throw DomainError("failed while writing '" + path + "'");
}

// To the file named by --out, or to the stream when no path was given.
inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty())
        out << text;
    else
        write_file(path, text);
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

inline QuadSurd parse_theta(const std::string& t) {
    if (t == "golden") return QuadSurd(1, 1, 2, 5);
    if (t == "sqrt2") return QuadSurd(0, 1, 1, 2);
    const std::vector<int> v = parse_int_list(t);
    if (v.size() != 4)
        throw DomainError("theta must be 'golden', 'sqrt2', or p,q,r,D for (p + q sqrt(D)) / r");
    return QuadSurd(v[0], v[1], v[2], v[3]);
}

// All flag values across verbs; each subcommand binds only its own.
struct Opts {
    std::string matrix, z = "0,0", center, theta, radius_rat, n_text = "1", scen_n = "6", name,
        file;
    std::string out, out_dir = ".";
    double tau = 0, delta = 0, radius = 0.2, s = 1.0;
    long long n = 1, N = 100, samples = 100000, pairs = 100000, b = 2, m = 3;
    std::uint64_t seed = 12345;
    int grid = 151, threads = 1, subsamples = 3, k = 1, n_lo = -1, n_hi = -1, terms = 20,
        balls = 20;
    bool upper_only = false, sweep = false, resolved = false;
};

inline long long single_n(const std::string& text) {
    const std::vector<int> v = parse_int_list(text);
    if (v.size() != 1) throw DomainError("this command takes a single --n value");
    return v[0];
}

inline void run_spectrum(const Opts& o, std::ostream& out) {
    emit(dump(report_json(spectral_data(parse_matrix(o.matrix)))), o.out, out);
}

inline void run_dim(const Opts& o, std::ostream& out) {
    const IntMatrix A = parse_matrix(o.matrix);
    DimensionResult r;
    if (o.upper_only) {
        r = upper_bound_dimension(A, o.tau);
    } else {
        const SpectralData s = spectral_data(A);
        if (s.is_expanding)
            r = expanding_dimension(A, o.tau);
        else if (s.d == 2 && s.is_hyperbolic)
            r = hyperbolic_2d_dimension(A, o.tau);
        else if (!s.is_hyperbolic)
            throw DomainError(
                "matrix has eigenvalue on the unit circle; only upper bound available via `dim "
                "--upper-only`");
        else
            throw DomainError(
                "no exact formula for a mixed-spectrum matrix in dimension > 2; the bound is "
                "available via `dim --upper-only`");
    }
    emit(dump(report_json(r)), o.out, out);
}

inline void run_profile(const Opts& o, std::ostream& out) {
    const IntMatrix A = parse_matrix(o.matrix);
    if (!(o.tau > 0)) throw DomainError("profile needs --tau > 0 (the grid's upper end)");
    if (o.grid < 2) throw DomainError("profile needs --grid >= 2 points");
    std::vector<double> taus;
    for (int i = 0; i < o.grid; ++i) taus.push_back(o.tau * double(i) / double(o.grid - 1));
    const ProfileResult p = dimension_profile(A, taus);
    if (ends_with(o.out, ".csv"))
        emit(profile_csv(p), o.out, out);
    else
        emit(dump(report_json(p)), o.out, out);
}

inline void run_preimage(const Opts& o, bool have_tau, std::ostream& out) {
    const IntMatrix A = parse_matrix(o.matrix);
    const TorusPoint z = parse_point(o.z);
    const long long n = single_n(o.n_text);
    if (have_tau) {
        emit(dump(report_json(preimage_set(A, n, z, o.tau))), o.out, out);
        return;
    }
    ojson j = detail::header("preimage");
    j["n"] = n;
    j["z"] = point_strs(z);
    const auto centers = preimage_points(A, n, z);
    j["count"] = static_cast<long long>(centers.size());
    ojson cs = ojson::array();
    for (const auto& c : centers) cs.push_back(point_strs(c));
    j["centers"] = std::move(cs);
    emit(dump(j), o.out, out);
}

inline void run_raster(const Opts& o, std::ostream& out) {
    const IntMatrix A = parse_matrix(o.matrix);
    const RasterGrid g = rasterize(A, int(single_n(o.n_text)), parse_point(o.z), o.tau, o.grid,
                                   o.subsamples, o.threads);
    if (ends_with(o.out, ".json")) {
        ojson j = detail::header("raster");
        j["d"] = g.d;
        j["m"] = g.m;
        j["marked"] = g.marked;
        ojson cells = ojson::array();
        for (const auto& c : marked_cells(g)) cells.push_back(c);
        j["cells"] = std::move(cells);
        emit(dump(j), o.out, out);
        return;
    }
    emit(to_pgm(g), o.out, out);  // binary PGM; stdout only makes sense redirected
}

inline void run_boxcount(const Opts& o, bool have_k, std::ostream& out) {
    const IntMatrix A = parse_matrix(o.matrix);
    const TorusPoint z = parse_point(o.z);
    if (have_k) {
        const ExponentFit f =
            covering_exponent_fit(A, z, o.tau, o.k, parse_int_list(o.n_text), o.subsamples, o.threads);
        if (ends_with(o.out, ".csv"))
            emit(fit_csv(f), o.out, out);
        else
            emit(dump(report_json(f)), o.out, out);
        return;
    }
    if (o.n_lo >= 0 || o.n_hi >= 0) {
        if (o.n_lo < 0 || o.n_hi < 0)
            throw DomainError("the union trend needs both --n-lo and --n-hi");
        const TrendReport t =
            limsup_boxdim_trend(A, z, o.tau, o.n_lo, o.n_hi, o.delta, o.subsamples, o.threads);
        if (ends_with(o.out, ".csv"))
            emit(trend_csv(t), o.out, out);
        else
            emit(dump(report_json(t)), o.out, out);
        return;
    }
    const CoverReport c = covering_number(A, int(single_n(o.n_text)), z, o.tau, o.delta,
                                          o.subsamples, o.threads);
    emit(dump(report_json(c)), o.out, out);
}

inline void run_three_distance(const Opts& o, bool have_matrix, std::ostream& out) {
    const QuadSurd theta =
        have_matrix ? eigen_slope(parse_matrix(o.matrix)) : parse_theta(o.theta);
    if (o.sweep) {
        const auto rows = three_distance_sweep(theta.to_hp(), o.N);
        if (ends_with(o.out, ".csv")) {
            emit(sweep_csv(rows), o.out, out);
            return;
        }
        ojson j = detail::header("three-distance-sweep");
        ojson jr = ojson::array();
        for (const auto& r : rows)
            jr.push_back(ojson{{"N", r.N},
                               {"distinct", r.distinct},
                               {"d_min", r.d_min},
                               {"d_max", r.d_max},
                               {"ratio", r.ratio}});
        j["rows"] = std::move(jr);
        emit(dump(j), o.out, out);
        return;
    }
    emit(dump(report_json(three_distance(theta, o.N))), o.out, out);
}

inline void run_cf(const Opts& o, bool have_matrix, std::ostream& out) {
    const QuadSurd theta =
        have_matrix ? eigen_slope(parse_matrix(o.matrix)) : parse_theta(o.theta);
    const ContinuedFraction cf = continued_fraction(theta);
    emit(dump(report_json(theta, cf, o.terms)), o.out, out);
}

inline void run_lattice_count(const Opts& o, std::ostream& out) {
    const IntMatrix A = parse_matrix(o.matrix);
    emit(dump(report_json(lattice_count_ellipse(A, int(single_n(o.n_text)),
                                                parse_rational(o.radius_rat)))),
         o.out, out);
}

inline void run_probe_mass(const Opts& o, std::ostream& out) {
    const IntMatrix A = parse_matrix(o.matrix);
    const Ball B(parse_point(o.center), o.radius);
    const MassEstimate e = mu_n_ball(A, int(single_n(o.n_text)), parse_point(o.z), o.tau, B,
                                     o.samples, o.seed, o.threads);
    emit(dump(report_json(e)), o.out, out);
}

inline void run_probe_ratio(const Opts& o, std::ostream& out) {
    const IntMatrix A = parse_matrix(o.matrix);
    if (o.balls < 1) throw DomainError("probe-ratio needs --balls >= 1");
    // Ball centers drawn once from a seed-derived stream, dyadic so they are
    // exact; the probe itself uses --seed unchanged.
    Rng centers(o.seed + 0x9e3779b97f4a7c15ULL);
    std::vector<Ball> balls;
    for (int i = 0; i < o.balls; ++i) {
        std::vector<Rat> c;
        for (int j = 0; j < A.dim(); ++j)
            c.push_back(Rat(Int(std::llround(centers.uniform() * 1048576.0)), Int(1048576)));
        balls.emplace_back(TorusPoint(c), o.radius);
    }
    const WeakConvergenceReport r = weak_convergence_ratio(A, int(single_n(o.n_text)),
                                                           parse_point(o.z), o.tau, balls,
                                                           o.samples, o.seed, o.threads);
    emit(dump(report_json(r)), o.out, out);
}

inline void run_riesz(const Opts& o, std::ostream& out) {
    const IntMatrix A = parse_matrix(o.matrix);
    const TorusPoint z = parse_point(o.z);
    const int n = int(single_n(o.n_text));
    if (o.resolved)
        emit(dump(report_json(riesz_energy_resolved(A, n, z, o.tau, o.s, o.pairs, o.seed,
                                                    o.threads))),
             o.out, out);
    else
        emit(dump(report_json(riesz_energy(A, n, z, o.tau, o.s, o.pairs, o.seed, o.threads))),
             o.out, out);
}

inline void run_scenario(const Opts& o, bool have_tau, std::ostream& out) {
    ScenarioResult r;
    if (o.name == "cat-map-profile") {
        r = cat_map_profile();
    } else if (o.name == "empty-limsup-1d-factor") {
        r = empty_limsup_1d_factor(o.b, have_tau ? o.tau : 0.5, int(o.N), o.grid);
    } else if (o.name == "block-4d-comparison") {
        double tau = o.tau;
        if (!have_tau) {  // default to the midpoint of the admissible window
            IntMatrix A4{{2, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, o.m + 1, o.m}, {0, 0, 1, 1}};
            const SpectralData sp = spectral_data(A4);
            tau = 0.25 * (sp.log_moduli[2] + 3 * sp.log_moduli[3]);
        }
        r = block_4d_comparison(o.m, tau, parse_int_list(o.scen_n), o.samples, o.seed);
    } else if (o.name == "empty-limsup-3d") {
        r = empty_limsup_3d(o.m, have_tau ? o.tau : 1.2, int(o.N), o.samples, o.seed);
    } else {
        throw DomainError("unknown scenario '" + o.name +
                          "'; known: cat-map-profile, empty-limsup-1d-factor, "
                          "block-4d-comparison, empty-limsup-3d");
    }
    if (!r.artifacts.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(o.out_dir, ec);
        if (ec) throw DomainError("cannot create artifact directory '" + o.out_dir + "'");
        for (const auto& a : r.artifacts) write_file(o.out_dir + "/" + a.first, a.second);
    }
    emit(dump(report_json(r)), o.out, out);
}

inline void run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

inline void run_manifest(const Opts& o, std::ostream& out, std::ostream& err) {
    std::ifstream f(o.file);
    if (!f) throw ManifestError("cannot open manifest '" + o.file + "'");
    ojson doc = ojson::parse(f, nullptr, false);
    if (doc.is_discarded()) throw ManifestError("manifest '" + o.file + "' is not valid JSON");
    if (!doc.is_object() || !doc.contains("commands") || !doc["commands"].is_array())
        throw ManifestError("manifest must be an object with a 'commands' array");

    const auto& cmds = doc["commands"];
    std::set<std::string> outs;
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        const auto& e = cmds[i];
        const std::string at = "entry " + std::to_string(i + 1);
        if (!e.is_object() || !e.contains("argv") || !e["argv"].is_array() || e["argv"].empty())
            throw ManifestError(at + ": needs a nonempty 'argv' array");
        for (const auto& a : e["argv"]) {
            if (!a.is_string()) throw ManifestError(at + ": argv entries must be strings");
            if (a.get<std::string>() == "--out")
                throw ManifestError(at + ": name the output in the 'out' field, not via --out");
        }
        if (e["argv"][0].get<std::string>() == "manifest")
            throw ManifestError(at + ": manifests cannot nest");
        if (e.contains("out")) {
            if (!e["out"].is_string()) throw ManifestError(at + ": 'out' must be a string");
            const std::string p = e["out"].get<std::string>();
            if (!outs.insert(p).second)
                throw ManifestError(at + ": duplicate output path '" + p + "'");
        }
    }
    ojson summary = header("manifest-summary");
    summary["count"] = cmds.size();
    ojson entries = ojson::array();
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        const auto& e = cmds[i];
        std::vector<std::string> argv;
        for (const auto& a : e["argv"]) argv.push_back(a.get<std::string>());
        const std::string verb = argv[0];
        std::string out_path;
        if (e.contains("out")) {
            out_path = e["out"].get<std::string>();
            argv.push_back("--out");
            argv.push_back(out_path);
        }
        try {
            run_command(argv, out, err);
        } catch (const Error& ex) {
            throw ManifestError("entry " + std::to_string(i + 1) + " (" + verb + "): " + ex.what());
        }
        entries.push_back(ojson{{"argv", e["argv"]}, {"out", out_path}, {"status", "ok"}});
    }
    summary["entries"] = std::move(entries);
    emit(dump(summary), o.out, out);
}

inline void run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"shrinking-target toolkit: exact spectral, dimension, preimage, Diophantine, "
                 "measure, and box-counting computations for integer toral endomorphisms"};
    app.name("shrinktarget-cli");
    app.require_subcommand(1);
    Opts o;

    auto add_common = [&](CLI::App* s, bool need_matrix) {
        auto* opt = s->add_option("--matrix", o.matrix, "integer matrix, 'a,b;c,d' or [[a,b],[c,d]]");
        if (need_matrix) opt->required();
        s->add_option("--out", o.out, "output file (default: stdout)");
        return opt;
    };

    auto* c_spec = app.add_subcommand("spectrum", "characteristic polynomial, eigenvalues, exponents");
    add_common(c_spec, true);

    auto* c_dim = app.add_subcommand("dim", "dimension of the shrinking-target set");
    add_common(c_dim, true);
    c_dim->add_option("--tau", o.tau, "shrinking rate")->required();
    c_dim->add_flag("--upper-only", o.upper_only, "general covering upper bound only");

    auto* c_prof = app.add_subcommand("profile", "dimension as a function of tau");
    add_common(c_prof, true);
    c_prof->add_option("--tau", o.tau, "upper end of the tau grid")->required();
    c_prof->add_option("--grid", o.grid, "number of grid points (default 151)");

    auto* c_pre = app.add_subcommand("preimage", "exact preimage centers of z under A^n");
    add_common(c_pre, true);
    c_pre->add_option("--n", o.n_text, "iterate")->required();
    c_pre->add_option("--z", o.z, "target point, comma-separated rationals")->required();
    auto* pre_tau = c_pre->add_option("--tau", o.tau, "also report the ellipsoid shape for this rate");

    auto* c_rast = app.add_subcommand("raster", "rasterize the preimage set E_n on a grid");
    add_common(c_rast, true);
    c_rast->add_option("--n", o.n_text, "iterate")->required();
    c_rast->add_option("--z", o.z, "target point")->required();
    c_rast->add_option("--tau", o.tau, "shrinking rate")->required();
    c_rast->add_option("--grid", o.grid, "cells per side")->required();
    c_rast->add_option("--subsamples", o.subsamples, "sample points per cell side (default 3)");
    c_rast->add_option("--threads", o.threads, "worker threads");

    auto* c_box = app.add_subcommand("boxcount", "covering numbers and exponent fits");
    add_common(c_box, true);
    c_box->add_option("--z", o.z, "target point")->required();
    c_box->add_option("--tau", o.tau, "shrinking rate")->required();
    c_box->add_option("--n", o.n_text, "iterate, or comma list for --k fits");
    auto* box_k = c_box->add_option("--k", o.k, "fit at the scale of singular direction k");
    c_box->add_option("--delta", o.delta, "box size for direct counts and trends");
    c_box->add_option("--n-lo", o.n_lo, "union trend: first iterate");
    c_box->add_option("--n-hi", o.n_hi, "union trend: last iterate");
    c_box->add_option("--subsamples", o.subsamples, "sample points per cell side (default 3)");
    c_box->add_option("--threads", o.threads, "worker threads");

    auto* c_three = app.add_subcommand("three-distance", "gap structure of {k theta mod 1}");
    auto* three_m = add_common(c_three, false);
    c_three->add_option("--theta", o.theta, "'golden', 'sqrt2', or p,q,r,D");
    c_three->add_option("--N", o.N, "number of rotation points (or sweep bound)")->required();
    c_three->add_flag("--sweep", o.sweep, "report every N up to the bound");

    auto* c_cf = app.add_subcommand("cf", "periodic continued fraction of a quadratic irrational");
    auto* cf_m = add_common(c_cf, false);
    c_cf->add_option("--theta", o.theta, "'golden', 'sqrt2', or p,q,r,D");
    c_cf->add_option("--terms", o.terms, "how many leading terms to expand (default 20)");

    auto* c_lat = app.add_subcommand("lattice-count", "exact lattice points in the preimage ellipse");
    add_common(c_lat, true);
    c_lat->add_option("--n", o.n_text, "iterate")->required();
    c_lat->add_option("--radius", o.radius_rat, "ellipse radius, exact rational")->required();

    auto* c_mass = app.add_subcommand("probe-mass", "Monte-Carlo mu_n mass of one ball");
    add_common(c_mass, true);
    c_mass->add_option("--n", o.n_text, "iterate")->required();
    c_mass->add_option("--z", o.z, "target point")->required();
    c_mass->add_option("--tau", o.tau, "shrinking rate")->required();
    c_mass->add_option("--center", o.center, "ball center, comma-separated rationals")->required();
    c_mass->add_option("--radius", o.radius, "ball radius in (0, 1/2]")->required();
    c_mass->add_option("--samples", o.samples, "sample budget");
    c_mass->add_option("--seed", o.seed, "random seed");
    c_mass->add_option("--threads", o.threads, "worker threads");

    auto* c_ratio = app.add_subcommand("probe-ratio", "mu_n vs Lebesgue over a family of balls");
    add_common(c_ratio, true);
    c_ratio->add_option("--n", o.n_text, "iterate")->required();
    c_ratio->add_option("--z", o.z, "target point")->required();
    c_ratio->add_option("--tau", o.tau, "shrinking rate")->required();
    c_ratio->add_option("--balls", o.balls, "how many probe balls (default 20)");
    c_ratio->add_option("--radius", o.radius, "probe ball radius (default 0.2)");
    c_ratio->add_option("--samples", o.samples, "sample budget");
    c_ratio->add_option("--seed", o.seed, "random seed");
    c_ratio->add_option("--threads", o.threads, "worker threads");

    auto* c_rz = app.add_subcommand("riesz", "Riesz s-energy of mu_n");
    add_common(c_rz, true);
    c_rz->add_option("--n", o.n_text, "iterate")->required();
    c_rz->add_option("--z", o.z, "target point")->required();
    c_rz->add_option("--tau", o.tau, "shrinking rate")->required();
    c_rz->add_option("--s", o.s, "energy exponent")->required();
    c_rz->add_option("--pairs", o.pairs, "sample pair budget");
    c_rz->add_option("--seed", o.seed, "random seed");
    c_rz->add_flag("--resolved", o.resolved, "exact near-field quadrature + censored Monte-Carlo");
    c_rz->add_option("--threads", o.threads, "worker threads");

    auto* c_scen = app.add_subcommand("scenario", "named end-to-end construction with checks");
    c_scen->add_option("--name", o.name, "cat-map-profile | empty-limsup-1d-factor | "
                                         "block-4d-comparison | empty-limsup-3d")->required();
    auto* scen_tau = c_scen->add_option("--tau", o.tau, "shrinking rate (scenario default if absent)");
    c_scen->add_option("--b", o.b, "1-d factor multiplier (default 2)");
    c_scen->add_option("--m", o.m, "expanding multiplier (default 3)");
    c_scen->add_option("--N", o.N, "iterate budget");
    c_scen->add_option("--grid", o.grid, "grid points for coverage checks");
    c_scen->add_option("--n", o.scen_n, "iterate list for tube containment (default 6)");
    c_scen->add_option("--samples", o.samples, "sample budget");
    c_scen->add_option("--seed", o.seed, "random seed");
    c_scen->add_option("--out-dir", o.out_dir, "directory for scenario artifacts (default .)");
    c_scen->add_option("--out", o.out, "output file for the scenario report");

    auto* c_man = app.add_subcommand("manifest", "run a batch of commands from a JSON manifest");
    c_man->add_option("--file", o.file, "manifest path")->required();
    c_man->add_option("--out", o.out, "output file for the summary index");

    std::vector<const char*> argv;
    argv.push_back("shrinktarget-cli");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return;
    } catch (const CLI::ParseError& e) {
        throw DomainError(std::string(e.what()) + "\n\n" + app.help());
    }

    if (app.got_subcommand(c_spec)) run_spectrum(o, out);
    else if (app.got_subcommand(c_dim)) run_dim(o, out);
    else if (app.got_subcommand(c_prof)) run_profile(o, out);
    else if (app.got_subcommand(c_pre)) run_preimage(o, pre_tau->count() > 0, out);
    else if (app.got_subcommand(c_rast)) run_raster(o, out);
    else if (app.got_subcommand(c_box)) run_boxcount(o, box_k->count() > 0, out);
    else if (app.got_subcommand(c_three)) run_three_distance(o, three_m->count() > 0, out);
    else if (app.got_subcommand(c_cf)) run_cf(o, cf_m->count() > 0, out);
    else if (app.got_subcommand(c_lat)) run_lattice_count(o, out);
    else if (app.got_subcommand(c_mass)) run_probe_mass(o, out);
    else if (app.got_subcommand(c_ratio)) run_probe_ratio(o, out);
    else if (app.got_subcommand(c_rz)) run_riesz(o, out);
    else if (app.got_subcommand(c_scen)) run_scenario(o, scen_tau->count() > 0, out);
    else if (app.got_subcommand(c_man)) run_manifest(o, out, err);
}

}  // namespace detail

// Runs one command line (without the program name).  Returns the process exit
// code; all output goes to the given streams.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        detail::run_command(args, out, err);
        return 0;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace st
