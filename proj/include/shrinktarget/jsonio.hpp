#pragma once
// Serialization of every report type to versioned JSON (schema_version "1")
// and flat CSV, plus the small input languages the command line accepts:
// matrices as "a,b;c,d" or nested JSON arrays, points as comma-separated
// exact rationals ("3/4", "-1/2", decimals, integers).  Exact integers and
// rationals are serialized as strings so they round-trip unchanged.

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "boxcount.hpp"
#include "dimension.hpp"
#include "diophantine.hpp"
#include "errors.hpp"
#include "measure.hpp"
#include "preimage.hpp"
#include "raster.hpp"
#include "scenarios.hpp"
#include "singular.hpp"
#include "spectral.hpp"

namespace st {

using ojson = nlohmann::ordered_json;

// ---- input parsing ----

inline Rat parse_rational(const std::string& s) {
    std::size_t i = 0, n = s.size();
    while (i < n && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t e = n;
    while (e > i && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    const std::string t = s.substr(i, e - i);
    if (t.empty()) throw DomainError("empty rational literal");
    const auto bad = [&] { throw DomainError("bad rational literal '" + t + "'"); };
    const auto digits = [&](const std::string& u) {
        if (u.empty()) bad();
        for (char c : u)
            if (!std::isdigit(static_cast<unsigned char>(c))) bad();
    };
    std::string body = t;
    bool neg = false;
    if (body[0] == '+' || body[0] == '-') {
        neg = body[0] == '-';
        body = body.substr(1);
    }
    Rat v;
    if (auto slash = body.find('/'); slash != std::string::npos) {
        const std::string num = body.substr(0, slash), den = body.substr(slash + 1);
        digits(num);
        digits(den);
        const Int d(den);
        if (d == 0) throw DomainError("rational literal '" + t + "' has denominator 0");
        v = Rat(Int(num), d);
    } else if (auto dot = body.find('.'); dot != std::string::npos) {
        const std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
        if (ip.empty() && fp.empty()) bad();
        if (!ip.empty()) digits(ip);
        if (!fp.empty()) digits(fp);
        Int den = 1;
        for (std::size_t k = 0; k < fp.size(); ++k) den *= 10;
        v = Rat(Int(ip.empty() ? "0" : ip) * den + Int(fp.empty() ? "0" : fp), den);
    } else {
        digits(body);
        v = Rat(Int(body));
    }
    return neg ? -v : v;
}

inline TorusPoint parse_point(const std::string& s) {
    std::vector<Rat> coords;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        coords.push_back(parse_rational(s.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return TorusPoint(coords);
}

inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        const Rat v = parse_rational(s.substr(start, comma - start));
        if (denominator(v) != 1) throw DomainError("expected an integer list, got '" + s + "'");
        out.push_back(numerator(v).convert_to<int>());
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// "a,b;c,d" rows split on ';', or a JSON array of arrays of integers.
inline IntMatrix parse_matrix(const std::string& s) {
    std::vector<std::vector<long long>> rows;
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i < s.size() && s[i] == '[') {
        ojson j = ojson::parse(s, nullptr, false);
        if (j.is_discarded() || !j.is_array()) throw DomainError("bad matrix literal '" + s + "'");
        for (const auto& r : j) {
            if (!r.is_array()) throw DomainError("matrix rows must be arrays in '" + s + "'");
            std::vector<long long> row;
            for (const auto& x : r) {
                if (!x.is_number_integer()) throw DomainError("matrix entries must be integers");
                row.push_back(x.get<long long>());
            }
            rows.push_back(std::move(row));
        }
    } else {
        std::size_t start = 0;
        while (true) {
            const std::size_t semi = s.find(';', start);
            const std::string rowtext = s.substr(start, semi - start);
            std::vector<long long> row;
            for (const int v : parse_int_list(rowtext)) row.push_back(v);
            rows.push_back(std::move(row));
            if (semi == std::string::npos) break;
            start = semi + 1;
        }
    }
    if (rows.empty()) throw DomainError("empty matrix literal");
    for (const auto& r : rows)
        if (r.size() != rows.size()) throw DomainError("matrix literal '" + s + "' is not square");
    return IntMatrix(rows);
}

// ---- exact values as strings ----

inline std::string int_str(const Int& v) { return v.str(); }

inline std::string rat_str(const Rat& v) {
    if (denominator(v) == 1) return numerator(v).str();
    return numerator(v).str() + "/" + denominator(v).str();
}

inline std::vector<std::string> point_strs(const TorusPoint& p) {
    std::vector<std::string> out;
    out.reserve(p.coords.size());
    for (const Rat& c : p.coords) out.push_back(rat_str(c));
    return out;
}

namespace detail {

inline ojson num_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

inline ojson header(const char* kind) {
    ojson j;
    j["schema_version"] = "1";
    j["kind"] = kind;
    return j;
}

}  // namespace detail

// ---- report serialization ----

inline ojson report_json(const SpectralData& s) {
    ojson j = detail::header("spectrum");
    j["d"] = s.d;
    j["determinant"] = int_str(s.determinant);
    ojson cp = ojson::array();
    for (const Int& c : s.char_poly_coeffs) cp.push_back(int_str(c));
    j["char_poly_coeffs"] = std::move(cp);
    ojson ev = ojson::array();
    for (const auto& l : s.eigenvalues)
        ev.push_back(ojson{{"re", l.real().convert_to<double>()}, {"im", l.imag().convert_to<double>()}});
    j["eigenvalues"] = std::move(ev);
    j["moduli"] = s.moduli;
    j["log_moduli"] = s.log_moduli;
    j["log_abs_det"] = s.log_abs_det;
    j["is_hyperbolic"] = s.is_hyperbolic;
    j["is_expanding"] = s.is_expanding;
    j["has_root_of_unity"] = s.has_root_of_unity;
    return j;
}

inline ojson report_json(const DimensionResult& r) {
    ojson j = detail::header("dimension");
    j["value"] = detail::num_or_null(r.value);
    j["indeterminate"] = r.indeterminate;
    j["attaining_index"] = r.attaining_index;
    j["branch"] = r.branch;
    j["note"] = r.note;
    return j;
}

inline ojson report_json(const ProfileResult& p) {
    ojson j = detail::header("profile");
    j["formula"] = p.formula;
    ojson rows = ojson::array();
    for (const auto& r : p.rows)
        rows.push_back(ojson{{"tau", r.tau},
                             {"value", detail::num_or_null(r.result.value)},
                             {"branch", r.result.branch},
                             {"indeterminate", r.result.indeterminate}});
    j["rows"] = std::move(rows);
    j["has_critical"] = p.has_critical;
    j["tau_critical"] = p.tau_critical;
    j["left_limit"] = p.left_limit;
    j["right_limit"] = p.right_limit;
    return j;
}

inline ojson report_json(const PreimageSet& ps) {
    ojson j = detail::header("preimage");
    j["n"] = ps.n;
    j["tau"] = ps.tau;
    j["z"] = point_strs(ps.z);
    j["count"] = static_cast<long long>(ps.centers.size());
    ojson cs = ojson::array();
    for (const auto& c : ps.centers) cs.push_back(point_strs(c));
    j["centers"] = std::move(cs);
    ojson sh;
    sh["radius"] = ps.shape.radius;
    sh["semi_axes"] = ps.shape.semi_axes;
    ojson ax = ojson::array();
    for (int i = 0; i < ps.shape.axis_directions.rows(); ++i) {
        ojson row = ojson::array();
        for (int k = 0; k < ps.shape.axis_directions.cols(); ++k)
            row.push_back(ps.shape.axis_directions(i, k));
        ax.push_back(std::move(row));
    }
    sh["axis_directions"] = std::move(ax);
    sh["long_axis"] = ps.shape.long_axis;
    j["shape"] = std::move(sh);
    return j;
}

inline ojson report_json(const SeparationReport& r) {
    ojson j = detail::header("separation");
    j["n"] = r.n;
    ojson rows = ojson::array();
    for (const auto& row : r.rows)
        rows.push_back(ojson{{"eigenvalue_modulus", row.eigenvalue_modulus},
                             {"log_modulus", row.log_modulus},
                             {"min_gap", row.min_gap},
                             {"expected_gap", row.expected_gap},
                             {"ratio", row.ratio}});
    j["rows"] = std::move(rows);
    return j;
}

inline ojson report_json(const QuadSurd& x, const ContinuedFraction& cf, int expand_terms = 20) {
    ojson j = detail::header("continued-fraction");
    j["surd"] = ojson{{"p", int_str(x.p())}, {"q", int_str(x.q())}, {"r", int_str(x.r())},
                      {"D", int_str(x.D())}};
    ojson head = ojson::array(), period = ojson::array(), first = ojson::array();
    for (const Int& a : cf.head) head.push_back(int_str(a));
    for (const Int& a : cf.period) period.push_back(int_str(a));
    for (const Int& a : cf.expand(std::size_t(expand_terms))) first.push_back(int_str(a));
    j["head"] = std::move(head);
    j["period"] = std::move(period);
    j["first_terms"] = std::move(first);
    return j;
}

inline ojson report_json(const ThreeDistanceResult& r) {
    ojson j = detail::header("three-distance");
    j["N"] = r.N;
    j["gap_values"] = r.gap_values;
    j["gap_counts"] = r.gap_counts;
    j["d_min"] = r.d_min;
    j["d_max"] = r.d_max;
    j["ratio"] = r.ratio;
    return j;
}

inline ojson report_json(const LatticeCountResult& r) {
    ojson j = detail::header("lattice-count");
    j["n"] = r.n;
    j["radius"] = rat_str(r.radius);
    j["count"] = int_str(r.count);
    j["normalized"] = r.normalized;
    return j;
}

inline ojson report_json(const SingularProfile& p) {
    ojson j = detail::header("singular-values");
    j["d"] = p.d;
    j["n"] = p.n;
    j["log_sigma"] = p.log_sigma;
    return j;
}

inline ojson report_json(const MassEstimate& m) {
    ojson j = detail::header("mass");
    j["value"] = m.value;
    j["std_error"] = m.std_error;
    j["samples"] = m.samples;
    return j;
}

inline ojson report_json(const WeakConvergenceReport& r) {
    ojson j = detail::header("mass-ratios");
    ojson rows = ojson::array();
    for (const auto& row : r.rows)
        rows.push_back(ojson{{"center", point_strs(row.ball.center)},
                             {"radius", row.ball.radius},
                             {"mu_n", row.mu_n},
                             {"std_error", row.std_error},
                             {"lebesgue", row.lebesgue},
                             {"ratio", row.ratio}});
    j["rows"] = std::move(rows);
    j["min_ratio"] = r.min_ratio;
    j["max_ratio"] = r.max_ratio;
    j["samples"] = r.samples;
    return j;
}

inline ojson report_json(const HolderReport& r) {
    ojson j = detail::header("holder-slope");
    j["radii"] = r.radii;
    j["mass"] = r.mass;
    j["slope"] = r.slope;
    j["predicted"] = r.predicted;
    j["regime"] = r.regime;
    j["separation"] = r.separation;
    j["samples"] = r.samples;
    return j;
}

inline ojson report_json(const EnergyEstimate& e) {
    ojson j = detail::header("riesz-energy");
    j["s"] = e.s;
    j["value"] = e.value;
    j["std_error"] = e.std_error;
    j["pairs"] = e.pairs;
    return j;
}

inline ojson report_json(const ResolvedEnergy& e) {
    ojson j = detail::header("riesz-energy-resolved");
    j["s"] = e.s;
    j["value"] = e.value;
    j["near_value"] = e.near_value;
    j["far_value"] = e.far_value;
    j["std_error"] = e.std_error;
    j["cutoff"] = e.cutoff;
    j["lattice_gap"] = e.lattice_gap;
    j["sigma_long"] = e.sigma_long;
    j["sigma_short"] = e.sigma_short;
    j["pairs"] = e.pairs;
    return j;
}

inline ojson report_json(const CoverReport& c) {
    ojson j = detail::header("covering-number");
    j["n"] = c.n;
    j["delta_requested"] = c.delta_requested;
    j["delta_effective"] = c.delta_effective;
    j["grid_m"] = c.grid_m;
    j["boxes"] = c.boxes;
    j["subsamples"] = c.subsamples;
    j["tau"] = c.tau;
    return j;
}

inline ojson report_json(const ExponentFit& f) {
    ojson j = detail::header("covering-exponent-fit");
    j["k"] = f.k;
    j["scale_rate"] = f.scale_rate;
    j["growth_rate"] = f.growth_rate;
    j["predicted_rate"] = f.predicted_rate;
    j["refined_rate"] = detail::num_or_null(f.refined_rate);
    j["quotient"] = f.quotient;
    j["predicted_quotient"] = f.predicted_quotient;
    j["realized_quotient"] = detail::num_or_null(f.realized_quotient);
    ojson rows = ojson::array();
    for (const auto& r : f.rows)
        rows.push_back(ojson{{"n", r.n},
                             {"delta", r.delta},
                             {"grid_m", r.grid_m},
                             {"boxes", r.boxes},
                             {"capped", r.capped}});
    j["rows"] = std::move(rows);
    return j;
}

inline ojson report_json(const TrendReport& t) {
    ojson j = detail::header("boxdim-trend");
    j["n_lo"] = t.n_lo;
    j["n_hi"] = t.n_hi;
    j["delta"] = t.delta;
    j["grid_m"] = t.grid_m;
    ojson rows = ojson::array();
    for (const auto& r : t.rows)
        rows.push_back(ojson{{"n_hi", r.n_hi}, {"boxes", r.boxes}, {"quotient", r.quotient}});
    j["rows"] = std::move(rows);
    j["final_quotient"] = t.final_quotient;
    j["label"] = t.label;
    return j;
}

inline ojson report_json(const ScenarioResult& r) {
    ojson j = detail::header("scenario");
    j["id"] = r.id;
    j["passed"] = r.passed;
    ojson checks = ojson::array();
    for (const auto& c : r.checks)
        checks.push_back(ojson{{"name", c.name},
                               {"passed", c.passed},
                               {"measured", detail::num_or_null(c.measured)},
                               {"expected", detail::num_or_null(c.expected)},
                               {"detail", c.detail}});
    j["checks"] = std::move(checks);
    ojson arts = ojson::array();
    for (const auto& a : r.artifacts) arts.push_back(a.first);
    j["artifacts"] = std::move(arts);
    return j;
}

// ---- CSV writers ----

namespace detail {

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

inline std::string profile_csv(const ProfileResult& p) {
    std::string out = "tau,value,branch\n";
    for (const auto& r : p.rows)
        out += detail::csv_num(r.tau) + "," + detail::csv_num(r.result.value) + "," +
               r.result.branch + "\n";
    return out;
}

// One row per fitted n; predicted_exponent is the theory's log box count.
inline std::string fit_csv(const ExponentFit& f) {
    std::string out = "n,delta,boxes,predicted_exponent\n";
    for (const auto& r : f.rows)
        out += std::to_string(r.n) + "," + detail::csv_num(r.delta) + "," +
               std::to_string(r.boxes) + "," + detail::csv_num(f.predicted_rate * r.n) + "\n";
    return out;
}

inline std::string trend_csv(const TrendReport& t) {
    std::string out = "n_hi,boxes,quotient\n";
    for (const auto& r : t.rows)
        out += std::to_string(r.n_hi) + "," + std::to_string(r.boxes) + "," +
               detail::csv_num(r.quotient) + "\n";
    return out;
}

inline std::string holder_csv(const HolderReport& r) {
    std::string out = "log_r,log_mass\n";
    for (std::size_t i = 0; i < r.radii.size(); ++i)
        out += detail::csv_num(std::log(r.radii[i])) + "," +
               detail::csv_num(std::log(r.mass[i])) + "\n";
    return out;
}

inline std::string sweep_csv(const std::vector<ThreeGapRow>& rows) {
    std::string out = "N,distinct,d_min,d_max,ratio\n";
    for (const auto& r : rows)
        out += std::to_string(r.N) + "," + std::to_string(r.distinct) + "," +
               detail::csv_num(r.d_min) + "," + detail::csv_num(r.d_max) + "," +
               detail::csv_num(r.ratio) + "\n";
    return out;
}

}  // namespace st
