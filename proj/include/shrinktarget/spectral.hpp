#pragma once

#include <algorithm>
#include <vector>

#include "int_matrix.hpp"

namespace st {

// ---- exact polynomial helpers (coefficients ascending, monic where stated) ----

// divide a by monic b; returns {quotient, remainder}
inline std::pair<std::vector<Int>, std::vector<Int>>
poly_divmod_monic(std::vector<Int> a, const std::vector<Int>& b) {
    const int db = int(b.size()) - 1;
    std::vector<Int> q(a.size() > b.size() ? a.size() - db : 1, Int(0));
    for (int i = int(a.size()) - 1; i >= db; --i) {
        Int f = a[i];
        if (f == 0) continue;
        q[i - db] = f;
        for (int j = 0; j <= db; ++j) a[i - db + j] -= f * b[j];
    }
    while (a.size() > 1 && a.back() == 0) a.pop_back();
    return {q, a};
}

inline bool poly_is_zero(const std::vector<Int>& p) {
    for (const Int& c : p)
        if (c != 0) return false;
    return true;
}

inline int euler_phi(int n) {
    int result = n;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            result -= result / p;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

// cyclotomic polynomial, exact: Phi_m = (x^m - 1) / prod_{d|m, d<m} Phi_d
inline std::vector<Int> cyclotomic(int m) {
    std::vector<Int> num(std::size_t(m) + 1, Int(0));
    num[0] = -1;
    num[m] = 1;
    for (int d = 1; d < m; ++d) {
        if (m % d != 0) continue;
        auto [q, r] = poly_divmod_monic(num, cyclotomic(d));
        if (!poly_is_zero(r)) throw Error("cyclotomic: nonzero remainder (internal)");
        num = q;
    }
    return num;
}

// ---- high-precision root finding (Durand-Kerner) ----

inline HPComplex poly_eval(const std::vector<Int>& c, const HPComplex& x) {
    HPComplex v(0);
    for (int i = int(c.size()) - 1; i >= 0; --i) v = v * x + HPComplex(HPReal(c[i]));
    return v;
}

// all complex roots of a monic integer polynomial, high precision
inline std::vector<HPComplex> poly_roots(const std::vector<Int>& c) {
    const int d = int(c.size()) - 1;
    if (d == 0) return {};
    if (d == 1) return {HPComplex(-HPReal(c[0]))};

    HPReal bound(1);
    for (int i = 0; i < d; ++i) {
        HPReal a = abs(HPReal(c[i]));
        if (a > bound) bound = a;
    }
    bound += 1;

    std::vector<HPComplex> x(d);
    const HPReal two_pi = 8 * atan(HPReal(1));
    for (int i = 0; i < d; ++i) {
        HPReal ang = two_pi * HPReal(i) / d + HPReal("0.41");
        x[i] = HPComplex(bound * HPReal("0.93") * cos(ang), bound * HPReal("0.93") * sin(ang));
    }

    const HPReal tol("1e-90");
    for (int iter = 0; iter < 600; ++iter) {
        HPReal worst(0);
        for (int i = 0; i < d; ++i) {
            HPComplex denom(1);
            for (int j = 0; j < d; ++j) {
                if (j == i) continue;
                HPComplex diff = x[i] - x[j];
                if (diff == HPComplex(0)) diff = HPComplex(HPReal("1e-60"));
                denom *= diff;
            }
            HPComplex step = poly_eval(c, x[i]) / denom;
            x[i] -= step;
            HPReal s = abs(step);
            if (s > worst) worst = s;
        }
        if (worst < tol) break;
    }
    return x;
}

// ---- spectral summary ----

struct SpectralData {
    int d = 0;
    std::vector<Int> char_poly_coeffs; // ascending, monic
    Int determinant;
    std::vector<HPComplex> eigenvalues; // sorted by modulus ascending
    std::vector<double> moduli;         // ascending
    std::vector<double> log_moduli;     // l_1 <= ... <= l_d
    double log_abs_det = 0.0;           // L
    bool is_hyperbolic = false;         // no |lambda_j| = 1 within tolerance
    bool is_expanding = false;          // all |lambda_j| > 1
    bool has_root_of_unity = false;     // exact, via cyclotomic factors
};

inline bool char_poly_has_root_of_unity(const std::vector<Int>& cp, int d) {
    for (int m = 1; m <= 30; ++m) {
        if (euler_phi(m) > d) continue;
        auto [q, r] = poly_divmod_monic(cp, cyclotomic(m));
        (void)q;
        if (poly_is_zero(r)) return true;
    }
    return false;
}

inline SpectralData spectral_data(const IntMatrix& A) {
    SpectralData s;
    s.d = A.dim();
    s.char_poly_coeffs = char_poly(A);
    s.determinant = (s.d % 2 == 0) ? s.char_poly_coeffs[0] : -s.char_poly_coeffs[0];
    if (s.determinant == 0)
        throw SingularMatrix("spectral_data requires det A != 0");

    std::vector<HPComplex> roots = poly_roots(s.char_poly_coeffs);
    std::sort(roots.begin(), roots.end(), [](const HPComplex& a, const HPComplex& b) {
        HPReal ma = abs(a), mb = abs(b);
        if (ma != mb) return ma < mb;
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    s.eigenvalues = roots;

    for (const HPComplex& z : roots) {
        HPReal m = abs(z);
        s.moduli.push_back(m.convert_to<double>());
        s.log_moduli.push_back(log(m).convert_to<double>());
    }
    Int ad = s.determinant < 0 ? Int(-s.determinant) : s.determinant;
    s.log_abs_det = log(HPReal(ad)).convert_to<double>();

    const double tol = 1e-12;
    s.is_hyperbolic = true;
    s.is_expanding = true;
    for (double l : s.log_moduli) {
        if (std::abs(l) < tol) s.is_hyperbolic = false;
        if (l < tol) s.is_expanding = false;
    }
    s.has_root_of_unity = char_poly_has_root_of_unity(s.char_poly_coeffs, s.d);
    return s;
}

} // namespace st
