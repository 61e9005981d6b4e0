#pragma once

#include "int_matrix.hpp"

namespace st {

// Smith normal form M = U * S * V with U, V unimodular and S diagonal,
// s_1 | s_2 | ... | s_d, all s_i > 0. Requires det M != 0.
struct SmithForm {
    IntMatrix U, S, V;
};

inline SmithForm smith_normal_form(const IntMatrix& M) {
    const int d = M.dim();
    SmithForm f{IntMatrix::identity(d), M, IntMatrix::identity(d)};
    IntMatrix& S = f.S;
    IntMatrix& U = f.U;
    IntMatrix& V = f.V;

    // row op S <- E*S with E = "row i -= q * row k"  =>  U col k += q * U col i
    auto row_sub = [&](int i, int k, const Int& q) {
        for (int j = 0; j < d; ++j) S.at(i, j) -= q * S.at(k, j);
        for (int j = 0; j < d; ++j) U.at(j, k) += q * U.at(j, i);
    };
    auto col_sub = [&](int j, int k, const Int& q) {
        for (int i = 0; i < d; ++i) S.at(i, j) -= q * S.at(i, k);
        for (int i = 0; i < d; ++i) V.at(k, i) += q * V.at(j, i);
    };
    auto row_swap = [&](int i, int k) {
        if (i == k) return;
        for (int j = 0; j < d; ++j) std::swap(S.at(i, j), S.at(k, j));
        for (int j = 0; j < d; ++j) std::swap(U.at(j, i), U.at(j, k));
    };
    auto col_swap = [&](int j, int k) {
        if (j == k) return;
        for (int i = 0; i < d; ++i) std::swap(S.at(i, j), S.at(i, k));
        for (int i = 0; i < d; ++i) std::swap(V.at(j, i), V.at(k, i));
    };
    auto row_negate = [&](int i) {
        for (int j = 0; j < d; ++j) S.at(i, j) = -S.at(i, j);
        for (int j = 0; j < d; ++j) U.at(j, i) = -U.at(j, i);
    };

    for (int k = 0; k < d; ++k) {
        for (;;) {
            // smallest nonzero entry of the trailing block to (k,k)
            int pi = -1, pj = -1;
            for (int i = k; i < d; ++i)
                for (int j = k; j < d; ++j) {
                    if (S.at(i, j) == 0) continue;
                    if (pi < 0 || abs(S.at(i, j)) < abs(S.at(pi, pj))) { pi = i; pj = j; }
                }
            if (pi < 0) throw SingularMatrix("smith_normal_form requires det != 0");
            row_swap(k, pi);
            col_swap(k, pj);
            if (S.at(k, k) < 0) row_negate(k);

            bool clean = true;
            for (int i = k + 1; i < d; ++i) {
                if (S.at(i, k) == 0) continue;
                Int q = S.at(i, k) / S.at(k, k);
                row_sub(i, k, q);
                if (S.at(i, k) != 0) clean = false;
            }
            for (int j = k + 1; j < d; ++j) {
                if (S.at(k, j) == 0) continue;
                Int q = S.at(k, j) / S.at(k, k);
                col_sub(j, k, q);
                if (S.at(k, j) != 0) clean = false;
            }
            if (!clean) continue;

            // pivot must divide the whole trailing block
            bool divides = true;
            for (int i = k + 1; i < d && divides; ++i)
                for (int j = k + 1; j < d && divides; ++j)
                    if (S.at(i, j) % S.at(k, k) != 0) {
                        row_sub(k, i, Int(-1)); // add row i to row k, then retry
                        divides = false;
                    }
            if (divides) break;
        }
    }
    return f;
}

// exact integer inverse of a unimodular matrix
inline IntMatrix unimodular_inverse(const IntMatrix& M) {
    RatMatrix inv = rat_inverse(RatMatrix(M));
    IntMatrix out(M.dim());
    for (int i = 0; i < M.dim(); ++i)
        for (int j = 0; j < M.dim(); ++j) {
            const Rat& v = inv.at(i, j);
            if (rat_den(v) != 1) throw Error("unimodular_inverse: non-integer inverse (internal)");
            out.at(i, j) = rat_num(v);
        }
    return out;
}

} // namespace st
