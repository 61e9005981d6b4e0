#pragma once

#include <initializer_list>
#include <vector>

#include "errors.hpp"
#include "numtypes.hpp"

namespace st {

// Square integer matrix, dimension 1..8, exact entries.
class IntMatrix {
public:
    IntMatrix() : d_(1), a_(1, Int(0)) {}

    explicit IntMatrix(int d) : d_(d), a_(std::size_t(d) * d, Int(0)) { check_dim(d); }

    IntMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
        d_ = int(rows.size());
        check_dim(d_);
        a_.reserve(std::size_t(d_) * d_);
        for (const auto& row : rows) {
            if (int(row.size()) != d_) throw DomainError("matrix rows must have equal length");
            for (long long v : row) a_.emplace_back(v);
        }
    }

    explicit IntMatrix(const std::vector<std::vector<long long>>& rows) {
        d_ = int(rows.size());
        check_dim(d_);
        a_.reserve(std::size_t(d_) * d_);
        for (const auto& row : rows) {
            if (int(row.size()) != d_) throw DomainError("matrix rows must have equal length");
            for (long long v : row) a_.emplace_back(v);
        }
    }

    int dim() const { return d_; }

    Int& at(int i, int j) { return a_[std::size_t(i) * d_ + j]; }
    const Int& at(int i, int j) const { return a_[std::size_t(i) * d_ + j]; }

    static IntMatrix identity(int d) {
        IntMatrix m(d);
        for (int i = 0; i < d; ++i) m.at(i, i) = 1;
        return m;
    }

    IntMatrix transpose() const {
        IntMatrix t(d_);
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    bool operator==(const IntMatrix& o) const { return d_ == o.d_ && a_ == o.a_; }

    friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
        if (x.d_ != y.d_) throw DomainError("matrix dims differ");
        IntMatrix z(x.d_);
        for (int i = 0; i < x.d_; ++i)
            for (int k = 0; k < x.d_; ++k) {
                const Int& xik = x.at(i, k);
                if (xik == 0) continue;
                for (int j = 0; j < x.d_; ++j) z.at(i, j) += xik * y.at(k, j);
            }
        return z;
    }

    friend IntMatrix operator+(const IntMatrix& x, const IntMatrix& y) {
        if (x.d_ != y.d_) throw DomainError("matrix dims differ");
        IntMatrix z(x.d_);
        for (std::size_t t = 0; t < x.a_.size(); ++t) z.a_[t] = x.a_[t] + y.a_[t];
        return z;
    }

    Int trace() const {
        Int t = 0;
        for (int i = 0; i < d_; ++i) t += at(i, i);
        return t;
    }

private:
    static void check_dim(int d) {
        if (d < 1 || d > 8) throw DomainError("matrix dimension must be in [1,8]");
    }

    int d_ = 1;
    std::vector<Int> a_;
};

// Monic characteristic polynomial det(xI - A), exact integer coefficients.
// coeffs[k] is the coefficient of x^k; coeffs[d] == 1.
inline std::vector<Int> char_poly(const IntMatrix& A) {
    const int d = A.dim();
    std::vector<Int> c(std::size_t(d) + 1, Int(0));
    c[d] = 1;
    IntMatrix M = IntMatrix::identity(d); // M_1
    c[d - 1] = -A.trace();
    for (int k = 2; k <= d; ++k) {
        IntMatrix AM = A * M;
        // M_k = A*M_{k-1} + c_{d-k+1} I
        M = AM;
        for (int i = 0; i < d; ++i) M.at(i, i) += c[d - k + 1];
        Int t = (A * M).trace();
        if (t % k != 0) throw Error("char_poly: non-integer coefficient (internal)");
        c[d - k] = -t / k;
    }
    return c;
}

inline Int det(const IntMatrix& A) {
    std::vector<Int> c = char_poly(A);
    Int d0 = c[0];
    return (A.dim() % 2 == 0) ? d0 : -d0;
}

// A^n by binary exponentiation, exact. n >= 0.
inline IntMatrix matrix_power_exact(const IntMatrix& A, long long n) {
    if (n < 0) throw DomainError("matrix_power_exact: n must be >= 0");
    IntMatrix result = IntMatrix::identity(A.dim());
    IntMatrix base = A;
    while (n > 0) {
        if (n & 1) result = result * base;
        base = base * base;
        n >>= 1;
    }
    return result;
}

// Exact rational matrix; used for inverse powers and exact solves.
class RatMatrix {
public:
    RatMatrix() : d_(1), a_(1, Rat(0)) {}
    explicit RatMatrix(int d) : d_(d), a_(std::size_t(d) * d, Rat(0)) {}
    explicit RatMatrix(const IntMatrix& m) : d_(m.dim()), a_(std::size_t(m.dim()) * m.dim()) {
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) at(i, j) = Rat(m.at(i, j));
    }

    int dim() const { return d_; }
    Rat& at(int i, int j) { return a_[std::size_t(i) * d_ + j]; }
    const Rat& at(int i, int j) const { return a_[std::size_t(i) * d_ + j]; }

    static RatMatrix identity(int d) {
        RatMatrix m(d);
        for (int i = 0; i < d; ++i) m.at(i, i) = 1;
        return m;
    }

    friend RatMatrix operator*(const RatMatrix& x, const RatMatrix& y) {
        RatMatrix z(x.d_);
        for (int i = 0; i < x.d_; ++i)
            for (int k = 0; k < x.d_; ++k) {
                const Rat& xik = x.at(i, k);
                if (xik == 0) continue;
                for (int j = 0; j < x.d_; ++j) z.at(i, j) += xik * y.at(k, j);
            }
        return z;
    }

    std::vector<Rat> apply(const std::vector<Rat>& v) const {
        std::vector<Rat> w(std::size_t(d_), Rat(0));
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) w[i] += at(i, j) * v[j];
        return w;
    }

private:
    int d_;
    std::vector<Rat> a_;
};

// Exact inverse by Gauss-Jordan elimination; throws SingularMatrix.
inline RatMatrix rat_inverse(const RatMatrix& M) {
    const int d = M.dim();
    RatMatrix a = M, inv = RatMatrix::identity(d);
    for (int col = 0; col < d; ++col) {
        int piv = -1;
        for (int r = col; r < d; ++r)
            if (a.at(r, col) != 0) { piv = r; break; }
        if (piv < 0) throw SingularMatrix("matrix is not invertible over the rationals");
        if (piv != col)
            for (int j = 0; j < d; ++j) {
                std::swap(a.at(piv, j), a.at(col, j));
                std::swap(inv.at(piv, j), inv.at(col, j));
            }
        Rat p = a.at(col, col);
        for (int j = 0; j < d; ++j) { a.at(col, j) /= p; inv.at(col, j) /= p; }
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            Rat f = a.at(r, col);
            if (f == 0) continue;
            for (int j = 0; j < d; ++j) {
                a.at(r, j) -= f * a.at(col, j);
                inv.at(r, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

// Exact A^{-n} as a rational matrix.
inline RatMatrix inverse_power(const IntMatrix& A, long long n) {
    return rat_inverse(RatMatrix(matrix_power_exact(A, n)));
}

} // namespace st
