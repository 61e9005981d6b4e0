#pragma once
// Exact arithmetic on real quadratic irrationals (p + q sqrt(D)) / r.
//
// Values are normalized so that r > 0, gcd(p, q, r) = 1, and D is squarefree
// up to trial division by small factors.  All comparisons and floors are
// exact integer computations; nothing here rounds.

#include <string>

#include "errors.hpp"
#include "numtypes.hpp"

namespace st {

namespace detail {

inline Int floor_div(const Int& a, const Int& b) { return rat_floor(Rat(a, b)); }

// Sign of X + Y * sqrt(D) for rational X, Y and non-square D > 0.
inline int surd_sign(const Rat& X, const Rat& Y, const Int& D) {
    if (Y == 0) return X == 0 ? 0 : (X > 0 ? 1 : -1);
    if (Y > 0) {
        if (X >= 0) return 1;
        return X * X < Y * Y * Rat(D) ? 1 : -1;  // equality impossible: D non-square
    }
    if (X <= 0) return -1;
    return X * X > Y * Y * Rat(D) ? 1 : -1;
}

}  // namespace detail

class QuadSurd {
public:
    // (p + q sqrt(D)) / r
    QuadSurd(Int p, Int q, Int r, Int D) : p_(std::move(p)), q_(std::move(q)), r_(std::move(r)), D_(std::move(D)) {
        if (r_ == 0) throw DomainError("QuadSurd denominator must be nonzero");
        if (D_ <= 0) throw DomainError("QuadSurd needs D > 0");
        // pull square factors out of D into q
        for (Int f = 2; f * f <= D_ && f <= 1000000; ++f)
            while (D_ % (f * f) == 0) {
                D_ /= f * f;
                q_ *= f;
            }
        if (D_ == 1) throw DomainError("QuadSurd needs a non-square D");
        if (r_ < 0) {
            p_ = -p_;
            q_ = -q_;
            r_ = -r_;
        }
        Int g = boost::multiprecision::gcd(boost::multiprecision::gcd(abs(p_), abs(q_)), r_);
        if (g > 1) {
            p_ /= g;
            q_ /= g;
            r_ /= g;
        }
    }

    const Int& p() const { return p_; }
    const Int& q() const { return q_; }
    const Int& r() const { return r_; }
    const Int& D() const { return D_; }

    bool is_rational() const { return q_ == 0; }

    int sign() const { return detail::surd_sign(Rat(p_, r_), Rat(q_, r_), D_); }

    // Exact floor.  With N = q^2 D, sqrt(N) lies strictly between s and s+1
    // for s = isqrt(N), which pins the floor of (p +- sqrt(N)) / r.
    Int floor() const {
        if (q_ == 0) return detail::floor_div(p_, r_);
        const Int N = q_ * q_ * D_;
        const Int s = isqrt(N);
        if (q_ > 0) return detail::floor_div(p_ + s, r_);
        return detail::floor_div(p_ - s - 1, r_);
    }

    QuadSurd frac() const {
        Int f = floor();
        return QuadSurd(p_ - f * r_, q_, r_, D_);
    }

    QuadSurd scaled(const Int& k) const { return QuadSurd(p_ * k, q_ * k, r_, D_); }

    QuadSurd plus_rat(const Rat& x) const {
        Int u = rat_num(x), v = rat_den(x);
        return QuadSurd(p_ * v + u * r_, q_ * v, r_ * v, D_);
    }

    QuadSurd negated() const { return QuadSurd(-p_, -q_, r_, D_); }

    QuadSurd reciprocal() const {
        const Int norm = p_ * p_ - q_ * q_ * D_;
        if (norm == 0) {
            if (p_ == 0 && q_ == 0) throw DomainError("QuadSurd reciprocal of zero");
            throw DomainError("QuadSurd reciprocal: norm vanished");  // impossible for non-square D
        }
        return QuadSurd(r_ * p_, -r_ * q_, norm, D_);
    }

    // Sign of *this - x.
    int cmp(const Rat& x) const {
        return detail::surd_sign(Rat(p_, r_) - x, Rat(q_, r_), D_);
    }
    int cmp(const QuadSurd& o) const {
        if (q_ != 0 && o.q_ != 0 && D_ != o.D_)
            throw DomainError("QuadSurd comparison needs matching D");
        const Int& D = q_ != 0 ? D_ : o.D_;
        return detail::surd_sign(Rat(p_, r_) - Rat(o.p_, o.r_), Rat(q_, r_) - Rat(o.q_, o.r_), D);
    }

    HPReal to_hp() const {
        HPReal v = HPReal(p_) + HPReal(q_) * sqrt(HPReal(D_));
        return v / HPReal(r_);
    }
    double to_double() const { return to_hp().convert_to<double>(); }

    std::string str() const {
        return "(" + p_.str() + " + " + q_.str() + "*sqrt(" + D_.str() + "))/" + r_.str();
    }

private:
    Int p_, q_, r_, D_;
};

}  // namespace st
