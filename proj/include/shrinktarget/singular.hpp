#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "spectral.hpp"

namespace st {

// Log singular values of A^n plus the right singular basis.
// Entries are ascending so index j matches the log-moduli ordering l_1 <= ... <= l_d.
struct SingularProfile {
    int d = 0;
    long long n = 0;
    std::vector<double> log_sigma;           // ascending
    Eigen::MatrixXd right_vectors;           // column j pairs with log_sigma[j]
};

namespace detail {

// Modified Gram-Schmidt QR with positive diagonal; C must have full column rank.
inline void mgs_qr(const Eigen::MatrixXd& C, Eigen::MatrixXd& Q, Eigen::MatrixXd& R) {
    const int d = int(C.cols());
    Q = C;
    R = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        Eigen::VectorXd v = Q.col(j);
        for (int rep = 0; rep < 2; ++rep) {
            for (int i = 0; i < j; ++i) {
                double rij = Q.col(i).dot(v);
                if (rep == 0) R(i, j) = rij; else R(i, j) += rij;
                v -= rij * Q.col(i);
            }
        }
        double nrm = v.norm();
        if (nrm == 0.0) throw SingularMatrix("QR sweep hit a rank-deficient column");
        R(j, j) = nrm;
        Q.col(j) = v / nrm;
    }
}

// One n-step orthogonalized power chain: returns final orthonormal basis,
// accumulates per-column log of the R diagonal.
inline Eigen::MatrixXd power_chain(const Eigen::MatrixXd& M, long long n,
                                   const Eigen::MatrixXd& start,
                                   std::vector<double>& log_acc) {
    const int d = int(M.rows());
    Eigen::MatrixXd B = start, Q, R;
    log_acc.assign(std::size_t(d), 0.0);
    for (long long s = 0; s < n; ++s) {
        mgs_qr(M * B, Q, R);
        for (int j = 0; j < d; ++j) log_acc[std::size_t(j)] += std::log(R(j, j));
        B = Q;
    }
    return B;
}

} // namespace detail

// Exact-direction product SVD of A^n through repeated orthogonal-factorization
// sweeps: alternating forward (A) and backward (A^T) chains until the
// accumulated logs stabilize, then per-cluster block products to resolve
// nearly-equal singular values.
inline SingularProfile log_singular_values(const IntMatrix& A, long long n) {
    if (n < 0) throw DomainError("log_singular_values: n must be >= 0");
    const int d = A.dim();
    if (det(A) == 0) throw SingularMatrix("log_singular_values requires det A != 0");

    SingularProfile out;
    out.d = d;
    out.n = n;
    if (n == 0) {
        out.log_sigma.assign(std::size_t(d), 0.0);
        out.right_vectors = Eigen::MatrixXd::Identity(d, d);
        return out;
    }

    Eigen::MatrixXd Ad(d, d), At(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Ad(i, j) = A.at(i, j).convert_to<double>();
            At(j, i) = Ad(i, j);
        }

    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(d, d);
    std::vector<double> acc(std::size_t(d), 0.0), prev;
    for (int pass = 0; pass < 40; ++pass) {
        Eigen::MatrixXd U = detail::power_chain(Ad, n, V, acc);
        std::vector<double> back;
        V = detail::power_chain(At, n, U, back);
        if (pass > 0) {
            double diff = 0;
            for (int j = 0; j < d; ++j)
                diff = std::max(diff, std::abs(acc[std::size_t(j)] - prev[std::size_t(j)]));
            if (diff < 1e-13 * std::max(1.0, std::abs(acc[0]))) break;
        }
        prev = acc;
    }

    // cluster nearly-equal singular values (descending order in acc)
    std::vector<std::pair<int, int>> clusters;
    int start = 0;
    for (int j = 1; j <= d; ++j) {
        if (j == d || acc[std::size_t(j - 1)] - acc[std::size_t(j)] > 5.0) {
            clusters.emplace_back(start, j - 1);
            start = j;
        }
    }

    // final forward chain, accumulating the diagonal block of the R-product per cluster
    std::vector<Eigen::MatrixXd> P;
    std::vector<double> S(clusters.size(), 0.0);
    for (auto& c : clusters) P.push_back(Eigen::MatrixXd::Identity(c.second - c.first + 1, c.second - c.first + 1));
    {
        Eigen::MatrixXd B = V, Q, R;
        for (long long s = 0; s < n; ++s) {
            detail::mgs_qr(Ad * B, Q, R);
            for (std::size_t c = 0; c < clusters.size(); ++c) {
                int a = clusters[c].first, b = clusters[c].second;
                P[c] = R.block(a, a, b - a + 1, b - a + 1) * P[c];
                double m = P[c].cwiseAbs().maxCoeff();
                P[c] /= m;
                S[c] += std::log(m);
            }
            B = Q;
        }
    }

    std::vector<double> logs_desc(std::size_t(d), 0.0);
    Eigen::MatrixXd Vref = V;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        int a = clusters[c].first, b = clusters[c].second, w = b - a + 1;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(P[c], Eigen::ComputeFullU | Eigen::ComputeFullV);
        for (int i = 0; i < w; ++i)
            logs_desc[std::size_t(a + i)] = S[c] + std::log(svd.singularValues()(i));
        Vref.middleCols(a, w) = V.middleCols(a, w) * svd.matrixV();
    }

    out.log_sigma.resize(std::size_t(d));
    out.right_vectors.resize(d, d);
    for (int j = 0; j < d; ++j) {
        out.log_sigma[std::size_t(j)] = logs_desc[std::size_t(d - 1 - j)];
        out.right_vectors.col(j) = Vref.col(d - 1 - j);
    }
    return out;
}

// Comparability table: deviations of the exact log singular values from n*l_j.
struct SemiaxisRatioRow {
    long long n = 0;
    std::vector<double> log_dev; // |log sigma_{n,j} - n*l_j|, ascending j
    double max_dev = 0.0;
    double max_dev_over_n = 0.0;
};

struct SemiaxisRatioReport {
    std::vector<SemiaxisRatioRow> rows;
};

inline SemiaxisRatioReport semiaxis_ratio_report(const IntMatrix& A,
                                                 const std::vector<long long>& n_list) {
    SpectralData sd = spectral_data(A);
    SemiaxisRatioReport rep;
    for (long long n : n_list) {
        if (n < 1) throw DomainError("semiaxis_ratio_report: n must be >= 1");
        SingularProfile sp = log_singular_values(A, n);
        SemiaxisRatioRow row;
        row.n = n;
        for (int j = 0; j < sd.d; ++j) {
            double dev = std::abs(sp.log_sigma[std::size_t(j)] - double(n) * sd.log_moduli[std::size_t(j)]);
            row.log_dev.push_back(dev);
            row.max_dev = std::max(row.max_dev, dev);
        }
        row.max_dev_over_n = row.max_dev / double(n);
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace st
