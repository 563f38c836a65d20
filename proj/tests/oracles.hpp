#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "lcl/matcore.hpp"
#include "lcl/semilinear.hpp"

namespace oracle {

using lcl::cplx;
using lcl::CMatrix;

inline CMatrix random_matrix(int r, int c, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMatrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

inline CMatrix naive_matmul(const CMatrix& a, const CMatrix& b) {
    CMatrix c = CMatrix::Zero(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j)
            for (int k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
    return c;
}

inline cplx diag_sum(const CMatrix& a) {
    cplx s = 0;
    for (int i = 0; i < a.rows(); ++i) s += a(i, i);
    return s;
}

// Random CPTP Kraus set: stack of d random D x D blocks made an isometry.
inline lcl::KrausSet random_cptp(int d, int D, std::mt19937_64& rng) {
    CMatrix v = random_matrix(d * D, D, rng);
    Eigen::HouseholderQR<CMatrix> qr(v);
    CMatrix q = qr.householderQ() * CMatrix::Identity(d * D, D);
    std::vector<CMatrix> mats;
    for (int k = 0; k < d; ++k) mats.push_back(q.block(k * D, 0, D, D));
    return lcl::KrausSet(mats);
}

inline lcl::KrausSet random_kraus(int d, int D, std::mt19937_64& rng, double scale = 0.5) {
    std::vector<CMatrix> mats;
    for (int k = 0; k < d; ++k) mats.push_back(scale * random_matrix(D, D, rng));
    return lcl::KrausSet(mats);
}

inline CMatrix random_unitary(int D, std::mt19937_64& rng) {
    Eigen::HouseholderQR<CMatrix> qr(random_matrix(D, D, rng));
    return qr.householderQ() * CMatrix::Identity(D, D);
}

// Modified Gram-Schmidt QR.
inline void gram_schmidt(const CMatrix& a, CMatrix& q, CMatrix& r) {
    const int n = static_cast<int>(a.cols());
    q = a;
    r = CMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            r(i, j) = q.col(i).dot(q.col(j));
            q.col(j) -= r(i, j) * q.col(i);
        }
        r(j, j) = q.col(j).norm();
        q.col(j) /= r(j, j).real();
    }
}

// Eigenvalues of a Hermitian matrix by unshifted QR iteration on A + cI,
// which makes every eigenvalue positive so moduli order equals value order.
inline std::vector<double> hermitian_qr_eigenvalues(const CMatrix& h, int iters = 20000) {
    const int n = static_cast<int>(h.rows());
    const double c = h.norm() + 1;
    CMatrix a = h + c * CMatrix::Identity(n, n), q, r;
    for (int it = 0; it < iters; ++it) {
        gram_schmidt(a, q, r);
        a = r * q;
    }
    std::vector<double> ev;
    for (int i = 0; i < n; ++i) ev.push_back(a(i, i).real() - c);
    std::sort(ev.begin(), ev.end(), [](double x, double y) { return std::abs(x) > std::abs(y); });
    return ev;
}

// Eventually periodic set with random prefix (< 20) and period <= max_k.
inline lcl::SemilinearSet random_semilinear(std::mt19937_64& rng, long max_k = 12) {
    std::uniform_int_distribution<long> tk(1, 20), kk(1, max_k);
    std::bernoulli_distribution coin(0.4);
    const long t = tk(rng), k = kk(rng);
    std::vector<bool> pre(t), pat(k);
    for (auto&& b : pre) b = coin(rng);
    for (auto&& b : pat) b = coin(rng);
    return lcl::SemilinearSet::tabulate(t, k, [&](long n) { return n < t ? bool(pre[n - 1]) : bool(pat[n % k]); });
}

} // namespace oracle
