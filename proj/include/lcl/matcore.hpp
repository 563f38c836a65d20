#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "lcl/errors.hpp"

namespace lcl {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// The d matrices {A_k}, each D x D.
class KrausSet {
public:
    KrausSet() = default;
    explicit KrausSet(std::vector<CMatrix> mats) : mats_(std::move(mats)) {
        if (mats_.empty()) throw ShapeError("Kraus set needs at least one matrix");
        const auto D = mats_.front().rows();
        for (const auto& a : mats_) {
            if (a.rows() != D || a.cols() != D) throw ShapeError("Kraus matrices must all be D x D");
            if (!a.allFinite()) throw NumericalError("Kraus matrix has non-finite entries");
        }
    }

    int d() const { return static_cast<int>(mats_.size()); }
    int D() const { return mats_.empty() ? 0 : static_cast<int>(mats_.front().rows()); }
    const std::vector<CMatrix>& mats() const { return mats_; }
    const CMatrix& operator[](std::size_t k) const { return mats_[k]; }

    double tp_defect() const {
        CMatrix s = CMatrix::Zero(D(), D());
        for (const auto& a : mats_) s += a.adjoint() * a;
        return (s - CMatrix::Identity(D(), D())).norm();
    }
    bool trace_preserving() const { return tp_defect() <= 1e-9; }

    double max_norm() const {
        double m = 0;
        for (const auto& a : mats_) m = std::max(m, a.operatorNorm());
        return m;
    }

private:
    std::vector<CMatrix> mats_;
};

struct EigenPair {
    cplx value;
    CVector vector;
};

using LinearOp = std::function<CVector(const CVector&)>;

inline CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
    return a * b;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            c.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return c;
}

inline CMatrix conj_entrywise(const CMatrix& a) { return a.conjugate(); }

inline cplx trace(const CMatrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("trace of non-square matrix");
    return a.trace();
}

// E(X) = sum_k A_k X A_k^dagger
inline CMatrix apply_cp_map(const KrausSet& k, const CMatrix& x) {
    if (x.rows() != k.D() || x.cols() != k.D()) throw ShapeError("apply_cp_map: argument must be D x D");
    CMatrix out = CMatrix::Zero(k.D(), k.D());
    for (const auto& a : k.mats()) out.noalias() += a * x * a.adjoint();
    return out;
}

// lambda^n for n >= 0, exact zero for lambda = 0.
inline cplx cpow(cplx l, long n) {
    if (n == 0) return {1, 0};
    if (l == cplx(0, 0)) return {0, 0};
    return std::polar(std::pow(std::abs(l), static_cast<double>(n)), static_cast<double>(n) * std::arg(l));
}

// Column-stacking vec.
inline CVector vec(const CMatrix& x) { return Eigen::Map<const CVector>(x.data(), x.size()); }

inline CMatrix unvec(const CVector& v, Eigen::Index rows) {
    return Eigen::Map<const CMatrix>(v.data(), rows, v.size() / rows);
}

inline CMatrix materialize(const LinearOp& op, int dim) {
    CMatrix m(dim, dim);
    CVector e = CVector::Zero(dim);
    for (int j = 0; j < dim; ++j) {
        e.setZero();
        e(j) = 1.0;
        m.col(j) = op(e);
    }
    return m;
}

// All eigenvalues sorted by decreasing modulus, ties by argument.
inline std::vector<cplx> sorted_eigenvalues(const CMatrix& m) {
    Eigen::ComplexEigenSolver<CMatrix> es(m, false);
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", INFINITY);
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::stable_sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        return std::arg(a) < std::arg(b);
    });
    return ev;
}

struct EigOptions {
    int dense_limit = 1024;
    int max_iters = 20000;
    std::uint64_t seed = 7;
};

namespace detail {

inline CMatrix orthonormalize(const CMatrix& y) {
    Eigen::HouseholderQR<CMatrix> qr(y);
    return qr.householderQ() * CMatrix::Identity(y.rows(), y.cols());
}

inline CMatrix random_block(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMatrix x(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) x(i, j) = cplx(g(rng), g(rng));
    return x;
}

inline double frobenius_estimate(const LinearOp& op, int dim, std::mt19937_64& rng) {
    std::bernoulli_distribution coin;
    double acc = 0;
    const int probes = 8;
    for (int t = 0; t < probes; ++t) {
        CVector z(dim);
        for (int i = 0; i < dim; ++i) z(i) = coin(rng) ? 1.0 : -1.0;
        acc += op(z).squaredNorm();
    }
    return std::sqrt(acc / probes);
}

} // namespace detail

// The `count` eigenpairs of largest modulus. Dense below opts.dense_limit,
// otherwise block subspace iteration with Rayleigh-Ritz extraction.
inline std::vector<EigenPair> dominant_eigs(const LinearOp& apply, int dim, int count, double tol,
                                            const EigOptions& opts = {}) {
    if (count > dim || count < 0) throw ShapeError("dominant_eigs: count exceeds dimension");
    std::vector<EigenPair> out;
    if (count == 0) return out;

    if (dim <= opts.dense_limit) {
        const CMatrix m = materialize(apply, dim);
        Eigen::ComplexEigenSolver<CMatrix> es(m, true);
        if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", INFINITY);
        std::vector<int> idx(dim);
        std::iota(idx.begin(), idx.end(), 0);
        const auto& ev = es.eigenvalues();
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
            if (std::abs(ev(a)) != std::abs(ev(b))) return std::abs(ev(a)) > std::abs(ev(b));
            return std::arg(ev(a)) < std::arg(ev(b));
        });
        const double scale = std::max(m.norm(), 1e-300);
        for (int c = 0; c < count; ++c) {
            CVector v = es.eigenvectors().col(idx[c]);
            v.normalize();
            const double res = (m * v - ev(idx[c]) * v).norm();
            if (res > tol * scale && res > 1e-12 * scale)
                throw ConvergenceError("dense eigenvector residual too large", res);
            out.push_back({ev(idx[c]), v});
        }
        return out;
    }

    std::mt19937_64 rng(opts.seed);
    const double normf = std::max(detail::frobenius_estimate(apply, dim, rng), 1e-300);
    const int b = std::min(dim, count + std::max(8, count));
    CMatrix x = detail::orthonormalize(detail::random_block(dim, b, rng));
    CMatrix y(dim, b);
    double best = INFINITY;
    for (int it = 1; it <= opts.max_iters; ++it) {
        check_deadline();
        for (int j = 0; j < b; ++j) y.col(j) = apply(x.col(j));
        if (it % 5 == 0 || it == opts.max_iters) {
            const CMatrix h = x.adjoint() * y;
            Eigen::ComplexEigenSolver<CMatrix> es(h, true);
            std::vector<int> idx(b);
            std::iota(idx.begin(), idx.end(), 0);
            const auto& ev = es.eigenvalues();
            std::stable_sort(idx.begin(), idx.end(),
                             [&](int a1, int a2) { return std::abs(ev(a1)) > std::abs(ev(a2)); });
            double worst = 0;
            std::vector<EigenPair> cand;
            for (int c = 0; c < count; ++c) {
                CVector s = es.eigenvectors().col(idx[c]);
                CVector v = x * s;
                const double nv = v.norm();
                v /= nv;
                CVector mv = (y * s) / nv;
                worst = std::max(worst, (mv - ev(idx[c]) * v).norm());
                cand.push_back({ev(idx[c]), v});
            }
            best = std::min(best, worst);
            if (worst <= tol * normf) return cand;
        }
        x = detail::orthonormalize(y);
    }
    throw ConvergenceError("dominant_eigs did not converge", best);
}

inline std::vector<EigenPair> dominant_eigs(const CMatrix& m, int count, double tol, const EigOptions& opts = {}) {
    if (m.rows() != m.cols()) throw ShapeError("dominant_eigs: matrix must be square");
    return dominant_eigs([&m](const CVector& v) -> CVector { return m * v; }, static_cast<int>(m.rows()),
                         count, tol, opts);
}

} // namespace lcl
