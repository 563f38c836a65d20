#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lcl/matcore.hpp"
#include "lcl/mps.hpp"

namespace lcl {

struct IrreducibleComponent {
    CMatrix basis;  // D x D_m, orthonormal columns
    KrausSet kraus; // B_{m,k} in that basis
    double radius = 0;
    int period = 1;
    std::vector<EigenPair> peripheral;
    double second_radius = 0;
    bool degenerate = false;
    std::string note;

    int dim() const { return static_cast<int>(basis.cols()); }
};

// One block M_{mm'} = sum_k conj(B_{m,k}) (x) B_{m',k} of the block-diagonal
// Liouville matrix; tr(M^N) is the sum of tr(M_{mm'}^N) over all pairs.
// Eigenvalues not listed explicitly are bounded by rest_count * rest_radius^N.
struct Contributor {
    int m = 0, m2 = 0;
    std::vector<cplx> eigs;
    long rest_count = 0;
    double rest_radius = 0;
};

struct Decomposition {
    std::vector<IrreducibleComponent> components;
    std::vector<Contributor> contributors;
    long kappa = 1;
    std::vector<std::string> notes;
};

struct SpectralOptions {
    std::uint64_t seed = 1;
    int retries = 8;
    double accept_defect = 1e-8;
    double reject_defect = 1e-4;
    double period_tol = 1e-6;
    int explicit_eigs = 24; // eigenvalues kept per block above the dense limit
    EigOptions eig;
};

namespace detail {

inline LinearOp liouville_op(const KrausSet& k) {
    if (k.D() * k.D() <= 1024) {
        auto m = std::make_shared<CMatrix>(liouville_matrix(k));
        return [m](const CVector& v) -> CVector { return (*m) * v; };
    }
    return [k](const CVector& v) -> CVector { return vec(apply_cp_map(k, unvec(v, k.D()))); };
}

inline CMatrix cross_liouville(const KrausSet& a, const KrausSet& b) {
    CMatrix m = CMatrix::Zero(a.D() * b.D(), a.D() * b.D());
    for (int k = 0; k < a.d(); ++k) m.noalias() += kron(a[k].conjugate(), b[k]);
    return m;
}

inline CMatrix orth_complement(const CMatrix& q) {
    const auto D = q.rows(), r = q.cols();
    Eigen::HouseholderQR<CMatrix> qr(q);
    CMatrix full = qr.householderQ() * CMatrix::Identity(D, D);
    return full.rightCols(D - r);
}

inline double invariance_defect(const KrausSet& k, const CMatrix& q) {
    double worst = 0;
    for (const auto& a : k.mats()) {
        const CMatrix aq = a * q;
        worst = std::max(worst, (aq - q * (q.adjoint() * aq)).norm());
    }
    return worst;
}

} // namespace detail

// Smallest subspace containing seed and closed under every A_k.
inline CMatrix minimal_invariant_subspace(const KrausSet& k, const CVector& seed) {
    const int D = k.D();
    if (seed.size() != D) throw ShapeError("seed vector has the wrong length");
    const double sn = seed.norm();
    if (sn == 0) throw Error("seed vector must be nonzero");
    const double tau = 1e-9 * std::max(k.max_norm(), 1e-300);
    std::vector<CVector> basis{seed / sn};
    for (std::size_t next = 0; next < basis.size() && static_cast<int>(basis.size()) < D; ++next) {
        for (const auto& a : k.mats()) {
            CVector w = a * basis[next];
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& b : basis) w -= b * b.dot(w);
            const double nw = w.norm();
            if (nw > tau) basis.push_back(w / nw);
            if (static_cast<int>(basis.size()) == D) break;
        }
    }
    CMatrix q(D, basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) q.col(j) = basis[j];
    return q;
}

inline double spectral_radius(const KrausSet& k, const EigOptions& opts = {}) {
    const auto p = dominant_eigs(detail::liouville_op(k), k.D() * k.D(), 1, 1e-9, opts);
    return std::abs(p.front().value);
}

// Smallest p with |t_N - p [p | N]| <= tol on N = n0 .. n0 + 2 max_p, where
// t_N = tr(M^N) / r^N is supplied by the callback.
inline int detect_period(const std::function<cplx(long)>& normalized_trace, int max_p, long n0 = 1,
                         double tol = 1e-6) {
    std::vector<cplx> t;
    for (long n = n0; n <= n0 + 2L * max_p; ++n) t.push_back(normalized_trace(n));
    for (int p = 1; p <= max_p; ++p) {
        bool ok = true;
        for (std::size_t i = 0; i < t.size() && ok; ++i) {
            const long n = n0 + static_cast<long>(i);
            ok = std::abs(t[i] - cplx(n % p == 0 ? p : 0, 0)) <= tol;
        }
        if (ok) return p;
    }
    throw PeriodError("no period up to " + std::to_string(max_p) + " fits the trace sequence");
}

// Eigenpairs at r * exp(2 pi i l / p), l = 0..p-1, by power iteration on the
// root-of-unity averaging filter. Falls back to a dense solve when the filter
// stalls (second radius close to r).
inline std::vector<EigenPair> peripheral_pairs(const LinearOp& op, int dim, double r, int p, std::uint64_t seed = 1,
                                               double tol = 1e-8, long budget = 40000) {
    if (r <= 0) throw Error("peripheral_pairs needs r > 0");
    std::mt19937_64 rng(seed);
    std::vector<EigenPair> out;
    std::shared_ptr<Eigen::ComplexEigenSolver<CMatrix>> dense;
    for (int l = 0; l < p; ++l) {
        const cplx lam = std::polar(r, 2 * std::numbers::pi * l / p);
        auto step = [&](const CVector& v) -> CVector { return op(v) / lam; };
        auto filter = [&](CVector v) {
            CVector acc = v;
            for (int k = 1; k < p; ++k) {
                v = step(v);
                acc += v;
            }
            return CVector(acc / static_cast<double>(p));
        };
        CVector x = detail::random_block(dim, 1, rng).col(0);
        x = filter(x);
        double res = INFINITY;
        for (long used = 0; used < budget; used += 2L * p + 1) {
            check_deadline();
            const double nx = x.norm();
            if (nx == 0) break;
            x /= nx;
            res = (op(x) - lam * x).norm();
            if (res <= tol * r) break;
            CVector y = x;
            for (int k = 0; k < p; ++k) y = step(y);
            x = filter(y);
        }
        if (!(res <= tol * r)) {
            if (dim > 1024) throw ConvergenceError("peripheral eigenvector did not converge", res);
            const CMatrix m = materialize(op, dim);
            if (!dense) dense = std::make_shared<Eigen::ComplexEigenSolver<CMatrix>>(m, true);
            Eigen::Index best = 0;
            (dense->eigenvalues().array() - lam).abs().minCoeff(&best);
            x = dense->eigenvectors().col(best).normalized();
            res = (m * x - lam * x).norm();
            if (res > tol * r) throw ConvergenceError("peripheral eigenvector residual too large", res);
        }
        // fix the phase so the largest entry is real positive
        Eigen::Index imax = 0;
        x.cwiseAbs().maxCoeff(&imax);
        x *= std::conj(x(imax)) / std::abs(x(imax));
        out.push_back({lam, x});
    }
    return out;
}

// Spectral radius of M (I - Q Q^dagger) with Q an orthonormal basis of the
// peripheral eigenvectors; its nonzero spectrum is the non-peripheral part of M.
inline double second_radius(const LinearOp& op, int dim, const std::vector<EigenPair>& pairs,
                            const EigOptions& opts = {}) {
    if (pairs.empty()) return std::abs(dominant_eigs(op, dim, 1, 1e-9, opts).front().value);
    if (static_cast<int>(pairs.size()) >= dim) return 0;
    CMatrix v(dim, pairs.size());
    for (std::size_t j = 0; j < pairs.size(); ++j) v.col(j) = pairs[j].vector;
    Eigen::HouseholderQR<CMatrix> qr(v);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(dim, v.cols());
    auto deflated = [&](const CVector& x) -> CVector { return op(x - q * (q.adjoint() * x)); };
    return std::abs(dominant_eigs(deflated, dim, 1, 1e-9, opts).front().value);
}

namespace detail {

inline void analyze_component(IrreducibleComponent& c, const SpectralOptions& o, std::vector<cplx>& eigs,
                              long& rest_count, double& rest_radius) {
    const int dim = c.dim() * c.dim();
    const LinearOp op = liouville_op(c.kraus);
    if (dim <= o.eig.dense_limit) {
        eigs = sorted_eigenvalues(liouville_matrix(c.kraus));
        rest_count = 0;
        rest_radius = 0;
    } else {
        const int cnt = std::min(dim, o.explicit_eigs);
        auto top = dominant_eigs(op, dim, cnt, 1e-9, o.eig);
        eigs.clear();
        for (int i = 0; i + 1 < cnt; ++i) eigs.push_back(top[i].value);
        rest_count = dim - cnt + 1;
        rest_radius = std::abs(top.back().value) * (1 + 1e-9);
    }
    c.radius = eigs.empty() ? 0 : std::abs(eigs.front());
    if (c.radius <= 1e-12) {
        c.radius = 0;
        c.period = 1;
        c.second_radius = 0;
        c.degenerate = true;
        c.note = "nilpotent component, no peripheral analysis";
        return;
    }
    const double r = c.radius;
    double s = rest_radius;
    for (cplx l : eigs)
        if (std::abs(l) < r * (1 - 1e-8)) s = std::max(s, std::abs(l));
    long n0 = 1;
    if (s > 0) n0 = std::clamp(static_cast<long>(std::ceil(std::log(1e-10) / std::log(s / r))), 1L, 10000L);
    auto normalized = [&](long n) {
        cplx acc = 0;
        for (cplx l : eigs) acc += cpow(l / r, n);
        return acc;
    };
    try {
        c.period = detect_period(normalized, std::min(dim, 4096), n0, o.period_tol);
        c.peripheral = peripheral_pairs(op, dim, r, c.period, o.seed);
        c.second_radius = second_radius(op, dim, c.peripheral, o.eig);
        if (!(c.second_radius < r - 1e-12)) {
            c.degenerate = true;
            c.note = "second radius not below radius";
        }
    } catch (const Error& e) {
        c.degenerate = true;
        c.note = e.what();
        c.second_radius = s;
    }
}

inline void split(const KrausSet& k, const CMatrix& frame, const SpectralOptions& o, std::mt19937_64& rng,
                  std::vector<IrreducibleComponent>& out) {
    check_deadline();
    const int D = k.D();
    CMatrix best;
    if (D > 1) {
        const double scale = std::max(k.max_norm(), 1e-300);
        std::normal_distribution<double> g;
        auto rc = [&] { return cplx(g(rng), g(rng)); };
        auto consider = [&](const CVector& v) {
            if (v.norm() == 0) return;
            CMatrix q = minimal_invariant_subspace(k, v);
            if (q.cols() >= D) return;
            const double defect = invariance_defect(k, q) / scale;
            if (defect > o.reject_defect) return;
            if (defect > o.accept_defect)
                throw AmbiguityError("candidate subspace is neither clearly invariant nor clearly not", defect);
            if (best.size() == 0 || q.cols() < best.cols()) best = std::move(q);
        };
        for (int attempt = 0; attempt < o.retries && (best.size() == 0 || best.cols() > 1); ++attempt) {
            // random element of the algebra generated by the A_k
            CMatrix r = CMatrix::Zero(D, D);
            for (const auto& a : k.mats()) r += rc() * a;
            const int pairs = std::min(k.d() * k.d(), 16);
            std::uniform_int_distribution<int> pick(0, k.d() - 1);
            for (int t = 0; t < pairs; ++t) r += rc() * (k[pick(rng)] * k[pick(rng)]) / scale;
            Eigen::ComplexEigenSolver<CMatrix> es(r, true);
            for (int j = 0; j < D; ++j) consider(es.eigenvectors().col(j));
            CVector v(D);
            for (int i = 0; i < D; ++i) v(i) = rc();
            consider(v);
            if (best.size() == 0 && attempt >= 2) break;
        }
    }
    if (best.size() == 0) {
        IrreducibleComponent c;
        c.basis = frame;
        c.kraus = k;
        out.push_back(std::move(c));
        return;
    }
    const CMatrix q2 = orth_complement(best);
    std::vector<CMatrix> b1, b2;
    for (const auto& a : k.mats()) {
        b1.push_back(best.adjoint() * a * best);
        b2.push_back(q2.adjoint() * a * q2);
    }
    split(KrausSet(b1), frame * best, o, rng, out);
    split(KrausSet(b2), frame * q2, o, rng, out);
}

} // namespace detail

inline Decomposition decompose(const KrausSet& k, const SpectralOptions& o = {}) {
    std::mt19937_64 rng(o.seed);
    Decomposition dec;
    detail::split(k, CMatrix::Identity(k.D(), k.D()), o, rng, dec.components);
    std::stable_sort(dec.components.begin(), dec.components.end(),
                     [](const auto& a, const auto& b) { return a.dim() > b.dim(); });
    const int n = static_cast<int>(dec.components.size());
    for (int m = 0; m < n; ++m) {
        Contributor c;
        c.m = c.m2 = m;
        detail::analyze_component(dec.components[m], o, c.eigs, c.rest_count, c.rest_radius);
        if (!dec.components[m].note.empty())
            dec.notes.push_back("component " + std::to_string(m) + ": " + dec.components[m].note);
        if (dec.components[m].radius > 0) dec.kappa = std::lcm(dec.kappa, dec.components[m].period);
        dec.contributors.push_back(std::move(c));
    }
    for (int m = 0; m < n; ++m)
        for (int m2 = 0; m2 < n; ++m2) {
            if (m == m2) continue;
            check_deadline();
            const auto& a = dec.components[m].kraus;
            const auto& b = dec.components[m2].kraus;
            Contributor c;
            c.m = m;
            c.m2 = m2;
            const int dim = a.D() * b.D();
            const CMatrix x = detail::cross_liouville(a, b);
            if (x.norm() == 0) {
                c.eigs.assign(dim, cplx(0, 0));
            } else if (dim <= o.eig.dense_limit) {
                c.eigs = sorted_eigenvalues(x);
            } else {
                const int cnt = std::min(dim, o.explicit_eigs);
                auto top = dominant_eigs(x, cnt, 1e-9, o.eig);
                for (int i = 0; i + 1 < cnt; ++i) c.eigs.push_back(top[i].value);
                c.rest_count = dim - cnt + 1;
                c.rest_radius = std::abs(top.back().value) * (1 + 1e-9);
            }
            dec.contributors.push_back(std::move(c));
        }
    return dec;
}

// Certified bound on |sum of lambda^n over eigenvalues of modulus below r|.
inline double tail_bound(const Decomposition& dec, double r, long n) {
    double total = 0;
    for (const auto& c : dec.contributors) {
        long count = 0;
        double rad = 0;
        for (cplx l : c.eigs)
            if (std::abs(l) < r * (1 - 1e-8)) {
                ++count;
                rad = std::max(rad, std::abs(l));
            }
        if (count) total += static_cast<double>(count) * std::pow(rad, static_cast<double>(n));
        if (c.rest_count) total += static_cast<double>(c.rest_count) * std::pow(c.rest_radius, static_cast<double>(n));
    }
    return total;
}

// tr(M^n) reassembled from the explicit eigenvalues of all contributors.
inline cplx trace_from_spectrum(const Decomposition& dec, long n) {
    cplx acc = 0;
    for (const auto& c : dec.contributors)
        for (cplx l : c.eigs) acc += cpow(l, n);
    return acc;
}

} // namespace lcl
