#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lcl/matcore.hpp"

namespace lcl {

// Value together with an estimate of its rounding error.
struct Estimate {
    double value = 0;
    double err = 0;
};

inline CMatrix liouville_matrix(const KrausSet& k) {
    const int D = k.D();
    CMatrix m = CMatrix::Zero(D * D, D * D);
    for (const auto& a : k.mats()) m.noalias() += kron(a.conjugate(), a);
    return m;
}

// Periodic MPS family {psi_N}. Copies share one lazily filled cache.
class MPSFamily {
public:
    static constexpr int dense_limit = 1024;
    static constexpr long power_limit = 256;

    MPSFamily() = default;
    explicit MPSFamily(KrausSet k, std::string name = {})
        : kraus_(std::move(k)), name_(std::move(name)), cache_(std::make_shared<Cache>()) {}

    const KrausSet& kraus() const { return kraus_; }
    const std::string& name() const { return name_; }
    int d() const { return kraus_.d(); }
    int D() const { return kraus_.D(); }
    int dim() const { return D() * D(); }
    bool dense() const { return dim() <= dense_limit; }

    const CMatrix& liouville() const {
        std::call_once(cache_->liou_once, [this] { cache_->liou = liouville_matrix(kraus_); });
        return cache_->liou;
    }

    // M^k for k >= 1, by binary powering over a bounded cache.
    CMatrix power(long k) const {
        std::lock_guard lock(cache_->mu);
        return power_locked(k);
    }

    const std::vector<cplx>& eigenvalues() const {
        std::call_once(cache_->eig_once, [this] { fill_eigs(); });
        return cache_->eigs;
    }

    // First-order forward error of each eigenvalue: condition number times residual.
    const std::vector<double>& eigenvalue_errors() const {
        std::call_once(cache_->eig_once, [this] { fill_eigs(); });
        return cache_->eig_err;
    }

    std::optional<Estimate> cached_gamma(long n) const {
        std::lock_guard lock(cache_->mu);
        auto it = cache_->gamma.find(n);
        if (it == cache_->gamma.end()) return std::nullopt;
        return it->second;
    }
    void store_gamma(long n, Estimate e) const {
        std::lock_guard lock(cache_->mu);
        cache_->gamma[n] = e;
    }

private:
    struct Cache {
        std::once_flag liou_once, eig_once;
        CMatrix liou;
        std::vector<cplx> eigs;
        std::vector<double> eig_err;
        std::mutex mu;
        std::map<long, CMatrix> powers;
        std::map<long, Estimate> gamma;
    };

    void fill_eigs() const {
        const CMatrix& m = liouville();
        Eigen::ComplexEigenSolver<CMatrix> es(m, true);
        if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", INFINITY);
        const CMatrix& v = es.eigenvectors();
        const CMatrix w = v.partialPivLu().inverse(); // rows are left eigenvectors with y_k^H x_k = 1
        const double floor = std::numeric_limits<double>::epsilon() * m.norm();
        const Eigen::Index n = m.rows();
        std::vector<Eigen::Index> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        const auto& ev = es.eigenvalues();
        std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
            if (std::abs(ev(a)) != std::abs(ev(b))) return std::abs(ev(a)) > std::abs(ev(b));
            return std::arg(ev(a)) < std::arg(ev(b));
        });
        const double rho = n ? std::abs(ev(idx[0])) : 0;
        for (Eigen::Index k : idx) {
            const double nv = v.col(k).norm();
            const double res = (m * v.col(k) - ev(k) * v.col(k)).norm() / nv;
            const double cond = nv * w.row(k).norm();
            // defective clusters blow up the first-order estimate; eps^(1/5) covers Jordan blocks up to size 5
            const double cap = 1e-3 * rho;
            double d = 4 * cond * std::max(res, floor);
            if (!std::isfinite(d) || d > cap) d = cap;
            cache_->eigs.push_back(ev(k));
            cache_->eig_err.push_back(d);
        }
    }

    CMatrix power_locked(long k) const {
        if (k == 1) return liouville();
        if (auto it = cache_->powers.find(k); it != cache_->powers.end()) return it->second;
        check_deadline();
        CMatrix p;
        if (k % 2 == 0) {
            const CMatrix h = power_locked(k / 2);
            p = h * h;
        } else {
            p = power_locked(k - 1) * liouville();
        }
        const std::size_t bytes = static_cast<std::size_t>(dim()) * dim() * sizeof(cplx);
        if ((cache_->powers.size() + 1) * bytes > (std::size_t(512) << 20)) cache_->powers.clear();
        cache_->powers.emplace(k, p);
        return p;
    }

    KrausSet kraus_;
    std::string name_;
    std::shared_ptr<Cache> cache_;
};

namespace detail {

struct Neumaier {
    cplx sum{0, 0}, comp{0, 0};
    void add(cplx x) {
        auto step = [](double& s, double& c, double v) {
            const double t = s + v;
            if (std::abs(s) >= std::abs(v)) c += (s - t) + v;
            else c += (v - t) + s;
            s = t;
        };
        double sr = sum.real(), si = sum.imag(), cr = comp.real(), ci = comp.imag();
        step(sr, cr, x.real());
        step(si, ci, x.imag());
        sum = {sr, si};
        comp = {cr, ci};
    }
    cplx value() const { return sum + comp; }
};

constexpr double unit_roundoff = std::numeric_limits<double>::epsilon() / 2;

inline Estimate finish_trace(cplx v, double err) {
    if (std::abs(v.imag()) > 1e-8 * std::max(1.0, std::abs(v.real())) && std::abs(v.imag()) > 4 * err)
        throw NumericalError("tr(M^n) has a non-negligible imaginary part");
    return {v.real(), err};
}

inline Estimate gamma_dense(const MPSFamily& f, long n) {
    const long a = (n + 1) / 2, b = n / 2;
    const CMatrix p = f.power(a);
    Neumaier acc;
    double mag = 0;
    if (b == 0) {
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            acc.add(p(i, i));
            mag += std::abs(p(i, i));
        }
    } else {
        const CMatrix q = b == a ? p : f.power(b);
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            for (Eigen::Index j = 0; j < p.cols(); ++j) {
                const cplx t = p(i, j) * q(j, i);
                acc.add(t);
                mag += std::abs(t);
            }
    }
    const double lg = std::ceil(std::log2(static_cast<double>(std::max(1L, n))));
    return finish_trace(acc.value(), 6 * unit_roundoff * (1 + lg) * mag);
}

inline Estimate gamma_eigen(const MPSFamily& f, long n) {
    const auto& ev = f.eigenvalues();
    const auto& de = f.eigenvalue_errors();
    const double dn = static_cast<double>(n);
    Neumaier acc;
    double mag = 0, perturb = 0;
    for (std::size_t k = 0; k < ev.size(); ++k) {
        const cplx t = cpow(ev[k], n);
        acc.add(t);
        mag += std::abs(t);
        const double r = std::abs(ev[k]);
        perturb += std::pow(r + de[k], dn) - std::pow(r, dn);
    }
    return finish_trace(acc.value(), perturb + (8 + 4 * dn) * unit_roundoff * mag);
}

// Matrix-free: propagate every basis matrix E_j through the CP map n times.
inline Estimate gamma_matrix_free(const MPSFamily& f, long n) {
    const int D = f.D();
    Neumaier acc;
    double mag = 0;
    for (int c = 0; c < D; ++c)
        for (int r = 0; r < D; ++r) {
            check_deadline();
            CMatrix x = CMatrix::Zero(D, D);
            x(r, c) = 1.0;
            for (long s = 0; s < n; ++s) x = apply_cp_map(f.kraus(), x);
            acc.add(x(r, c));
            mag += x.norm();
        }
    return finish_trace(acc.value(), 8 * unit_roundoff * static_cast<double>(n) * D * mag);
}

} // namespace detail

// Gamma(n) = tr(M_E^n) with a rounding estimate; |value| <= err snaps to 0.
inline Estimate norm_sq_estimate(const MPSFamily& f, long n) {
    if (n < 1) throw ShapeError("norm_sq: n must be >= 1");
    if (auto c = f.cached_gamma(n)) return *c;
    Estimate e;
    if (!f.dense()) e = detail::gamma_matrix_free(f, n);
    else if (n <= MPSFamily::power_limit) e = detail::gamma_dense(f, n);
    else e = detail::gamma_eigen(f, n);
    if (std::abs(e.value) <= e.err) e = {0.0, 0.0};
    f.store_gamma(n, e);
    return e;
}

inline double norm_sq(const MPSFamily& f, long n) {
    double v = norm_sq_estimate(f, n).value;
    if (v < 0 && v >= -1e-9) v = 0;
    return v;
}

using Word = std::vector<int>;

// Amplitude tr(A_{k1} ... A_{kn}) for every word; indices are 0-based.
inline std::map<Word, cplx> brute_force_amplitudes(const MPSFamily& f, int n) {
    if (n < 1) throw ShapeError("brute force: n must be >= 1");
    if (std::pow(static_cast<double>(f.d()), n) > 1e7) throw TooLargeError("brute force: d^n exceeds 1e7");
    std::map<Word, cplx> out;
    Word w(n, 0);
    std::vector<CMatrix> prefix(n + 1);
    prefix[0] = CMatrix::Identity(f.D(), f.D());
    const auto& a = f.kraus().mats();
    auto rec = [&](auto&& self, int pos) -> void {
        if (pos == n) {
            out.emplace(w, prefix[n].trace());
            return;
        }
        for (int k = 0; k < f.d(); ++k) {
            w[pos] = k;
            prefix[pos + 1] = prefix[pos] * a[k];
            self(self, pos + 1);
        }
    };
    rec(rec, 0);
    return out;
}

inline double brute_force_norm_sq(const MPSFamily& f, int n) {
    detail::Neumaier acc;
    for (const auto& [w, amp] : brute_force_amplitudes(f, n)) acc.add(std::norm(amp));
    return acc.value().real();
}

// Model file: {"name", "d", "D", "matrices": d x D x D of [re, im]}.
inline MPSFamily model_from_json(const nlohmann::json& j, const std::string& where = "model") {
    auto fail = [&](const std::string& msg) { throw FormatError(where + ": " + msg); };
    if (!j.is_object()) fail("top level must be an object");
    if (!j.contains("matrices") || !j["matrices"].is_array()) fail("missing 'matrices' array");
    const auto& mats = j["matrices"];
    const int d = j.value("d", static_cast<int>(mats.size()));
    if (d != static_cast<int>(mats.size())) fail("'d' does not match number of matrices");
    if (d < 1) fail("need at least one matrix");
    const int D = j.value("D", mats[0].is_array() ? static_cast<int>(mats[0].size()) : 0);
    if (D < 1) fail("'D' must be positive");
    std::vector<CMatrix> out;
    for (int k = 0; k < d; ++k) {
        const auto& m = mats[k];
        const std::string at = "matrices[" + std::to_string(k) + "]";
        if (!m.is_array() || static_cast<int>(m.size()) != D) fail(at + " must have D rows");
        CMatrix a(D, D);
        for (int r = 0; r < D; ++r) {
            const auto& row = m[r];
            if (!row.is_array() || static_cast<int>(row.size()) != D)
                fail(at + "[" + std::to_string(r) + "] must have D entries");
            for (int c = 0; c < D; ++c) {
                const auto& e = row[c];
                const std::string ate = at + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
                double re = 0, im = 0;
                if (e.is_number()) re = e.get<double>();
                else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                    re = e[0].get<double>();
                    im = e[1].get<double>();
                } else fail(ate + " must be [re, im]");
                if (!std::isfinite(re) || !std::isfinite(im)) fail(ate + " is not finite");
                a(r, c) = cplx(re, im);
            }
        }
        out.push_back(std::move(a));
    }
    return MPSFamily(KrausSet(std::move(out)), j.value("name", std::string{}));
}

inline nlohmann::json model_to_json(const MPSFamily& f) {
    nlohmann::json mats = nlohmann::json::array();
    for (const auto& a : f.kraus().mats()) {
        nlohmann::json m = nlohmann::json::array();
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back({a(r, c).real(), a(r, c).imag()});
            m.push_back(row);
        }
        mats.push_back(m);
    }
    return {{"name", f.name()}, {"d", f.d()}, {"D", f.D()}, {"matrices", mats}};
}

inline MPSFamily load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open model file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    return model_from_json(j, path);
}

} // namespace lcl
