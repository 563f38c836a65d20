#pragma once

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lcl/checker.hpp"
#include "lcl/fixtures.hpp"

namespace lcl {

inline const std::vector<std::string>& family_names() {
    static const std::vector<std::string> names = {"aklt", "cluster", "near_critical", "periodic", "random_gapped"};
    return names;
}

// Base 2x2 Kraus operators of a synthetic family.
inline KrausSet base_kraus(const std::string& name) {
    using fixtures::pauli_x;
    using fixtures::pauli_y;
    using fixtures::pauli_z;
    const cplx I(0, 1);
    if (name == "aklt") {
        CMatrix sp = CMatrix::Zero(2, 2), sm = CMatrix::Zero(2, 2);
        sp(0, 1) = 1;
        sm(1, 0) = 1;
        return KrausSet({std::sqrt(2.0 / 3) * sp, -pauli_z() / std::sqrt(3.0), -std::sqrt(2.0 / 3) * sm});
    }
    if (name == "cluster") {
        CMatrix h(2, 2);
        h << 1, 1, 1, -1;
        h /= std::sqrt(2.0);
        return KrausSet({h / std::sqrt(2.0), h * pauli_z() / std::sqrt(2.0)});
    }
    if (name == "random_gapped") {
        const double e5 = 0.05;
        return KrausSet({std::sqrt(1 - 2 * e5) * CMatrix::Identity(2, 2), std::sqrt(e5) * pauli_x(),
                         std::sqrt(e5) * pauli_z()});
    }
    if (name == "near_critical") {
        const double e1 = 0.01, theta = 0.98 * std::numbers::pi;
        CMatrix u = CMatrix::Zero(2, 2);
        u(0, 0) = 1;
        u(1, 1) = std::polar(1.0, theta);
        return KrausSet({std::sqrt(1 - e1) * u, std::sqrt(e1) * pauli_z()});
    }
    if (name == "periodic") {
        const double e2 = 0.02;
        CMatrix u = CMatrix::Zero(2, 2);
        u(0, 0) = 1;
        u(1, 1) = I;
        return KrausSet({std::sqrt(1 - e2) * u, std::sqrt(e2 / 2) * pauli_x(), std::sqrt(e2 / 2) * pauli_y()});
    }
    throw Error("unknown family '" + name + "'");
}

// t-fold self tensor power: operators K_{i1} x ... x K_{it}, D = 2^t.
inline KrausSet lift(const KrausSet& base, int t) {
    if (t < 1) throw ShapeError("lift exponent must be >= 1");
    std::vector<CMatrix> ops = base.mats();
    for (int s = 1; s < t; ++s) {
        std::vector<CMatrix> next;
        next.reserve(ops.size() * base.mats().size());
        for (const auto& a : ops)
            for (const auto& b : base.mats()) next.push_back(kron(a, b));
        ops = std::move(next);
    }
    return KrausSet(std::move(ops));
}

inline MPSFamily build_family(const std::string& name, int t) {
    if (t < 1 || t > 7) throw ShapeError("lift exponent must satisfy 1 <= t <= 7 (D <= 128)");
    return MPSFamily(lift(base_kraus(name), t), name + "_D" + std::to_string(1 << t));
}

inline MPSFamily load_physical(const std::string& path) {
    MPSFamily f = load_model(path);
    if (!f.name().empty()) return f;
    return MPSFamily(f.kraus(), std::filesystem::path(path).stem().string());
}

// ---------------------------------------------------------------- formula suite

struct SuiteParams {
    double eps = 0.01;
    double gamma = 1.0;
    double delta = 0.01;
    int k = 2;
    int J = 1;
    double eta = 1e-9; // tolerance of the equality predicate
};

struct SuiteFormula {
    std::string name;
    std::string text;
    Formula formula;
};

struct Suite {
    LabelTable labels;
    std::vector<SuiteFormula> formulas;

    const SuiteFormula& get(const std::string& name) const {
        for (const auto& f : formulas)
            if (f.name == name) return f;
        throw Error("unknown suite formula '" + name + "'");
    }
};

inline Suite formula_suite(const SuiteParams& p = {}) {
    Suite s;
    auto add = [&](const std::string& n, const std::string& expr, IntervalPredicate in) {
        s.labels[n] = Label{n, parse_expr(expr), in};
    };
    const std::string corr = "val(N) - val(1)";
    add("nz", "val(N)", IntervalPredicate::open(0, INFINITY));
    add("bd", "val(N)", IntervalPredicate::open(1 - p.eps, 1 + p.eps));
    add("clust", corr, IntervalPredicate::open(-p.eps, p.eps));
    add("rat", "val(N+1) / val(N)", IntervalPredicate::open(-p.gamma, p.gamma));
    add("osc", "(" + corr + ") * (val(N+1) - val(1))", IntervalPredicate::open(-INFINITY, 0));
    add("per" + std::to_string(p.k), "val(N) - val(N+" + std::to_string(p.k) + ")",
        IntervalPredicate::closed(-p.eta, p.eta));
    add("lro", "(" + corr + ") * (" + corr + ")", IntervalPredicate::open(p.delta * p.delta, INFINITY));

    const std::string pre = p.J > 1 ? "X^" + std::to_string(p.J - 1) + " " : "";
    const std::vector<std::pair<std::string, std::string>> texts = {
        {"phi1", pre + "G nz"},
        {"phi2", pre + "G bd"},
        {"phi2p", pre + "G (bd & clust)"},
        {"phi3", "E G (rat & X rat)"},
        {"phi4", pre + "G (clust & !osc)"},
        {"phi5", pre + "G !per" + std::to_string(p.k)},
        {"phi6", "E G (lro & !clust)"},
    };
    for (const auto& [n, t] : texts) s.formulas.push_back({n, t, parse_formula(t, s.labels)});
    return s;
}

// ---------------------------------------------------------------- benchmark rows

inline std::optional<double> peak_memory_mb() {
    rusage u{};
    if (getrusage(RUSAGE_SELF, &u) != 0) return std::nullopt;
    return static_cast<double>(u.ru_maxrss) / 1024.0; // kilobytes on Linux
}

struct BenchRow {
    std::string model;
    std::string formula;
    int D = 0;
    std::string verdict; // T, F, U, TO or ERR
    double runtime_s = 0;
    std::optional<double> peak_mb;
    std::string error;

    std::string cell() const {
        char buf[64];
        std::string out = verdict;
        std::snprintf(buf, sizeof buf, " / %.4f", runtime_s);
        out += buf;
        if (peak_mb) {
            std::snprintf(buf, sizeof buf, " / %.3f", *peak_mb);
            out += buf;
        } else {
            out += " / null";
        }
        return out;
    }
};

struct BenchOptions {
    double timeout_s = 3600;
    std::uint64_t seed = 1;
    CheckOptions check;
};

inline BenchRow run_row(const MPSFamily& fam, const Suite& suite, const SuiteFormula& f, const BenchOptions& o) {
    BenchRow row;
    row.model = fam.name();
    row.formula = f.name;
    row.D = fam.D();
    const auto t0 = std::chrono::steady_clock::now();
    set_deadline(o.timeout_s);
    try {
        SpectralOptions so;
        so.seed = o.seed;
        so.eig.seed = o.seed + 6;
        const Decomposition dec = decompose(fam.kraus(), so);
        const ChainModel m{fam, suite.labels};
        row.verdict = std::string(1, verdict(m, dec, f.formula, 1, o.check).value);
    } catch (const TimeoutError&) {
        row.verdict = "TO";
    } catch (const std::exception& e) {
        row.verdict = "ERR";
        row.error = e.what();
    }
    clear_deadline();
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (row.verdict == "TO") row.runtime_s = o.timeout_s;
    row.peak_mb = peak_memory_mb();
    return row;
}

} // namespace lcl
