#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "lcl/logic.hpp"
#include "lcl/semilinear.hpp"
#include "lcl/spectral.hpp"

namespace lcl {

// ---------------------------------------------------------------- exponential polynomials

// sum_k w_k base_k^N exactly, plus terms only known as |.| <= a rho^N.
struct ExpTerm {
    cplx w;
    cplx base;
    double mag; // sum of |w| before merging, the scale for zero tests
};

struct BoundTerm {
    double a;
    double rho;
};

struct ExpPoly {
    std::vector<ExpTerm> exact;
    std::vector<BoundTerm> bounds;

    static ExpPoly constant(double c) {
        ExpPoly p;
        if (c != 0) p.exact.push_back({c, 1.0, std::abs(c)});
        return p;
    }

    ExpPoly shifted(long o) const {
        ExpPoly p = *this;
        for (auto& t : p.exact) {
            t.w *= cpow(t.base, o);
            t.mag *= std::pow(std::abs(t.base), static_cast<double>(o));
        }
        for (auto& b : p.bounds) b.a *= std::pow(b.rho, static_cast<double>(o));
        return p;
    }

    ExpPoly scaled(double s) const {
        ExpPoly p = *this;
        for (auto& t : p.exact) {
            t.w *= s;
            t.mag *= std::abs(s);
        }
        for (auto& b : p.bounds) b.a *= std::abs(s);
        return p;
    }

    friend ExpPoly operator+(ExpPoly a, const ExpPoly& b) {
        a.exact.insert(a.exact.end(), b.exact.begin(), b.exact.end());
        a.bounds.insert(a.bounds.end(), b.bounds.begin(), b.bounds.end());
        a.merge();
        return a;
    }

    friend ExpPoly operator*(const ExpPoly& x, const ExpPoly& y) {
        ExpPoly p;
        for (const auto& s : x.exact)
            for (const auto& t : y.exact) p.exact.push_back({s.w * t.w, s.base * t.base, s.mag * t.mag});
        for (const auto& s : x.exact)
            for (const auto& b : y.bounds) p.bounds.push_back({s.mag * b.a, std::abs(s.base) * b.rho});
        for (const auto& b : x.bounds)
            for (const auto& t : y.exact) p.bounds.push_back({t.mag * b.a, std::abs(t.base) * b.rho});
        for (const auto& b : x.bounds)
            for (const auto& c : y.bounds) p.bounds.push_back({b.a * c.a, b.rho * c.rho});
        p.merge();
        return p;
    }

    // Combine terms whose bases agree to ~1e-9 relative.
    void merge() {
        std::erase_if(exact, [](const ExpTerm& t) { return t.w == cplx(0, 0) || t.base == cplx(0, 0); });
        std::sort(exact.begin(), exact.end(), [](const ExpTerm& s, const ExpTerm& t) {
            return std::abs(s.base) > std::abs(t.base);
        });
        std::vector<ExpTerm> out;
        std::size_t i = 0;
        while (i < exact.size()) {
            const double r = std::abs(exact[i].base);
            std::size_t j = i;
            while (j < exact.size() && std::abs(exact[j].base) >= r * (1 - 1e-9)) ++j;
            std::vector<ExpTerm> run(exact.begin() + i, exact.begin() + j);
            std::sort(run.begin(), run.end(),
                      [](const ExpTerm& s, const ExpTerm& t) { return std::arg(s.base) < std::arg(t.base); });
            std::vector<ExpTerm> merged;
            for (const auto& t : run) {
                if (!merged.empty() && std::abs(merged.back().base - t.base) <= 1e-9 * r) {
                    merged.back().w += t.w;
                    merged.back().mag += t.mag;
                } else {
                    merged.push_back(t);
                }
            }
            // the argument wraps at -pi / pi
            if (merged.size() > 1 && std::abs(merged.front().base - merged.back().base) <= 1e-9 * r) {
                merged.front().w += merged.back().w;
                merged.front().mag += merged.back().mag;
                merged.pop_back();
            }
            out.insert(out.end(), merged.begin(), merged.end());
            i = j;
        }
        exact = std::move(out);
        std::erase_if(bounds, [](const BoundTerm& b) { return b.a == 0 || b.rho == 0; });
    }

    // Value of the exact part at n; for tests.
    cplx exact_value(long n) const {
        cplx acc = 0;
        for (const auto& t : exact) acc += t.w * cpow(t.base, n);
        return acc;
    }
    double bound_value(long n) const {
        double acc = 0;
        for (const auto& b : bounds) acc += b.a * std::pow(b.rho, static_cast<double>(n));
        return acc;
    }
};

inline constexpr double kEigZero = 1e-6;   // |lambda| <= kEigZero * rho counts as 0
inline constexpr double kShellTol = 1e-8;  // shell grouping, relative
inline constexpr double kCoefZero = 1e-12; // class coefficients below this (relative to shell scale) are noise
inline constexpr double kRootTol = 1e-7;   // |e^{iq theta} - 1| for root-of-unity recognition
inline constexpr int kMaxOrder = 64;
inline constexpr long kMaxKappa = 4096;
inline constexpr long kThresholdCap = 1000000;

// Gamma(N) = tr(M^N) from the spectra of all contributors.
inline ExpPoly gamma_poly(const Decomposition& dec) {
    double rho = 0;
    for (const auto& c : dec.contributors) {
        for (cplx l : c.eigs) rho = std::max(rho, std::abs(l));
        if (c.rest_count) rho = std::max(rho, c.rest_radius);
    }
    ExpPoly p;
    for (const auto& c : dec.contributors) {
        for (cplx l : c.eigs)
            if (std::abs(l) > kEigZero * rho) p.exact.push_back({1.0, l, 1.0});
        if (c.rest_count) p.bounds.push_back({static_cast<double>(c.rest_count), c.rest_radius});
    }
    p.merge();
    return p;
}

inline ExpPoly linear_poly(const MPSFamily& f, const Linear& l, const ExpPoly& gamma) {
    ExpPoly p = ExpPoly::constant(l.c0);
    for (const auto& [c, r] : l.terms) {
        if (r.kind == SizeRef::Fixed) p = p + ExpPoly::constant(c * norm_sq_estimate(f, r.value).value);
        else p = p + gamma.shifted(r.value).scaled(c);
    }
    return p;
}

// ---------------------------------------------------------------- shells

struct ShellTerm {
    cplx w;
    long a = 0, q = 0; // base = r e^{2 pi i a/q}; q = 0 if not a root of unity
    double ratio = 1;  // |base| / r
};

struct Shell {
    double r = 0;
    double scale = 0;
    long order = 1; // 0 if some base is not a recognised root of unity
    std::vector<ShellTerm> terms;

    bool vanishing() const {
        return std::all_of(terms.begin(), terms.end(),
                           [&](const ShellTerm& t) { return std::abs(t.w) <= kCoefZero * scale; });
    }
    cplx class_coefficient(long i) const {
        cplx c = 0;
        for (const auto& t : terms)
            c += t.w * std::polar(1.0, 2 * std::numbers::pi * static_cast<double>((t.a * (i % t.q)) % t.q) /
                                           static_cast<double>(t.q));
        return c;
    }
};

struct ShellPlan {
    std::vector<Shell> shells;
    std::vector<BoundTerm> bounds;
};

namespace detail {

inline std::pair<long, long> root_of_unity(cplx b) {
    const double th = std::arg(b);
    for (long q = 1; q <= kMaxOrder; ++q) {
        if (std::abs(std::polar(1.0, static_cast<double>(q) * th) - 1.0) <= kRootTol) {
            long a = std::llround(static_cast<double>(q) * th / (2 * std::numbers::pi)) % q;
            if (a < 0) a += q;
            return {a, q};
        }
    }
    return {0, 0};
}

} // namespace detail

inline ShellPlan make_plan(const ExpPoly& p) {
    ShellPlan plan;
    plan.bounds = p.bounds;
    std::vector<ExpTerm> t = p.exact;
    std::sort(t.begin(), t.end(), [](const ExpTerm& x, const ExpTerm& y) { return std::abs(x.base) > std::abs(y.base); });
    std::size_t i = 0;
    while (i < t.size()) {
        Shell sh;
        sh.r = std::abs(t[i].base);
        while (i < t.size() && std::abs(t[i].base) >= sh.r * (1 - kShellTol)) {
            const auto [a, q] = detail::root_of_unity(t[i].base);
            sh.terms.push_back({t[i].w, a, q, std::abs(t[i].base) / sh.r});
            sh.scale += t[i].mag;
            if (q == 0 || sh.order == 0) sh.order = 0;
            else sh.order = std::lcm(sh.order, q);
            if (sh.order > kMaxKappa) sh.order = 0;
            ++i;
        }
        plan.shells.push_back(std::move(sh));
    }
    return plan;
}

// Periods of the top two non-vanishing shells, folded into kappa.
inline long fold_kappa(long kappa, const ShellPlan& plan) {
    int seen = 0;
    for (const auto& sh : plan.shells) {
        if (sh.vanishing()) continue;
        if (sh.order > 0 && std::lcm(kappa, sh.order) <= kMaxKappa) kappa = std::lcm(kappa, sh.order);
        if (++seen == 2) break;
    }
    return kappa;
}

// Eventual sign of a sequence on the class {j >= 1 : j = i mod kappa}.
struct ClassSign {
    enum Kind { Zero, Signed, Unknown } kind = Unknown;
    int sign = 0;
    long threshold = 0; // sign holds (and the value is nonzero) for every j >= threshold in the class
    double radius = 0;
    double coefficient = 0;
};

inline ClassSign classify(const ShellPlan& plan, long i, long kappa) {
    ClassSign out;
    for (std::size_t s = 0; s < plan.shells.size(); ++s) {
        const Shell& sh = plan.shells[s];
        if (sh.vanishing()) continue;
        if (sh.order == 0 || kappa % sh.order != 0) return out;
        const cplx c = sh.class_coefficient(i);
        if (std::abs(c) <= kCoefZero * sh.scale) continue;
        for (const auto& b : plan.bounds)
            if (b.rho >= sh.r * (1 - 1e-12)) return out;
        // remaining mass, relative to r^j
        std::vector<std::pair<double, double>> tail;
        for (std::size_t u = s + 1; u < plan.shells.size(); ++u)
            for (const auto& t : plan.shells[u].terms)
                tail.emplace_back(std::abs(t.w), plan.shells[u].r * t.ratio / sh.r);
        for (const auto& b : plan.bounds) tail.emplace_back(b.a, b.rho / sh.r);
        const double target = std::abs(c);
        auto certified = [&](long j) {
            double acc = 0;
            for (const auto& [w, x] : tail) acc += w * std::pow(x, static_cast<double>(j));
            return target > acc * (1 + 1e-9);
        };
        const long first = i;
        auto at = [&](long k) { return first + kappa * k; };
        long hi = 0;
        if (!certified(at(0))) {
            long step = 1;
            while (!certified(at(step))) {
                if (at(step) > kThresholdCap) return out;
                step *= 2;
            }
            long lo = step / 2; // not certified at lo
            hi = step;
            while (hi - lo > 1) {
                const long mid = lo + (hi - lo) / 2;
                if (certified(at(mid))) hi = mid;
                else lo = mid;
            }
        }
        out.kind = ClassSign::Signed;
        out.sign = c.real() > 0 ? 1 : -1;
        out.threshold = at(hi);
        out.radius = sh.r;
        out.coefficient = c.real();
        return out;
    }
    if (!plan.bounds.empty()) return out;
    out.kind = ClassSign::Zero;
    out.threshold = i;
    return out;
}

// ---------------------------------------------------------------- atomic formulas

struct ClassRecord {
    enum Kind { In, Out, Indecisive } kind = Indecisive;
    long residue = 0;
    long threshold = 0; // In: certified from here; Out: refuted from here
    double radius = 0;  // dominant shell radius of the value expression on the class
    double peripheral = 0;
};

inline const char* class_kind_str(ClassRecord::Kind k) {
    return k == ClassRecord::In ? "in" : k == ClassRecord::Out ? "out" : "indecisive";
}

struct AtomicAnalysis {
    std::string label;
    long kappa = 1;
    std::vector<ClassRecord> classes;
    std::vector<std::string> notes;
    EvidenceApprox approx;
};

inline constexpr long kEnumerateCap = 131072; // direct evaluation limit for exceptional sizes
inline constexpr long kIndecisiveProbe = 128;

namespace detail {

inline ClassRecord decide_class(const Label& l, const std::vector<std::pair<double, ShellPlan>>& lower,
                                const std::vector<std::pair<double, ShellPlan>>& upper, const ShellPlan* den,
                                long i, long kappa) {
    ClassRecord rec;
    rec.residue = i;
    int sigma = 1;
    long t_den = i;
    if (den) {
        const ClassSign ds = classify(*den, i, kappa);
        if (ds.kind != ClassSign::Signed) return rec;
        sigma = ds.sign;
        t_den = ds.threshold;
    }
    long t_in = t_den, t_out = -1;
    bool all_in = true;
    auto endpoint = [&](const ShellPlan& plan, bool is_lower, bool closed) {
        const ClassSign s = classify(plan, i, kappa);
        if (s.kind == ClassSign::Unknown) {
            all_in = false;
            return;
        }
        const long t = std::max(s.threshold, t_den);
        bool ok;
        if (s.kind == ClassSign::Zero) ok = closed;
        else ok = is_lower ? sigma * s.sign > 0 : sigma * s.sign < 0;
        if (ok) {
            t_in = std::max(t_in, t);
        } else {
            all_in = false;
            t_out = t_out < 0 ? t : std::min(t_out, t);
        }
    };
    for (const auto& [e, p] : lower) endpoint(p, true, !l.interval.lo_open);
    for (const auto& [e, p] : upper) endpoint(p, false, !l.interval.hi_open);
    if (t_out >= 0) {
        rec.kind = ClassRecord::Out;
        rec.threshold = t_out;
    } else if (all_in) {
        rec.kind = ClassRecord::In;
        rec.threshold = t_in;
    }
    return rec;
}

} // namespace detail

inline AtomicAnalysis analyze_atomic(const ChainModel& m, const Decomposition& dec, const Label& l) {
    AtomicAnalysis out;
    out.label = l.name;
    const MPSFamily& f = m.family;
    auto h3 = [&, memo = std::map<long, Tri>()](long j) mutable {
        if (auto it = memo.find(j); it != memo.end()) return it->second;
        Tri t;
        try {
            t = holds_label3(m, l, j);
        } catch (const TimeoutError&) {
            throw;
        } catch (const Error&) {
            t = Tri::Unknown;
        }
        memo.emplace(j, t);
        return t;
    };
    try {
        const ExpPoly gamma = gamma_poly(dec);
        const ExpPoly num = linear_poly(f, l.expr.a, gamma);
        ExpPoly value = num, den;
        const bool ratio = l.expr.kind == ValueExpr::RATIO;
        if (ratio) den = linear_poly(f, l.expr.b, gamma);
        if (l.expr.kind == ValueExpr::PRODUCT) value = num * linear_poly(f, l.expr.b, gamma);

        // f_e = value - e (LINEAR, PRODUCT) or num - e * den (RATIO)
        auto endpoint_poly = [&](double e) {
            if (ratio) return num + den.scaled(-e);
            return value + ExpPoly::constant(-e);
        };
        std::vector<std::pair<double, ShellPlan>> lower, upper;
        if (std::isfinite(l.interval.lo)) lower.emplace_back(l.interval.lo, make_plan(endpoint_poly(l.interval.lo)));
        if (std::isfinite(l.interval.hi)) upper.emplace_back(l.interval.hi, make_plan(endpoint_poly(l.interval.hi)));
        const ShellPlan value_plan = make_plan(value);
        const ShellPlan den_plan = make_plan(den);

        long kappa = dec.kappa <= kMaxKappa ? dec.kappa : 1;
        for (const auto& [e, p] : lower) kappa = fold_kappa(kappa, p);
        for (const auto& [e, p] : upper) kappa = fold_kappa(kappa, p);
        if (ratio) kappa = fold_kappa(kappa, den_plan);
        out.kappa = kappa;

        long t_all = kIndecisiveProbe + 1;
        for (long i = 1; i <= kappa; ++i) {
            check_deadline();
            ClassRecord rec = detail::decide_class(l, lower, upper, ratio ? &den_plan : nullptr, i, kappa);
            const ClassSign v = classify(value_plan, i, kappa);
            rec.radius = v.radius;
            rec.peripheral = v.coefficient;
            if (rec.kind != ClassRecord::Indecisive) t_all = std::max(t_all, rec.threshold);
            out.classes.push_back(rec);
        }
        auto rec_of = [&](long j) -> const ClassRecord& { return out.classes[(j - 1) % kappa]; };
        auto plus = [&](long j) {
            const auto& r = rec_of(j);
            if (r.kind != ClassRecord::Out) return true;
            if (j >= r.threshold) return false;
            return j > kEnumerateCap || h3(j) != Tri::False;
        };
        auto minus = [&](long j) {
            const auto& r = rec_of(j);
            if (r.kind == ClassRecord::In && j >= r.threshold) return true;
            if (r.kind == ClassRecord::Out && j >= r.threshold) return false;
            const long cap = r.kind == ClassRecord::Indecisive ? kIndecisiveProbe : kEnumerateCap;
            return j <= cap && h3(j) == Tri::True;
        };
        out.approx.over = SemilinearSet::tabulate(t_all, kappa, plus);
        out.approx.under = SemilinearSet::tabulate(t_all, kappa, minus);
    } catch (const TimeoutError&) {
        throw;
    } catch (const Error& e) {
        out.notes.push_back(std::string("analysis failed, label left indecisive: ") + e.what());
        out.classes.clear();
        out.approx.over = SemilinearSet::universe();
        out.approx.under = SemilinearSet::empty();
    }
    return out;
}

inline EvidenceApprox solve_atomic(const ChainModel& m, const Decomposition& dec, const Label& l) {
    return analyze_atomic(m, dec, l).approx;
}

// ---------------------------------------------------------------- formulas

using AtomProvider = std::function<EvidenceApprox(const std::string&)>;

inline EvidenceApprox negate(const EvidenceApprox& x) { return {complement(x.under), complement(x.over)}; }

// Structural recursion over the formula with the given label approximations.
inline EvidenceApprox propagate(const Formula& f, const AtomProvider& atom) {
    check_deadline();
    switch (f->kind) {
    case FormulaNode::TRUE: return {SemilinearSet::universe(), SemilinearSet::universe()};
    case FormulaNode::LABEL: return atom(f->label);
    case FormulaNode::NOT: return negate(propagate(f->a, atom));
    case FormulaNode::AND: {
        const auto x = propagate(f->a, atom), y = propagate(f->b, atom);
        return {intersect(x.over, y.over), intersect(x.under, y.under)};
    }
    case FormulaNode::NEXT: {
        const auto x = propagate(f->a, atom);
        return {shift_down(x.over, 1), shift_down(x.under, 1)};
    }
    case FormulaNode::EVENTUALLY: {
        const auto x = propagate(f->a, atom);
        return {eventually(x.over), eventually(x.under)};
    }
    case FormulaNode::GLOBALLY: {
        const auto x = negate(propagate(f->a, atom));
        return negate({eventually(x.over), eventually(x.under)});
    }
    }
    throw Error("bad formula node");
}

struct CheckOptions {
    bool refine_prefix = true; // direct evaluation on small sizes
    long refine_limit = 64;
    int jobs = 1;
};

// Label approximations memoized per name; labels may be prepared in parallel.
class Checker {
public:
    Checker(const ChainModel& m, const Decomposition& dec, CheckOptions opts = {})
        : m_(m), dec_(dec), opts_(opts) {}

    const AtomicAnalysis& analysis(const std::string& name) {
        {
            std::lock_guard lock(mu_);
            if (auto it = memo_.find(name); it != memo_.end()) return it->second;
        }
        const auto lit = m_.labels.find(name);
        if (lit == m_.labels.end()) throw Error("unknown label " + name);
        AtomicAnalysis a = analyze_atomic(m_, dec_, lit->second);
        if (opts_.refine_prefix) refine(a, lit->second);
        std::lock_guard lock(mu_);
        return memo_.emplace(name, std::move(a)).first->second;
    }

    void prepare(const std::vector<std::string>& names) {
        if (opts_.jobs <= 1 || names.size() <= 1) {
            for (const auto& n : names) analysis(n);
            return;
        }
        const auto dl = detail::deadline;
        std::vector<std::future<void>> tasks;
        std::size_t next = 0;
        std::mutex qmu;
        for (int w = 0; w < opts_.jobs; ++w)
            tasks.push_back(std::async(std::launch::async, [&, dl] {
                detail::deadline = dl;
                for (;;) {
                    std::size_t k;
                    {
                        std::lock_guard lock(qmu);
                        if (next >= names.size()) return;
                        k = next++;
                    }
                    analysis(names[k]);
                }
            }));
        for (auto& t : tasks) t.get();
    }

    EvidenceApprox check(const Formula& f) {
        std::vector<std::string> names;
        collect(f, names);
        prepare(names);
        return propagate(f, [this](const std::string& n) { return analysis(n).approx; });
    }

private:
    void refine(AtomicAnalysis& a, const Label& l) const {
        const long lim = opts_.refine_limit;
        std::vector<Tri> t(static_cast<std::size_t>(lim + 1), Tri::Unknown);
        for (long j = 1; j <= lim; ++j) {
            try {
                t[j] = holds_label3(m_, l, j);
            } catch (const TimeoutError&) {
                throw;
            } catch (const Error&) {
            }
        }
        const auto over = a.approx.over, under = a.approx.under;
        const long th = std::max({over.threshold(), under.threshold(), lim + 1});
        const long k = std::lcm(over.modulus(), under.modulus());
        a.approx.over = SemilinearSet::tabulate(th, k, [&](long j) {
            return over.contains(j) && !(j <= lim && t[j] == Tri::False);
        });
        a.approx.under = SemilinearSet::tabulate(th, k, [&](long j) {
            return under.contains(j) || (j <= lim && t[j] == Tri::True);
        });
    }

    static void collect(const Formula& f, std::vector<std::string>& out) {
        if (!f) return;
        if (f->kind == FormulaNode::LABEL && std::find(out.begin(), out.end(), f->label) == out.end())
            out.push_back(f->label);
        collect(f->a, out);
        collect(f->b, out);
    }

    const ChainModel& m_;
    const Decomposition& dec_;
    CheckOptions opts_;
    std::mutex mu_;
    std::map<std::string, AtomicAnalysis> memo_;
};

inline EvidenceApprox check_all(const ChainModel& m, const Decomposition& dec, const Formula& f,
                                const CheckOptions& opts = {}) {
    return Checker(m, dec, opts).check(f);
}

// ---------------------------------------------------------------- verdicts

struct Verdict {
    char value = 'U'; // 'T', 'F' or 'U'
    std::string formula;
    long start = 1;
    EvidenceApprox sets;
    std::map<std::string, AtomicAnalysis> per_label;
    double runtime_s = 0;

    nlohmann::json to_json() const {
        nlohmann::json labels = nlohmann::json::object();
        for (const auto& [name, a] : per_label) {
            nlohmann::json classes = nlohmann::json::array();
            for (const auto& c : a.classes)
                classes.push_back({{"residue", c.residue},
                                   {"kind", class_kind_str(c.kind)},
                                   {"threshold", c.threshold},
                                   {"radius", c.radius},
                                   {"peripheral", c.peripheral}});
            labels[name] = {{"omega_plus", a.approx.over.to_json()},
                            {"omega_minus", a.approx.under.to_json()},
                            {"kappa", a.kappa},
                            {"classes", classes},
                            {"notes", a.notes}};
        }
        return {{"formula", formula},
                {"verdict", std::string(1, value)},
                {"start", start},
                {"omega_plus", sets.over.to_json()},
                {"omega_minus", sets.under.to_json()},
                {"per_label", labels},
                {"runtime_s", runtime_s}};
    }
};

inline char decide(const EvidenceApprox& x, long start) {
    if (x.under.contains(start)) return 'T';
    if (!x.over.contains(start)) return 'F';
    return 'U';
}

inline Verdict verdict(const ChainModel& m, const Decomposition& dec, const Formula& f, long start = 1,
                       const CheckOptions& opts = {}) {
    if (start < 1) throw Error("start size must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();
    Checker c(m, dec, opts);
    Verdict v;
    v.formula = render(f);
    v.start = start;
    v.sets = c.check(f);
    v.value = decide(v.sets, start);
    std::function<void(const Formula&)> walk = [&](const Formula& g) {
        if (!g) return;
        if (g->kind == FormulaNode::LABEL) v.per_label.emplace(g->label, c.analysis(g->label));
        walk(g->a);
        walk(g->b);
    };
    walk(f);
    v.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return v;
}

} // namespace lcl
