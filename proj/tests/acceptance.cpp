// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// nonzero if any selected criterion fails.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "lcl/bench.hpp"
#include "lcl/fixtures.hpp"
#include "oracles.hpp"

using namespace lcl;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> verdicts; // "instance=V" lines compared across seeds
};

struct Ctx {
    std::uint64_t seed = 1;
    bool d32 = false;
};

SpectralOptions spectral(const Ctx& c) {
    SpectralOptions so;
    so.seed = c.seed;
    so.eig.seed = c.seed + 6;
    return so;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void fail(Outcome& o, const std::string& why) {
    if (o.pass) o.detail = why;
    else if (o.detail.size() < 400) o.detail += "; " + why;
    o.pass = false;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

Label near1() { return {"l", ValueExpr::linear(val_offset(0)), IntervalPredicate::open(0.95, 1.05)}; }

// ---------------------------------------------------------------------------

Outcome criterion1(const Ctx&) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const MPSFamily f = fixtures::example1();
    const double want[] = {0, 10.0 / 3, 8.0 / 9, 82.0 / 27, 80.0 / 81, 730.0 / 243, 728.0 / 729};
    double worst = 0;
    for (int n = 1; n <= 7; ++n) {
        const double g = norm_sq(f, n);
        worst = std::max(worst, std::abs(g - want[n - 1]));
        if (std::abs(g - want[n - 1]) > 1e-9) fail(o, "Gamma(" + std::to_string(n) + ") = " + std::to_string(g));
    }
    const double dt = seconds_since(t0);
    if (dt >= 1) fail(o, "runtime " + std::to_string(dt) + " s");
    if (o.pass) o.detail = "max error " + sci(worst);
    return o;
}

Outcome criterion2(const Ctx&) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    double worst = 0;
    for (int inst = 0; inst < 200; ++inst) {
        const int d = 1 + inst % 3, D = 1 + (inst / 3) % 4;
        const MPSFamily f(oracle::random_kraus(d, D, rng, 0.7));
        for (int n = 1; n <= 8; ++n) {
            const double bf = brute_force_norm_sq(f, n), v = norm_sq(f, n);
            const double rel = std::abs(v - bf) / std::max(1.0, std::abs(bf));
            worst = std::max(worst, rel);
            if (rel > 1e-8) fail(o, "instance " + std::to_string(inst) + " n=" + std::to_string(n));
        }
    }
    const double dt = seconds_since(t0);
    if (dt >= 60) fail(o, "runtime " + std::to_string(dt) + " s");
    if (o.pass) o.detail = "200 instances, max scaled error " + sci(worst);
    return o;
}

Outcome criterion3(const Ctx& c) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const Decomposition dec = decompose(fixtures::example1().kraus(), spectral(c));
    if (dec.components.size() != 2) {
        fail(o, std::to_string(dec.components.size()) + " components");
        return o;
    }
    struct Want {
        double r;
        int p;
        double s;
    };
    std::vector<Want> want = {{1, 1, 1.0 / 3}, {1, 2, 0}};
    for (const auto& m : dec.components) {
        if (m.dim() != 2) fail(o, "component of dimension " + std::to_string(m.dim()));
        auto hit = std::find_if(want.begin(), want.end(), [&](const Want& w) {
            return w.p == m.period && std::abs(w.r - m.radius) <= 1e-7 && std::abs(w.s - m.second_radius) <= 1e-7;
        });
        if (hit == want.end()) {
            std::ostringstream os;
            os << "unexpected (r,p,s) = (" << m.radius << "," << m.period << "," << m.second_radius << ")";
            fail(o, os.str());
        } else {
            want.erase(hit);
        }
        o.verdicts.push_back("period=" + std::to_string(m.period));
    }
    std::sort(o.verdicts.begin(), o.verdicts.end());
    const double dt = seconds_since(t0);
    if (dt >= 1) fail(o, "runtime " + std::to_string(dt) + " s");
    if (o.pass) o.detail = "(1,1,1/3) and (1,2,0)";
    return o;
}

Outcome criterion4(const Ctx& c) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    ChainModel m{fixtures::example1(), {}};
    m.labels["l"] = near1();
    const Decomposition dec = decompose(m.family.kraus(), spectral(c));
    const EvidenceApprox a = solve_atomic(m, dec, m.labels.at("l"));
    const auto odd = SemilinearSet::progression(1, 2), odd5 = SemilinearSet::progression(5, 2);
    if (a.over != odd) fail(o, "Omega+(l) = " + a.over.str());
    if (a.under != odd5) fail(o, "Omega-(l) = " + a.under.str());
    o.verdicts.push_back("over(l)=" + a.over.str());
    o.verdicts.push_back("under(l)=" + a.under.str());

    const Formula g = parse_formula("G (l -> X l)", m.labels);
    const EvidenceApprox x = check_all(m, dec, g);
    const auto even = SemilinearSet::progression(2, 2);
    if (x.over != even || x.under != even)
        fail(o, "G(l -> X l): Omega+ = " + x.over.str() + ", Omega- = " + x.under.str() + " (expected 2 + 2N)");
    o.verdicts.push_back("G(l->Xl)=" + x.over.str() + "|" + x.under.str());
    const double dt = seconds_since(t0);
    if (dt >= 1) fail(o, "runtime " + std::to_string(dt) + " s");
    if (o.pass) o.detail = "Omega+ = 1+2N, Omega- = 5+2N";
    return o;
}

Outcome criterion5(const Ctx&) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(55);
    std::uniform_int_distribution<long> sh(0, 9);
    auto bits = [](const SemilinearSet& s, long w) {
        std::vector<bool> b(w + 1);
        for (long n = 1; n <= w; ++n) b[n] = s.contains(n);
        return b;
    };
    for (int t = 0; t < 1000; ++t) {
        const auto a = oracle::random_semilinear(rng, 12), b = oracle::random_semilinear(rng, 12);
        // past max threshold + lcm period every set repeats, so two periods certify equality
        const long k = std::lcm(a.modulus(), b.modulus());
        const long w = std::max(a.threshold(), b.threshold()) + 2 * k + 10;
        const long by = sh(rng);
        const auto ba = bits(a, w + by), bb = bits(b, w);
        const auto u = bits(unite(a, b), w), i = bits(intersect(a, b), w), c = bits(complement(a), w),
                   s = bits(shift_down(a, by), w);
        for (long n = 1; n <= w; ++n)
            if (u[n] != (ba[n] || bb[n]) || i[n] != (ba[n] && bb[n]) || c[n] == ba[n] || s[n] != ba[n + by]) {
                fail(o, "pair " + std::to_string(t) + " differs at n=" + std::to_string(n));
                break;
            }
    }
    const double dt = seconds_since(t0);
    if (dt >= 30) fail(o, "runtime " + std::to_string(dt) + " s");
    if (o.pass) o.detail = "1000 pairs";
    return o;
}

Outcome criterion6(const Ctx& c) {
    Outcome o;
    const Suite suite = formula_suite();
    long checked = 0, definite = 0, violations = 0;
    for (const auto& fam : family_names())
        for (int t = 1; t <= 3; ++t) {
            const ChainModel m{build_family(fam, t), suite.labels};
            const Decomposition dec = decompose(m.family.kraus(), spectral(c));
            Checker chk(m, dec);
            BoundedEvaluator ev(m, 120);
            for (const auto& f : suite.formulas) {
                const EvidenceApprox x = chk.check(f.formula);
                o.verdicts.push_back(m.family.name() + "/" + f.name + "=" + decide(x, 1));
                if (!x.consistent()) fail(o, m.family.name() + " " + f.name + ": Omega- not inside Omega+");
                for (long n = 1; n <= 60; ++n) {
                    const Tri truth = ev.eval(f.formula, n);
                    ++checked;
                    if (truth == Tri::Unknown) continue;
                    ++definite;
                    const bool bad = (truth == Tri::False && x.under.contains(n)) ||
                                     (truth == Tri::True && !x.over.contains(n));
                    if (bad) {
                        ++violations;
                        fail(o, m.family.name() + " " + f.name + " n=" + std::to_string(n));
                    }
                }
            }
        }
    if (o.pass)
        o.detail = std::to_string(definite) + " definite of " + std::to_string(checked) + " (instance, n) pairs, " +
                   std::to_string(violations) + " violations";
    return o;
}

// Reference verdicts for phi1 phi2 phi2p phi3 phi4 phi5 phi6.
const std::map<std::string, std::string> kTable16 = {
    {"aklt", "TTFFFFT"},     {"cluster", "TTTFTFF"},       {"near_critical", "TFFUFTT"},
    {"periodic", "TTFFFFT"}, {"random_gapped", "TTFTFFT"},
};
const std::map<std::string, std::string> kTable32 = kTable16;

std::string run_table(const Ctx& c, int t, const std::map<std::string, std::string>& ref, Outcome& o,
                      bool strict) {
    const Suite suite = formula_suite();
    std::ostringstream table;
    for (const auto& fam : family_names()) {
        const ChainModel m{build_family(fam, t), suite.labels};
        const Decomposition dec = decompose(m.family.kraus(), spectral(c));
        Checker chk(m, dec);
        const std::string& want = ref.at(fam);
        std::string got;
        for (std::size_t i = 0; i < suite.formulas.size(); ++i) {
            const char v = decide(chk.check(suite.formulas[i].formula), 1);
            got += v;
            o.verdicts.push_back(m.family.name() + "/" + suite.formulas[i].name + "=" + v);
            const char w = want[i];
            const bool exact = strict && fam != "near_critical";
            const bool ok = exact ? v == w : (v == w || v == 'U' || w == 'U');
            if (!ok) fail(o, m.family.name() + " " + suite.formulas[i].name + ": " + v + " (ref " + w + ")");
        }
        table << "    " << m.family.name() << " " << got << " (ref " << want << ")\n";
    }
    return table.str();
}

Outcome criterion7(const Ctx& c) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::string table = run_table(c, 4, kTable16, o, true);
    const double dt = seconds_since(t0);
    if (dt >= 600) fail(o, "runtime " + std::to_string(dt) + " s");
    if (c.d32) {
        Outcome soft;
        table += "  D=32 soft check:\n" + run_table(c, 5, kTable32, soft, false);
        table += soft.pass ? "    no contradictions\n" : "    " + soft.detail + "\n";
    }
    std::printf("  D=16 verdicts phi1 phi2 phi2p phi3 phi4 phi5 phi6 (%.1f s):\n%s", dt, table.c_str());
    if (o.pass) o.detail = "all cells agree";
    return o;
}

// Irreducible CP map of period p: cyclic shift times diagonal Kraus weights.
KrausSet cyclic_channel(int D, int d, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMatrix shift = CMatrix::Zero(D, D);
    for (int i = 0; i < D; ++i) shift((i + 1) % D, i) = 1;
    std::vector<CMatrix> ks(d, CMatrix::Zero(D, D));
    for (int i = 0; i < D; ++i) {
        std::vector<cplx> w(d);
        double nrm = 0;
        for (auto& x : w) {
            x = cplx(g(rng), g(rng));
            nrm += std::norm(x);
        }
        for (int k = 0; k < d; ++k) ks[k](i, i) = w[k] / std::sqrt(nrm);
    }
    const CMatrix u = oracle::random_unitary(D, rng);
    for (auto& k : ks) k = u * shift * k * u.adjoint();
    return KrausSet(std::move(ks));
}

Outcome criterion8(const Ctx& c) {
    Outcome o;
    std::mt19937_64 rng(88);
    int cyclic = 0, components = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const int D = 1 + inst % 4, d = 2 + inst % 2;
        const bool cyc = inst % 2 == 1 && D > 1;
        const KrausSet k = cyc ? cyclic_channel(D, d, rng) : oracle::random_cptp(d, D, rng);
        cyclic += cyc;
        const Decomposition dec = decompose(k, spectral(c));
        for (const auto& m : dec.components) {
            ++components;
            const std::string tag = "instance " + std::to_string(inst);
            if (m.period < 1 || m.period > m.dim() * m.dim()) fail(o, tag + ": period " + std::to_string(m.period));
            if (cyc && m.period != D) fail(o, tag + ": cyclic period " + std::to_string(m.period));
            // independent dense spectrum of the component
            Eigen::ComplexEigenSolver<CMatrix> es(liouville_matrix(m.kraus), false);
            const auto& ev = es.eigenvalues();
            double r = 0;
            for (const auto& e : ev) r = std::max(r, std::abs(e));
            std::vector<cplx> per;
            for (const auto& e : ev)
                if (std::abs(std::abs(e) - r) <= 1e-7) per.push_back(e);
            if (std::abs(r - m.radius) > 1e-7) fail(o, tag + ": radius");
            if (static_cast<int>(per.size()) != m.period) {
                fail(o, tag + ": " + std::to_string(per.size()) + " peripheral values, period " +
                            std::to_string(m.period));
                continue;
            }
            for (int j = 0; j < m.period; ++j) {
                const cplx target = r * std::polar(1.0, 2 * std::numbers::pi * j / m.period);
                double best = INFINITY;
                for (const auto& e : per) best = std::min(best, std::abs(e - target));
                if (best > 1e-7) fail(o, tag + ": missing root of unity " + std::to_string(j));
            }
            for (const auto& pp : m.peripheral) {
                double best = INFINITY;
                for (const auto& e : per) best = std::min(best, std::abs(e - pp.value));
                if (best > 1e-7) fail(o, tag + ": reported peripheral value off spectrum");
            }
            o.verdicts.push_back(tag + " p=" + std::to_string(m.period));
        }
    }
    if (o.pass)
        o.detail = std::to_string(components) + " components, " + std::to_string(cyclic) + " cyclic instances";
    return o;
}

using CriterionFn = std::function<Outcome(const Ctx&)>;
const std::vector<CriterionFn> kCriteria = {criterion1, criterion2, criterion3, criterion4,
                                            criterion5, criterion6, criterion7, criterion8};

// T/F verdicts must agree across seeds; a U on either side is tolerated.
bool verdicts_agree(const std::vector<std::string>& a, const std::vector<std::string>& b, std::string& why) {
    if (a.size() != b.size()) {
        why = "different instance lists";
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) continue;
        const auto eq = a[i].rfind('='), eqb = b[i].rfind('=');
        const std::string va = a[i].substr(eq + 1), vb = b[i].substr(eqb + 1);
        if (a[i].substr(0, eq) == b[i].substr(0, eqb) && (va == "U" || vb == "U")) continue;
        why = a[i] + " vs " + b[i];
        return false;
    }
    return true;
}

Outcome criterion9(const Ctx& c) {
    Outcome o;
    const std::uint64_t seeds[] = {c.seed, c.seed + 1000, c.seed + 77777};
    std::vector<std::vector<Outcome>> runs;
    for (std::uint64_t s : seeds) {
        Ctx cs = c;
        cs.seed = s;
        cs.d32 = false;
        std::vector<Outcome> r;
        for (std::size_t i = 0; i < kCriteria.size(); ++i) {
            if (i == 6) std::printf("  seed %llu:\n", static_cast<unsigned long long>(s));
            r.push_back(kCriteria[i](cs));
        }
        runs.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < kCriteria.size(); ++i)
        for (std::size_t k = 1; k < runs.size(); ++k) {
            const std::string tag = "criterion " + std::to_string(i + 1) + " seed " + std::to_string(seeds[k]);
            if (runs[k][i].pass != runs[0][i].pass) fail(o, tag + ": outcome changed");
            std::string why;
            if (!verdicts_agree(runs[0][i].verdicts, runs[k][i].verdicts, why)) fail(o, tag + ": " + why);
        }
    if (o.pass) o.detail = "criteria 1-8 identical under 3 seeds";
    return o;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::vector<int> which;
    Ctx ctx;
    app.add_option("--criterion", which, "criteria to run (default all)")->check(CLI::Range(1, 9));
    app.add_option("--seed", ctx.seed, "spectral seed");
    app.add_flag("--d32", ctx.d32, "add the D=32 soft check to criterion 7");
    CLI11_PARSE(app, argc, argv);
    if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8, 9};

    bool all = true;
    for (int c : which) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c == 9 ? criterion9(ctx) : kCriteria[c - 1](ctx);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %d: %s  %s  [%.2f s]\n", c, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
