#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <thread>

#include "lcl/bench.hpp"

using namespace lcl;

namespace {

enum Exit { kTrue = 0, kFalse = 1, kUnknown = 2, kError = 3, kTimeout = 4 };

int exit_for(char v) { return v == 'T' ? kTrue : v == 'F' ? kFalse : kUnknown; }

struct Common {
    double timeout = 3600;
    std::uint64_t seed = 1;
    int jobs = 1;
    bool json = false;
    std::string report;
};

SpectralOptions spectral_options(const Common& c) {
    SpectralOptions so;
    so.seed = c.seed;
    so.eig.seed = c.seed + 6;
    return so;
}

// MODEL is a JSON file or FAMILY:t for a built-in family
MPSFamily resolve_model(const std::string& arg) {
    const auto colon = arg.rfind(':');
    if (colon != std::string::npos && !std::filesystem::exists(arg)) {
        const std::string fam = arg.substr(0, colon);
        return build_family(fam, std::stoi(arg.substr(colon + 1)));
    }
    return load_physical(arg);
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << body;
}

int cmd_check(const std::string& model_path, const std::string& spec_path, long start, const Common& c) {
    const MPSFamily fam = resolve_model(model_path);
    const Spec spec = load_spec(spec_path);
    set_deadline(c.timeout);
    CheckOptions co;
    co.jobs = c.jobs;
    const Decomposition dec = decompose(fam.kraus(), spectral_options(c));
    const Verdict v = verdict(ChainModel{fam, spec.labels}, dec, spec.formula, start, co);
    clear_deadline();

    nlohmann::json j = v.to_json();
    j["model"] = fam.name();
    if (!c.report.empty()) write_text(c.report, j.dump(2) + "\n");
    if (c.json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "verdict " << v.value << "\n";
        std::cout << "formula " << v.formula << "\n";
        std::cout << "omega+  " << v.sets.over.str() << "\n";
        std::cout << "omega-  " << v.sets.under.str() << "\n";
        if (v.value == 'F') std::cout << "refuted at N = " << start << "\n";
    }
    return exit_for(v.value);
}

int cmd_spectrum(const std::string& model_path, const Common& c) {
    const MPSFamily fam = resolve_model(model_path);
    set_deadline(c.timeout);
    const Decomposition dec = decompose(fam.kraus(), spectral_options(c));
    clear_deadline();
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& m : dec.components)
        comps.push_back({{"dim", m.dim()},
                         {"radius", m.radius},
                         {"period", m.period},
                         {"second_radius", m.second_radius},
                         {"degenerate", m.degenerate}});
    const nlohmann::json j = {
        {"model", fam.name()}, {"D", fam.D()}, {"d", fam.d()}, {"kappa", dec.kappa}, {"components", comps},
        {"notes", dec.notes}};
    if (!c.report.empty()) write_text(c.report, j.dump(2) + "\n");
    if (c.json) {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::printf("%s  d=%d D=%d kappa=%ld\n", fam.name().c_str(), fam.d(), fam.D(), dec.kappa);
    std::printf("%4s %6s %14s %4s %14s\n", "m", "D_m", "r", "p", "s");
    for (std::size_t i = 0; i < dec.components.size(); ++i) {
        const auto& m = dec.components[i];
        std::printf("%4zu %6d %14.10f %4d %14.10f%s\n", i, m.dim(), m.radius, m.period, m.second_radius,
                    m.degenerate ? "  (degenerate)" : "");
    }
    for (const auto& n : dec.notes) std::printf("note: %s\n", n.c_str());
    return 0;
}

int cmd_oracle(const std::string& model_path, const std::string& spec_path, long n, long horizon, const Common& c) {
    const MPSFamily fam = resolve_model(model_path);
    const Spec spec = load_spec(spec_path);
    const Tri t = eval_bounded(ChainModel{fam, spec.labels}, spec.formula, n, horizon);
    if (c.json)
        std::cout << nlohmann::json{{"formula", render(spec.formula)}, {"n", n}, {"horizon", horizon},
                                    {"value", tri_str(t)}}
                         .dump(2)
                  << "\n";
    else
        std::cout << tri_str(t) << "\n";
    return t == Tri::True ? kTrue : t == Tri::False ? kFalse : kUnknown;
}

struct BenchArgs {
    std::vector<std::string> families{"all"};
    std::vector<int> ts{4};
    std::vector<std::string> formulas{"all"};
};

int cmd_bench(const BenchArgs& a, const Common& c) {
    const Suite suite = formula_suite();
    std::vector<std::string> fams = a.families, fnames = a.formulas;
    if (fams == std::vector<std::string>{"all"}) fams = family_names();
    if (fnames == std::vector<std::string>{"all"}) {
        fnames.clear();
        for (const auto& f : suite.formulas) fnames.push_back(f.name);
    }
    for (const auto& f : fnames) suite.get(f); // validate before running

    struct Task {
        std::string family;
        int t;
        std::string formula;
    };
    std::vector<Task> tasks;
    for (const auto& fam : fams)
        for (int t : a.ts)
            for (const auto& f : fnames) tasks.push_back({fam, t, f});

    BenchOptions o;
    o.timeout_s = c.timeout;
    o.seed = c.seed;
    std::vector<BenchRow> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < tasks.size();) {
            const Task& k = tasks[i];
            try {
                rows[i] = run_row(build_family(k.family, k.t), suite, suite.get(k.formula), o);
            } catch (const std::exception& e) {
                rows[i] = BenchRow{k.family + "_D" + std::to_string(1 << k.t), k.formula, 1 << k.t, "ERR", 0, {},
                                   e.what()};
            }
            if (!c.json) std::fprintf(stderr, "%-22s %-6s %s\n", rows[i].model.c_str(), k.formula.c_str(),
                                      rows[i].cell().c_str());
        }
    };
    const int jobs = std::max(1, std::min<int>(c.jobs, static_cast<int>(tasks.size())));
    std::vector<std::future<void>> pool;
    for (int w = 1; w < jobs; ++w) pool.push_back(std::async(std::launch::async, worker));
    worker();
    for (auto& f : pool) f.get();

    nlohmann::json jr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json e = {{"model", r.model},     {"formula", r.formula},     {"D", r.D},
                            {"verdict", r.verdict}, {"runtime_s", r.runtime_s}, {"peak_mb", nullptr}};
        if (r.peak_mb) e["peak_mb"] = *r.peak_mb;
        if (!r.error.empty()) e["error"] = r.error;
        jr.push_back(e);
    }
    const nlohmann::json report = {
        {"format_version", 1}, {"timeout_s", c.timeout}, {"seed", c.seed}, {"rows", jr}};

    // CSV: one line per (model, D), one column per formula, cells "V / runtime / peak"
    std::string csv = "model,D";
    for (const auto& f : fnames) csv += "," + f;
    csv += "\n";
    for (std::size_t i = 0; i < rows.size(); i += fnames.size()) {
        csv += rows[i].model + "," + std::to_string(rows[i].D);
        for (std::size_t k = 0; k < fnames.size(); ++k) csv += "," + rows[i + k].cell();
        csv += "\n";
    }

    if (!c.report.empty()) {
        std::filesystem::path p(c.report);
        write_text(p.replace_extension(".json").string(), report.dump(2) + "\n");
        write_text(p.replace_extension(".csv").string(), csv);
    }
    if (c.json) std::cout << report.dump(2) << "\n";
    else std::cout << csv;
    for (const auto& r : rows)
        if (r.verdict == "ERR") return kError;
    return 0;
}

void add_common(CLI::App* app, Common& c, bool jobs = true) {
    app->add_option("--timeout", c.timeout, "abort after SECONDS (verdict TO)")->check(CLI::PositiveNumber);
    app->add_option("--seed", c.seed, "random seed for the spectral search");
    if (jobs) app->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    app->add_flag("--json", c.json, "machine-readable output on stdout");
    app->add_option("--report", c.report, "also write the report to PATH");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LCL model checker for periodic matrix product state families"};
    app.require_subcommand(1);
    Common common;

    std::string model, spec;
    long start = 1, n = 1, horizon = 120;
    auto* check = app.add_subcommand("check", "decide a formula on a model");
    check->add_option("model", model, "model JSON file or FAMILY:t")->required();
    check->add_option("spec", spec, "spec JSON file (labels + formula)")->required();
    check->add_option("--start", start, "chain size the verdict refers to")->check(CLI::PositiveNumber);
    add_common(check, common);

    auto* spectrum = app.add_subcommand("spectrum", "irreducible components and peripheral data");
    spectrum->add_option("model", model, "model JSON file or FAMILY:t")->required();
    add_common(spectrum, common, false);

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "run the family x formula grid");
    bench->add_option("--family", ba.families, "family name or all")->expected(1, -1);
    bench->add_option("--t", ba.ts, "lift exponents (D = 2^t)")->expected(1, -1)->check(CLI::Range(1, 7));
    bench->add_option("--formula", ba.formulas, "suite formula name or all")->expected(1, -1);
    add_common(bench, common);

    auto* oracle = app.add_subcommand("oracle", "bounded brute-force evaluation");
    oracle->add_option("model", model, "model JSON file or FAMILY:t")->required();
    oracle->add_option("spec", spec, "spec JSON file")->required();
    oracle->add_option("--n", n, "chain size")->check(CLI::PositiveNumber);
    oracle->add_option("--horizon", horizon, "largest size evaluated")->check(CLI::PositiveNumber);
    add_common(oracle, common, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kError;
    }

    try {
        if (*check) return cmd_check(model, spec, start, common);
        if (*spectrum) return cmd_spectrum(model, common);
        if (*bench) return cmd_bench(ba, common);
        if (*oracle) return cmd_oracle(model, spec, n, horizon, common);
    } catch (const TimeoutError&) {
        std::cout << "TO\n";
        return kTimeout;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
