#include <gtest/gtest.h>

#include <random>

#include "lcl/fixtures.hpp"
#include "lcl/logic.hpp"
#include "oracles.hpp"

using namespace lcl;

namespace {

LabelTable table(std::initializer_list<std::string> names) {
    LabelTable t;
    for (const auto& n : names) t[n] = Label{n, ValueExpr::linear(val_offset(0)), IntervalPredicate::open(0, INFINITY)};
    return t;
}

ChainModel example1_model() {
    ChainModel m{fixtures::example1(), {}};
    m.labels["pos"] = {"pos", ValueExpr::linear(val_offset(0)), IntervalPredicate::open(0, INFINITY)};
    m.labels["near1"] = {"near1", ValueExpr::linear(val_offset(0)), IntervalPredicate::open(0.95, 1.05)};
    return m;
}

const char* kSuite[] = {"G nz",
                        "G bd",
                        "X^4 G (bd & clust)",
                        "E G (rat & X rat)",
                        "G (clust & !osc)",
                        "G !per2",
                        "E G (lro & !clust)"};

} // namespace

TEST(Logic, ParseSimple) {
    const auto t = table({"nz"});
    EXPECT_TRUE(same(parse_formula("G nz", t), f_globally(f_label("nz"))));
    EXPECT_TRUE(same(parse_formula("true", t), f_true()));
}

TEST(Logic, ParseNextPower) {
    const auto t = table({"bd", "clust"});
    const auto f = parse_formula("X^4 G (bd & clust)", t);
    const auto want = f_next(f_next(f_next(f_next(f_globally(f_and(f_label("bd"), f_label("clust")))))));
    EXPECT_TRUE(same(f, want));
}

TEST(Logic, ParseEventuallyGlobally) {
    const auto t = table({"rat"});
    const auto want = f_eventually(f_globally(f_and(f_label("rat"), f_next(f_label("rat")))));
    EXPECT_TRUE(same(parse_formula("E G(rat & X rat)", t), want));
}

TEST(Logic, ParsePrecedence) {
    const auto t = table({"a", "b", "c"});
    // & binds tighter than |
    EXPECT_TRUE(same(parse_formula("a | b & c", t), f_or(f_label("a"), f_and(f_label("b"), f_label("c")))));
    // unary binds tighter than &
    EXPECT_TRUE(same(parse_formula("!a & b", t), f_and(f_not(f_label("a")), f_label("b"))));
    EXPECT_TRUE(same(parse_formula("G a & b", t), f_and(f_globally(f_label("a")), f_label("b"))));
    EXPECT_TRUE(same(parse_formula("a -> b", t), f_implies(f_label("a"), f_label("b"))));
    EXPECT_TRUE(same(parse_formula("!X E a", t), f_not(f_next(f_eventually(f_label("a"))))));
}

TEST(Logic, ParseErrors) {
    const auto t = table({"a"});
    EXPECT_THROW(parse_formula("G", t), ParseError);
    EXPECT_THROW(parse_formula("a &", t), ParseError);
    EXPECT_THROW(parse_formula("(a", t), ParseError);
    EXPECT_THROW(parse_formula("a a", t), ParseError);
    EXPECT_THROW(parse_formula("X^ a", t), ParseError);
    try {
        parse_formula("G (a & zz)", t);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.pos, 7u);
    }
}

TEST(Logic, RenderRoundTrip) {
    const auto t = table({"nz", "bd", "clust", "rat", "osc", "per2", "lro", "a", "b"});
    std::vector<std::string> texts(std::begin(kSuite), std::end(kSuite));
    texts.push_back("a -> b | !a");
    texts.push_back("X^3 (a | E b)");
    for (const auto& s : texts) {
        const auto f = parse_formula(s, t);
        EXPECT_TRUE(same(parse_formula(render(f), t), f)) << s << " -> " << render(f);
    }
}

TEST(Logic, ExpressionParser) {
    const auto e = parse_expr("val(N) - val(1)");
    ASSERT_EQ(e.kind, ValueExpr::LINEAR);
    EXPECT_EQ(e.a, val_offset(0) + val_fixed(1, -1));

    const auto r = parse_expr("val(N+1) / val(N)");
    ASSERT_EQ(r.kind, ValueExpr::RATIO);
    EXPECT_EQ(r.a, val_offset(1));
    EXPECT_EQ(r.b, val_offset(0));

    const auto p = parse_expr("(val(N) - val(1)) * (val(N+1) - val(1))");
    ASSERT_EQ(p.kind, ValueExpr::PRODUCT);
    EXPECT_EQ(p.b, val_offset(1) + val_fixed(1, -1));

    const auto s = parse_expr("2*val(N) + 0.5 - val(N+2)*3");
    ASSERT_EQ(s.kind, ValueExpr::LINEAR);
    EXPECT_DOUBLE_EQ(s.a.c0, 0.5);
    EXPECT_EQ(s.a.max_offset(), 2);

    EXPECT_THROW(parse_expr("val(N+17)"), ParseError);
    EXPECT_THROW(parse_expr("val(N) * val(N) + 1"), ParseError);
    EXPECT_THROW(parse_expr("val(N) / val(N) / val(N)"), ParseError);
    EXPECT_THROW(parse_expr("val(0)"), ParseError);
    EXPECT_THROW(parse_expr("val(N) / 0"), Error);
}

TEST(Logic, IntervalParser) {
    auto p = parse_interval("(0, inf)");
    EXPECT_EQ(p.lo, 0);
    EXPECT_TRUE(std::isinf(p.hi));
    EXPECT_FALSE(p.contains(0));
    EXPECT_TRUE(p.contains(1e-300));
    p = parse_interval("[-1e-9, 1e-9]");
    EXPECT_TRUE(p.contains(1e-9));
    EXPECT_FALSE(p.contains(2e-9));
    EXPECT_NO_THROW(parse_interval("[2, 2]"));
    EXPECT_THROW(parse_interval("(2, 2]"), FormatError);
    EXPECT_THROW(parse_interval("(3, 2)"), FormatError);
    EXPECT_THROW(parse_interval("0, 1"), FormatError);
}

TEST(Logic, EvalExprExample1) {
    const auto m = example1_model();
    EXPECT_NEAR(eval_expr(m, ValueExpr::linear(val_offset(0)), 2), 10.0 / 3, 1e-12);
    EXPECT_NEAR(eval_expr(m, parse_expr("val(N) - val(1)"), 2), 10.0 / 3, 1e-12);
    EXPECT_THROW(eval_expr(m, parse_expr("val(N+1) / val(N)"), 1), DivisionError);
    EXPECT_NEAR(eval_expr(m, parse_expr("val(N+1) / val(N)"), 2), (8.0 / 9) / (10.0 / 3), 1e-12);
    EXPECT_THROW(eval_expr(m, ValueExpr::linear(val_offset(0)), 0), ShapeError);
}

TEST(Logic, EvalExprIdentityRatio) {
    const ChainModel m{fixtures::identity_family(1), {}};
    for (long n : {1L, 2L, 7L, 300L}) EXPECT_DOUBLE_EQ(eval_expr(m, parse_expr("val(N+1) / val(N)"), n), 1.0);
}

TEST(Logic, HoldsLabelExample1) {
    const auto m = example1_model();
    EXPECT_FALSE(holds_label(m, m.labels.at("pos"), 1));
    EXPECT_TRUE(holds_label(m, m.labels.at("pos"), 2));
    EXPECT_TRUE(holds_label(m, m.labels.at("near1"), 5));
    EXPECT_FALSE(holds_label(m, m.labels.at("near1"), 4));
    EXPECT_EQ(holds_label3(m, m.labels.at("pos"), 1), Tri::False);
    EXPECT_EQ(holds_label3(m, m.labels.at("near1"), 5), Tri::True);
}

TEST(Logic, HoldsLabelThreeValuedBoundary) {
    // value 10/3 computed with rounding; an endpoint at the same float is undecided
    const auto m = example1_model();
    const double v = eval_expr(m, ValueExpr::linear(val_offset(0)), 2);
    const Label at{"at", ValueExpr::linear(val_offset(0)), IntervalPredicate::open(v, INFINITY)};
    EXPECT_EQ(holds_label3(m, at, 2), Tri::Unknown);
    EXPECT_FALSE(holds_label(m, at, 2));
}

TEST(Logic, HoldsLabelMatchesBruteForce) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.5, 2.0);
    for (int inst = 0; inst < 12; ++inst) {
        const int d = 1 + inst % 3, D = 1 + inst % 4;
        ChainModel m{MPSFamily(oracle::random_kraus(d, D, rng, 0.6)), {}};
        const double a = u(rng), b = a + std::abs(u(rng));
        const Label l{"l", parse_expr("val(N) - 0.5*val(1)"), IntervalPredicate::open(a, b)};
        const double v1 = brute_force_norm_sq(m.family, 1);
        for (int n = 1; n <= 8; ++n) {
            if (std::pow(d, n) > 1e5) break;
            const double direct = brute_force_norm_sq(m.family, n) - 0.5 * v1;
            if (std::abs(direct - a) < 1e-9 || std::abs(direct - b) < 1e-9) {
                continue;
            }
            EXPECT_EQ(holds_label(m, l, n), direct > a && direct < b) << inst << " n=" << n;
        }
    }
}

TEST(Logic, EvalBoundedExample1) {
    const auto m = example1_model();
    const auto pos = f_label("pos");
    EXPECT_EQ(eval_bounded(m, f_globally(pos), 1, 8), Tri::False);
    EXPECT_EQ(eval_bounded(m, f_eventually(pos), 1, 8), Tri::True);
    EXPECT_EQ(eval_bounded(m, f_true(), 5, 8), Tri::True);
    EXPECT_EQ(eval_bounded(m, f_globally(pos), 2, 8), Tri::Unknown);
    EXPECT_EQ(eval_bounded(m, f_next(pos), 8, 8), Tri::Unknown);
    EXPECT_THROW(eval_bounded(m, pos, 9, 8), Error);
}

TEST(Logic, EvalBoundedMonotoneInHorizon) {
    auto m = example1_model();
    m.labels["odd"] = {"odd", parse_expr("val(N) - 2"), IntervalPredicate::open(-INFINITY, 0)};
    const auto t = m.labels;
    const char* fs[] = {"G pos", "E near1", "E G odd", "G E odd", "X^3 (near1 | !pos)", "G (pos -> E near1)",
                        "E (odd & X !odd)"};
    for (const char* s : fs) {
        const auto f = parse_formula(s, t);
        for (long n = 1; n <= 6; ++n) {
            Tri prev = eval_bounded(m, f, n, n);
            for (long h = n + 1; h <= 30; ++h) {
                const Tri cur = eval_bounded(m, f, n, h);
                if (prev != Tri::Unknown) {
                    EXPECT_EQ(cur, prev) << s << " n=" << n << " h=" << h;
                }
                prev = cur;
            }
        }
    }
}

TEST(Logic, SpecFromJson) {
    const auto j = nlohmann::json::parse(R"J({
        "labels": {"nz": {"expr": "val(N)", "in": "(0, inf)"},
                   "clust": {"expr": "val(N) - val(1)", "abs_lt": 0.01},
                   "lro": {"expr": "val(N) - val(1)", "abs_gt": 0.01}},
        "formula": "G (nz & !clust) -> lro"})J");
    const Spec s = spec_from_json(j);
    EXPECT_EQ(s.labels.size(), 3u);
    EXPECT_EQ(s.labels.at("clust").interval.lo, -0.01);
    EXPECT_EQ(s.labels.at("lro").expr.kind, ValueExpr::PRODUCT);
    EXPECT_NEAR(s.labels.at("lro").interval.lo, 1e-4, 1e-18);
    EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"J({"labels": {}, "formula": "G nz"})J")), ParseError);
    EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"J({"labels": {"a": {"expr": "val(N)"}}, "formula": "a"})J")),
                 FormatError);
}
