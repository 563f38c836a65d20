#pragma once

#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lcl/mps.hpp"

namespace lcl {

// ---------------------------------------------------------------- values

struct SizeRef {
    enum Kind { Fixed, Offset } kind = Offset;
    long value = 0; // Fixed: size j >= 1; Offset: o >= 0 in val(N + o)
    bool operator==(const SizeRef&) const = default;
};

struct Linear {
    double c0 = 0;
    std::vector<std::pair<double, SizeRef>> terms;

    bool is_constant() const { return terms.empty(); }
    long max_offset() const {
        long m = 0;
        for (const auto& [c, r] : terms)
            if (r.kind == SizeRef::Offset) m = std::max(m, r.value);
        return m;
    }
    Linear scaled(double s) const {
        Linear out{c0 * s, terms};
        for (auto& t : out.terms) t.first *= s;
        return out;
    }
    friend Linear operator+(Linear a, const Linear& b) {
        a.c0 += b.c0;
        for (const auto& t : b.terms) {
            bool merged = false;
            for (auto& u : a.terms)
                if (u.second == t.second) {
                    u.first += t.first;
                    merged = true;
                }
            if (!merged) a.terms.push_back(t);
        }
        return a;
    }
    bool operator==(const Linear&) const = default;
};

inline Linear val_offset(long o, double coef = 1) { return {0, {{coef, {SizeRef::Offset, o}}}}; }
inline Linear val_fixed(long j, double coef = 1) { return {0, {{coef, {SizeRef::Fixed, j}}}}; }
inline Linear constant(double c) { return {c, {}}; }

struct ValueExpr {
    enum Kind { LINEAR, RATIO, PRODUCT } kind = LINEAR;
    Linear a, b; // RATIO: a / b; PRODUCT: a * b

    static ValueExpr linear(Linear l) { return {LINEAR, std::move(l), {}}; }
    static ValueExpr ratio(Linear n, Linear d) {
        if (d.is_constant() && d.c0 == 0) throw Error("ratio denominator is the zero expression");
        return {RATIO, std::move(n), std::move(d)};
    }
    static ValueExpr product(Linear x, Linear y) { return {PRODUCT, std::move(x), std::move(y)}; }

    long max_offset() const { return std::max(a.max_offset(), b.max_offset()); }
    bool operator==(const ValueExpr&) const = default;
};

inline constexpr long kMaxOffset = 16;

struct IntervalPredicate {
    double lo = -INFINITY, hi = INFINITY;
    bool lo_open = true, hi_open = true;

    static IntervalPredicate open(double lo, double hi) { return {lo, hi, true, true}; }
    static IntervalPredicate closed(double lo, double hi) { return {lo, hi, false, false}; }

    void validate() const {
        if (!(lo <= hi)) throw Error("interval lower bound exceeds upper bound");
        if (lo == hi && (lo_open || hi_open)) throw Error("degenerate interval must be closed");
    }
    bool contains(double v) const {
        const bool above = lo_open ? v > lo : v >= lo;
        const bool below = hi_open ? v < hi : v <= hi;
        return above && below;
    }
    std::string str() const {
        auto num = [](double x) {
            if (std::isinf(x)) return std::string(x > 0 ? "inf" : "-inf");
            std::ostringstream os;
            os << x;
            return os.str();
        };
        return std::string(lo_open ? "(" : "[") + num(lo) + ", " + num(hi) + (hi_open ? ")" : "]");
    }
};

struct Label {
    std::string name;
    ValueExpr expr;
    IntervalPredicate interval;
};

using LabelTable = std::map<std::string, Label>;

struct ChainModel {
    MPSFamily family;
    LabelTable labels;
};

enum class Tri { False, True, Unknown };

inline Tri tri_not(Tri t) { return t == Tri::True ? Tri::False : t == Tri::False ? Tri::True : Tri::Unknown; }
inline Tri tri_and(Tri a, Tri b) {
    if (a == Tri::False || b == Tri::False) return Tri::False;
    if (a == Tri::True && b == Tri::True) return Tri::True;
    return Tri::Unknown;
}
inline const char* tri_str(Tri t) { return t == Tri::True ? "true" : t == Tri::False ? "false" : "unknown"; }

inline constexpr double kDivTol = 1e-12;

inline double size_value(const MPSFamily& f, const SizeRef& r, long n) {
    const long at = r.kind == SizeRef::Fixed ? r.value : n + r.value;
    if (at < 1) throw ShapeError("size reference below 1");
    return norm_sq(f, at);
}

inline Estimate size_estimate(const MPSFamily& f, const SizeRef& r, long n) {
    const long at = r.kind == SizeRef::Fixed ? r.value : n + r.value;
    if (at < 1) throw ShapeError("size reference below 1");
    return norm_sq_estimate(f, at);
}

inline Estimate snap(Estimate e) {
    if (std::abs(e.value) <= e.err) return {0, 0};
    return e;
}

inline Estimate eval_linear_est(const MPSFamily& f, const Linear& l, long n) {
    Estimate out{l.c0, 0};
    double mag = std::abs(l.c0);
    for (const auto& [c, r] : l.terms) {
        const Estimate v = size_estimate(f, r, n);
        out.value += c * v.value;
        out.err += std::abs(c) * v.err;
        mag += std::abs(c * v.value);
    }
    out.err += 4 * detail::unit_roundoff * mag;
    return snap(out);
}

// Value with rounding estimate; exact zeros survive as exact zeros.
inline Estimate eval_expr_est(const ChainModel& m, const ValueExpr& e, long n) {
    if (n < 1) throw ShapeError("eval_expr: n must be >= 1");
    const Estimate a = eval_linear_est(m.family, e.a, n);
    if (e.kind == ValueExpr::LINEAR) return a;
    const Estimate b = eval_linear_est(m.family, e.b, n);
    if (e.kind == ValueExpr::PRODUCT)
        return snap({a.value * b.value, std::abs(a.value) * b.err + std::abs(b.value) * a.err + a.err * b.err});
    if (std::abs(b.value) <= kDivTol || std::abs(b.value) <= b.err) throw DivisionError("ratio denominator near zero");
    const double q = a.value / b.value;
    return snap({q, (a.err + std::abs(q) * b.err) / (std::abs(b.value) - b.err)});
}

inline double eval_expr(const ChainModel& m, const ValueExpr& e, long n) { return eval_expr_est(m, e, n).value; }

// Oracle mode: exact comparison of the (snapped) value.
inline bool holds_label(const ChainModel& m, const Label& l, long n) {
    return l.interval.contains(eval_expr(m, l.expr, n));
}

// Checker mode: decided only if the whole rounding interval is on one side.
inline Tri holds_label3(const ChainModel& m, const Label& l, long n) {
    Estimate v;
    try {
        v = eval_expr_est(m, l.expr, n);
    } catch (const DivisionError&) {
        return Tri::Unknown;
    }
    const auto& I = l.interval;
    if (v.err == 0) return I.contains(v.value) ? Tri::True : Tri::False;
    const double lo = v.value - v.err, hi = v.value + v.err;
    if (I.contains(lo) && I.contains(hi)) return Tri::True;
    const bool below = I.lo_open ? hi <= I.lo : hi < I.lo;
    const bool above = I.hi_open ? lo >= I.hi : lo > I.hi;
    return below || above ? Tri::False : Tri::Unknown;
}

// ---------------------------------------------------------------- formulas

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

struct FormulaNode {
    enum Kind { TRUE, LABEL, NOT, AND, NEXT, EVENTUALLY, GLOBALLY } kind;
    std::string label;
    Formula a, b;
};

inline Formula f_true() { return std::make_shared<FormulaNode>(FormulaNode{FormulaNode::TRUE, {}, {}, {}}); }
inline Formula f_label(std::string n) {
    return std::make_shared<FormulaNode>(FormulaNode{FormulaNode::LABEL, std::move(n), {}, {}});
}
inline Formula f_not(Formula a) { return std::make_shared<FormulaNode>(FormulaNode{FormulaNode::NOT, {}, a, {}}); }
inline Formula f_and(Formula a, Formula b) {
    return std::make_shared<FormulaNode>(FormulaNode{FormulaNode::AND, {}, a, b});
}
inline Formula f_next(Formula a, int k = 1) {
    for (int i = 0; i < k; ++i) a = std::make_shared<FormulaNode>(FormulaNode{FormulaNode::NEXT, {}, a, {}});
    return a;
}
inline Formula f_eventually(Formula a) {
    return std::make_shared<FormulaNode>(FormulaNode{FormulaNode::EVENTUALLY, {}, a, {}});
}
inline Formula f_globally(Formula a) {
    return std::make_shared<FormulaNode>(FormulaNode{FormulaNode::GLOBALLY, {}, a, {}});
}
inline Formula f_or(Formula a, Formula b) { return f_not(f_and(f_not(a), f_not(b))); }
inline Formula f_implies(Formula a, Formula b) { return f_not(f_and(a, f_not(b))); }

inline bool same(const Formula& x, const Formula& y) {
    if (!x || !y) return x == y;
    return x->kind == y->kind && x->label == y->label && same(x->a, y->a) && same(x->b, y->b);
}

inline std::string render(const Formula& f) {
    switch (f->kind) {
    case FormulaNode::TRUE: return "true";
    case FormulaNode::LABEL: return f->label;
    case FormulaNode::NOT: return "!" + render(f->a);
    case FormulaNode::AND: return "(" + render(f->a) + " & " + render(f->b) + ")";
    case FormulaNode::NEXT: return "X " + render(f->a);
    case FormulaNode::EVENTUALLY: return "E " + render(f->a);
    case FormulaNode::GLOBALLY: return "G " + render(f->a);
    }
    return {};
}

namespace detail {

class FormulaParser {
public:
    FormulaParser(const std::string& text, const LabelTable* labels) : s_(text), labels_(labels) {}

    Formula parse() {
        Formula f = parse_or();
        skip();
        if (i_ < s_.size()) throw ParseError("unexpected '" + std::string(1, s_[i_]) + "'", i_);
        return f;
    }

private:
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(const std::string& tok) {
        skip();
        if (s_.compare(i_, tok.size(), tok) == 0) {
            i_ += tok.size();
            return true;
        }
        return false;
    }
    std::string word() {
        skip();
        std::size_t j = i_;
        while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
        return s_.substr(i_, j - i_);
    }

    Formula parse_or() {
        Formula lhs = parse_and();
        for (;;) {
            if (eat("->")) return f_implies(lhs, parse_or());
            if (eat("|")) lhs = f_or(lhs, parse_and());
            else return lhs;
        }
    }
    Formula parse_and() {
        Formula lhs = parse_unary();
        while (eat("&")) lhs = f_and(lhs, parse_unary());
        return lhs;
    }
    Formula parse_unary() {
        skip();
        if (i_ >= s_.size()) throw ParseError("unexpected end of formula", i_);
        if (eat("!")) return f_not(parse_unary());
        if (eat("(")) {
            Formula f = parse_or();
            if (!eat(")")) throw ParseError("expected ')'", i_);
            return f;
        }
        const std::size_t at = i_;
        const std::string w = word();
        if (w.empty()) throw ParseError("unexpected '" + std::string(1, s_[i_]) + "'", i_);
        i_ += w.size();
        if (w == "true") return f_true();
        if (w == "X") {
            int k = 1;
            if (eat("^")) {
                skip();
                std::size_t j = i_;
                while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
                if (j == i_) throw ParseError("expected integer after '^'", i_);
                k = std::stoi(s_.substr(i_, j - i_));
                i_ = j;
            }
            return f_next(parse_unary(), k);
        }
        if (w == "E") return f_eventually(parse_unary());
        if (w == "G") return f_globally(parse_unary());
        if (labels_ && !labels_->count(w)) throw ParseError("unknown label '" + w + "'", at);
        return f_label(w);
    }

    const std::string& s_;
    const LabelTable* labels_;
    std::size_t i_ = 0;
};

// Expression grammar over val(N+o), val(j), reals, + - * /.
class ExprParser {
public:
    explicit ExprParser(const std::string& text) : s_(text) {}

    ValueExpr parse() {
        Part top = sum();
        skip();
        if (i_ < s_.size() && s_[i_] == '/') {
            ++i_;
            Part den = sum();
            if (top.product || den.product) throw ParseError("'/' operands must be linear", i_);
            top = {ValueExpr::ratio(top.lin(), den.lin()), true};
        }
        skip();
        if (i_ < s_.size()) throw ParseError("unexpected '" + std::string(1, s_[i_]) + "'", i_);
        if (top.e.max_offset() > kMaxOffset) throw ParseError("offset exceeds 16", 0);
        return top.e;
    }

private:
    struct Part {
        ValueExpr e;
        bool product = false;
        const Linear& lin() const { return e.a; }
    };

    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }

    Part sum() {
        Part acc = term();
        for (;;) {
            const bool plus = eat('+');
            if (!plus && !eat('-')) return acc;
            Part rhs = term();
            if (acc.product || rhs.product) throw ParseError("products must stand alone", i_);
            acc.e.a = acc.e.a + (plus ? rhs.lin() : rhs.lin().scaled(-1));
        }
    }
    Part term() {
        Part acc = factor();
        while (eat('*')) {
            Part rhs = factor();
            if (acc.product || rhs.product) throw ParseError("at most one product of linear terms", i_);
            if (acc.lin().is_constant()) acc.e.a = rhs.lin().scaled(acc.lin().c0);
            else if (rhs.lin().is_constant()) acc.e.a = acc.lin().scaled(rhs.lin().c0);
            else acc = {ValueExpr::product(acc.lin(), rhs.lin()), true};
        }
        return acc;
    }
    Part factor() {
        skip();
        if (eat('-')) {
            Part p = factor();
            if (p.product) p.e.a = p.e.a.scaled(-1);
            else p.e.a = p.lin().scaled(-1);
            return p;
        }
        if (eat('(')) {
            Part p = sum();
            if (!eat(')')) throw ParseError("expected ')'", i_);
            return p;
        }
        if (s_.compare(i_, 3, "val") == 0) {
            i_ += 3;
            if (!eat('(')) throw ParseError("expected '(' after val", i_);
            skip();
            Linear l;
            if (i_ < s_.size() && s_[i_] == 'N') {
                ++i_;
                long o = 0;
                if (eat('+')) o = integer();
                l = val_offset(o);
            } else {
                const long j = integer();
                if (j < 1) throw ParseError("val(j) needs j >= 1", i_);
                l = val_fixed(j);
            }
            if (!eat(')')) throw ParseError("expected ')'", i_);
            return {ValueExpr::linear(l)};
        }
        const char* begin = s_.c_str() + i_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("expected a value", i_);
        i_ += static_cast<std::size_t>(end - begin);
        return {ValueExpr::linear(constant(v))};
    }
    long integer() {
        skip();
        std::size_t j = i_;
        while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
        if (j == i_) throw ParseError("expected integer", i_);
        const long v = std::stol(s_.substr(i_, j - i_));
        i_ = j;
        return v;
    }

    const std::string& s_;
    std::size_t i_ = 0;
};

} // namespace detail

inline Formula parse_formula(const std::string& text, const LabelTable& labels) {
    return detail::FormulaParser(text, &labels).parse();
}
inline Formula parse_formula(const std::string& text) { return detail::FormulaParser(text, nullptr).parse(); }

inline ValueExpr parse_expr(const std::string& text) { return detail::ExprParser(text).parse(); }

inline IntervalPredicate parse_interval(const std::string& text) {
    auto fail = [&] { throw FormatError("bad interval '" + text + "'"); };
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.size() < 5) fail();
    IntervalPredicate p;
    if (t.front() == '(') p.lo_open = true;
    else if (t.front() == '[') p.lo_open = false;
    else fail();
    if (t.back() == ')') p.hi_open = true;
    else if (t.back() == ']') p.hi_open = false;
    else fail();
    const auto comma = t.find(',');
    if (comma == std::string::npos) fail();
    auto num = [&](const std::string& s) -> double {
        if (s == "inf" || s == "+inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) fail();
            return v;
        } catch (const std::logic_error&) {
            fail();
        }
        return 0.0;
    };
    p.lo = num(t.substr(1, comma - 1));
    p.hi = num(t.substr(comma + 1, t.size() - comma - 2));
    if (std::isinf(p.lo)) p.lo_open = true;
    if (std::isinf(p.hi)) p.hi_open = true;
    try {
        p.validate();
    } catch (const Error&) {
        fail();
    }
    return p;
}

inline std::string render(const Linear& l) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [c, r] : l.terms) {
        const std::string ref = r.kind == SizeRef::Fixed ? "val(" + std::to_string(r.value) + ")"
                                : r.value == 0           ? "val(N)"
                                                         : "val(N+" + std::to_string(r.value) + ")";
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        if (std::abs(c) != 1) os << std::abs(c) << "*";
        os << ref;
        first = false;
    }
    if (l.c0 != 0 || first) {
        if (!first) os << (l.c0 < 0 ? " - " : " + ") << std::abs(l.c0);
        else os << l.c0;
    }
    return os.str();
}

inline std::string render(const ValueExpr& e) {
    switch (e.kind) {
    case ValueExpr::LINEAR: return render(e.a);
    case ValueExpr::RATIO: return "(" + render(e.a) + ") / (" + render(e.b) + ")";
    case ValueExpr::PRODUCT: return "(" + render(e.a) + ") * (" + render(e.b) + ")";
    }
    return {};
}

struct Spec {
    LabelTable labels;
    std::string formula_text;
    Formula formula;
};

inline Label label_from_json(const std::string& name, const nlohmann::json& j) {
    Label l;
    l.name = name;
    l.expr = parse_expr(j.at("expr").get<std::string>());
    if (j.contains("in")) {
        l.interval = parse_interval(j["in"].get<std::string>());
    } else if (j.contains("abs_lt")) {
        const double x = j["abs_lt"].get<double>();
        l.interval = IntervalPredicate::open(-x, x);
    } else if (j.contains("abs_gt")) {
        const double x = j["abs_gt"].get<double>();
        if (l.expr.kind != ValueExpr::LINEAR) throw FormatError(name + ": abs_gt needs a linear expression");
        l.expr = ValueExpr::product(l.expr.a, l.expr.a);
        l.interval = IntervalPredicate::open(x * x, INFINITY);
    } else {
        throw FormatError(name + ": label needs 'in', 'abs_lt' or 'abs_gt'");
    }
    return l;
}

inline Spec spec_from_json(const nlohmann::json& j) {
    Spec s;
    for (const auto& [name, body] : j.at("labels").items()) s.labels.emplace(name, label_from_json(name, body));
    s.formula_text = j.at("formula").get<std::string>();
    s.formula = parse_formula(s.formula_text, s.labels);
    return s;
}

inline Spec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open spec file " + path);
    nlohmann::json j;
    try {
        in >> j;
        return spec_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

// Bounded three-valued semantics up to `horizon`; used as an oracle.
class BoundedEvaluator {
public:
    BoundedEvaluator(const ChainModel& m, long horizon) : m_(m), h_(horizon) {}

    Tri eval(const Formula& f, long n) {
        if (n > h_) return Tri::Unknown;
        const auto key = std::make_pair(f.get(), n);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        Tri r = Tri::Unknown;
        switch (f->kind) {
        case FormulaNode::TRUE: r = Tri::True; break;
        case FormulaNode::LABEL: {
            const auto it = m_.labels.find(f->label);
            if (it == m_.labels.end()) throw Error("unknown label " + f->label);
            try {
                r = holds_label(m_, it->second, n) ? Tri::True : Tri::False;
            } catch (const DivisionError&) {
                r = Tri::Unknown;
            }
            break;
        }
        case FormulaNode::NOT: r = tri_not(eval(f->a, n)); break;
        case FormulaNode::AND: r = tri_and(eval(f->a, n), eval(f->b, n)); break;
        case FormulaNode::NEXT: r = eval(f->a, n + 1); break;
        case FormulaNode::EVENTUALLY:
            for (long j = h_; j >= n; --j)
                if (eval(f->a, j) == Tri::True) r = Tri::True;
            break;
        case FormulaNode::GLOBALLY:
            for (long j = h_; j >= n; --j)
                if (eval(f->a, j) == Tri::False) r = Tri::False;
            break;
        }
        memo_.emplace(key, r);
        return r;
    }

private:
    struct KeyHash {
        std::size_t operator()(const std::pair<const FormulaNode*, long>& k) const {
            return std::hash<const void*>()(k.first) * 31 + std::hash<long>()(k.second);
        }
    };
    const ChainModel& m_;
    long h_;
    std::unordered_map<std::pair<const FormulaNode*, long>, Tri, KeyHash> memo_;
};

inline Tri eval_bounded(const ChainModel& m, const Formula& f, long n, long horizon) {
    if (n > horizon) throw Error("eval_bounded: n exceeds horizon");
    return BoundedEvaluator(m, horizon).eval(f, n);
}

} // namespace lcl
