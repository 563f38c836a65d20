#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "lcl/errors.hpp"

namespace lcl {

// Set of positive integers that is eventually periodic. Stored as a threshold
// T, a modulus k, membership bits for 1..T-1 and a residue pattern (indexed by
// n mod k) that applies to every n >= T. Always kept with minimal k, then
// minimal T, so equal sets compare equal field by field.
class SemilinearSet {
public:
    SemilinearSet() : threshold_(1), modulus_(1), pattern_(1, false) {}

    static SemilinearSet empty() { return {}; }
    static SemilinearSet universe() { return SemilinearSet(1, 1, {}, {true}); }

    static SemilinearSet finite(std::vector<long> elems) {
        long top = 0;
        for (long e : elems) top = std::max(top, e);
        std::vector<bool> pre(static_cast<std::size_t>(top), false);
        for (long e : elems)
            if (e >= 1) pre[e - 1] = true;
        return SemilinearSet(top + 1, 1, std::move(pre), {false});
    }

    // {start, start + k, start + 2k, ...}
    static SemilinearSet progression(long start, long k) {
        if (k < 1 || start < 1) throw Error("progression needs start >= 1 and modulus >= 1");
        std::vector<bool> pre(static_cast<std::size_t>(start - 1), false);
        std::vector<bool> pat(static_cast<std::size_t>(k), false);
        pat[start % k] = true;
        return SemilinearSet(start, k, std::move(pre), std::move(pat));
    }

    // [lo, hi] intersected with the universe.
    static SemilinearSet range(long lo, long hi) {
        std::vector<long> e;
        for (long n = std::max(1L, lo); n <= hi; ++n) e.push_back(n);
        return finite(e);
    }

    static SemilinearSet from_parts(const std::vector<long>& finite_part, const std::vector<long>& starts, long k) {
        SemilinearSet s = finite(finite_part);
        for (long st : starts) s = unite(s, progression(st, k));
        return s;
    }

    // Build from a predicate that is known to be eventually periodic with
    // period k from threshold t on.
    template <class Pred>
    static SemilinearSet tabulate(long t, long k, Pred&& member) {
        std::vector<bool> pre(static_cast<std::size_t>(t - 1));
        for (long n = 1; n < t; ++n) pre[n - 1] = member(n);
        std::vector<bool> pat(static_cast<std::size_t>(k));
        for (long r = 0; r < k; ++r) pat[r] = member(first_at_least(t, r, k));
        return SemilinearSet(t, k, std::move(pre), std::move(pat));
    }

    bool contains(long n) const {
        if (n < 1) return false;
        if (n < threshold_) return prefix_[n - 1];
        return pattern_[n % modulus_];
    }

    long threshold() const { return threshold_; }
    long modulus() const { return modulus_; }

    bool is_finite() const { return std::none_of(pattern_.begin(), pattern_.end(), [](bool b) { return b; }); }
    bool is_empty() const {
        return is_finite() && std::none_of(prefix_.begin(), prefix_.end(), [](bool b) { return b; });
    }
    long supremum() const {
        if (is_empty()) throw EmptyError("supremum of the empty set");
        if (!is_finite()) return -1;
        for (long n = threshold_ - 1; n >= 1; --n)
            if (prefix_[n - 1]) return n;
        return -1;
    }

    // Progression starts, each walked down as far as membership allows.
    std::vector<long> residues() const {
        std::vector<long> out;
        for (long r = 0; r < modulus_; ++r) {
            if (!pattern_[r]) continue;
            long n = first_at_least(threshold_, r, modulus_);
            while (n - modulus_ >= 1 && contains(n - modulus_)) n -= modulus_;
            out.push_back(n);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<long> finite_part() const {
        std::vector<long> start(static_cast<std::size_t>(modulus_), -1);
        for (long st : residues()) start[st % modulus_] = st;
        std::vector<long> out;
        for (long n = 1; n < threshold_; ++n) {
            if (!prefix_[n - 1]) continue;
            const long s = start[n % modulus_];
            if (s < 0 || n < s) out.push_back(n);
        }
        return out;
    }

    friend SemilinearSet unite(const SemilinearSet& a, const SemilinearSet& b) {
        return combine(a, b, [](bool x, bool y) { return x || y; });
    }
    friend SemilinearSet intersect(const SemilinearSet& a, const SemilinearSet& b) {
        return combine(a, b, [](bool x, bool y) { return x && y; });
    }
    friend SemilinearSet complement(const SemilinearSet& a) {
        auto pre = a.prefix_;
        pre.flip();
        auto pat = a.pattern_;
        pat.flip();
        return SemilinearSet(a.threshold_, a.modulus_, std::move(pre), std::move(pat));
    }
    friend SemilinearSet difference(const SemilinearSet& a, const SemilinearSet& b) {
        return combine(a, b, [](bool x, bool y) { return x && !y; });
    }
    friend bool is_subset(const SemilinearSet& a, const SemilinearSet& b) { return difference(a, b).is_empty(); }

    // {n - by : n in s, n - by >= 1}
    friend SemilinearSet shift_down(const SemilinearSet& s, long by) {
        if (by < 0) throw Error("shift_down needs a nonnegative amount");
        const long t = std::max(1L, s.threshold_ - by);
        return tabulate(t, s.modulus_, [&](long m) { return s.contains(m + by); });
    }

    bool operator==(const SemilinearSet&) const = default;

    std::string str() const {
        std::vector<std::string> parts;
        const auto fin = finite_part();
        if (!fin.empty()) {
            std::ostringstream os;
            os << "{";
            for (std::size_t i = 0; i < fin.size(); ++i) os << (i ? "," : "") << fin[i];
            os << "}";
            parts.push_back(os.str());
        }
        for (long st : residues()) parts.push_back("(" + std::to_string(st) + " + " + std::to_string(modulus_) + "N)");
        if (parts.empty()) return "∅";
        std::string out = parts[0];
        for (std::size_t i = 1; i < parts.size(); ++i) out += " ∪ " + parts[i];
        return out;
    }

    nlohmann::json to_json() const {
        return {{"finite", finite_part()}, {"residues", residues()}, {"modulus", modulus_}};
    }
    static SemilinearSet from_json(const nlohmann::json& j) {
        return from_parts(j.at("finite").get<std::vector<long>>(), j.at("residues").get<std::vector<long>>(),
                          j.at("modulus").get<long>());
    }

private:
    SemilinearSet(long t, long k, std::vector<bool> pre, std::vector<bool> pat)
        : threshold_(t), modulus_(k), prefix_(std::move(pre)), pattern_(std::move(pat)) {
        normalize();
    }

    static long first_at_least(long t, long r, long k) { return t + (((r - t) % k) + k) % k; }

    template <class Op>
    static SemilinearSet combine(const SemilinearSet& a, const SemilinearSet& b, Op op) {
        const long k = std::lcm(a.modulus_, b.modulus_);
        const long t = std::max(a.threshold_, b.threshold_);
        return tabulate(t, k, [&](long n) { return op(a.contains(n), b.contains(n)); });
    }

    void normalize() {
        // smallest period of the residue pattern
        for (long p = 1; p < modulus_; ++p) {
            if (modulus_ % p) continue;
            bool ok = true;
            for (long r = 0; r + p < modulus_ && ok; ++r) ok = pattern_[r] == pattern_[r + p];
            if (ok) {
                pattern_.resize(static_cast<std::size_t>(p));
                modulus_ = p;
                break;
            }
        }
        while (threshold_ > 1 && prefix_[threshold_ - 2] == pattern_[(threshold_ - 1) % modulus_]) {
            --threshold_;
            prefix_.pop_back();
        }
    }

    long threshold_;
    long modulus_;
    std::vector<bool> prefix_;   // membership of 1 .. threshold-1
    std::vector<bool> pattern_;  // membership of n >= threshold, by n mod modulus
};

// E: the universe if infinite, [1, sup] if finite and nonempty, else empty.
inline SemilinearSet eventually(const SemilinearSet& s) {
    if (s.is_empty()) return SemilinearSet::empty();
    if (!s.is_finite()) return SemilinearSet::universe();
    return SemilinearSet::range(1, s.supremum());
}

// Paired over/under approximation of an evidence set.
struct EvidenceApprox {
    SemilinearSet over;
    SemilinearSet under;

    bool consistent() const { return is_subset(under, over); }
    bool operator==(const EvidenceApprox&) const = default;
};

} // namespace lcl
