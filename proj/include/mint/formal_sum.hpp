#pragma once

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mint/error.hpp"

#include "mint/grade.hpp"
#include "mint/rational.hpp"

namespace mint {

// Payload of an observation: every payload collapses to this marker.
struct Star {
    friend bool operator==(Star, Star) { return true; }
};
inline int payload_cmp(Star, Star) { return 0; }

template <class X>
struct Branch {
    Rational weight;  // in (0, 1]
    Grade grade;
    X payload;
};

// A finite formal sum of weighted, graded branches: the canonical
// representation of an element of each supported monad. Branches are kept in
// a deterministic order and equal branches are NOT merged; the monads in
// play are non-idempotent, so {1/2 x, 1/2 x} and {1 x} are different
// elements. The empty sum doubles as the least element (bottom) of the
// approximation order.
template <class X>
class FormalSum {
public:
    FormalSum() = default;

    explicit FormalSum(std::vector<Branch<X>> branches) : branches_(std::move(branches)) {
        canonicalize();
    }

    static FormalSum eta(X payload, Grade::Kind kind) {
        return FormalSum({Branch<X>{Rational(1), grade_unit(kind), std::move(payload)}});
    }

    const std::vector<Branch<X>>& branches() const { return branches_; }
    bool empty() const { return branches_.empty(); }
    std::size_t size() const { return branches_.size(); }

    Rational total_weight() const {
        Rational s(0);
        for (const auto& b : branches_) s += b.weight;
        return s;
    }

    // Single branch of weight one with the unit grade.
    bool eta_shaped() const {
        return branches_.size() == 1 && branches_[0].weight == 1 && branches_[0].grade.is_unit();
    }

    // Distinct payloads, in canonical payload order.
    std::vector<X> support() const {
        std::vector<X> out;
        for (const auto& b : branches_) {
            bool seen = false;
            for (const auto& s : out)
                if (payload_cmp(s, b.payload) == 0) { seen = true; break; }
            if (!seen) out.push_back(b.payload);
        }
        std::sort(out.begin(), out.end(),
                  [](const X& a, const X& b) { return payload_cmp(a, b) < 0; });
        return out;
    }

    template <class F>
    auto bind(F&& f) const -> FormalSum<typename std::invoke_result_t<F, const X&>::payload_type> {
        using Y = typename std::invoke_result_t<F, const X&>::payload_type;
        std::vector<Branch<Y>> out;
        for (const auto& b : branches_) {
            FormalSum<Y> inner = f(b.payload);
            for (const auto& c : inner.branches()) {
                out.push_back(Branch<Y>{b.weight * c.weight, grade_mul(b.grade, c.grade), c.payload});
            }
        }
        return FormalSum<Y>(std::move(out));
    }

    template <class F>
    auto map(F&& f) const -> FormalSum<std::invoke_result_t<F, const X&>> {
        using Y = std::invoke_result_t<F, const X&>;
        std::vector<Branch<Y>> out;
        out.reserve(branches_.size());
        for (const auto& b : branches_) out.push_back(Branch<Y>{b.weight, b.grade, f(b.payload)});
        return FormalSum<Y>(std::move(out));
    }

    FormalSum<Star> observe() const {
        return map([](const X&) { return Star{}; });
    }

    // Scale every weight by p (dropping the sum entirely when p = 0) and
    // prefix every grade with g. This is the shape shared by all bundled
    // operation semantics.
    FormalSum scaled(const Rational& p, const Grade& g) const {
        if (p == 0) return FormalSum{};
        std::vector<Branch<X>> out;
        out.reserve(branches_.size());
        for (const auto& b : branches_)
            out.push_back(Branch<X>{p * b.weight, grade_mul(g, b.grade), b.payload});
        return FormalSum(std::move(out));
    }

    static FormalSum merged(const FormalSum& a, const FormalSum& b) {
        std::vector<Branch<X>> out = a.branches_;
        out.insert(out.end(), b.branches_.begin(), b.branches_.end());
        return FormalSum(std::move(out));
    }

    using payload_type = X;

    friend bool operator==(const FormalSum& a, const FormalSum& b) {
        if (a.branches_.size() != b.branches_.size()) return false;
        for (std::size_t i = 0; i < a.branches_.size(); ++i) {
            const auto& x = a.branches_[i];
            const auto& y = b.branches_[i];
            if (x.weight != y.weight || x.grade != y.grade || payload_cmp(x.payload, y.payload) != 0)
                return false;
        }
        return true;
    }
    friend bool operator!=(const FormalSum& a, const FormalSum& b) { return !(a == b); }

private:
    void canonicalize() {
        for (const auto& b : branches_) {
            if (b.weight <= 0 || b.weight > 1)
                throw domain_error("branch weight outside (0,1]: " + to_string(b.weight));
        }
        std::stable_sort(branches_.begin(), branches_.end(),
                         [](const Branch<X>& a, const Branch<X>& b) {
                             int g = grade_cmp(a.grade, b.grade);
                             if (g != 0) return g < 0;
                             int p = payload_cmp(a.payload, b.payload);
                             if (p != 0) return p < 0;
                             return a.weight < b.weight;
                         });
    }

    std::vector<Branch<X>> branches_;
};

// Observations print weights and grades only — the payload is the collapsed
// marker.  "()" is the trivial grade; "bot" the empty observation.
inline std::string to_string(const FormalSum<Star>& o) {
    if (o.empty()) return "bot";
    std::string out;
    bool first = true;
    for (const auto& b : o.branches()) {
        if (!first) out += " + ";
        first = false;
        if (b.weight != 1) out += to_string(b.weight) + "*";
        if (b.grade.kind == Grade::Kind::Trivial)
            out += "()";
        else
            out += "(" + grade_to_string(b.grade) + ")";
    }
    return out;
}

// Branch-level total order on canonical sums, usable for payloads that are
// themselves sums (monadic types nest this way).
template <class X>
int sum_cmp(const FormalSum<X>& a, const FormalSum<X>& b) {
    const auto& xs = a.branches();
    const auto& ys = b.branches();
    if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        int g = grade_cmp(xs[i].grade, ys[i].grade);
        if (g != 0) return g;
        int p = payload_cmp(xs[i].payload, ys[i].payload);
        if (p != 0) return p;
        if (xs[i].weight != ys[i].weight) return xs[i].weight < ys[i].weight ? -1 : 1;
    }
    return 0;
}

// Sub-multiset inclusion of branches: the approximation order. The empty sum
// is least, and binding on either side is monotone in it.
template <class X>
bool sum_leq(const FormalSum<X>& a, const FormalSum<X>& b) {
    const auto& xs = a.branches();
    const auto& ys = b.branches();
    std::size_t j = 0;
    for (const auto& x : xs) {
        bool found = false;
        while (j < ys.size()) {
            const auto& y = ys[j];
            ++j;
            if (x.weight == y.weight && x.grade == y.grade && payload_cmp(x.payload, y.payload) == 0) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace mint
