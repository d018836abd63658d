#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mint/error.hpp"
#include "mint/formal_sum.hpp"
#include "mint/monad_spec.hpp"

namespace mint {

// Types come in three mutually recursive layers:
//
//   value type    A := I -> M            (arrows only; no base types)
//   intersection  I := finite multiset-free set of value types (0 = empty)
//   monadic type  M := formal sum of intersections
//
// Intersections are canonical: sorted, duplicate-free.  Monadic types
// reuse the canonical formal-sum representation; equal branches are NOT
// merged, so the system stays non-idempotent at the monadic layer.

struct ValueType;

struct Intersection {
    std::vector<ValueType> members;  // canonical: sorted, no duplicates

    Intersection() = default;

    // Canonicalizing constructor; defined after ValueType is complete.
    static Intersection make(std::vector<ValueType> ms);

    bool empty() const { return members.empty(); }
    std::size_t size() const { return members.size(); }
};

using MonadicType = FormalSum<Intersection>;

struct ValueType {
    Intersection domain;
    MonadicType codomain;
};

// ---------------------------------------------------------------------------
// Total order
// ---------------------------------------------------------------------------

inline int value_type_cmp(const ValueType& a, const ValueType& b);

inline int intersection_cmp(const Intersection& a, const Intersection& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        int c = value_type_cmp(a.members[i], b.members[i]);
        if (c != 0) return c;
    }
    return 0;
}

// Found by formal sums over intersections via argument-dependent lookup.
inline int payload_cmp(const Intersection& a, const Intersection& b) {
    return intersection_cmp(a, b);
}

inline int value_type_cmp(const ValueType& a, const ValueType& b) {
    int c = intersection_cmp(a.domain, b.domain);
    if (c != 0) return c;
    return sum_cmp(a.codomain, b.codomain);
}

inline Intersection Intersection::make(std::vector<ValueType> ms) {
    std::sort(ms.begin(), ms.end(),
              [](const ValueType& x, const ValueType& y) { return value_type_cmp(x, y) < 0; });
    ms.erase(std::unique(ms.begin(), ms.end(),
                         [](const ValueType& x, const ValueType& y) {
                             return value_type_cmp(x, y) == 0;
                         }),
             ms.end());
    Intersection i;
    i.members = std::move(ms);
    return i;
}

inline bool operator==(const Intersection& a, const Intersection& b) {
    return intersection_cmp(a, b) == 0;
}
inline bool operator==(const ValueType& a, const ValueType& b) {
    return value_type_cmp(a, b) == 0;
}

inline bool type_eq(const MonadicType& a, const MonadicType& b) { return sum_cmp(a, b) == 0; }

// Approximation order: a refines to b by adding branches.
inline bool type_leq(const MonadicType& a, const MonadicType& b) { return sum_leq(a, b); }

struct IntersectionLess {
    bool operator()(const Intersection& a, const Intersection& b) const {
        return intersection_cmp(a, b) < 0;
    }
};

struct ValueTypeLess {
    bool operator()(const ValueType& a, const ValueType& b) const {
        return value_type_cmp(a, b) < 0;
    }
};

// Set-union of intersections (canonical result).
inline Intersection intersection_union(const Intersection& a, const Intersection& b) {
    std::vector<ValueType> ms = a.members;
    ms.insert(ms.end(), b.members.begin(), b.members.end());
    return Intersection::make(std::move(ms));
}

// Does `big` contain every member of `small`?
inline bool intersection_supseteq(const Intersection& big, const Intersection& small) {
    for (const ValueType& a : small.members) {
        bool found = false;
        for (const ValueType& b : big.members)
            if (value_type_cmp(a, b) == 0) { found = true; break; }
        if (!found) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Monadic structure at the type level
// ---------------------------------------------------------------------------

using AppTable = std::map<Intersection, MonadicType, IntersectionLess>;

inline std::string to_string(const MonadicType& m);
inline std::string to_string(const Intersection& i);

// Kleisli extension at the type level: each branch p*(g, I) of `n` is
// replaced by table[I] with weight scaled by p and grades prefixed by g.
// Every intersection in the support of `n` must be covered by the table.
inline MonadicType type_bind(const MonadicType& n, const AppTable& table) {
    MonadicType acc;
    for (const auto& b : n.branches()) {
        auto it = table.find(b.payload);
        if (it == table.end())
            throw domain_error("uncovered support: no table entry for " + to_string(b.payload));
        acc = MonadicType::merged(acc, it->second.scaled(b.weight, b.grade));
    }
    return acc;
}

// Operations act on monadic types exactly as they act on element-level
// sums; apply_op is shared between the two.
inline MonadicType type_op(const MonadSpec& spec, const OpHead& head,
                           const std::vector<MonadicType>& args) {
    return apply_op(spec, head, args);
}

// Collapse payloads to the trivial observation.
inline FormalSum<Star> obs_type(const MonadicType& m) { return m.observe(); }

// ---------------------------------------------------------------------------
// Type environments
// ---------------------------------------------------------------------------

using TypeEnv = std::map<std::string, Intersection>;

inline Intersection env_lookup(const TypeEnv& env, const std::string& x) {
    auto it = env.find(x);
    if (it == env.end()) return Intersection{};
    return it->second;
}

inline TypeEnv env_extend(TypeEnv env, const std::string& x, Intersection i) {
    env[x] = std::move(i);
    return env;
}

// env_supseteq(big, small): big gives every variable at least what small
// gives it (pointwise superset).  This is the weakening tolerance used by
// derivation checking.
inline bool env_supseteq(const TypeEnv& big, const TypeEnv& small) {
    for (const auto& [x, i] : small) {
        if (i.empty()) continue;
        auto it = big.find(x);
        if (it == big.end()) return false;
        if (!intersection_supseteq(it->second, i)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Type syntax
// ---------------------------------------------------------------------------
//
//   M      := "bot" | branch ("+" branch)*
//   branch := [RAT "*"] body
//   body   := "(" GRADE "," I ")" | I | "eta" "(" I ")"
//   I      := "0" | "{" A ("," A)* "}"
//   A      := I "->" M
//
// GRADE is a nonnegative integer (cost), a word (writer; "eps" for the
// empty word), and must match the monad's grading; `eta(I)` and a bare
// `I` body both mean the unit grade.  Weight 1 may be omitted.

inline std::string to_string(const Intersection& i) {
    if (i.empty()) return "0";
    std::ostringstream os;
    os << "{";
    for (std::size_t k = 0; k < i.members.size(); ++k) {
        if (k) os << ", ";
        os << to_string(i.members[k].domain) << " -> " << to_string(i.members[k].codomain);
    }
    os << "}";
    return os.str();
}

inline std::string to_string(const MonadicType& m) {
    if (m.empty()) return "bot";
    std::ostringstream os;
    bool first = true;
    for (const auto& b : m.branches()) {
        if (!first) os << " + ";
        first = false;
        if (b.weight != 1) os << to_string(b.weight) << "*";
        if (b.grade.kind == Grade::Kind::Trivial) {
            os << to_string(b.payload);
        } else {
            os << "(" << grade_to_string(b.grade) << ", " << to_string(b.payload) << ")";
        }
    }
    return os.str();
}

inline std::string to_string(const ValueType& a) {
    return to_string(a.domain) + " -> " + to_string(a.codomain);
}

namespace detail {

class TypeParser {
  public:
    TypeParser(const MonadSpec& spec, const std::string& src) : spec_(spec), src_(src) {}

    MonadicType parse_monadic_all() {
        MonadicType m = parse_monadic();
        skip_ws();
        if (at_ != src_.size()) fail("end of input");
        return m;
    }

    Intersection parse_intersection_all() {
        Intersection i = parse_intersection();
        skip_ws();
        if (at_ != src_.size()) fail("end of input");
        return i;
    }

    ValueType parse_value_type_all() {
        ValueType a = parse_arrow();
        skip_ws();
        if (at_ != src_.size()) fail("end of input");
        return a;
    }

  private:
    const MonadSpec& spec_;
    std::string src_;
    std::size_t at_ = 0;

    void skip_ws() {
        while (at_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[at_]))) ++at_;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw parse_error("expected " + what + " at offset " + std::to_string(at_) +
                          " in type '" + src_ + "'");
    }

    bool eat(const std::string& tok) {
        skip_ws();
        if (src_.compare(at_, tok.size(), tok) == 0) {
            at_ += tok.size();
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return at_ < src_.size() ? src_[at_] : '\0';
    }

    std::string take_word() {
        skip_ws();
        std::size_t j = at_;
        while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) ||
                                   src_[j] == '_'))
            ++j;
        std::string w = src_.substr(at_, j - at_);
        at_ = j;
        return w;
    }

    Rational take_rational() {
        skip_ws();
        std::size_t j = at_;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
        if (j == at_) fail("a number");
        std::string num = src_.substr(at_, j - at_);
        at_ = j;
        if (at_ < src_.size() && src_[at_] == '/') {
            ++at_;
            j = at_;
            while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
            if (j == at_) fail("a denominator");
            num += "/" + src_.substr(at_, j - at_);
            at_ = j;
        }
        auto r = parse_rational(num);
        if (!r) fail("a rational number");
        return *r;
    }

    Grade parse_grade() {
        skip_ws();
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            if (spec_.grade != Grade::Kind::Cost) fail("a grade matching the monad's grading");
            std::size_t j = at_;
            while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
            std::uint64_t n = std::stoull(src_.substr(at_, j - at_));
            at_ = j;
            return Grade::of_cost(n);
        }
        std::string w = take_word();
        if (w.empty()) fail("a grade");
        if (spec_.grade != Grade::Kind::Word) fail("a grade matching the monad's grading");
        if (w == "eps") return Grade::of_word("");
        for (char c : w)
            if (!spec_.alphabet.count(c))
                throw parse_error("grade letter '" + std::string(1, c) +
                                  "' is outside the monad's alphabet in '" + src_ + "'");
        return Grade::of_word(w);
    }

    Intersection parse_intersection() {
        skip_ws();
        if (eat("0")) return Intersection{};
        if (!eat("{")) fail("an intersection ('0' or '{...}')");
        std::vector<ValueType> ms;
        ms.push_back(parse_arrow());
        while (eat(",")) ms.push_back(parse_arrow());
        if (!eat("}")) fail("'}'");
        return Intersection::make(std::move(ms));
    }

    ValueType parse_arrow() {
        Intersection dom = parse_intersection();
        if (!eat("->")) fail("'->'");
        MonadicType cod = parse_monadic();
        return ValueType{std::move(dom), std::move(cod)};
    }

    // Decides between "(GRADE, I)" and a parenthesized monadic type by
    // checking for the comma after a grade-shaped prefix.
    bool graded_pair_ahead() {
        std::size_t save = at_;
        bool ok = false;
        skip_ws();
        if (at_ < src_.size() && src_[at_] == '(') {
            ++at_;
            skip_ws();
            std::size_t j = at_;
            while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) ||
                                       src_[j] == '_'))
                ++j;
            if (j > at_) {
                at_ = j;
                skip_ws();
                ok = at_ < src_.size() && src_[at_] == ',';
            }
        }
        at_ = save;
        return ok;
    }

    void parse_branch(std::vector<Branch<Intersection>>& out) {
        Rational w(1);
        skip_ws();
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            // Either a weight prefix "p*" or the bare empty intersection "0".
            std::size_t save = at_;
            Rational r = take_rational();
            skip_ws();
            if (at_ < src_.size() && src_[at_] == '*') {
                ++at_;
                w = r;
            } else if (r == 0) {
                // bare "0": the empty intersection at unit grade
                out.push_back({w, grade_unit(spec_.grade), Intersection{}});
                return;
            } else {
                at_ = save;
                fail("'*' after a weight");
            }
        }
        skip_ws();
        Grade g = grade_unit(spec_.grade);
        Intersection i;
        if (graded_pair_ahead()) {
            eat("(");
            g = parse_grade();
            if (!eat(",")) fail("','");
            i = parse_intersection();
            if (!eat(")")) fail("')'");
        } else if (src_.compare(at_, 4, "eta(") == 0 || src_.compare(at_, 4, "eta ") == 0) {
            take_word();
            if (!eat("(")) fail("'('");
            i = parse_intersection();
            if (!eat(")")) fail("')'");
        } else if (peek() == '(') {
            eat("(");
            MonadicType inner = parse_monadic();
            if (!eat(")")) fail("')'");
            for (const auto& b : inner.branches())
                out.push_back({w * b.weight, b.grade, b.payload});
            return;
        } else {
            i = parse_intersection();
        }
        out.push_back({w, g, std::move(i)});
    }

    MonadicType parse_monadic() {
        skip_ws();
        if (src_.compare(at_, 3, "bot") == 0) {
            // "bot" only if not a longer word
            std::size_t after = at_ + 3;
            if (after >= src_.size() ||
                (!std::isalnum(static_cast<unsigned char>(src_[after])) && src_[after] != '_')) {
                at_ = after;
                return MonadicType{};
            }
        }
        std::vector<Branch<Intersection>> bs;
        parse_branch(bs);
        while (eat("+")) parse_branch(bs);
        return MonadicType(std::move(bs));
    }
};

}  // namespace detail

inline MonadicType parse_monadic_type(const MonadSpec& spec, const std::string& src) {
    return detail::TypeParser(spec, src).parse_monadic_all();
}

inline Intersection parse_intersection_type(const MonadSpec& spec, const std::string& src) {
    return detail::TypeParser(spec, src).parse_intersection_all();
}

inline ValueType parse_value_type(const MonadSpec& spec, const std::string& src) {
    return detail::TypeParser(spec, src).parse_value_type_all();
}

}  // namespace mint
