#pragma once

#include <cstdint>
#include <string>

namespace mint {

// Monoid annotation carried by every branch of a formal sum. Which kind is in
// play is fixed by the monad in use: trivial (pure, multidist, multiset),
// words over an alphabet (writer), or a natural-number cost (cost). Products
// of a graded monad with multidist keep the grade of the graded factor.
struct Grade {
    enum class Kind { Trivial, Word, Cost };

    Kind kind = Kind::Trivial;
    std::string word;     // Kind::Word
    std::uint64_t cost = 0;  // Kind::Cost

    static Grade trivial() { return {}; }
    static Grade of_word(std::string w) { return {Kind::Word, std::move(w), 0}; }
    static Grade of_cost(std::uint64_t c) { return {Kind::Cost, {}, c}; }

    bool is_unit() const {
        switch (kind) {
            case Kind::Trivial: return true;
            case Kind::Word: return word.empty();
            case Kind::Cost: return cost == 0;
        }
        return true;
    }

    friend bool operator==(const Grade& a, const Grade& b) {
        if (a.kind != b.kind) return false;
        if (a.kind == Kind::Word) return a.word == b.word;
        if (a.kind == Kind::Cost) return a.cost == b.cost;
        return true;
    }
    friend bool operator!=(const Grade& a, const Grade& b) { return !(a == b); }
};

// Unit of the monoid for a given kind.
inline Grade grade_unit(Grade::Kind kind) {
    Grade g;
    g.kind = kind;
    return g;
}

// Monoid multiplication: word concatenation / cost addition. Mixing kinds is
// a programming error; callers always operate within one monad.
inline Grade grade_mul(const Grade& a, const Grade& b) {
    if (a.kind != b.kind) throw std::logic_error("grade kind mismatch");
    Grade g = a;
    if (a.kind == Grade::Kind::Word) g.word = a.word + b.word;
    if (a.kind == Grade::Kind::Cost) g.cost = a.cost + b.cost;
    return g;
}

// Total order used by the canonical sort of formal sums.
inline int grade_cmp(const Grade& a, const Grade& b) {
    if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
    switch (a.kind) {
        case Grade::Kind::Trivial: return 0;
        case Grade::Kind::Word: return a.word < b.word ? -1 : a.word > b.word ? 1 : 0;
        case Grade::Kind::Cost: return a.cost < b.cost ? -1 : a.cost > b.cost ? 1 : 0;
    }
    return 0;
}

// Rendering depends on the kind: words print as-is ("eps" when empty), costs
// as integers, the trivial grade as an empty string (callers elide it).
inline std::string grade_to_string(const Grade& g) {
    switch (g.kind) {
        case Grade::Kind::Trivial: return "";
        case Grade::Kind::Word: return g.word.empty() ? "eps" : g.word;
        case Grade::Kind::Cost: return std::to_string(g.cost);
    }
    return "";
}

}  // namespace mint
