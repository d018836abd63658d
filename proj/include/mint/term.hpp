#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mint/error.hpp"
#include "mint/rational.hpp"

namespace mint {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Head of an operation node.  `word` is only meaningful for output
// operations, `prob` only for binary probabilistic choice; generic
// operations carry just a name.  Which heads are admissible is decided by
// the effect signature, not here.
struct OpHead {
    std::string name;
    std::optional<std::string> word;
    std::optional<Rational> prob;
};

inline int op_head_cmp(const OpHead& a, const OpHead& b) {
    if (a.name != b.name) return a.name < b.name ? -1 : 1;
    if (a.word != b.word) return a.word < b.word ? -1 : 1;
    if (a.prob != b.prob) return a.prob < b.prob ? -1 : 1;
    return 0;
}

// Immutable computation tree.  Values are variables and abstractions; the
// function position of an application is always a value (general
// application is desugared by the parser before a Term is built).
struct Term {
    enum class Kind { Var, Lam, App, Op };

    Kind kind;
    std::string name;            // Var: identifier; Lam: binder
    OpHead op;                   // Op only
    std::vector<TermPtr> kids;   // Lam: [body]; App: [fun, arg]; Op: args

    static TermPtr var(std::string n) {
        auto t = std::make_shared<Term>();
        t->kind = Kind::Var;
        t->name = std::move(n);
        return t;
    }

    static TermPtr lam(std::string binder, TermPtr body) {
        auto t = std::make_shared<Term>();
        t->kind = Kind::Lam;
        t->name = std::move(binder);
        t->kids = {std::move(body)};
        return t;
    }

    static TermPtr app(TermPtr fun, TermPtr arg);

    static TermPtr opn(OpHead head, std::vector<TermPtr> args) {
        auto t = std::make_shared<Term>();
        t->kind = Kind::Op;
        t->op = std::move(head);
        t->kids = std::move(args);
        return t;
    }
};

inline bool is_value(const TermPtr& t) {
    return t->kind == Term::Kind::Var || t->kind == Term::Kind::Lam;
}

inline TermPtr Term::app(TermPtr fun, TermPtr arg) {
    if (!is_value(fun))
        throw internal_error("application node built with non-value function position");
    auto t = std::make_shared<Term>();
    t->kind = Kind::App;
    t->kids = {std::move(fun), std::move(arg)};
    return t;
}

// ---------------------------------------------------------------------------
// Alpha-invariant comparison
// ---------------------------------------------------------------------------

namespace detail {

// Bound variables compare by binder depth (innermost binder = largest
// depth value recorded), free variables by name; bound sorts before free.
inline int term_cmp_rec(const TermPtr& a, const TermPtr& b,
                        std::map<std::string, int>& enva,
                        std::map<std::string, int>& envb, int depth) {
    if (a->kind != b->kind)
        return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
    switch (a->kind) {
        case Term::Kind::Var: {
            auto ia = enva.find(a->name);
            auto ib = envb.find(b->name);
            bool ba = ia != enva.end(), bb = ib != envb.end();
            if (ba != bb) return ba ? -1 : 1;
            if (ba) {
                if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
                return 0;
            }
            if (a->name != b->name) return a->name < b->name ? -1 : 1;
            return 0;
        }
        case Term::Kind::Lam: {
            auto ia = enva.find(a->name);
            auto ib = envb.find(b->name);
            int olda = ia == enva.end() ? -1 : ia->second;
            int oldb = ib == envb.end() ? -1 : ib->second;
            enva[a->name] = depth;
            envb[b->name] = depth;
            int c = term_cmp_rec(a->kids[0], b->kids[0], enva, envb, depth + 1);
            if (olda >= 0) enva[a->name] = olda; else enva.erase(a->name);
            if (oldb >= 0) envb[b->name] = oldb; else envb.erase(b->name);
            return c;
        }
        case Term::Kind::App: {
            int c = term_cmp_rec(a->kids[0], b->kids[0], enva, envb, depth);
            if (c != 0) return c;
            return term_cmp_rec(a->kids[1], b->kids[1], enva, envb, depth);
        }
        case Term::Kind::Op: {
            int c = op_head_cmp(a->op, b->op);
            if (c != 0) return c;
            if (a->kids.size() != b->kids.size())
                return a->kids.size() < b->kids.size() ? -1 : 1;
            for (std::size_t i = 0; i < a->kids.size(); ++i) {
                c = term_cmp_rec(a->kids[i], b->kids[i], enva, envb, depth);
                if (c != 0) return c;
            }
            return 0;
        }
    }
    return 0;
}

}  // namespace detail

inline int term_cmp(const TermPtr& a, const TermPtr& b) {
    if (a.get() == b.get()) return 0;
    std::map<std::string, int> enva, envb;
    return detail::term_cmp_rec(a, b, enva, envb, 0);
}

inline bool alpha_eq(const TermPtr& a, const TermPtr& b) { return term_cmp(a, b) == 0; }

// Sort key for formal sums over terms (found by argument-dependent lookup).
inline int payload_cmp(const TermPtr& a, const TermPtr& b) { return term_cmp(a, b); }

// ---------------------------------------------------------------------------
// Free variables and substitution
// ---------------------------------------------------------------------------

namespace detail {

inline void free_vars_rec(const TermPtr& t, std::set<std::string>& bound,
                          std::set<std::string>& out) {
    switch (t->kind) {
        case Term::Kind::Var:
            if (!bound.count(t->name)) out.insert(t->name);
            break;
        case Term::Kind::Lam: {
            bool fresh = bound.insert(t->name).second;
            free_vars_rec(t->kids[0], bound, out);
            if (fresh) bound.erase(t->name);
            break;
        }
        default:
            for (const auto& k : t->kids) free_vars_rec(k, bound, out);
    }
}

}  // namespace detail

inline std::set<std::string> free_vars(const TermPtr& t) {
    std::set<std::string> bound, out;
    detail::free_vars_rec(t, bound, out);
    return out;
}

inline bool is_closed(const TermPtr& t) { return free_vars(t).empty(); }

// Path from a subterm's root to a node, as child indices.
using Path = std::vector<int>;

namespace detail {

inline std::string rename_fresh(const std::string& base, const std::set<std::string>& avoid) {
    for (int i = 0;; ++i) {
        std::string cand = "%r" + std::to_string(i) + base;
        if (!avoid.count(cand)) return cand;
    }
}

// Substitution that records the path of every replaced occurrence of x,
// relative to the root of `t`.  Capture is avoided by renaming binders
// that would trap a free variable of the replacement.
inline TermPtr subst_rec(const TermPtr& t, const std::string& x, const TermPtr& v,
                         const std::set<std::string>& fv_v, Path& here,
                         std::vector<Path>* paths) {
    switch (t->kind) {
        case Term::Kind::Var:
            if (t->name == x) {
                if (paths) paths->push_back(here);
                return v;
            }
            return t;
        case Term::Kind::Lam: {
            if (t->name == x) return t;  // x shadowed: no free occurrences below
            TermPtr body = t->kids[0];
            std::string binder = t->name;
            if (fv_v.count(binder)) {
                std::set<std::string> avoid = free_vars(body);
                avoid.insert(fv_v.begin(), fv_v.end());
                avoid.insert(x);
                std::string nb = rename_fresh(binder, avoid);
                Path dummy;
                body = subst_rec(body, binder, Term::var(nb), {}, dummy, nullptr);
                binder = nb;
            }
            here.push_back(0);
            TermPtr nbody = subst_rec(body, x, v, fv_v, here, paths);
            here.pop_back();
            if (nbody.get() == t->kids[0].get() && binder == t->name) return t;
            return Term::lam(binder, nbody);
        }
        case Term::Kind::App: {
            here.push_back(0);
            TermPtr f = subst_rec(t->kids[0], x, v, fv_v, here, paths);
            here.back() = 1;
            TermPtr a = subst_rec(t->kids[1], x, v, fv_v, here, paths);
            here.pop_back();
            if (f.get() == t->kids[0].get() && a.get() == t->kids[1].get()) return t;
            return Term::app(f, a);
        }
        case Term::Kind::Op: {
            std::vector<TermPtr> kids;
            kids.reserve(t->kids.size());
            bool same = true;
            for (std::size_t i = 0; i < t->kids.size(); ++i) {
                here.push_back(static_cast<int>(i));
                kids.push_back(subst_rec(t->kids[i], x, v, fv_v, here, paths));
                here.pop_back();
                same = same && kids.back().get() == t->kids[i].get();
            }
            if (same) return t;
            return Term::opn(t->op, std::move(kids));
        }
    }
    throw internal_error("unreachable term kind in substitution");
}

}  // namespace detail

inline TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& v) {
    Path here;
    return detail::subst_rec(t, x, v, free_vars(v), here, nullptr);
}

struct TrackedSubst {
    TermPtr result;
    std::vector<Path> paths;  // positions in `result` where the copy landed
};

inline TrackedSubst substitute_tracked(const TermPtr& t, const std::string& x,
                                       const TermPtr& v) {
    TrackedSubst out;
    Path here;
    out.result = detail::subst_rec(t, x, v, free_vars(v), here, &out.paths);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation contexts
// ---------------------------------------------------------------------------

// A closed computation decomposes uniquely as E[focus] where E is a stack
// of value frames v1<v2<...<.>>> (outermost first) and the focus is a
// value, a beta redex, or an operation call.
enum class FocusKind { Value, Beta, OpCall };

struct EvalSplit {
    std::vector<TermPtr> frames;  // outermost first
    TermPtr focus;
    FocusKind kind;
};

inline EvalSplit decompose(const TermPtr& t) {
    EvalSplit out;
    TermPtr cur = t;
    for (;;) {
        if (is_value(cur)) {
            out.focus = cur;
            out.kind = FocusKind::Value;
            return out;
        }
        if (cur->kind == Term::Kind::Op) {
            out.focus = cur;
            out.kind = FocusKind::OpCall;
            return out;
        }
        // Application: argument value means beta redex, otherwise push the
        // function value as a frame and keep walking down the argument.
        const TermPtr& arg = cur->kids[1];
        if (is_value(arg)) {
            out.focus = cur;
            out.kind = FocusKind::Beta;
            return out;
        }
        out.frames.push_back(cur->kids[0]);
        cur = arg;
    }
}

inline TermPtr plug(const std::vector<TermPtr>& frames, TermPtr focus) {
    TermPtr cur = std::move(focus);
    for (auto it = frames.rbegin(); it != frames.rend(); ++it)
        cur = Term::app(*it, cur);
    return cur;
}

}  // namespace mint
