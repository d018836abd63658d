#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mint/error.hpp"
#include "mint/monad_spec.hpp"
#include "mint/semantics.hpp"
#include "mint/syntax.hpp"
#include "mint/term.hpp"
#include "mint/types.hpp"

namespace mint {

// Whether derivations may use the bottom rule.  Finitary derivations are
// finite proofs of exact convergence; infinitary mode additionally allows
// bottom leaves, which stand for unexplored (possibly diverging) subtrees
// and make every type an under-approximation of the semantics.
enum class Mode { Finitary, Infinitary };

inline Mode parse_mode(const std::string& s) {
    if (s == "finitary") return Mode::Finitary;
    if (s == "infinitary") return Mode::Infinitary;
    throw parse_error("unknown mode '" + s + "' (expected finitary or infinitary)");
}

inline std::string to_string(Mode m) {
    return m == Mode::Finitary ? "finitary" : "infinitary";
}

// ---------------------------------------------------------------------------
// Derivation trees
// ---------------------------------------------------------------------------
//
// Judgments come in three forms, distinguished by the assigned type:
//   value at a value type          (rules var, abs)
//   value at an intersection      (rule int; premises cover the members)
//   computation at a monadic type (rules unit, app, op, bot)
//
// The app rule for  v t  keeps one computation premise for t at N and a
// table of value premises, one per intersection key, deriving v at
// key -> M_key; the assigned type is the type-level Kleisli extension.

struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

using Assigned = std::variant<ValueType, Intersection, MonadicType>;

struct TableEntry {
    Intersection key;
    DerivPtr fun;  // value judgment: fun : key -> M_key
};

struct Derivation {
    enum class Rule { Var, Int, Unit, Abs, App, Op, Bot };

    Rule rule;
    TypeEnv env;
    TermPtr subject;
    Assigned assigned;
    std::vector<DerivPtr> premises;   // everything except the app table
    std::vector<TableEntry> table;    // app only, sorted by key

    const ValueType& vtype() const { return std::get<ValueType>(assigned); }
    const Intersection& itype() const { return std::get<Intersection>(assigned); }
    const MonadicType& mtype() const { return std::get<MonadicType>(assigned); }
};

inline const char* rule_name(Derivation::Rule r) {
    switch (r) {
        case Derivation::Rule::Var: return "var";
        case Derivation::Rule::Int: return "int";
        case Derivation::Rule::Unit: return "unit";
        case Derivation::Rule::Abs: return "abs";
        case Derivation::Rule::App: return "app";
        case Derivation::Rule::Op: return "op";
        case Derivation::Rule::Bot: return "bot";
    }
    return "?";
}

// --- construction helpers (inference builds trees with these) -------------

inline DerivPtr mk_var(TypeEnv env, TermPtr x, ValueType a) {
    auto d = std::make_shared<Derivation>();
    d->rule = Derivation::Rule::Var;
    d->env = std::move(env);
    d->subject = std::move(x);
    d->assigned = std::move(a);
    return d;
}

inline DerivPtr mk_int(TypeEnv env, TermPtr v, Intersection i, std::vector<DerivPtr> prem) {
    auto d = std::make_shared<Derivation>();
    d->rule = Derivation::Rule::Int;
    d->env = std::move(env);
    d->subject = std::move(v);
    d->assigned = std::move(i);
    d->premises = std::move(prem);
    return d;
}

inline DerivPtr mk_unit(TypeEnv env, TermPtr v, MonadicType m, DerivPtr int_premise) {
    auto d = std::make_shared<Derivation>();
    d->rule = Derivation::Rule::Unit;
    d->env = std::move(env);
    d->subject = std::move(v);
    d->assigned = std::move(m);
    d->premises = {std::move(int_premise)};
    return d;
}

inline DerivPtr mk_abs(TypeEnv env, TermPtr lam, ValueType a, DerivPtr body) {
    auto d = std::make_shared<Derivation>();
    d->rule = Derivation::Rule::Abs;
    d->env = std::move(env);
    d->subject = std::move(lam);
    d->assigned = std::move(a);
    d->premises = {std::move(body)};
    return d;
}

inline DerivPtr mk_app(TypeEnv env, TermPtr app, MonadicType m, DerivPtr arg,
                       std::vector<TableEntry> table) {
    auto d = std::make_shared<Derivation>();
    d->rule = Derivation::Rule::App;
    d->env = std::move(env);
    d->subject = std::move(app);
    d->assigned = std::move(m);
    d->premises = {std::move(arg)};
    std::sort(table.begin(), table.end(), [](const TableEntry& a, const TableEntry& b) {
        return intersection_cmp(a.key, b.key) < 0;
    });
    d->table = std::move(table);
    return d;
}

inline DerivPtr mk_op(TypeEnv env, TermPtr opterm, MonadicType m, std::vector<DerivPtr> prem) {
    auto d = std::make_shared<Derivation>();
    d->rule = Derivation::Rule::Op;
    d->env = std::move(env);
    d->subject = std::move(opterm);
    d->assigned = std::move(m);
    d->premises = std::move(prem);
    return d;
}

inline DerivPtr mk_bot(TypeEnv env, TermPtr t) {
    auto d = std::make_shared<Derivation>();
    d->rule = Derivation::Rule::Bot;
    d->env = std::move(env);
    d->subject = std::move(t);
    d->assigned = MonadicType{};
    return d;
}

// ---------------------------------------------------------------------------
// Checking
// ---------------------------------------------------------------------------

namespace detail {

[[noreturn]] inline void check_fail(const std::string& path, const std::string& msg) {
    throw domain_error("at node " + (path.empty() ? "/" : path) + ": " + msg);
}

inline TypeEnv normalize_env(const TypeEnv& env) {
    TypeEnv out;
    for (const auto& [x, i] : env)
        if (!i.empty()) out[x] = i;
    return out;
}

inline bool env_eq(const TypeEnv& a, const TypeEnv& b) {
    TypeEnv na = normalize_env(a), nb = normalize_env(b);
    if (na.size() != nb.size()) return false;
    auto it = nb.begin();
    for (const auto& [x, i] : na) {
        if (it->first != x || intersection_cmp(it->second, i) != 0) return false;
        ++it;
    }
    return true;
}

// Recursively validates grades and weight discipline of a monadic type and
// everything nested inside it.
inline void validate_value_type(const MonadSpec& spec, const ValueType& a, Mode mode,
                                const std::string& path);

inline void validate_monadic(const MonadSpec& spec, const MonadicType& m, Mode mode,
                             const std::string& path) {
    bool allow_empty = mode == Mode::Infinitary;
    if (!discipline_ok(spec, m, allow_empty))
        check_fail(path, "monadic type violates the weight discipline of monad '" +
                             spec.selector + "': " + to_string(m));
    for (const auto& b : m.branches())
        for (const ValueType& a : b.payload.members) validate_value_type(spec, a, mode, path);
}

inline void validate_value_type(const MonadSpec& spec, const ValueType& a, Mode mode,
                                const std::string& path) {
    for (const ValueType& d : a.domain.members) validate_value_type(spec, d, mode, path);
    // Codomains under an arrow may always be partial: they describe what
    // applying the value yields when run, and bottoms there are just
    // uninformative entries, harmless even in finitary derivations as long
    // as they are never used to justify convergence.  Grades and weights
    // must still fit the monad.
    if (!discipline_ok(spec, a.codomain, true))
        check_fail(path, "arrow codomain violates the weight discipline of monad '" +
                             spec.selector + "': " + to_string(a.codomain));
    for (const auto& b : a.codomain.branches())
        for (const ValueType& m : b.payload.members) validate_value_type(spec, m, mode, path);
}

inline void check_rec(const MonadSpec& spec, Mode mode, const DerivPtr& d,
                      const std::string& path);

inline void check_value_judgment(const MonadSpec& spec, Mode mode, const DerivPtr& d,
                                 const TermPtr& expect_subject, const std::string& path) {
    if (!std::holds_alternative<ValueType>(d->assigned))
        check_fail(path, "expected a value judgment (var or abs)");
    if (!alpha_eq(d->subject, expect_subject))
        check_fail(path, "premise subject mismatch: expected " + to_string(expect_subject) +
                             ", found " + to_string(d->subject));
    check_rec(spec, mode, d, path);
}

inline void check_rec(const MonadSpec& spec, Mode mode, const DerivPtr& d,
                      const std::string& path) {
    switch (d->rule) {
        case Derivation::Rule::Var: {
            if (d->subject->kind != Term::Kind::Var)
                check_fail(path, "var rule on a non-variable subject");
            if (!std::holds_alternative<ValueType>(d->assigned))
                check_fail(path, "var rule must assign a value type");
            if (!d->premises.empty()) check_fail(path, "var rule takes no premises");
            validate_value_type(spec, d->vtype(), mode, path);
            Intersection have = env_lookup(d->env, d->subject->name);
            bool member = false;
            for (const ValueType& a : have.members)
                if (value_type_cmp(a, d->vtype()) == 0) { member = true; break; }
            if (!member)
                check_fail(path, "environment does not grant " + d->subject->name + " : " +
                                     to_string(d->vtype()));
            return;
        }
        case Derivation::Rule::Int: {
            if (!is_value(d->subject)) check_fail(path, "int rule on a non-value subject");
            if (!std::holds_alternative<Intersection>(d->assigned))
                check_fail(path, "int rule must assign an intersection");
            const Intersection& i = d->itype();
            if (d->premises.size() != i.size())
                check_fail(path, "int rule needs exactly one premise per member (" +
                                     std::to_string(i.size()) + " expected, " +
                                     std::to_string(d->premises.size()) + " given)");
            std::vector<ValueType> derived;
            for (std::size_t k = 0; k < d->premises.size(); ++k) {
                const DerivPtr& p = d->premises[k];
                std::string sub = path + "/premises/" + std::to_string(k);
                check_value_judgment(spec, mode, p, d->subject, sub);
                if (!env_eq(p->env, d->env)) check_fail(sub, "premise environment mismatch");
                derived.push_back(p->vtype());
            }
            if (intersection_cmp(Intersection::make(derived), i) != 0)
                check_fail(path, "premises do not cover exactly the members of " + to_string(i));
            return;
        }
        case Derivation::Rule::Unit: {
            if (!is_value(d->subject)) check_fail(path, "unit rule on a non-value subject");
            if (!std::holds_alternative<MonadicType>(d->assigned))
                check_fail(path, "unit rule must assign a monadic type");
            if (d->premises.size() != 1) check_fail(path, "unit rule takes one premise");
            const DerivPtr& p = d->premises[0];
            if (p->rule != Derivation::Rule::Int)
                check_fail(path + "/premises/0", "unit premise must be an int judgment");
            if (!alpha_eq(p->subject, d->subject))
                check_fail(path + "/premises/0", "premise subject mismatch");
            if (!env_eq(p->env, d->env))
                check_fail(path + "/premises/0", "premise environment mismatch");
            check_rec(spec, mode, p, path + "/premises/0");
            validate_monadic(spec, d->mtype(), mode, path);
            MonadicType expect = monad_eta(spec, p->itype());
            if (!type_eq(d->mtype(), expect))
                check_fail(path, "unit rule must assign " + to_string(expect) + ", found " +
                                     to_string(d->mtype()));
            return;
        }
        case Derivation::Rule::Abs: {
            if (d->subject->kind != Term::Kind::Lam)
                check_fail(path, "abs rule on a non-abstraction subject");
            if (!std::holds_alternative<ValueType>(d->assigned))
                check_fail(path, "abs rule must assign a value type");
            if (d->premises.size() != 1) check_fail(path, "abs rule takes one premise");
            validate_value_type(spec, d->vtype(), mode, path);
            const DerivPtr& p = d->premises[0];
            std::string sub = path + "/premises/0";
            if (!std::holds_alternative<MonadicType>(p->assigned))
                check_fail(sub, "abs premise must be a computation judgment");
            if (!alpha_eq(p->subject, d->subject->kids[0]))
                check_fail(sub, "abs premise must type the abstraction body");
            if (!env_eq(p->env, env_extend(d->env, d->subject->name, d->vtype().domain)))
                check_fail(sub, "abs premise must extend the environment with " +
                                    d->subject->name + " : " + to_string(d->vtype().domain));
            check_rec(spec, mode, p, sub);
            if (!type_eq(d->vtype().codomain, p->mtype()))
                check_fail(path, "abs codomain " + to_string(d->vtype().codomain) +
                                     " differs from body type " + to_string(p->mtype()));
            return;
        }
        case Derivation::Rule::App: {
            if (d->subject->kind != Term::Kind::App)
                check_fail(path, "app rule on a non-application subject");
            if (!std::holds_alternative<MonadicType>(d->assigned))
                check_fail(path, "app rule must assign a monadic type");
            if (d->premises.size() != 1)
                check_fail(path, "app rule takes exactly one computation premise");
            const TermPtr& fun = d->subject->kids[0];
            const TermPtr& arg = d->subject->kids[1];
            const DerivPtr& parg = d->premises[0];
            std::string argpath = path + "/arg";
            if (!std::holds_alternative<MonadicType>(parg->assigned))
                check_fail(argpath, "argument premise must be a computation judgment");
            if (!alpha_eq(parg->subject, arg))
                check_fail(argpath, "argument premise subject mismatch");
            if (!env_eq(parg->env, d->env)) check_fail(argpath, "premise environment mismatch");
            check_rec(spec, mode, parg, argpath);
            const MonadicType& n = parg->mtype();
            AppTable table;
            for (std::size_t k = 0; k < d->table.size(); ++k) {
                const TableEntry& e = d->table[k];
                std::string epath = path + "/table/" + std::to_string(k);
                if (table.count(e.key))
                    check_fail(epath, "duplicate table key " + to_string(e.key));
                check_value_judgment(spec, mode, e.fun, fun, epath + "/fun");
                if (!env_eq(e.fun->env, d->env))
                    check_fail(epath + "/fun", "premise environment mismatch");
                const ValueType& a = e.fun->vtype();
                if (intersection_cmp(a.domain, e.key) != 0)
                    check_fail(epath, "table key " + to_string(e.key) +
                                          " does not match premise domain " +
                                          to_string(a.domain));
                table[e.key] = a.codomain;
            }
            for (const Intersection& i : n.support())
                if (!table.count(i))
                    check_fail(path, "argument type has uncovered support " + to_string(i));
            MonadicType expect = type_bind(n, table);
            validate_monadic(spec, d->mtype(), mode, path);
            if (!type_eq(d->mtype(), expect))
                check_fail(path, "app rule must assign " + to_string(expect) + ", found " +
                                     to_string(d->mtype()));
            return;
        }
        case Derivation::Rule::Op: {
            if (d->subject->kind != Term::Kind::Op)
                check_fail(path, "op rule on a non-operation subject");
            if (!std::holds_alternative<MonadicType>(d->assigned))
                check_fail(path, "op rule must assign a monadic type");
            const OpHead& head = d->subject->op;
            try {
                validate_op(spec, head, d->subject->kids.size());
            } catch (const MintError& e) {
                check_fail(path, e.what());
            }
            if (d->premises.size() != d->subject->kids.size())
                check_fail(path, "op rule needs one premise per operand");
            std::vector<MonadicType> args;
            for (std::size_t k = 0; k < d->premises.size(); ++k) {
                const DerivPtr& p = d->premises[k];
                std::string sub = path + "/premises/" + std::to_string(k);
                if (!std::holds_alternative<MonadicType>(p->assigned))
                    check_fail(sub, "op premise must be a computation judgment");
                if (!alpha_eq(p->subject, d->subject->kids[k]))
                    check_fail(sub, "premise subject mismatch");
                if (!env_eq(p->env, d->env)) check_fail(sub, "premise environment mismatch");
                check_rec(spec, mode, p, sub);
                args.push_back(p->mtype());
            }
            MonadicType expect = apply_op(spec, head, args);
            validate_monadic(spec, d->mtype(), mode, path);
            if (!type_eq(d->mtype(), expect))
                check_fail(path, "op rule must assign " + to_string(expect) + ", found " +
                                     to_string(d->mtype()));
            return;
        }
        case Derivation::Rule::Bot: {
            if (mode != Mode::Infinitary)
                check_fail(path, "bot rule is only available in infinitary mode");
            if (!std::holds_alternative<MonadicType>(d->assigned))
                check_fail(path, "bot rule must assign a monadic type");
            if (!d->mtype().empty())
                check_fail(path, "bot rule assigns the empty monadic type, found " +
                                     to_string(d->mtype()));
            if (!d->premises.empty()) check_fail(path, "bot rule takes no premises");
            return;
        }
    }
    check_fail(path, "unknown rule");
}

}  // namespace detail

// Validates an entire derivation; throws a domain error naming the failing
// node by its path.
inline void check(const MonadSpec& spec, Mode mode, const DerivPtr& d) {
    detail::check_rec(spec, mode, d, "");
}

// ---------------------------------------------------------------------------
// Monadic judgments (monadic elements at monadic types)
// ---------------------------------------------------------------------------
//
// The computation judgment extends along the monad structure: a monadic
// element  e = sum_i w_i.g_i.t_i  is typed at M when every branch term t_i
// is typed at some monadic M_i and the branch-scaled union
// sum_i w_i.g_i.M_i equals M.  This is the judgment one evaluation step
// preserves: stepping a typed computation yields an element typable at the
// same M, branch by branch.
//
// For a value v the judgment explains why weights pay for reuse:
// eta(v) is typable at M only when M itself is eta-shaped (the single
// premise must carry all of M), whereas a widened element such as
// {1/2 v, 1/2 v} may split v across two different intersections.
//
// Finitary mode demands the target exactly; infinitary mode accepts any
// target below what the premises assemble (the assembled sum may cover
// more branches than the target claims).

struct MonadicDerivation;
using MonadicDerivPtr = std::shared_ptr<const MonadicDerivation>;

struct MonadicDerivation {
    TypeEnv env;
    FormalSum<TermPtr> subject;      // the monadic element, in canonical form
    MonadicType target;
    std::vector<DerivPtr> premises;  // one computation judgment per branch
};

inline MonadicDerivPtr mk_monadic(TypeEnv env, FormalSum<TermPtr> subject, MonadicType target,
                                  std::vector<DerivPtr> premises) {
    auto d = std::make_shared<MonadicDerivation>();
    d->env = std::move(env);
    d->subject = std::move(subject);
    d->target = std::move(target);
    d->premises = std::move(premises);
    return d;
}

inline void check_monadic(const MonadSpec& spec, Mode mode, const MonadicDerivPtr& d,
                          const std::string& path = "") {
    detail::validate_monadic(spec, d->target, mode, path);
    const auto& bs = d->subject.branches();
    if (bs.size() != d->premises.size())
        detail::check_fail(path, "branch misalignment: " + std::to_string(bs.size()) +
                                     " subject branches, " + std::to_string(d->premises.size()) +
                                     " premises");
    MonadicType assembled;
    for (std::size_t k = 0; k < bs.size(); ++k) {
        const DerivPtr& p = d->premises[k];
        std::string sub = path + "/premises/" + std::to_string(k);
        if (!p) detail::check_fail(sub, "missing premise");
        if (!std::holds_alternative<MonadicType>(p->assigned))
            detail::check_fail(sub, "premise must be a computation judgment");
        if (!alpha_eq(p->subject, bs[k].payload))
            detail::check_fail(sub, "premise subject does not match branch " + std::to_string(k));
        if (!detail::env_eq(p->env, d->env))
            detail::check_fail(sub, "premise environment mismatch");
        detail::check_rec(spec, mode, p, sub);
        assembled = MonadicType::merged(assembled, p->mtype().scaled(bs[k].weight, bs[k].grade));
    }
    bool ok = mode == Mode::Finitary ? type_eq(d->target, assembled)
                                     : type_leq(d->target, assembled);
    if (!ok)
        detail::check_fail(path, "target " + to_string(d->target) +
                                     (mode == Mode::Finitary ? " must equal " :
                                                               " must refine to ") +
                                     to_string(assembled));
}

}  // namespace mint
