#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mint/derivation.hpp"
#include "mint/error.hpp"
#include "mint/monad_spec.hpp"
#include "mint/semantics.hpp"
#include "mint/term.hpp"
#include "mint/types.hpp"

namespace mint {

// Evaluation-guided inference: run the term for `fuel` steps, seed trivial
// types at the horizon, and reconstruct a derivation backwards through the
// trace.  One backward step per evaluation step:
//
//   value      - the derivation carries over unchanged;
//   beta       - anti-substitution: occurrences of the substituted value in
//                the contractum's derivation are harvested into an
//                intersection I and replaced by variable leaves, giving the
//                redex an application node with table {I -> M};
//   operation  - the operand derivations are combined under an op node, and
//                the surrounding context's application tables are merged
//                across the sibling branches.
//
// Merged tables can disagree on a key (same intersection, different
// monadic type) when the fuel cuts sibling branches at different depths.
// Such collisions are resolved by enriching every intersection in the
// colliding branch's argument derivation with a fresh tautological tag
// type, which renames its keys apart while leaving its assembled monadic
// type - and hence everything observable - unchanged.

namespace detail {

// --- environment rebuilding ------------------------------------------------

// Rebuilds a derivation with environments recomputed from `env` downward
// (abs premises extend at the binder).  Used after surgery that changes
// what an enclosing binder grants.
inline DerivPtr reroot_env(const DerivPtr& d, const TypeEnv& env) {
    auto out = std::make_shared<Derivation>(*d);
    out->env = env;
    if (d->rule == Derivation::Rule::Abs) {
        TypeEnv inner = env_extend(env, d->subject->name, d->vtype().domain);
        out->premises = {reroot_env(d->premises[0], inner)};
    } else {
        std::vector<DerivPtr> prem;
        prem.reserve(d->premises.size());
        for (const DerivPtr& p : d->premises) prem.push_back(reroot_env(p, env));
        out->premises = std::move(prem);
        std::vector<TableEntry> table;
        table.reserve(d->table.size());
        for (const TableEntry& e : d->table) table.push_back({e.key, reroot_env(e.fun, env)});
        out->table = std::move(table);
    }
    return out;
}

// --- seeds -----------------------------------------------------------------

// v : eta(0), the trivial unit typing every value admits.
inline DerivPtr seed_value(const MonadSpec& spec, const TermPtr& v, const TypeEnv& env) {
    return mk_unit(env, v, monad_eta(spec, Intersection{}),
                   mk_int(env, v, Intersection{}, {}));
}

// --- type depth and tautological tags ---------------------------------------

inline std::size_t depth_of(const Intersection& i);

inline std::size_t depth_of(const MonadicType& m) {
    std::size_t d = 0;
    for (const auto& b : m.branches()) d = std::max(d, depth_of(b.payload));
    return d;
}

inline std::size_t depth_of(const ValueType& a) {
    return 1 + std::max(depth_of(a.domain), depth_of(a.codomain));
}

inline std::size_t depth_of(const Intersection& i) {
    std::size_t d = 0;
    for (const ValueType& a : i.members) d = std::max(d, depth_of(a));
    return d;
}

inline std::size_t depth_of_deriv(const DerivPtr& d) {
    std::size_t m = 0;
    if (std::holds_alternative<ValueType>(d->assigned))
        m = depth_of(d->vtype());
    else if (std::holds_alternative<Intersection>(d->assigned))
        m = depth_of(d->itype());
    else
        m = depth_of(d->mtype());
    for (const auto& [x, i] : d->env) m = std::max(m, depth_of(i));
    for (const DerivPtr& p : d->premises) m = std::max(m, depth_of_deriv(p));
    for (const TableEntry& e : d->table) {
        m = std::max(m, depth_of(e.key));
        m = std::max(m, depth_of_deriv(e.fun));
    }
    return m;
}

// Tag tower: tag(0) = 0 -> bot, tag(k+1) = {tag(k)} -> bot.  Every value
// inhabits every level (via bot on the body), and a tag deeper than
// everything in scope cannot collide with any type already present.
inline ValueType make_tag(std::size_t depth) {
    ValueType t{Intersection{}, MonadicType{}};
    for (std::size_t k = 0; k < depth; ++k)
        t = ValueType{Intersection::make({t}), MonadicType{}};
    return t;
}

// Derives v : T for the tag type T.  Lambdas use abs over a bot body;
// variables must already be granted T by the environment (the enrichment
// transform arranges exactly that).
inline DerivPtr tag_premise(const TermPtr& v, const ValueType& tag, const TypeEnv& env) {
    if (v->kind == Term::Kind::Var) return mk_var(env, v, tag);
    if (v->kind != Term::Kind::Lam)
        throw internal_error("tag premise requested for a non-value");
    TypeEnv inner = env_extend(env, v->name, tag.domain);
    return mk_abs(env, v, tag, mk_bot(inner, v->kids[0]));
}

// --- payload enrichment ------------------------------------------------------

// upsilon(J) = J  u  {upsilon(A) : A in J}  u  {T}.  Keeping the original
// members makes the enriched intersection a superset, so weakened
// environment lookups still succeed; the tag keeps distinct inputs
// distinct and marks the result as fresh.
struct Enricher {
    const MonadSpec& spec;
    ValueType tag;

    Intersection enrich(const Intersection& j) const {
        std::vector<ValueType> ms = j.members;
        for (const ValueType& a : j.members) ms.push_back(enrich(a));
        ms.push_back(tag);
        return Intersection::make(std::move(ms));
    }

    ValueType enrich(const ValueType& a) const {
        return ValueType{enrich(a.domain), enrich(a.codomain)};
    }

    MonadicType enrich(const MonadicType& m) const {
        std::vector<Branch<Intersection>> bs;
        for (const auto& b : m.branches()) bs.push_back({b.weight, b.grade, enrich(b.payload)});
        return MonadicType(std::move(bs));
    }

    TypeEnv enrich_env(const TypeEnv& env) const {
        TypeEnv out;
        for (const auto& [x, i] : env) out[x] = enrich(i);
        return out;
    }

    // Rewrites a derivation so every intersection in it (environments,
    // domains, payloads, table keys) is enriched.  The subject and the
    // weight/grade structure are untouched, so the observable content of
    // the assigned type is preserved.
    DerivPtr apply(const DerivPtr& d) const {
        TypeEnv env = enrich_env(d->env);
        switch (d->rule) {
            case Derivation::Rule::Var:
                return mk_var(env, d->subject, enrich(d->vtype()));
            case Derivation::Rule::Abs:
                return mk_abs(env, d->subject, enrich(d->vtype()), apply(d->premises[0]));
            case Derivation::Rule::Int: {
                Intersection ij = enrich(d->itype());
                // One premise per enriched member: originals keep their
                // derivations (rebased to the enriched environment),
                // enriched members get the transformed derivations, and the
                // tag gets a synthesized premise.
                std::map<ValueType, DerivPtr, ValueTypeLess> by_type;
                for (const DerivPtr& p : d->premises) {
                    by_type.emplace(p->vtype(), reroot_env(p, env));
                    DerivPtr ep = apply(p);
                    by_type.emplace(ep->vtype(), ep);
                }
                by_type.emplace(tag, tag_premise(d->subject, tag, env));
                std::vector<DerivPtr> prem;
                for (const ValueType& a : ij.members) {
                    auto it = by_type.find(a);
                    if (it == by_type.end())
                        throw internal_error("enrichment lost a member premise");
                    prem.push_back(it->second);
                }
                return mk_int(env, d->subject, std::move(ij), std::move(prem));
            }
            case Derivation::Rule::Unit: {
                DerivPtr ip = apply(d->premises[0]);
                MonadicType m = monad_eta(spec, ip->itype());
                return mk_unit(env, d->subject, std::move(m), std::move(ip));
            }
            case Derivation::Rule::App: {
                DerivPtr arg = apply(d->premises[0]);
                std::vector<TableEntry> table;
                for (const TableEntry& e : d->table)
                    table.push_back({enrich(e.key), apply(e.fun)});
                AppTable map;
                for (const TableEntry& e : table) map[e.key] = e.fun->vtype().codomain;
                MonadicType m = type_bind(arg->mtype(), map);
                return mk_app(env, d->subject, std::move(m), std::move(arg), std::move(table));
            }
            case Derivation::Rule::Op: {
                std::vector<DerivPtr> prem;
                std::vector<MonadicType> ns;
                for (const DerivPtr& p : d->premises) {
                    prem.push_back(apply(p));
                    ns.push_back(prem.back()->mtype());
                }
                return mk_op(env, d->subject, apply_op(spec, d->subject->op, ns),
                             std::move(prem));
            }
            case Derivation::Rule::Bot:
                return mk_bot(env, d->subject);
        }
        throw internal_error("unreachable rule in enrichment");
    }
};

// --- anti-substitution -------------------------------------------------------

// State for one beta expansion: which result positions hold copies of the
// substituted value, and what was harvested from them.
struct BetaHarvest {
    std::set<Path> paths;
    std::string var;
    // one value derivation per distinct harvested member type
    std::map<ValueType, DerivPtr, ValueTypeLess> premises;

    void collect(const ValueType& a, const DerivPtr& deriv) { premises.emplace(a, deriv); }

    Intersection harvested() const {
        std::vector<ValueType> ms;
        for (const auto& [a, d] : premises) ms.push_back(a);
        return Intersection::make(std::move(ms));
    }
};

inline DerivPtr unsubst_value(const DerivPtr& d, const TermPtr& orig, Path& path,
                              BetaHarvest& h);

inline DerivPtr unsubst_comp(const DerivPtr& d, const TermPtr& orig, Path& path,
                             BetaHarvest& h) {
    switch (d->rule) {
        case Derivation::Rule::Bot:
            return mk_bot(d->env, orig);
        case Derivation::Rule::Unit: {
            const DerivPtr& intp = d->premises[0];
            if (h.paths.count(path)) {
                // This whole value is a substituted copy: repoint the int
                // node at the variable and harvest its member premises.
                if (orig->kind != Term::Kind::Var || orig->name != h.var)
                    throw internal_error("substitution path does not lead to the variable");
                std::vector<DerivPtr> prem;
                for (const DerivPtr& p : intp->premises) {
                    h.collect(p->vtype(), p);
                    prem.push_back(mk_var(d->env, orig, p->vtype()));
                }
                DerivPtr ni = mk_int(d->env, orig, intp->itype(), std::move(prem));
                return mk_unit(d->env, orig, d->mtype(), std::move(ni));
            }
            std::vector<DerivPtr> prem;
            for (const DerivPtr& p : intp->premises) {
                DerivPtr np = unsubst_value(p, orig, path, h);
                prem.push_back(std::move(np));
            }
            DerivPtr ni = mk_int(d->env, orig, intp->itype(), std::move(prem));
            return mk_unit(d->env, orig, d->mtype(), std::move(ni));
        }
        case Derivation::Rule::App: {
            const TermPtr& fun_orig = orig->kids[0];
            const TermPtr& arg_orig = orig->kids[1];
            path.push_back(1);
            DerivPtr arg = unsubst_comp(d->premises[0], arg_orig, path, h);
            path.back() = 0;
            bool fun_is_copy = h.paths.count(path) > 0;
            std::vector<TableEntry> table;
            for (const TableEntry& e : d->table) {
                if (fun_is_copy) {
                    if (fun_orig->kind != Term::Kind::Var || fun_orig->name != h.var)
                        throw internal_error(
                            "substitution path does not lead to the variable");
                    h.collect(e.fun->vtype(), e.fun);
                    table.push_back({e.key, mk_var(d->env, fun_orig, e.fun->vtype())});
                } else {
                    table.push_back({e.key, unsubst_value(e.fun, fun_orig, path, h)});
                }
            }
            path.pop_back();
            return mk_app(d->env, Term::app(fun_orig, arg_orig), d->mtype(), std::move(arg),
                          std::move(table));
        }
        case Derivation::Rule::Op: {
            std::vector<DerivPtr> prem;
            for (std::size_t i = 0; i < d->premises.size(); ++i) {
                path.push_back(static_cast<int>(i));
                prem.push_back(unsubst_comp(d->premises[i], orig->kids[i], path, h));
                path.pop_back();
            }
            return mk_op(d->env, Term::opn(d->subject->op, orig->kids), d->mtype(),
                         std::move(prem));
        }
        default:
            throw internal_error("value judgment where a computation judgment was expected");
    }
}

inline DerivPtr unsubst_value(const DerivPtr& d, const TermPtr& orig, Path& path,
                              BetaHarvest& h) {
    if (h.paths.count(path)) {
        if (orig->kind != Term::Kind::Var || orig->name != h.var)
            throw internal_error("substitution path does not lead to the variable");
        h.collect(d->vtype(), d);
        return mk_var(d->env, orig, d->vtype());
    }
    switch (d->rule) {
        case Derivation::Rule::Var:
            return mk_var(d->env, orig, d->vtype());
        case Derivation::Rule::Abs: {
            path.push_back(0);
            DerivPtr body = unsubst_comp(d->premises[0], orig->kids[0], path, h);
            path.pop_back();
            return mk_abs(d->env, orig, d->vtype(), std::move(body));
        }
        default:
            throw internal_error("int/computation judgment where a value premise was expected");
    }
}

// From a derivation of body{x := v} : M, builds the application node
//   (\x. body) v : M
// with table {I -> M}, where I collects the types of the copies of v.
inline DerivPtr expand_beta(const MonadSpec& spec, const DerivPtr& inner, const StepInfo& info,
                            const TypeEnv& env) {
    BetaHarvest h;
    h.paths.insert(info.paths.begin(), info.paths.end());
    h.var = info.binder;
    Path path;
    DerivPtr body = unsubst_comp(inner, info.body, path, h);
    Intersection idom = h.harvested();

    TermPtr lam = Term::lam(info.binder, info.body);
    TermPtr subject = Term::app(lam, info.arg);
    const MonadicType& m = inner->mtype();

    DerivPtr abs_node = mk_abs(env, lam, ValueType{idom, m},
                               reroot_env(body, env_extend(env, info.binder, idom)));

    std::vector<DerivPtr> int_prem;
    for (const ValueType& a : idom.members) {
        auto it = h.premises.find(a);
        if (it == h.premises.end()) throw internal_error("missing harvested premise");
        int_prem.push_back(reroot_env(it->second, env));
    }
    DerivPtr arg_unit = mk_unit(env, info.arg, monad_eta(spec, idom),
                                mk_int(env, info.arg, idom, std::move(int_prem)));

    return mk_app(env, subject, m, std::move(arg_unit), {{idom, abs_node}});
}

// --- spine surgery -----------------------------------------------------------

inline AppTable table_to_map(const std::vector<TableEntry>& table) {
    AppTable out;
    for (const TableEntry& e : table) out[e.key] = e.fun->vtype().codomain;
    return out;
}

// Widens the domain of an abs-derived table premise; the body derivation
// is revalidated under the widened binder by environment weakening.
inline DerivPtr widen_fun_domain(const DerivPtr& fun, const Intersection& newdom) {
    if (fun->rule != Derivation::Rule::Abs)
        throw internal_error("table premise on the evaluation spine must be an abstraction");
    ValueType a{newdom, fun->vtype().codomain};
    TypeEnv inner = env_extend(fun->env, fun->subject->name, newdom);
    return mk_abs(fun->env, fun->subject, std::move(a),
                  reroot_env(fun->premises[0], inner));
}

// Replaces the argument spine of an application node after enriching it:
// keys move to their enriched forms, premises are widened, and the
// assigned type stays exactly what it was.
inline DerivPtr fix_collision(const MonadSpec& spec, const DerivPtr& app_node,
                              const ValueType& tag) {
    Enricher en{spec, tag};
    DerivPtr arg = en.apply(app_node->premises[0]);
    std::vector<TableEntry> table;
    for (const TableEntry& e : app_node->table)
        table.push_back({en.enrich(e.key), widen_fun_domain(e.fun, en.enrich(e.key))});
    DerivPtr out = mk_app(app_node->env, app_node->subject, app_node->mtype(), std::move(arg),
                          table);
    if (!type_eq(out->mtype(), type_bind(out->premises[0]->mtype(), table_to_map(out->table))))
        throw internal_error("enrichment changed an assembled type");
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Inference proper
// ---------------------------------------------------------------------------

namespace detail {

class Inferencer {
  public:
    Inferencer(const MonadSpec& spec, Mode mode) : spec_(spec), mode_(mode) {}

    DerivPtr reconstruct(const TraceNodePtr& node) {
        if (node->info.kind == StepInfo::Kind::Horizon) return seed(node->term);
        switch (node->info.kind) {
            case StepInfo::Kind::Value:
                return reconstruct(node->children[0].node);
            case StepInfo::Kind::Beta:
                return reconstruct_beta(node);
            case StepInfo::Kind::Op:
                return reconstruct_op(node);
            default:
                throw internal_error("unknown step kind");
        }
    }

  private:
    const MonadSpec& spec_;
    Mode mode_;
    std::size_t tag_floor_ = 0;

    DerivPtr seed(const TermPtr& t) {
        if (is_value(t)) return seed_value(spec_, t, {});
        if (mode_ == Mode::Infinitary) return mk_bot({}, t);
        throw internal_error("finitary reconstruction reached an unconverged horizon");
    }

    // Walks `levels` application nodes down the argument spine, checking
    // the frame values on the way; returns the node at each level.  A bot
    // node ends the walk early (everything below is unexplored).
    std::vector<DerivPtr> walk_spine(const DerivPtr& d, const std::vector<TermPtr>& frames) {
        std::vector<DerivPtr> nodes;
        DerivPtr cur = d;
        for (std::size_t j = 0; j < frames.size(); ++j) {
            if (cur->rule == Derivation::Rule::Bot) break;
            if (cur->rule != Derivation::Rule::App ||
                !alpha_eq(cur->subject->kids[0], frames[j]))
                throw internal_error("derivation spine does not match the evaluation context");
            nodes.push_back(cur);
            cur = cur->premises[0];
        }
        nodes.push_back(cur);  // the focus derivation (or a bot cut)
        return nodes;
    }

    // Rebuilds the application spine around a new focus derivation using
    // the given per-level tables.
    DerivPtr wrap_frames(const std::vector<TermPtr>& frames,
                         const std::vector<std::vector<TableEntry>>& tables, DerivPtr focus) {
        DerivPtr cur = std::move(focus);
        for (std::size_t j = frames.size(); j-- > 0;) {
            TermPtr subject = Term::app(frames[j], cur->subject);
            MonadicType m = type_bind(cur->mtype(), table_to_map(tables[j]));
            cur = mk_app({}, std::move(subject), std::move(m), std::move(cur), tables[j]);
        }
        return cur;
    }

    DerivPtr reconstruct_beta(const TraceNodePtr& node) {
        DerivPtr child = reconstruct(node->children[0].node);
        const std::vector<TermPtr>& frames = node->info.frames;
        std::vector<DerivPtr> spine = walk_spine(child, frames);
        DerivPtr inner = spine.back();
        std::size_t walked = spine.size() - 1;  // app levels actually present

        DerivPtr focus;
        if (inner->rule == Derivation::Rule::Bot && walked < frames.size()) {
            // The spine was cut by a bot above the focus; the whole redex
            // stays unexplored at this level.
            focus = mk_bot({}, plug_suffix(frames, walked, beta_subject(node->info)));
        } else {
            focus = expand_beta(spec_, inner, node->info, {});
        }

        std::vector<std::vector<TableEntry>> tables;
        for (std::size_t j = 0; j < walked; ++j) tables.push_back(spine[j]->table);
        std::vector<TermPtr> kept(frames.begin(), frames.begin() + walked);
        return wrap_frames(kept, tables, std::move(focus));
    }

    static TermPtr beta_subject(const StepInfo& info) {
        return Term::app(Term::lam(info.binder, info.body), info.arg);
    }

    static TermPtr plug_suffix(const std::vector<TermPtr>& frames, std::size_t from,
                               TermPtr focus) {
        TermPtr cur = std::move(focus);
        for (std::size_t j = frames.size(); j-- > from;) cur = Term::app(frames[j], cur);
        return cur;
    }

    DerivPtr reconstruct_op(const TraceNodePtr& node) {
        const std::vector<TermPtr>& frames = node->info.frames;
        const std::vector<TermPtr>& operands = node->info.op_args;
        std::size_t k = frames.size();
        std::size_t n = operands.size();

        // Child derivations; null for erased branches.
        std::vector<DerivPtr> kids(n);
        for (std::size_t i = 0; i < n; ++i)
            if (node->children[i].node) kids[i] = reconstruct(node->children[i].node);

        // Merge the context tables level by level, from the outermost
        // frame inward.  cur[i] tracks sibling i's remaining suffix.
        std::vector<DerivPtr> cur = kids;
        std::vector<std::vector<TableEntry>> merged(k);
        for (std::size_t j = 0; j < k; ++j) {
            AppTable seen;  // key -> codomain already merged at this level
            for (std::size_t i = 0; i < n; ++i) {
                if (!cur[i] || cur[i]->rule == Derivation::Rule::Bot) continue;
                if (cur[i]->rule != Derivation::Rule::App ||
                    !alpha_eq(cur[i]->subject->kids[0], frames[j]))
                    throw internal_error(
                        "derivation spine does not match the evaluation context");
                for (bool retry = true; retry;) {
                    retry = false;
                    const MonadicType& narg = cur[i]->premises[0]->mtype();
                    std::vector<Intersection> live = narg.support();
                    for (const TableEntry& e : cur[i]->table) {
                        bool is_live = false;
                        for (const Intersection& s : live)
                            if (intersection_cmp(s, e.key) == 0) { is_live = true; break; }
                        if (!is_live) continue;  // pruned
                        auto it = seen.find(e.key);
                        if (it == seen.end()) {
                            seen[e.key] = e.fun->vtype().codomain;
                            merged[j].push_back(e);
                        } else if (!type_eq(it->second, e.fun->vtype().codomain)) {
                            // Live collision: enrich this sibling apart.
                            if (mode_ == Mode::Finitary)
                                throw internal_error(
                                    "table collision in finitary reconstruction");
                            cur[i] = fix_collision(spec_, cur[i], fresh_tag(cur, merged));
                            retry = true;
                            break;
                        }
                        // equal entry: shared, nothing to add
                    }
                }
                cur[i] = cur[i]->premises[0];
            }
        }

        // Operand premises: each sibling's spine now rests at its operand.
        std::vector<DerivPtr> prem(n);
        std::vector<MonadicType> ns(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!cur[i] || cur[i]->rule == Derivation::Rule::Bot) {
                if (mode_ == Mode::Finitary)
                    throw internal_error("finitary reconstruction lost an operand branch");
                prem[i] = mk_bot({}, operands[i]);
            } else {
                if (!alpha_eq(cur[i]->subject, operands[i]))
                    throw internal_error("operand derivation does not match the operand");
                prem[i] = cur[i];
            }
            ns[i] = prem[i]->mtype();
        }

        TermPtr op_term = Term::opn(node->info.op, operands);
        DerivPtr op_node =
            mk_op({}, std::move(op_term), apply_op(spec_, node->info.op, ns), std::move(prem));
        return wrap_frames(frames, merged, std::move(op_node));
    }

    // A tag type strictly deeper than anything currently in play.
    ValueType fresh_tag(const std::vector<DerivPtr>& cur,
                        const std::vector<std::vector<TableEntry>>& merged) {
        std::size_t scope = tag_floor_;
        for (const DerivPtr& d : cur)
            if (d) scope = std::max(scope, depth_of_deriv(d));
        for (const auto& level : merged)
            for (const TableEntry& e : level) {
                scope = std::max(scope, depth_of(e.key));
                scope = std::max(scope, depth_of_deriv(e.fun));
            }
        tag_floor_ = scope + 2;
        return make_tag(scope + 1);
    }
};

}  // namespace detail

// Infers a derivation for the closed computation `t` by evaluating for at
// most `fuel` steps and reconstructing backwards.  In finitary mode the
// term must fully converge within the fuel; in infinitary mode cut
// branches become bot leaves and the result types an approximant.
inline DerivPtr infer(const MonadSpec& spec, Mode mode, const TermPtr& t, std::size_t fuel) {
    if (spec.erasing && mode == Mode::Finitary)
        throw domain_error("erasing choice biases require infinitary mode");
    if (!is_closed(t)) throw domain_error("term must be closed: " + to_string(t));

    std::size_t depth;
    if (mode == Mode::Finitary) {
        std::optional<std::size_t> k = converges(spec, t, fuel);
        if (!k)
            throw domain_error("term is not finitely convergent within fuel " +
                               std::to_string(fuel) + ": " + to_string(t));
        depth = *k;
    } else {
        if (fuel == 0) return mk_bot({}, t);
        // run() stops as soon as a layer is all values, so its last layer
        // index is always the useful trace depth.
        depth = run(spec, t, fuel).layers.size() - 1;
    }

    TraceNodePtr trace = build_trace(spec, t, depth);
    detail::Inferencer inf(spec, mode);
    return inf.reconstruct(trace);
}

}  // namespace mint
