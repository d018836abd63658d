#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mint/error.hpp"
#include "mint/formal_sum.hpp"
#include "mint/monad_spec.hpp"
#include "mint/syntax.hpp"
#include "mint/term.hpp"

namespace mint {

// Small-step semantics over a bundled monad.  A closed computation
// decomposes as E[focus]; the focus steps to a formal sum of computations
// and the context is pushed back onto every branch:
//
//   (\x. t) v   ~>  eta(t{x := v})
//   op(t1..tn)  ~>  g_op(eta(t1), .., eta(tn))
//   v           ~>  eta(v)
//
// Iterating the induced Kleisli map yields the layer sequence e_0, e_1, ...
// whose value part is the approximate semantics.

// How a single occurrence stepped; enough detail to reconstruct a typing
// derivation backwards from the step.
struct StepInfo {
    enum class Kind { Value, Beta, Op, Horizon };
    Kind kind = Kind::Horizon;

    std::vector<TermPtr> frames;  // evaluation context, outermost first

    // Beta: focus was (\binder. body) arg
    std::string binder;
    TermPtr body;
    TermPtr arg;
    std::vector<Path> paths;  // occurrences of arg in the post-step focus

    // Op: focus was op(args...)
    OpHead op;
    std::vector<TermPtr> op_args;
};

// One branch of a step result before flattening.  A null node marks an
// operand erased by a weight-zero scaling (possible only with the
// test-only erasing choice biases).
struct TraceNode;
using TraceNodePtr = std::shared_ptr<TraceNode>;

struct TraceChild {
    Rational weight;
    Grade grade;
    TraceNodePtr node;  // null iff weight == 0 (erased)
    TermPtr term;       // the child computation (set even when erased)
};

struct TraceNode {
    TermPtr term;
    StepInfo info;
    std::vector<TraceChild> children;  // empty iff info.kind == Horizon
};

namespace detail {

// Weight and grade each operand position contributes, mirroring apply_op
// on eta-lifted arguments.
inline std::vector<std::pair<Rational, Grade>> op_scales(const MonadSpec& spec,
                                                         const OpHead& head,
                                                         std::size_t arity) {
    validate_op(spec, head, arity);
    Grade unit = grade_unit(spec.grade);
    if (head.name == "tick") return {{Rational(1), Grade::of_cost(1)}};
    if (head.name == "out") return {{Rational(1), Grade::of_word(*head.word)}};
    if (head.name == "choice") return {{*head.prob, unit}, {Rational(1) - *head.prob, unit}};
    std::vector<std::pair<Rational, Grade>> out(arity, {Rational(1), unit});
    return out;  // amb
}

}  // namespace detail

// Steps the focus of `t` once and describes the result branch by branch.
// The returned children carry the full computations (context re-plugged).
inline std::pair<StepInfo, std::vector<TraceChild>> step_once(const MonadSpec& spec,
                                                              const TermPtr& t) {
    EvalSplit split = decompose(t);
    StepInfo info;
    info.frames = split.frames;
    std::vector<TraceChild> kids;
    switch (split.kind) {
        case FocusKind::Value: {
            info.kind = StepInfo::Kind::Value;
            kids.push_back({Rational(1), grade_unit(spec.grade), nullptr, t});
            break;
        }
        case FocusKind::Beta: {
            const TermPtr& fun = split.focus->kids[0];
            const TermPtr& arg = split.focus->kids[1];
            if (fun->kind != Term::Kind::Lam)
                throw internal_error("stuck application head in closed term: " + to_string(t));
            info.kind = StepInfo::Kind::Beta;
            info.binder = fun->name;
            info.body = fun->kids[0];
            info.arg = arg;
            TrackedSubst sub = substitute_tracked(fun->kids[0], fun->name, arg);
            info.paths = std::move(sub.paths);
            kids.push_back({Rational(1), grade_unit(spec.grade), nullptr,
                            plug(split.frames, sub.result)});
            break;
        }
        case FocusKind::OpCall: {
            info.kind = StepInfo::Kind::Op;
            info.op = split.focus->op;
            info.op_args = split.focus->kids;
            auto scales = detail::op_scales(spec, split.focus->op, split.focus->kids.size());
            for (std::size_t i = 0; i < scales.size(); ++i) {
                kids.push_back({scales[i].first, scales[i].second, nullptr,
                                plug(split.frames, split.focus->kids[i])});
            }
            break;
        }
    }
    return {std::move(info), std::move(kids)};
}

// One full small-step on a computation: flattened form of step_once.
inline FormalSum<TermPtr> step(const MonadSpec& spec, const TermPtr& t) {
    auto [info, kids] = step_once(spec, t);
    std::vector<Branch<TermPtr>> bs;
    for (const auto& k : kids)
        if (k.weight != 0) bs.push_back({k.weight, k.grade, k.term});
    return FormalSum<TermPtr>(std::move(bs));
}

// ---------------------------------------------------------------------------
// Iterated evaluation
// ---------------------------------------------------------------------------

inline bool all_values(const FormalSum<TermPtr>& e) {
    for (const auto& b : e.branches())
        if (!is_value(b.payload)) return false;
    return true;
}

struct RunResult {
    std::vector<FormalSum<TermPtr>> layers;  // layers[k] = e_k, k = 0..n
    bool stopped_early = false;              // some e_k was all values, k < fuel
    std::size_t stop_at = 0;                 // first all-value layer if stopped_early
};

// Computes e_0 .. e_fuel (e_{k+1} = e_k >>= step).  Once a layer is all
// values the sequence is constant, so iteration stops there.
inline RunResult run(const MonadSpec& spec, const TermPtr& t, std::size_t fuel) {
    if (!is_closed(t)) throw domain_error("term must be closed: " + to_string(t));
    RunResult out;
    out.layers.push_back(FormalSum<TermPtr>::eta(t, spec.grade));
    for (std::size_t k = 0; k < fuel; ++k) {
        const FormalSum<TermPtr>& cur = out.layers.back();
        if (all_values(cur)) {
            out.stopped_early = true;
            out.stop_at = k;
            return out;
        }
        out.layers.push_back(cur.bind([&](const TermPtr& u) { return step(spec, u); }));
    }
    if (all_values(out.layers.back())) {
        out.stopped_early = out.layers.size() - 1 < fuel;
        out.stop_at = out.layers.size() - 1;
    }
    return out;
}

// First k <= fuel with e_k all values, if any: finitary convergence depth.
inline std::optional<std::size_t> converges(const MonadSpec& spec, const TermPtr& t,
                                            std::size_t fuel) {
    RunResult r = run(spec, t, fuel);
    if (all_values(r.layers.back())) return r.layers.size() - 1;
    return std::nullopt;
}

// e_n restricted to its value branches.  By convention the 0-th
// approximant is empty: approximation starts from nothing, even for terms
// that are already values.
inline FormalSum<TermPtr> approx_sem(const MonadSpec& spec, const TermPtr& t, std::size_t n) {
    if (n == 0) {
        if (!is_closed(t)) throw domain_error("term must be closed: " + to_string(t));
        return {};
    }
    RunResult r = run(spec, t, n);
    const FormalSum<TermPtr>& e = r.layers.back();
    std::vector<Branch<TermPtr>> vals;
    for (const auto& b : e.branches())
        if (is_value(b.payload)) vals.push_back(b);
    return FormalSum<TermPtr>(std::move(vals));
}

inline FormalSum<Star> obs_n(const MonadSpec& spec, const TermPtr& t, std::size_t n) {
    return approx_sem(spec, t, n).observe();
}

struct ObservedChain {
    std::vector<FormalSum<Star>> obs;  // obs[k] for k = 0..fuel
    bool true_limit = false;           // evaluation fully converged within fuel
};

inline ObservedChain observed_chain(const MonadSpec& spec, const TermPtr& t, std::size_t fuel) {
    ObservedChain out;
    RunResult r = run(spec, t, fuel);
    for (std::size_t n = 0; n <= fuel; ++n) {
        if (n == 0) {
            out.obs.push_back({});
            continue;
        }
        const FormalSum<TermPtr>& e = r.layers[std::min(n, r.layers.size() - 1)];
        std::vector<Branch<TermPtr>> vals;
        for (const auto& b : e.branches())
            if (is_value(b.payload)) vals.push_back(b);
        out.obs.push_back(FormalSum<TermPtr>(std::move(vals)).observe());
    }
    out.true_limit = all_values(r.layers.back());
    return out;
}

// ---------------------------------------------------------------------------
// Provenance trace
// ---------------------------------------------------------------------------

namespace detail {

inline TraceNodePtr build_trace_rec(const MonadSpec& spec, const TermPtr& t,
                                    std::size_t remaining) {
    auto node = std::make_shared<TraceNode>();
    node->term = t;
    if (remaining == 0) return node;  // horizon leaf
    auto [info, kids] = step_once(spec, t);
    node->info = std::move(info);
    node->children = std::move(kids);
    for (auto& c : node->children)
        if (c.weight != 0) c.node = build_trace_rec(spec, c.term, remaining - 1);
    return node;
}

}  // namespace detail

// Un-flattened evaluation tree to depth `fuel`: each node records how its
// term stepped and the per-branch children.  Flattening level k of this
// tree reproduces e_k exactly.
inline TraceNodePtr build_trace(const MonadSpec& spec, const TermPtr& t, std::size_t fuel) {
    if (!is_closed(t)) throw domain_error("term must be closed: " + to_string(t));
    return detail::build_trace_rec(spec, t, fuel);
}

// Flattened layer k of a trace (for consistency checks against run()).
inline void trace_layer_rec(const TraceNodePtr& node, std::size_t k, const Rational& w,
                            const Grade& g, std::vector<Branch<TermPtr>>& out) {
    if (k == 0) {
        out.push_back({w, g, node->term});
        return;
    }
    if (node->info.kind == StepInfo::Kind::Horizon)
        throw internal_error("trace shallower than requested layer");
    for (const auto& c : node->children) {
        if (c.weight == 0) continue;
        trace_layer_rec(c.node, k - 1, w * c.weight, grade_mul(g, c.grade), out);
    }
}

inline FormalSum<TermPtr> trace_layer(const MonadSpec& spec, const TraceNodePtr& root,
                                      std::size_t k) {
    std::vector<Branch<TermPtr>> bs;
    trace_layer_rec(root, k, Rational(1), grade_unit(spec.grade), bs);
    return FormalSum<TermPtr>(std::move(bs));
}

}  // namespace mint
