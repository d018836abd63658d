#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mint/derivation.hpp"
#include "mint/error.hpp"
#include "mint/monad_spec.hpp"
#include "mint/syntax.hpp"
#include "mint/types.hpp"

namespace mint {

// Fixture format:
//
//   {
//     "monad": "cost*multidist",
//     "mode": "finitary",
//     "env": {"x": "{0 -> (0, 0)}"},        // optional, defaults to empty
//     "derivation": { ... }
//   }
//
// Nodes:
//
//   {"rule": "var",  "subject": "x",      "type": "0 -> (0, 0)"}
//   {"rule": "int",  "subject": "\\x. x", "type": "{...}", "premises": [...]}
//   {"rule": "unit", "subject": "\\x. x", "type": "eta({...})", "premises": [int]}
//   {"rule": "abs",  "subject": "\\x. t", "type": "I -> M", "premises": [comp]}
//   {"rule": "app",  "subject": "v t",    "type": "M", "arg": comp,
//                    "table": [{"key": "I", "fun": value-node}, ...]}
//   {"rule": "op",   "subject": "op(..)", "type": "M", "premises": [...]}
//   {"rule": "bot",  "subject": "t",      "type": "bot"}
//
// Environments inside the tree are implied: premises inherit their parent's
// environment, and an abs premise extends it with the binder at the arrow's
// domain.

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void json_fail(const std::string& ptr, const std::string& msg) {
    throw parse_error("at " + (ptr.empty() ? "/" : ptr) + ": " + msg);
}

inline const Json& json_field(const Json& j, const std::string& ptr, const char* name) {
    if (!j.is_object()) json_fail(ptr, "expected an object");
    auto it = j.find(name);
    if (it == j.end()) json_fail(ptr, std::string("missing field '") + name + "'");
    return *it;
}

inline std::string json_str(const Json& j, const std::string& ptr, const char* name) {
    const Json& f = json_field(j, ptr, name);
    if (!f.is_string()) json_fail(ptr + "/" + name, "expected a string");
    return f.get<std::string>();
}

// Runs a parser and rewrites its error to carry the JSON pointer.
template <class F>
auto at_ptr(const std::string& ptr, F&& f) {
    try {
        return f();
    } catch (const MintError& e) {
        if (e.kind == MintError::Kind::Parse) json_fail(ptr, e.what());
        throw;
    }
}

inline DerivPtr deriv_from_json(const MonadSpec& spec, const Json& j, const TypeEnv& env,
                                const std::string& ptr) {
    std::string rule = json_str(j, ptr, "rule");
    std::string subject_text = json_str(j, ptr, "subject");
    TermPtr subject =
        at_ptr(ptr + "/subject", [&] { return parse_term(subject_text); });
    std::string type_text = json_str(j, ptr, "type");
    std::string tptr = ptr + "/type";

    auto premises_of = [&](std::size_t min_count) {
        std::vector<const Json*> out;
        auto it = j.find("premises");
        if (it == j.end()) {
            if (min_count > 0) json_fail(ptr, "missing field 'premises'");
            return out;
        }
        if (!it->is_array()) json_fail(ptr + "/premises", "expected an array");
        for (const auto& p : *it) out.push_back(&p);
        return out;
    };

    if (rule == "var") {
        return mk_var(env, subject,
                      at_ptr(tptr, [&] { return parse_value_type(spec, type_text); }));
    } else if (rule == "int") {
        Intersection i = at_ptr(tptr, [&] { return parse_intersection_type(spec, type_text); });
        std::vector<DerivPtr> prem;
        auto ps = premises_of(0);
        for (std::size_t k = 0; k < ps.size(); ++k)
            prem.push_back(
                deriv_from_json(spec, *ps[k], env, ptr + "/premises/" + std::to_string(k)));
        return mk_int(env, subject, std::move(i), std::move(prem));
    } else if (rule == "unit") {
        MonadicType m = at_ptr(tptr, [&] { return parse_monadic_type(spec, type_text); });
        auto ps = premises_of(1);
        if (ps.size() != 1) json_fail(ptr + "/premises", "unit rule takes one premise");
        DerivPtr p = deriv_from_json(spec, *ps[0], env, ptr + "/premises/0");
        return mk_unit(env, subject, std::move(m), std::move(p));
    } else if (rule == "abs") {
        ValueType a = at_ptr(tptr, [&] { return parse_value_type(spec, type_text); });
        if (subject->kind != Term::Kind::Lam)
            json_fail(ptr + "/subject", "abs subject must be an abstraction");
        auto ps = premises_of(1);
        if (ps.size() != 1) json_fail(ptr + "/premises", "abs rule takes one premise");
        TypeEnv inner = env_extend(env, subject->name, a.domain);
        DerivPtr p = deriv_from_json(spec, *ps[0], inner, ptr + "/premises/0");
        return mk_abs(env, subject, std::move(a), std::move(p));
    } else if (rule == "app") {
        MonadicType m = at_ptr(tptr, [&] { return parse_monadic_type(spec, type_text); });
        DerivPtr arg = deriv_from_json(spec, json_field(j, ptr, "arg"), env, ptr + "/arg");
        const Json& tj = json_field(j, ptr, "table");
        if (!tj.is_array()) json_fail(ptr + "/table", "expected an array");
        std::vector<TableEntry> table;
        for (std::size_t k = 0; k < tj.size(); ++k) {
            std::string eptr = ptr + "/table/" + std::to_string(k);
            std::string key_text = json_str(tj[k], eptr, "key");
            Intersection key = at_ptr(
                eptr + "/key", [&] { return parse_intersection_type(spec, key_text); });
            DerivPtr fun =
                deriv_from_json(spec, json_field(tj[k], eptr, "fun"), env, eptr + "/fun");
            table.push_back({std::move(key), std::move(fun)});
        }
        return mk_app(env, subject, std::move(m), std::move(arg), std::move(table));
    } else if (rule == "op") {
        MonadicType m = at_ptr(tptr, [&] { return parse_monadic_type(spec, type_text); });
        std::vector<DerivPtr> prem;
        auto ps = premises_of(0);
        for (std::size_t k = 0; k < ps.size(); ++k)
            prem.push_back(
                deriv_from_json(spec, *ps[k], env, ptr + "/premises/" + std::to_string(k)));
        return mk_op(env, subject, std::move(m), std::move(prem));
    } else if (rule == "bot") {
        if (type_text != "bot") json_fail(tptr, "bot rule assigns the type 'bot'");
        return mk_bot(env, subject);
    }
    json_fail(ptr + "/rule", "unknown rule '" + rule + "'");
}

inline Json deriv_to_json(const DerivPtr& d) {
    Json j;
    j["rule"] = rule_name(d->rule);
    j["subject"] = to_string(d->subject);
    switch (d->rule) {
        case Derivation::Rule::Var:
        case Derivation::Rule::Abs:
            j["type"] = to_string(d->vtype());
            break;
        case Derivation::Rule::Int:
            j["type"] = to_string(d->itype());
            break;
        default:
            j["type"] = to_string(d->mtype());
    }
    if (d->rule == Derivation::Rule::App) {
        j["arg"] = deriv_to_json(d->premises[0]);
        Json table = Json::array();
        for (const TableEntry& e : d->table) {
            Json entry;
            entry["key"] = to_string(e.key);
            entry["fun"] = deriv_to_json(e.fun);
            table.push_back(std::move(entry));
        }
        j["table"] = std::move(table);
    } else if (!d->premises.empty()) {
        Json prem = Json::array();
        for (const DerivPtr& p : d->premises) prem.push_back(deriv_to_json(p));
        j["premises"] = std::move(prem);
    }
    return j;
}

}  // namespace detail

struct Fixture {
    MonadSpec monad;
    Mode mode;
    DerivPtr derivation;
};

inline Fixture fixture_from_json(const Json& j) {
    Fixture out;
    out.monad = parse_monad(detail::json_str(j, "", "monad"));
    out.mode = parse_mode(detail::json_str(j, "", "mode"));
    TypeEnv env;
    if (auto it = j.find("env"); it != j.end()) {
        if (!it->is_object()) detail::json_fail("/env", "expected an object");
        for (const auto& [k, v] : it->items()) {
            if (!v.is_string()) detail::json_fail("/env/" + k, "expected a string");
            std::string text = v.get<std::string>();
            env[k] = detail::at_ptr("/env/" + k,
                                    [&] { return parse_intersection_type(out.monad, text); });
        }
    }
    out.derivation = detail::deriv_from_json(out.monad, detail::json_field(j, "", "derivation"),
                                             env, "/derivation");
    return out;
}

inline Fixture fixture_from_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("invalid JSON: ") + e.what());
    }
    return fixture_from_json(j);
}

inline Json fixture_to_json(const MonadSpec& spec, Mode mode, const DerivPtr& d) {
    Json j;
    j["monad"] = spec.selector;
    j["mode"] = to_string(mode);
    if (!detail::normalize_env(d->env).empty()) {
        Json env;
        for (const auto& [x, i] : detail::normalize_env(d->env)) env[x] = to_string(i);
        j["env"] = std::move(env);
    }
    j["derivation"] = detail::deriv_to_json(d);
    return j;
}

}  // namespace mint
