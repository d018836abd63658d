#include <catch2/catch_amalgamated.hpp>

#include "mint/syntax.hpp"
#include "mint/term.hpp"

#include "gen.hpp"

using namespace mint;

namespace {

// Every application head in kernel form must be a value.
bool kernel_shaped(const TermPtr& t) {
    switch (t->kind) {
        case Term::Kind::Var:
            return true;
        case Term::Kind::Lam:
            return kernel_shaped(t->kids[0]);
        case Term::Kind::App:
            return is_value(t->kids[0]) && kernel_shaped(t->kids[0]) && kernel_shaped(t->kids[1]);
        case Term::Kind::Op:
            for (const auto& k : t->kids)
                if (!kernel_shaped(k)) return false;
            return true;
    }
    return false;
}

}  // namespace

TEST_CASE("printing and reparsing is the identity up to alpha") {
    mintgen::Rng rng(101);
    for (int i = 0; i < 300; ++i) {
        TermPtr t = mintgen::gen_closed_term(rng, 5, i % 3 == 0);
        TermPtr back = parse_term(to_string(t));
        CHECK(alpha_eq(t, back));
    }
}

TEST_CASE("printer output is stable") {
    for (std::string src : {
             "(\\x. x x) ((\\y. y) (\\z. z))",
             "tick((\\x. tick(x x)) (tick((\\y. y) (\\z. z)) (+)[1/2] (\\z. z)))",
             "(\\x. x (out_b(x))) (out_a((\\y. y) (\\z. z)))",
             "(\\x. x x) ((\\y. y) (\\z. z) (+)[1/2] omega)",
         }) {
        std::string once = to_string(parse_term(src));
        std::string twice = to_string(parse_term(once));
        CHECK(once == twice);
        CHECK(alpha_eq(parse_term(src), parse_term(once)));
    }
}

TEST_CASE("general application desugars to kernel form") {
    // A non-value head is routed through a fresh administrative redex; the
    // result must be kernel-shaped and alpha-stable.
    TermPtr t = parse_term("((\\x. x) (\\y. y)) (\\z. z)");
    CHECK(kernel_shaped(t));
    CHECK(alpha_eq(t, parse_term(to_string(t))));

    // A value head with a computation argument is already kernel form.
    TermPtr u = parse_term("(\\x. x) ((\\y. y) (\\z. z))");
    CHECK(u->kind == Term::Kind::App);
    CHECK(u->kids[0]->kind == Term::Kind::Lam);
}

TEST_CASE("omega is the looping self-application") {
    CHECK(alpha_eq(parse_term("omega"), parse_term("(\\x. x x) (\\x. x x)")));
}

TEST_CASE("alpha equivalence ignores binder names and nothing else") {
    CHECK(alpha_eq(parse_term("\\x. x"), parse_term("\\y. y")));
    CHECK(alpha_eq(parse_term("\\x. \\y. x y"), parse_term("\\a. \\b. a b")));
    CHECK_FALSE(alpha_eq(parse_term("\\x. \\y. x"), parse_term("\\x. \\y. y")));
    CHECK_FALSE(alpha_eq(parse_term("\\x. x"), parse_term("\\x. x x")));
    // term_cmp is antisymmetric on a mixed pool
    mintgen::Rng rng(7);
    std::vector<TermPtr> pool;
    for (int i = 0; i < 20; ++i) pool.push_back(mintgen::gen_closed_term(rng, 4, false));
    for (const auto& a : pool)
        for (const auto& b : pool) {
            int ab = term_cmp(a, b);
            int ba = term_cmp(b, a);
            CHECK(((ab == 0 && ba == 0) || (ab < 0 && ba > 0) || (ab > 0 && ba < 0)));
        }
}

TEST_CASE("substitution avoids capture") {
    // x := y inside \y. x y must rename the binder.
    TermPtr body = parse_term("\\y. x y");
    TermPtr res = substitute(body, "x", Term::var("y"));
    CHECK(alpha_eq(res, parse_term("\\z. y z")));
    CHECK_FALSE(alpha_eq(res, parse_term("\\y. y y")));

    // Substituting a closed value is plain replacement.
    TermPtr twice = parse_term("x x");
    TermPtr idv = parse_term("\\w. w");
    CHECK(alpha_eq(substitute(twice, "x", idv), parse_term("(\\w. w) (\\w. w)")));
}

TEST_CASE("tracked substitution records one path per occurrence") {
    TrackedSubst ts = substitute_tracked(parse_term("x x"), "x", parse_term("\\w. w"));
    CHECK(ts.paths.size() == 2);
    TrackedSubst none = substitute_tracked(parse_term("\\y. y"), "x", parse_term("\\w. w"));
    CHECK(none.paths.empty());
}

TEST_CASE("decompose and plug are inverse") {
    mintgen::Rng rng(23);
    for (int i = 0; i < 200; ++i) {
        TermPtr t = mintgen::gen_closed_term(rng, 5, false);
        EvalSplit s = decompose(t);
        CHECK(alpha_eq(plug(s.frames, s.focus), t));
        if (is_value(t)) CHECK(s.kind == FocusKind::Value);
        if (s.kind == FocusKind::Value) CHECK(is_value(s.focus));
    }
}

TEST_CASE("free variables and closedness") {
    CHECK(is_closed(parse_term("\\x. x x")));
    CHECK_FALSE(is_closed(parse_term("x y")));
    auto fv = free_vars(parse_term("\\x. x y z"));
    CHECK(fv == std::set<std::string>{"y", "z"});
}

TEST_CASE("parse errors carry positions and reasons") {
    CHECK_THROWS_AS(parse_term("(\\x. x"), MintError);
    CHECK_THROWS_AS(parse_term("\\x."), MintError);
    CHECK_THROWS_AS(parse_term("(\\x. x) (+) (\\y. y)"), MintError);  // bias required
    CHECK_THROWS_AS(parse_term("(\\x. x) (+)[] (\\y. y)"), MintError);
    try {
        parse_term("(\\x. x) (+) (\\y. y)");
        FAIL("expected a parse error");
    } catch (const MintError& e) {
        CHECK(e.kind == MintError::Kind::Parse);
        CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }
}
