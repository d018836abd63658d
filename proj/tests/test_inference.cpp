#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "mint/derivation_json.hpp"
#include "mint/inference.hpp"

#include "gen.hpp"

using namespace mint;

namespace {

Fixture load(const std::string& name) {
    std::ifstream in("fixtures/" + name + ".json");
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return fixture_from_text(ss.str());
}

}  // namespace

TEST_CASE("inference reproduces the figure typings") {
    for (const std::string name : {"fig1", "fig3", "fig4", "fig5"}) {
        DYNAMIC_SECTION(name) {
            Fixture f = load(name);
            std::size_t fuel = f.mode == Mode::Finitary ? 20 : 8;
            DerivPtr d = infer(f.monad, f.mode, f.derivation->subject, fuel);
            CHECK_NOTHROW(check(f.monad, f.mode, d));
            CHECK(type_eq(d->mtype(), f.derivation->mtype()));
        }
    }
}

TEST_CASE("inferred and transcribed derivations may differ below the root") {
    // Both are valid proofs of the same typing; the checker accepts each.
    Fixture f = load("fig1");
    DerivPtr d = infer(f.monad, f.mode, f.derivation->subject, 20);
    CHECK(type_eq(d->mtype(), f.derivation->mtype()));
    CHECK_NOTHROW(check(f.monad, f.mode, f.derivation));
    CHECK_NOTHROW(check(f.monad, f.mode, d));
}

TEST_CASE("finitary inference refuses what does not converge") {
    MonadSpec md = parse_monad("multidist");
    TermPtr fig5 = parse_term("(\\x. x x) ((\\y. y) (\\z. z) (+)[1/2] omega)");
    CHECK_THROWS_AS(infer(md, Mode::Finitary, fig5, 20), MintError);
    CHECK_THROWS_AS(infer(md, Mode::Finitary, parse_term("omega"), 50), MintError);
}

TEST_CASE("the diverging term has the bottom type and empty observation") {
    MonadSpec md = parse_monad("multidist");
    DerivPtr d = infer(md, Mode::Infinitary, parse_term("omega"), 12);
    CHECK(d->mtype().empty());
    CHECK(obs_type(d->mtype()).empty());
    CHECK_NOTHROW(check(md, Mode::Infinitary, d));
}

TEST_CASE("open terms are refused") {
    MonadSpec md = parse_monad("multidist");
    CHECK_THROWS_AS(infer(md, Mode::Finitary, parse_term("x"), 5), MintError);
}

TEST_CASE("erasing biases require infinitary mode") {
    MonadSpec esc = parse_monad("multidist");
    esc.erasing = true;
    TermPtr t = parse_term("(\\x. x) (+)[1] (\\y. y)");
    CHECK_THROWS_AS(infer(esc, Mode::Finitary, t, 10), MintError);
    DerivPtr d = infer(esc, Mode::Infinitary, t, 10);
    CHECK_NOTHROW(check(esc, Mode::Infinitary, d));
    CHECK(obs_type(d->mtype()) == obs_n(esc, t, 10));
}

TEST_CASE("duplicated arguments whose copies diverge in type are reconciled") {
    MonadSpec md = parse_monad("multidist");

    // The argument is a choice between behaviourally different values, and
    // the duplicating function applies one copy to the other.
    TermPtr a = parse_term(
        "(\\x. (\\i. i) (\\i. i)) ((\\y. y) (+)[1/2] ((\\y. y) (\\z. z)))");
    DerivPtr da = infer(md, Mode::Infinitary, a, 3);
    CHECK_NOTHROW(check(md, Mode::Infinitary, da));
    CHECK(obs_type(da->mtype()) == obs_n(md, a, 3));

    TermPtr b = parse_term(
        "(\\x. (\\i. i) (+)[1/2] ((\\i. i) (+)[1/2] omega)) "
        "((\\y. y) (+)[1/2] ((\\y. y) (\\z. z)))");
    DerivPtr db = infer(md, Mode::Infinitary, b, 4);
    CHECK_NOTHROW(check(md, Mode::Infinitary, db));
    CHECK(obs_type(db->mtype()) == obs_n(md, b, 4));
    CHECK(db->mtype().total_weight() == Rational(5, 8));
}

TEST_CASE("observations of inferred types grow with fuel and track the semantics") {
    MonadSpec cm = parse_monad("cost*multidist");
    mintgen::Rng rng(71);
    for (int i = 0; i < 40; ++i) {
        TermPtr t = mintgen::gen_closed_term(rng, 5, i % 2 == 0);
        FormalSum<Star> prev;
        for (std::size_t k = 0; k <= 8; ++k) {
            DerivPtr d = infer(cm, Mode::Infinitary, t, k);
            FormalSum<Star> cur = obs_type(d->mtype());
            CHECK(cur == obs_n(cm, t, k));
            CHECK(sum_leq(prev, cur));
            prev = cur;
        }
    }
}

TEST_CASE("every inferred derivation passes the checker") {
    MonadSpec cm = parse_monad("cost*multidist");
    mintgen::Rng rng(72);
    for (int i = 0; i < 60; ++i) {
        TermPtr t = mintgen::gen_closed_term(rng, 5, i % 3 == 0);
        DerivPtr d = infer(cm, Mode::Infinitary, t, 6);
        CHECK_NOTHROW(check(cm, Mode::Infinitary, d));
        if (auto k = converges(cm, t, 12)) {
            DerivPtr fd = infer(cm, Mode::Finitary, t, 12);
            CHECK_NOTHROW(check(cm, Mode::Finitary, fd));
            // a finitary typing captures the full semantics; observe one layer past
            // convergence because depth 0 observes nothing even for values
            CHECK(obs_type(fd->mtype()) == obs_n(cm, t, *k + 1));
        }
    }
}

TEST_CASE("one evaluation step preserves the inferred type") {
    MonadSpec cm = parse_monad("cost*multidist");
    mintgen::Rng rng(73);
    int done = 0;
    for (int i = 0; done < 40 && i < 400; ++i) {
        TermPtr t = mintgen::gen_closed_term(rng, 5, false);
        if (is_value(t) || !converges(cm, t, 20)) continue;
        ++done;
        DerivPtr d0 = infer(cm, Mode::Finitary, t, 20);
        FormalSum<TermPtr> e1 = step(cm, t);
        std::vector<DerivPtr> prems;
        for (const auto& b : e1.branches())
            prems.push_back(infer(cm, Mode::Finitary, b.payload, 20));
        CHECK_NOTHROW(
            check_monadic(cm, Mode::Finitary, mk_monadic({}, e1, d0->mtype(), prems)));
    }
    CHECK(done == 40);
}

TEST_CASE("fuel beyond convergence changes nothing") {
    MonadSpec cm = parse_monad("cost*multidist");
    TermPtr t = parse_term("tick((\\x. tick(x x)) (tick((\\y. y) (\\z. z)) (+)[1/2] (\\z. z)))");
    auto k = converges(cm, t, 30);
    REQUIRE(k.has_value());
    DerivPtr d1 = infer(cm, Mode::Infinitary, t, *k);
    DerivPtr d2 = infer(cm, Mode::Infinitary, t, *k + 10);
    CHECK(type_eq(d1->mtype(), d2->mtype()));
    DerivPtr f1 = infer(cm, Mode::Finitary, t, *k);
    DerivPtr f2 = infer(cm, Mode::Finitary, t, *k + 10);
    CHECK(type_eq(f1->mtype(), f2->mtype()));
    CHECK(type_eq(f1->mtype(), d1->mtype()));
}
