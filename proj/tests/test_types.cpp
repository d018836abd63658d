#include <catch2/catch_amalgamated.hpp>

#include "mint/types.hpp"

#include "gen.hpp"

using namespace mint;

TEST_CASE("type text round-trips through the printer") {
    std::vector<std::pair<std::string, std::string>> cases = {
        {"pure", "0"},
        {"pure", "{0 -> 0}"},
        {"pure", "{0 -> 0, {0 -> 0} -> 0}"},
        {"pure", "bot"},
        {"writer:ab", "(ab, 0)"},
        {"writer:ab", "(eps, {0 -> (b, 0)})"},
        {"cost", "(3, 0)"},
        {"multidist", "1/2*0"},
        {"multidist", "1/2*0 + 1/2*{0 -> 0}"},
        {"cost*multidist", "1/2*(2, 0) + 1/2*(3, 0)"},
        {"multiset", "0 + 0"},
    };
    for (const auto& [sel, text] : cases) {
        MonadSpec spec = parse_monad(sel);
        MonadicType m = parse_monadic_type(spec, text);
        CHECK(to_string(m) == text);
        CHECK(type_eq(parse_monadic_type(spec, to_string(m)), m));
    }
    // eta(I) is the explicit unit spelling; it prints back as the bare form.
    MonadSpec pure = parse_monad("pure");
    CHECK(to_string(parse_monadic_type(pure, "eta({0 -> 0})")) == "{0 -> 0}");
}

TEST_CASE("type parsing rejects ill-formed and ill-graded text") {
    MonadSpec pure = parse_monad("pure");
    CHECK_THROWS_AS(parse_monadic_type(pure, "(ab, 0)"), MintError);   // no word grades
    CHECK_THROWS_AS(parse_monadic_type(pure, "{0 -> }"), MintError);
    CHECK_THROWS_AS(parse_monadic_type(pure, "2*0"), MintError);       // weight > 1
    MonadSpec w = parse_monad("writer:ab");
    CHECK_THROWS_AS(parse_monadic_type(w, "(abc, 0)"), MintError);     // outside alphabet
    // over-weight totals are a discipline matter, caught by the checker, not the grammar
    MonadSpec md = parse_monad("multidist");
    CHECK_FALSE(discipline_ok(md, parse_monadic_type(md, "1/2*0 + 2/3*0"), false));
    CHECK(discipline_ok(md, parse_monadic_type(md, "1/2*0 + 1/3*0"), false));
}

TEST_CASE("intersections are canonical sets") {
    MonadSpec spec = parse_monad("pure");
    Intersection empty;
    ValueType id{empty, monad_eta(spec, empty)};
    Intersection iid = Intersection::make({id});
    ValueType idid{iid, monad_eta(spec, iid)};

    CHECK(Intersection::make({id, id}) == iid);                      // duplicates collapse
    CHECK(Intersection::make({id, idid}) == Intersection::make({idid, id}));  // order-free
    CHECK(intersection_cmp(empty, iid) != 0);
    CHECK(intersection_union(iid, Intersection::make({idid})) ==
          Intersection::make({id, idid}));
    CHECK(intersection_supseteq(Intersection::make({id, idid}), iid));
    CHECK_FALSE(intersection_supseteq(iid, Intersection::make({idid})));
}

TEST_CASE("type-level bind satisfies the monad laws") {
    for (const std::string& sel : stock_selectors()) {
        MonadSpec spec = parse_monad(sel);
        auto pool = mintgen::intersection_pool(spec);
        mintgen::Rng rng(52);
        for (int i = 0; i < 150; ++i) {
            MonadicType m = mintgen::gen_sum(rng, spec, pool);
            AppTable to_f, to_g, fg;
            for (const auto& I : pool) {
                to_f[I] = mintgen::gen_sum(rng, spec, pool);
                to_g[I] = mintgen::gen_sum(rng, spec, pool);
            }
            for (const auto& I : pool) fg[I] = type_bind(to_f[I], to_g);

            // left unit
            const Intersection& x = pool[rng.below(pool.size())];
            CHECK(type_eq(type_bind(monad_eta(spec, x), to_f), to_f[x]));
            // right unit
            AppTable eta_table;
            for (const auto& I : pool) eta_table[I] = monad_eta(spec, I);
            CHECK(type_eq(type_bind(m, eta_table), m));
            // associativity
            CHECK(type_eq(type_bind(type_bind(m, to_f), to_g), type_bind(m, fg)));
        }
    }
}

TEST_CASE("type-level bind demands covered support") {
    MonadSpec spec = parse_monad("pure");
    auto pool = mintgen::intersection_pool(spec);
    MonadicType m = monad_eta(spec, pool[1]);
    AppTable empty_table;
    CHECK_THROWS_AS(type_bind(m, empty_table), MintError);
    try {
        type_bind(m, empty_table);
    } catch (const MintError& e) {
        CHECK(e.kind == MintError::Kind::Domain);
        CHECK(std::string(e.what()).find("uncovered") != std::string::npos);
    }
}

TEST_CASE("type-level operations mirror the element-level ones") {
    MonadSpec spec = parse_monad("cost*multidist");
    auto pool = mintgen::intersection_pool(spec);
    mintgen::Rng rng(53);
    for (int i = 0; i < 150; ++i) {
        MonadicType a = mintgen::gen_sum(rng, spec, pool);
        MonadicType b = mintgen::gen_sum(rng, spec, pool);
        OpHead ch = mintgen::choice_head(Rational(1, 4));
        MonadicType viaop = type_op(spec, ch, {a, b});
        MonadicType manual = MonadicType::merged(a.scaled(Rational(1, 4), grade_unit(spec.grade)),
                                                 b.scaled(Rational(3, 4), grade_unit(spec.grade)));
        CHECK(type_eq(viaop, manual));

        MonadicType ticked = type_op(spec, mintgen::tick_head(), {a});
        CHECK(ticked.size() == a.size());
        CHECK(obs_type(ticked) == obs_type(a.scaled(Rational(1), Grade::of_cost(1))));
    }
}

TEST_CASE("observation of a type forgets payloads only") {
    MonadSpec spec = parse_monad("cost*multidist");
    MonadicType m = parse_monadic_type(spec, "1/2*(2, 0) + 1/2*(3, {0 -> (0, 0)})");
    FormalSum<Star> o = obs_type(m);
    REQUIRE(o.size() == 2);
    CHECK(o.branches()[0].grade == Grade::of_cost(2));
    CHECK(o.branches()[1].grade == Grade::of_cost(3));
    CHECK(o.branches()[0].weight == Rational(1, 2));
    CHECK(to_string(o) == "1/2*(2) + 1/2*(3)");
    CHECK(to_string(obs_type(MonadicType{})) == "bot");
}

TEST_CASE("the type order is the branch-inclusion order") {
    MonadSpec spec = parse_monad("multidist");
    auto pool = mintgen::intersection_pool(spec);
    mintgen::Rng rng(54);
    for (int i = 0; i < 200; ++i) {
        MonadicType a = mintgen::gen_sum(rng, spec, pool);
        CHECK(type_leq(MonadicType{}, a));
        CHECK(type_leq(a, a));
        std::vector<Branch<Intersection>> kept;
        for (const auto& b : a.branches())
            if (rng.chance(1, 2)) kept.push_back(b);
        MonadicType sub(std::move(kept));
        CHECK(type_leq(sub, a));
        if (type_leq(a, sub)) CHECK(type_eq(a, sub));
    }
}

TEST_CASE("environment lookup, extension, and the weakening order") {
    MonadSpec spec = parse_monad("pure");
    auto pool = mintgen::intersection_pool(spec);
    TypeEnv env{{"x", pool[1]}};
    CHECK(env_lookup(env, "x") == pool[1]);
    CHECK(env_lookup(env, "y") == Intersection{});  // absent means empty
    TypeEnv wider = env_extend(env, "y", pool[2]);
    CHECK(env_lookup(wider, "y") == pool[2]);
    CHECK(env_supseteq(wider, env));
    CHECK_FALSE(env_supseteq(env, wider));
    // an empty requirement is satisfied by any environment
    CHECK(env_supseteq(TypeEnv{}, TypeEnv{{"z", Intersection{}}}));
    // pointwise member superset counts as weakening
    TypeEnv strong{{"x", pool[3]}};  // pool[3] contains pool[1]'s member
    CHECK(intersection_supseteq(pool[3], pool[1]));
    CHECK(env_supseteq(strong, env));
}
