#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "mint/monad_spec.hpp"
#include "mint/semantics.hpp"

#include "gen.hpp"

using namespace mint;

namespace {

using Elem = FormalSum<TermPtr>;

// A random Kleisli function over the atom pool, represented as a table.
struct Kleisli {
    std::map<std::string, Elem> table;

    Elem operator()(const TermPtr& t) const { return table.at(t->name); }
};

Kleisli gen_kleisli(mintgen::Rng& rng, const MonadSpec& spec,
                    const std::vector<TermPtr>& atoms) {
    Kleisli f;
    for (const auto& a : atoms) f.table[a->name] = mintgen::gen_sum(rng, spec, atoms);
    return f;
}

std::vector<OpHead> ops_of(const MonadSpec& spec, mintgen::Rng& rng) {
    std::vector<OpHead> out;
    if (spec.has_cost) out.push_back(mintgen::tick_head());
    if (spec.has_writer) {
        OpHead o;
        o.name = "out";
        o.word = std::string(1, *spec.alphabet.begin());
        out.push_back(o);
    }
    if (spec.has_dist) out.push_back(mintgen::choice_head(mintgen::pick_bias(rng)));
    if (spec.has_multiset) {
        OpHead a;
        a.name = "amb";
        out.push_back(a);
    }
    return out;
}

}  // namespace

TEST_CASE("monad laws hold for every bundled monad") {
    auto atoms = mintgen::atom_pool(4);
    for (const std::string& sel : stock_selectors()) {
        MonadSpec spec = parse_monad(sel);
        mintgen::Rng rng(42);
        for (int i = 0; i < 200; ++i) {
            Kleisli f = gen_kleisli(rng, spec, atoms);
            Kleisli g = gen_kleisli(rng, spec, atoms);
            Elem m = mintgen::gen_sum(rng, spec, atoms);
            const TermPtr& x = atoms[rng.below(atoms.size())];

            // left unit: eta(x) >>= f  ==  f(x)
            CHECK(monad_eta(spec, x).bind(f) == f(x));
            // right unit: m >>= eta  ==  m
            CHECK(m.bind([&](const TermPtr& y) { return monad_eta(spec, y); }) == m);
            // associativity
            Elem lhs = m.bind(f).bind(g);
            Elem rhs = m.bind([&](const TermPtr& y) { return f(y).bind(g); });
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("operations are algebraic: they commute with bind") {
    auto atoms = mintgen::atom_pool(4);
    for (const std::string& sel : stock_selectors()) {
        MonadSpec spec = parse_monad(sel);
        mintgen::Rng rng(43);
        for (int i = 0; i < 200; ++i) {
            for (const OpHead& op : ops_of(spec, rng)) {
                std::size_t arity = op.name == "choice" ? 2 : op.name == "amb" ? 3 : 1;
                std::vector<Elem> args;
                for (std::size_t k = 0; k < arity; ++k)
                    args.push_back(mintgen::gen_sum(rng, spec, atoms));
                Kleisli f = gen_kleisli(rng, spec, atoms);

                Elem lhs = apply_op(spec, op, args).bind(f);
                std::vector<Elem> bound;
                for (const auto& a : args) bound.push_back(a.bind(f));
                Elem rhs = apply_op(spec, op, bound);
                CHECK(lhs == rhs);
            }
        }
    }
}

TEST_CASE("canonical form ignores assembly order") {
    auto atoms = mintgen::atom_pool(4);
    MonadSpec spec = parse_monad("cost*multidist");
    mintgen::Rng rng(44);
    for (int i = 0; i < 200; ++i) {
        Elem a = mintgen::gen_sum(rng, spec, atoms);
        Elem b = mintgen::gen_sum(rng, spec, atoms);
        CHECK(Elem::merged(a, b) == Elem::merged(b, a));
    }
    // ... but equal branches are kept, not merged: the monads are
    // non-idempotent.
    Elem half({Branch<TermPtr>{Rational(1, 2), grade_unit(spec.grade), atoms[0]}});
    Elem both = Elem::merged(half, half);
    CHECK(both.size() == 2);
    CHECK(both != Elem({Branch<TermPtr>{Rational(1), grade_unit(spec.grade), atoms[0]}}));
}

TEST_CASE("weights outside (0,1] are rejected") {
    auto atoms = mintgen::atom_pool(1);
    CHECK_THROWS_AS(Elem({Branch<TermPtr>{Rational(0), Grade{}, atoms[0]}}), MintError);
    CHECK_THROWS_AS(Elem({Branch<TermPtr>{Rational(3, 2), Grade{}, atoms[0]}}), MintError);
}

TEST_CASE("bind conserves total weight against weight-preserving functions") {
    auto atoms = mintgen::atom_pool(4);
    MonadSpec spec = parse_monad("multidist");
    mintgen::Rng rng(45);
    for (int i = 0; i < 200; ++i) {
        Elem m = mintgen::gen_sum(rng, spec, atoms);
        // f maps every atom to a full (weight-one) distribution
        Kleisli f;
        for (const auto& a : atoms) {
            Elem e({Branch<TermPtr>{Rational(1, 2), Grade{}, atoms[0]},
                    Branch<TermPtr>{Rational(1, 2), Grade{}, atoms[1]}});
            f.table[a->name] = e;
        }
        CHECK(m.bind(f).total_weight() == m.total_weight());
    }
}

TEST_CASE("the approximation order is a partial order with bottom") {
    auto atoms = mintgen::atom_pool(4);
    MonadSpec spec = parse_monad("cost*multidist");
    mintgen::Rng rng(46);
    for (int i = 0; i < 300; ++i) {
        Elem a = mintgen::gen_sum(rng, spec, atoms);
        CHECK(sum_leq(a, a));
        CHECK(sum_leq(Elem{}, a));

        // drop some branches: the result stays below
        std::vector<Branch<TermPtr>> kept;
        for (const auto& b : a.branches())
            if (rng.chance(1, 2)) kept.push_back(b);
        Elem sub(std::move(kept));
        CHECK(sum_leq(sub, a));
        if (sum_leq(a, sub)) CHECK(a == sub);

        // transitivity through a second drop
        std::vector<Branch<TermPtr>> kept2;
        for (const auto& b : sub.branches())
            if (rng.chance(1, 2)) kept2.push_back(b);
        Elem sub2(std::move(kept2));
        CHECK(sum_leq(sub2, a));
    }
}

TEST_CASE("bind is monotone in the approximation order") {
    auto atoms = mintgen::atom_pool(4);
    MonadSpec spec = parse_monad("multidist");
    mintgen::Rng rng(47);
    for (int i = 0; i < 200; ++i) {
        Elem a = mintgen::gen_sum(rng, spec, atoms);
        std::vector<Branch<TermPtr>> kept;
        for (const auto& b : a.branches())
            if (rng.chance(2, 3)) kept.push_back(b);
        Elem sub(std::move(kept));
        Kleisli f = gen_kleisli(rng, spec, atoms);
        CHECK(sum_leq(sub.bind(f), a.bind(f)));
    }
}

TEST_CASE("disciplines are preserved by the operations") {
    auto atoms = mintgen::atom_pool(4);
    for (const std::string& sel : stock_selectors()) {
        MonadSpec spec = parse_monad(sel);
        mintgen::Rng rng(48);
        for (int i = 0; i < 200; ++i) {
            Elem m = mintgen::gen_sum(rng, spec, atoms);
            CHECK(discipline_ok(spec, m, false));
            for (const OpHead& op : ops_of(spec, rng)) {
                std::size_t arity = op.name == "choice" ? 2 : op.name == "amb" ? 2 : 1;
                std::vector<Elem> args;
                for (std::size_t k = 0; k < arity; ++k)
                    args.push_back(mintgen::gen_sum(rng, spec, atoms));
                CHECK(discipline_ok(spec, apply_op(spec, op, args), false));
            }
        }
    }
}

TEST_CASE("grade composition is monoidal") {
    Grade a = Grade::of_word("ab");
    Grade b = Grade::of_word("b");
    Grade c = Grade::of_word("ba");
    CHECK(grade_mul(grade_unit(Grade::Kind::Word), a) == a);
    CHECK(grade_mul(a, grade_unit(Grade::Kind::Word)) == a);
    CHECK(grade_mul(grade_mul(a, b), c) == grade_mul(a, grade_mul(b, c)));
    CHECK(grade_to_string(grade_mul(a, b)) == "abb");

    Grade c2 = Grade::of_cost(2);
    Grade c3 = Grade::of_cost(3);
    CHECK(grade_mul(c2, c3) == Grade::of_cost(5));
    CHECK(grade_mul(Grade::of_cost(0), c3) == c3);
}

TEST_CASE("operation admissibility is monad-directed") {
    MonadSpec pure = parse_monad("pure");
    CHECK_THROWS_AS(validate_op(pure, mintgen::tick_head(), 1), MintError);
    MonadSpec cost = parse_monad("cost");
    CHECK_THROWS_AS(validate_op(cost, mintgen::choice_head(Rational(1, 2)), 2), MintError);
    // erasing biases need the explicit escape hatch
    MonadSpec dist = parse_monad("multidist");
    CHECK_THROWS_AS(validate_op(dist, mintgen::choice_head(Rational(1)), 2), MintError);
    MonadSpec erasing = dist;
    erasing.erasing = true;
    CHECK_NOTHROW(validate_op(erasing, mintgen::choice_head(Rational(1)), 2));
}
