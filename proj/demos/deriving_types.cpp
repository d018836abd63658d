// Demo: infer intersection typings from evaluation, print them, check them,
// and round-trip one through JSON.  Builds as `demo-deriving`.

#include <iostream>

#include "mint/derivation_json.hpp"
#include "mint/inference.hpp"

using namespace mint;

namespace {

void derive(const std::string& title, const std::string& monad, const std::string& src,
            Mode mode, std::size_t fuel) {
    MonadSpec spec = parse_monad(monad);
    TermPtr t = parse_term(src);
    DerivPtr d = infer(spec, mode, t, fuel);
    check(spec, mode, d);  // every inferred derivation must satisfy the checker
    std::cout << "== " << title << "\n   " << to_string(t) << "   [" << monad << ", "
              << (mode == Mode::Finitary ? "finitary" : "infinitary") << "]\n"
              << "   type: " << to_string(d->mtype()) << "\n"
              << "   obs:  " << to_string(obs_type(d->mtype())) << "\n\n";
}

}  // namespace

int main() {
    derive("a value reached twice over", "pure", "(\\x. x x) ((\\y. y) (\\z. z))",
           Mode::Finitary, 20);
    derive("the letters the run prints", "writer:ab",
           "(\\x. x (out_b(x))) (out_a((\\y. y) (\\z. z)))", Mode::Finitary, 20);
    derive("costs split by a coin", "cost*multidist",
           "tick((\\x. tick(x x)) (tick((\\y. y) (\\z. z)) (+)[1/2] (\\z. z)))", Mode::Finitary,
           20);
    derive("partiality needs the infinitary system", "multidist",
           "(\\x. x x) ((\\y. y) (\\z. z) (+)[1/2] omega)", Mode::Infinitary, 8);
    derive("a loop types only at bottom", "multidist", "omega", Mode::Infinitary, 12);

    // Serialize a derivation, read it back, and check the copy.
    MonadSpec spec = parse_monad("cost");
    TermPtr t = parse_term("tick((\\x. x) (\\z. z))");
    DerivPtr d = infer(spec, Mode::Finitary, t, 10);
    std::string text = fixture_to_json(spec, Mode::Finitary, d).dump(2);
    Fixture f = fixture_from_text(text);
    check(f.monad, f.mode, f.derivation);
    std::cout << "== round trip through JSON\n" << text << "\n   reloaded and re-checked: ok\n";
    return 0;
}
