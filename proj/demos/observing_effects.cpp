// Demo: evaluate effectful terms under different monads and watch what each
// one observes.  Builds as `demo-observing`; run it from anywhere.

#include <iostream>

#include "mint/semantics.hpp"

using namespace mint;

namespace {

void show(const std::string& title, const std::string& monad, const std::string& src,
          std::size_t fuel) {
    MonadSpec spec = parse_monad(monad);
    TermPtr t = parse_term(src);
    std::cout << "== " << title << "\n   " << to_string(t) << "   [" << monad << "]\n";
    ObservedChain chain = observed_chain(spec, t, fuel);
    for (std::size_t k = 0; k < chain.obs.size(); ++k) {
        if (k > 0 && chain.obs[k] == chain.obs[k - 1]) continue;  // only show growth
        std::cout << "   depth " << k << ": " << to_string(chain.obs[k]) << "\n";
    }
    std::cout << "   " << (chain.true_limit ? "converged" : "still growing (or silent) at this fuel")
              << "\n\n";
}

}  // namespace

int main() {
    // A pure program: two identity applications collapse to a single value.
    show("collapse to a value", "pure", "(\\x. x x) ((\\y. y) (\\z. z))", 8);

    // Writing letters: evaluation order decides the word that comes out.
    show("emitting a word", "writer:ab", "(\\x. x (out_b(x))) (out_a((\\y. y) (\\z. z)))", 8);

    // Coins and clocks together: each branch pays its own number of ticks.
    show("a biased coin with a cost meter", "cost*multidist",
         "tick((\\x. tick(x x)) (tick((\\y. y) (\\z. z)) (+)[1/2] (\\z. z)))", 10);

    // Half the mass diverges: the observation stalls at one half forever.
    show("half a chance of looping", "multidist", "(\\x. x x) ((\\y. y) (\\z. z) (+)[1/2] omega)",
         10);

    // Nondeterminism counts every run, so three answers all carry weight one.
    show("all options at once", "multiset",
         "amb((\\z. z), (\\y. y) (\\z. z), (\\x. x x) (\\z. z))", 6);

    return 0;
}
