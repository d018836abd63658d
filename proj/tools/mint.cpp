// Command-line workbench: evaluate terms under a chosen monad, observe
// their effects, print evaluation traces, infer intersection typings, and
// validate serialized derivations.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mint/derivation_json.hpp"
#include "mint/inference.hpp"

namespace {

using namespace mint;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A positional TERM argument; "@path" reads the term from a file.
TermPtr read_term(const std::string& raw) {
    if (!raw.empty() && raw[0] == '@') return parse_term(slurp(raw.substr(1)));
    return parse_term(raw);
}

// Monadic elements print like monadic types, with terms as payloads.
std::string show_element(const FormalSum<TermPtr>& e) {
    if (e.empty()) return "bot";
    std::string out;
    bool first = true;
    for (const auto& b : e.branches()) {
        if (!first) out += " + ";
        first = false;
        if (b.weight != 1) out += to_string(b.weight) + "*";
        if (b.grade.kind == Grade::Kind::Trivial)
            out += to_string(b.payload);
        else
            out += "(" + grade_to_string(b.grade) + ", " + to_string(b.payload) + ")";
    }
    return out;
}

struct Common {
    std::string monad = "pure";
    std::size_t fuel = 50;
    std::string mode = "finitary";
    std::string format = "text";
};

void add_common(CLI::App* cmd, Common& c, bool with_mode, bool with_format) {
    cmd->add_option("--monad", c.monad,
                    "monad selector: pure | writer:<alphabet> | cost | multidist | multiset "
                    "| cost*multidist | writer:<alphabet>*multidist")
        ->capture_default_str();
    cmd->add_option("--fuel", c.fuel, "maximum number of evaluation layers")
        ->capture_default_str();
    if (with_mode)
        cmd->add_option("--mode", c.mode, "finitary | infinitary")
            ->check(CLI::IsMember({"finitary", "infinitary"}))
            ->capture_default_str();
    if (with_format)
        cmd->add_option("--format", c.format, "text | json")
            ->check(CLI::IsMember({"text", "json"}))
            ->capture_default_str();
}

int run_eval(const Common& c, const std::string& raw) {
    MonadSpec spec = parse_monad(c.monad);
    TermPtr t = read_term(raw);
    RunResult r = run(spec, t, c.fuel);
    const auto& last = r.layers.back();
    std::cout << show_element(last) << "\n";
    if (all_values(last))
        std::cerr << "converged at layer " << r.layers.size() - 1 << "\n";
    else
        std::cerr << "not converged within " << c.fuel << " layers\n";
    return 0;
}

int run_observe(const Common& c, const std::string& raw) {
    MonadSpec spec = parse_monad(c.monad);
    TermPtr t = read_term(raw);
    std::cout << to_string(obs_n(spec, t, c.fuel)) << "\n";
    return 0;
}

int run_trace(const Common& c, const std::string& raw) {
    MonadSpec spec = parse_monad(c.monad);
    TermPtr t = read_term(raw);
    RunResult r = run(spec, t, c.fuel);
    for (std::size_t k = 0; k < r.layers.size(); ++k)
        std::cout << "e_" << k << " = " << show_element(r.layers[k]) << "\n";
    if (r.stopped_early) std::cerr << "all values at layer " << r.stop_at << "\n";
    return 0;
}

int run_infer(const Common& c, const std::string& raw) {
    MonadSpec spec = parse_monad(c.monad);
    Mode mode = parse_mode(c.mode);
    TermPtr t = read_term(raw);
    DerivPtr d = infer(spec, mode, t, c.fuel);
    check(spec, mode, d);  // self-validation: never emit an unchecked proof
    if (c.format == "json") {
        std::cout << fixture_to_json(spec, mode, d).dump(2) << "\n";
    } else {
        std::cout << to_string(d->mtype()) << "\n";
        std::cerr << "obs: " << to_string(obs_type(d->mtype())) << "\n";
    }
    return 0;
}

int run_check(const std::string& path) {
    std::string text = path == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {})
                                   : slurp(path);
    Fixture f = fixture_from_text(text);
    check(f.monad, f.mode, f.derivation);
    std::cout << "ok: " << to_string(f.derivation->subject) << " : "
              << to_string(f.derivation->mtype()) << "  [" << f.monad.selector << ", "
              << to_string(f.mode) << "]\n";
    return 0;
}

int run_examples() {
    std::cout <<
        R"(Showcase terms (quote them for your shell):

  duplication consumes the argument twice
    mint infer --monad pure '(\x. x x) ((\y. y) (\z. z))'

  output words concatenate left to right
    mint observe --monad writer:ab --fuel 10 '(\x. x (out_b(x))) (out_a((\y. y) (\z. z)))'

  a fair coin between a costlier and a cheaper path
    mint infer --monad 'cost*multidist' --fuel 10 \
      'tick((\x. tick(x x)) (tick((\y. y) (\z. z)) (+)[1/2] (\z. z)))'

  half the mass converges, half loops forever
    mint infer --monad multidist --mode infinitary --fuel 8 \
      '(\x. x x) ((\y. y) (\z. z) (+)[1/2] omega)'

  the loop itself: empty observation, bottom type
    mint infer --monad multidist --mode infinitary --fuel 8 omega

  nondeterministic counting keeps duplicate branches
    mint observe --monad multiset --fuel 5 'amb(\x. x, \x. x, \y. y y)'

  validate a serialized derivation
    mint check fixtures/fig4.json
)";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"effectful call-by-value lambda calculus with monadic intersection types"};
    app.require_subcommand(1);

    Common c;
    std::string term_arg;
    std::string check_path;

    CLI::App* eval = app.add_subcommand("eval", "iterate the small-step semantics");
    eval->add_option("term", term_arg, "term text, or @file")->required();
    add_common(eval, c, false, false);

    CLI::App* observe = app.add_subcommand("observe", "print the depth-n observation");
    observe->add_option("term", term_arg, "term text, or @file")->required();
    add_common(observe, c, false, false);

    CLI::App* trace = app.add_subcommand("trace", "print every evaluation layer");
    trace->add_option("term", term_arg, "term text, or @file")->required();
    add_common(trace, c, false, false);

    CLI::App* inf = app.add_subcommand("infer", "infer a typing derivation from evaluation");
    inf->add_option("term", term_arg, "term text, or @file")->required();
    add_common(inf, c, true, true);

    CLI::App* chk = app.add_subcommand("check", "validate a serialized derivation");
    chk->add_option("fixture", check_path, "fixture file (JSON), or - for stdin")->required();

    CLI::App* ex = app.add_subcommand("examples", "print showcase invocations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (eval->parsed()) return run_eval(c, term_arg);
        if (observe->parsed()) return run_observe(c, term_arg);
        if (trace->parsed()) return run_trace(c, term_arg);
        if (inf->parsed()) return run_infer(c, term_arg);
        if (chk->parsed()) return run_check(check_path);
        if (ex->parsed()) return run_examples();
    } catch (const mint::MintError& e) {
        switch (e.kind) {
            case mint::MintError::Kind::Parse:
                std::cerr << "parse error: " << e.what() << "\n";
                return 2;
            case mint::MintError::Kind::Domain:
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            case mint::MintError::Kind::Internal:
                std::cerr << "internal error: " << e.what() << "\n";
                return 1;
        }
    }
    return 0;
}
