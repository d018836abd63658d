#pragma once

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mint/error.hpp"
#include "mint/rational.hpp"
#include "mint/term.hpp"

namespace mint {

// Surface grammar
//
//   comp   := appseq ( "(+)" "[" RAT "]" appseq )*          left-assoc
//   appseq := atom+                                          left-assoc
//   atom   := IDENT | "\" IDENT "." comp | "(" comp ")" | opcall
//   opcall := IDENT"(" comp ("," comp)* ")"                  no space before "("
//           | "tick" "(" comp ")"
//           | "out" "[" WORD "]" "(" comp ")"
//           | "amb" "(" comp ("," comp)* ")"
//
// A lambda body extends as far right as possible.  `IDENT(` with no
// whitespace before the parenthesis is an operation call; with whitespace
// it is an application of the variable IDENT.  `out_w(t)` is accepted as a
// synonym for `out[w](t)`.  `omega` denotes (\x. x x) (\x. x x).  General
// application `t u` with a non-value head desugars to (\%k. %k u) t with
// %k fresh; identifiers starting with `%` are reserved for that purpose.

namespace detail {

struct Token {
    enum class Kind { Ident, Int, Lambda, Dot, LParen, RParen, LBrack, RBrack, Comma, Choice, Slash, End };
    Kind kind;
    std::string text;
    bool tight_lparen = false;  // Ident immediately followed by '('
    std::size_t pos = 0;
};

inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0, n = src.size();
    auto push = [&](Token::Kind k, std::string text, std::size_t pos) {
        out.push_back({k, std::move(text), false, pos});
    };
    while (i < n) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        if (c == '(') {
            if (i + 2 < n && src[i + 1] == '+' && src[i + 2] == ')') {
                push(Token::Kind::Choice, "(+)", i);
                i += 3;
                continue;
            }
            push(Token::Kind::LParen, "(", i);
            ++i;
            continue;
        }
        switch (c) {
            case ')': push(Token::Kind::RParen, ")", i); ++i; continue;
            case '[': push(Token::Kind::LBrack, "[", i); ++i; continue;
            case ']': push(Token::Kind::RBrack, "]", i); ++i; continue;
            case ',': push(Token::Kind::Comma, ",", i); ++i; continue;
            case '\\': push(Token::Kind::Lambda, "\\", i); ++i; continue;
            case '.': push(Token::Kind::Dot, ".", i); ++i; continue;
            case '/': push(Token::Kind::Slash, "/", i); ++i; continue;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            push(Token::Kind::Int, src.substr(i, j - i), i);
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '%') {
            std::size_t j = i;
            while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                             src[j] == '_' || src[j] == '%' || src[j] == '\''))
                ++j;
            Token t{Token::Kind::Ident, src.substr(i, j - i), false, i};
            t.tight_lparen = j < n && src[j] == '(';
            out.push_back(std::move(t));
            i = j;
            continue;
        }
        throw parse_error("unexpected character '" + std::string(1, c) + "' at offset " +
                          std::to_string(i));
    }
    out.push_back({Token::Kind::End, "", false, n});
    return out;
}

class TermParser {
  public:
    explicit TermParser(const std::string& src) : toks_(lex(src)) {
        // Start fresh-name numbering above any %N identifier already present
        // so desugaring never collides with round-tripped names.
        for (const auto& t : toks_) {
            if (t.kind == Token::Kind::Ident && t.text.size() > 1 && t.text[0] == '%') {
                std::string tail = t.text.substr(1);
                if (tail.find_first_not_of("0123456789") == std::string::npos)
                    fresh_ = std::max(fresh_, std::stoul(tail) + 1);
            }
        }
    }

    TermPtr parse() {
        TermPtr t = parse_comp();
        expect(Token::Kind::End, "end of input");
        return t;
    }

  private:
    std::vector<Token> toks_;
    std::size_t at_ = 0;
    unsigned long fresh_ = 1;

    const Token& peek() const { return toks_[at_]; }
    Token next() { return toks_[at_++]; }

    [[noreturn]] void fail(const std::string& what) {
        const Token& t = peek();
        std::string got = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
        throw parse_error("expected " + what + " but found " + got + " at offset " +
                          std::to_string(t.pos));
    }

    Token expect(Token::Kind k, const std::string& what) {
        if (peek().kind != k) fail(what);
        return next();
    }

    std::string fresh_name() { return "%" + std::to_string(fresh_++); }

    // t u in the general sense: direct application when t is a value,
    // otherwise (\%k. %k u) t so the head runs first.
    TermPtr apply(TermPtr t, TermPtr u) {
        if (is_value(t)) return Term::app(std::move(t), std::move(u));
        std::string k = fresh_name();
        TermPtr lam = Term::lam(k, Term::app(Term::var(k), std::move(u)));
        return Term::app(std::move(lam), std::move(t));
    }

    Rational parse_rational_brackets() {
        expect(Token::Kind::LBrack, "'['");
        std::string num = expect(Token::Kind::Int, "a number").text;
        std::string den;
        if (peek().kind == Token::Kind::Slash) {
            next();
            den = expect(Token::Kind::Int, "a number").text;
        }
        expect(Token::Kind::RBrack, "']'");
        auto r = parse_rational(den.empty() ? num : num + "/" + den);
        if (!r) fail("a rational number");
        return *r;
    }

    bool atom_start() const {
        switch (peek().kind) {
            case Token::Kind::Ident:
            case Token::Kind::Lambda:
            case Token::Kind::LParen:
                return true;
            default:
                return false;
        }
    }

    TermPtr parse_comp() {
        TermPtr left = parse_appseq();
        while (peek().kind == Token::Kind::Choice) {
            next();
            Rational p = parse_rational_brackets();
            if (p < 0 || p > 1)
                throw parse_error("choice bias must lie in [0,1], got " + to_string(p));
            TermPtr right = parse_appseq();
            OpHead head{"choice", std::nullopt, p};
            left = Term::opn(std::move(head), {std::move(left), std::move(right)});
        }
        return left;
    }

    TermPtr parse_appseq() {
        TermPtr t = parse_atom();
        while (atom_start()) t = apply(std::move(t), parse_atom());
        return t;
    }

    TermPtr parse_opcall(const Token& ident) {
        std::string name = ident.text;
        std::optional<std::string> word;
        if (name.rfind("out_", 0) == 0) {
            word = name.substr(4);
            name = "out";
        }
        if (name == "out" && !word) fail("'[' with an output word after 'out'");
        if (word && word->find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ") !=
                        std::string::npos)
            throw parse_error("output word must be alphabetic, got '" + *word + "'");
        expect(Token::Kind::LParen, "'('");
        std::vector<TermPtr> args;
        args.push_back(parse_comp());
        while (peek().kind == Token::Kind::Comma) {
            next();
            args.push_back(parse_comp());
        }
        expect(Token::Kind::RParen, "')'");
        if ((name == "tick" || name == "out") && args.size() != 1)
            throw parse_error("operation '" + name + "' takes exactly one argument");
        return Term::opn({std::move(name), std::move(word), std::nullopt}, std::move(args));
    }

    TermPtr parse_atom() {
        const Token& t = peek();
        switch (t.kind) {
            case Token::Kind::Lambda: {
                next();
                std::string binder = expect(Token::Kind::Ident, "a binder name").text;
                expect(Token::Kind::Dot, "'.'");
                return Term::lam(std::move(binder), parse_comp());
            }
            case Token::Kind::LParen: {
                next();
                TermPtr inner = parse_comp();
                expect(Token::Kind::RParen, "')'");
                return inner;
            }
            case Token::Kind::Ident: {
                Token id = next();
                if (id.text == "omega") {
                    TermPtr self = Term::lam("x", Term::app(Term::var("x"), Term::var("x")));
                    return Term::app(self, self);
                }
                if (id.text == "out" && peek().kind == Token::Kind::LBrack) {
                    next();
                    std::string word = expect(Token::Kind::Ident, "an output word").text;
                    expect(Token::Kind::RBrack, "']'");
                    if (word.find_first_not_of(
                            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ") !=
                        std::string::npos)
                        throw parse_error("output word must be alphabetic, got '" + word + "'");
                    expect(Token::Kind::LParen, "'('");
                    TermPtr arg = parse_comp();
                    expect(Token::Kind::RParen, "')'");
                    return Term::opn({"out", std::move(word), std::nullopt}, {std::move(arg)});
                }
                if (id.tight_lparen) return parse_opcall(id);
                if (id.text == "tick" || id.text == "out" || id.text == "amb" ||
                    id.text == "choice")
                    throw parse_error("'" + id.text +
                                      "' is an operation name and needs arguments (offset " +
                                      std::to_string(id.pos) + ")");
                return Term::var(id.text);
            }
            default:
                fail("a term");
        }
    }
};

}  // namespace detail

inline TermPtr parse_term(const std::string& src) { return detail::TermParser(src).parse(); }

// ---------------------------------------------------------------------------
// Printing (parse(print(t)) is alpha-equal to t)
// ---------------------------------------------------------------------------

namespace detail {

enum class PrintCtx { Top, Fun, Arg, ChoiceL, ChoiceR, OpArg };

inline bool is_choice(const TermPtr& t) {
    return t->kind == Term::Kind::Op && t->op.name == "choice";
}

inline bool needs_parens(const TermPtr& t, PrintCtx ctx) {
    switch (ctx) {
        case PrintCtx::Top:
        case PrintCtx::OpArg:
            return false;
        case PrintCtx::Fun:
            return t->kind == Term::Kind::Lam;
        case PrintCtx::Arg:
            return t->kind == Term::Kind::Lam || t->kind == Term::Kind::App || is_choice(t);
        case PrintCtx::ChoiceL:
            return t->kind == Term::Kind::Lam;  // left-assoc: nested choice stays bare
        case PrintCtx::ChoiceR:
            return t->kind == Term::Kind::Lam || is_choice(t);
    }
    return false;
}

inline void print_rec(const TermPtr& t, PrintCtx ctx, std::ostringstream& os) {
    bool paren = needs_parens(t, ctx);
    if (paren) os << "(";
    switch (t->kind) {
        case Term::Kind::Var:
            os << t->name;
            break;
        case Term::Kind::Lam:
            os << "\\" << t->name << ". ";
            print_rec(t->kids[0], PrintCtx::Top, os);
            break;
        case Term::Kind::App:
            print_rec(t->kids[0], PrintCtx::Fun, os);
            os << " ";
            print_rec(t->kids[1], PrintCtx::Arg, os);
            break;
        case Term::Kind::Op:
            if (t->op.name == "choice") {
                print_rec(t->kids[0], PrintCtx::ChoiceL, os);
                os << " (+)[" << to_string(*t->op.prob) << "] ";
                print_rec(t->kids[1], PrintCtx::ChoiceR, os);
            } else {
                os << t->op.name;
                if (t->op.word) os << "[" << *t->op.word << "]";
                os << "(";
                for (std::size_t i = 0; i < t->kids.size(); ++i) {
                    if (i) os << ", ";
                    print_rec(t->kids[i], PrintCtx::OpArg, os);
                }
                os << ")";
            }
            break;
    }
    if (paren) os << ")";
}

}  // namespace detail

inline std::string to_string(const TermPtr& t) {
    std::ostringstream os;
    detail::print_rec(t, detail::PrintCtx::Top, os);
    return os.str();
}

}  // namespace mint
