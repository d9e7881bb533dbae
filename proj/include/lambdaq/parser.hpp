#pragma once

#include "lambdaq/term.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace lambdaq {

struct ParseError : Error {
    int line;
    int column;
    ParseError(int l, int c, const std::string& msg)
        : Error("parse error at " + std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
          line(l),
          column(c) {}
};

namespace detail {

// Grammar:
//   term  := '\' ident '.' term | app
//   app   := atom+                      (left-associative)
//   atom  := ident | '(' term ')' | '[' elems? ']' | '~' atom
//   elems := term (':' count)? (',' term (':' count)?)*
// Identifiers are ASCII [A-Za-z][A-Za-z0-9_]*; '#' comments to end of line.
// The ':' count annotation is the compressed form of a repeated branch.
class TermParser {
public:
    explicit TermParser(std::string_view src) : src_(src) {}

    TermPtr parse() {
        skip_ws();
        TermPtr t = parse_term();
        skip_ws();
        if (pos_ < src_.size()) fail("unexpected trailing input");
        return t;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, col_, msg); }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool peek_is(char c) {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    void expect(char c, const char* what) {
        skip_ws();
        if (pos_ >= src_.size() || src_[pos_] != c) fail(std::string("expected ") + what);
        advance();
    }

    bool at_atom_start() {
        skip_ws();
        if (pos_ >= src_.size()) return false;
        char c = src_[pos_];
        return std::isalpha(static_cast<unsigned char>(c)) || c == '(' || c == '[' || c == '~';
    }

    std::string parse_ident() {
        skip_ws();
        if (pos_ >= src_.size() || !std::isalpha(static_cast<unsigned char>(src_[pos_])))
            fail("expected identifier");
        std::string out;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                out += c;
                advance();
            } else {
                break;
            }
        }
        return out;
    }

    BigInt parse_count() {
        skip_ws();
        if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
            fail("expected multiplicity");
        std::string digits;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            digits += src_[pos_];
            advance();
        }
        BigInt n(digits);
        if (n < 1) fail("multiplicity must be positive");
        return n;
    }

    TermPtr parse_term() {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '\\') {
            advance();
            std::string binder = parse_ident();
            expect('.', "'.'");
            return abs(binder, parse_term());
        }
        return parse_app();
    }

    TermPtr parse_app() {
        if (!at_atom_start()) fail("expected a term");
        TermPtr t = parse_atom();
        while (at_atom_start()) t = app(t, parse_atom());
        return t;
    }

    TermPtr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        char c = src_[pos_];
        if (c == '~') {
            advance();
            skip_ws();
            if (pos_ >= src_.size()) fail("unexpected end of input after '~'");
            return Term::negation(parse_atom());
        }
        if (c == '(') {
            advance();
            TermPtr t = parse_term();
            expect(')', "')'");
            return t;
        }
        if (c == '[') {
            advance();
            std::vector<SupEntry> es;
            if (peek_is(']')) {
                advance();
                return Term::superposition(std::move(es));
            }
            while (true) {
                TermPtr t = parse_term();
                BigInt count = 1;
                if (peek_is(':')) {
                    advance();
                    count = parse_count();
                }
                es.push_back({t, count});
                if (peek_is(',')) {
                    advance();
                    continue;
                }
                expect(']', "']' or ','");
                break;
            }
            return Term::superposition(std::move(es));
        }
        return var(parse_ident());
    }
};

}  // namespace detail

inline TermPtr parse_term(std::string_view source) { return detail::TermParser(source).parse(); }

}  // namespace lambdaq
