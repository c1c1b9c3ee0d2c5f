#pragma once

// Concrete syntax:
//   t ::= x | [x] t | f(t, ..., t) | f | Z(t, ..., t) | Z | mu a. t | ⊤ | _|_
// Identifiers starting with an upper-case letter are meta-variables.
// `#` starts a comment that runs to the end of the line.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "term.hpp"

namespace icrs {

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

struct ParseOptions {
    /// Symbols not in the signature are declared on first use.
    bool infer_symbols = false;
    bool allow_meta = false;
    /// Nullary names that stay free variables even when inferring symbols.
    std::set<std::string> free_names = {};
};

namespace detail {

class Lexer {
public:
    enum class Kind { ident, lbracket, rbracket, lparen, rparen, comma, dot, colon, arrow, top, bottom, end };
    struct Token {
        Kind kind;
        std::string text;
        std::size_t line, column;
    };

    explicit Lexer(std::string_view src, std::size_t line = 1) : src_(src), line_(line) {}

    const Token& peek() {
        if (!ahead_) ahead_ = scan();
        return *ahead_;
    }
    Token next() {
        Token t = peek();
        ahead_.reset();
        return t;
    }
    bool at_end() { return peek().kind == Kind::end; }

    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
    }

private:
    Token scan() {
        skip_space();
        const std::size_t line = line_, col = column();
        if (pos_ >= src_.size()) return {Kind::end, "", line, col};
        const char c = src_[pos_];
        auto single = [&](Kind k) {
            ++pos_;
            return Token{k, std::string(1, c), line, col};
        };
        switch (c) {
        case '[': return single(Kind::lbracket);
        case ']': return single(Kind::rbracket);
        case '(': return single(Kind::lparen);
        case ')': return single(Kind::rparen);
        case ',': return single(Kind::comma);
        case '.': return single(Kind::dot);
        case ':': return single(Kind::colon);
        default: break;
        }
        if (src_.substr(pos_, 2) == "->") {
            pos_ += 2;
            return {Kind::arrow, "->", line, col};
        }
        if (src_.substr(pos_, 3) == "_|_") {
            pos_ += 3;
            return {Kind::bottom, kBottom, line, col};
        }
        if (src_.substr(pos_, kTop.size()) == kTop) {
            pos_ += kTop.size();
            return {Kind::top, kTop, line, col};
        }
        if (ident_char(c)) {
            std::size_t end = pos_;
            while (end < src_.size() && ident_char(src_[end])) ++end;
            Token t{Kind::ident, std::string(src_.substr(pos_, end - pos_)), line, col};
            pos_ = end;
            return t;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (c == '\n') {
                ++line_;
                ++pos_;
                line_start_ = pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }
    std::size_t column() const { return pos_ - line_start_ + 1; }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::size_t line_start_ = 0;
    std::optional<Token> ahead_;
};

class TermParser {
public:
    TermParser(Lexer& lex, Signature& sig, const ParseOptions& opts) : lex_(lex), sig_(sig), opts_(opts) {}

    Term parse() {
        const auto& t = lex_.peek();
        switch (t.kind) {
        case Lexer::Kind::lbracket: return parse_abs();
        case Lexer::Kind::top: lex_.next(); return build::top();
        case Lexer::Kind::bottom: lex_.next(); return build::bottom();
        case Lexer::Kind::ident:
            if (t.text == "mu") return parse_rec();
            return parse_head();
        default: fail("expected a term", t);
        }
    }

    [[noreturn]] static void fail(const std::string& msg, const Lexer::Token& at) {
        throw ParseError(msg + (at.kind == Lexer::Kind::end ? " at end of input" : " near '" + at.text + "'"), at.line,
                         at.column);
    }

private:
    struct Binder {
        std::string name;
        bool is_rec;
    };

    Lexer::Token expect(Lexer::Kind k, const char* what) {
        if (lex_.peek().kind != k) fail(std::string("expected ") + what, lex_.peek());
        return lex_.next();
    }

    Lexer::Token expect_variable() {
        auto t = expect(Lexer::Kind::ident, "a variable name");
        if (std::isupper(static_cast<unsigned char>(t.text[0]))) fail("binder names must start in lower case", t);
        return t;
    }

    Term parse_abs() {
        lex_.next();
        auto name = expect_variable();
        expect(Lexer::Kind::rbracket, "']'");
        scope_.push_back({name.text, false});
        Term body = parse();
        scope_.pop_back();
        return build::abs(body, name.text);
    }

    Term parse_rec() {
        lex_.next();
        auto name = expect_variable();
        expect(Lexer::Kind::dot, "'.'");
        scope_.push_back({name.text, true});
        Term body = parse();
        scope_.pop_back();
        return build::rec(body, name.text);
    }

    std::vector<Term> parse_args() {
        std::vector<Term> args;
        lex_.next();
        if (lex_.peek().kind == Lexer::Kind::rparen) {
            lex_.next();
            return args;
        }
        for (;;) {
            args.push_back(parse());
            auto t = lex_.next();
            if (t.kind == Lexer::Kind::rparen) return args;
            if (t.kind != Lexer::Kind::comma) fail("expected ',' or ')'", t);
        }
    }

    Term parse_head() {
        auto tok = lex_.next();
        const bool has_args = lex_.peek().kind == Lexer::Kind::lparen;
        if (std::isupper(static_cast<unsigned char>(tok.text[0]))) {
            if (!opts_.allow_meta) fail("meta-variable in a term", tok);
            return build::meta(tok.text, has_args ? parse_args() : std::vector<Term>{});
        }
        if (!has_args) {
            std::uint32_t abs_seen = 0, rec_seen = 0;
            for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
                if (it->name == tok.text) return it->is_rec ? build::rec_ref(rec_seen) : build::bound(abs_seen);
                ++(it->is_rec ? rec_seen : abs_seen);
            }
        }
        auto arity = sig_.arity(tok.text);
        if (has_args) {
            auto args = parse_args();
            if (!arity) {
                if (!opts_.infer_symbols) fail("unknown symbol", tok);
                sig_.declare(tok.text, args.size());
            } else if (*arity != args.size()) {
                fail("symbol expects " + std::to_string(*arity) + " arguments, got " + std::to_string(args.size()), tok);
            }
            return build::fun(tok.text, std::move(args));
        }
        if (arity) {
            if (*arity != 0) fail("symbol expects " + std::to_string(*arity) + " arguments", tok);
            return build::fun(tok.text);
        }
        if (opts_.infer_symbols && !opts_.free_names.count(tok.text)) {
            sig_.declare(tok.text, 0);
            return build::fun(tok.text);
        }
        return build::free(tok.text);
    }

    Lexer& lex_;
    Signature& sig_;
    const ParseOptions& opts_;
    std::vector<Binder> scope_;
};

}  // namespace detail

/// Parses a complete term. With `infer_symbols` set, unknown symbols are added
/// to `sig`; otherwise unknown nullary identifiers are free variables.
inline Term parse_term(std::string_view text, Signature& sig, const ParseOptions& opts = {}) {
    detail::Lexer lex(text);
    detail::TermParser p(lex, sig, opts);
    Term t = p.parse();
    if (!lex.at_end()) detail::TermParser::fail("trailing input", lex.peek());
    try {
        check_well_formed(t, {&sig, opts.allow_meta, true});
    } catch (const IllFormedTerm& e) {
        throw ParseError(e.what(), 1, 1);
    }
    return t;
}

inline Term parse_term(std::string_view text, const Signature& sig, const ParseOptions& opts = {}) {
    Signature copy = sig;
    ParseOptions strict = opts;
    strict.infer_symbols = false;
    return parse_term(text, copy, strict);
}

/// Parses with a throwaway signature that accepts any symbol.
inline Term parse_term(std::string_view text) {
    Signature sig;
    return parse_term(text, sig, {true, true});
}

inline MetaTerm parse_meta_term(std::string_view text, Signature& sig, bool infer_symbols = false) {
    return parse_term(text, sig, {infer_symbols, true});
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

class Printer {
public:
    explicit Printer(const Term& t) {
        collect_free_names(t, taken_);
        collect_symbols(t);
    }

    std::string print(const Term& t) {
        std::string out;
        go(t, out);
        return out;
    }

private:
    void collect_symbols(const Term& t) {
        if (t->kind == NodeKind::fun || t->kind == NodeKind::meta) taken_.insert(t->name);
        for (const auto& k : t->kids) collect_symbols(k);
    }

    std::string fresh(const std::string& hint) {
        std::string base = hint.empty() ? "x" : hint;
        std::string name = base;
        for (int i = 1; in_use(name); ++i) name = base + std::to_string(i);
        return name;
    }
    bool in_use(const std::string& name) const {
        if (taken_.count(name) || name == "mu") return true;
        return std::find(abs_names_.begin(), abs_names_.end(), name) != abs_names_.end() ||
               std::find(rec_names_.begin(), rec_names_.end(), name) != rec_names_.end();
    }

    void go(const Term& t, std::string& out) {
        const Node& n = *t;
        switch (n.kind) {
        case NodeKind::bound:
            if (n.index < abs_names_.size()) out += abs_names_[abs_names_.size() - 1 - n.index];
            else out += "?" + std::to_string(n.index - abs_names_.size());
            return;
        case NodeKind::free: out += n.name; return;
        case NodeKind::rec_ref:
            if (n.index < rec_names_.size()) out += rec_names_[rec_names_.size() - 1 - n.index];
            else out += "?rec" + std::to_string(n.index);
            return;
        case NodeKind::abs: {
            std::string name = fresh(n.name);
            out += "[" + name + "] ";
            abs_names_.push_back(name);
            go(n.body(), out);
            abs_names_.pop_back();
            return;
        }
        case NodeKind::rec: {
            std::string name = fresh(n.name.empty() ? "a" : n.name);
            out += "mu " + name + ". ";
            rec_names_.push_back(name);
            go(n.body(), out);
            rec_names_.pop_back();
            return;
        }
        case NodeKind::fun:
        case NodeKind::meta:
            out += n.name;
            if (n.kids.empty()) return;
            out += '(';
            for (std::size_t i = 0; i < n.kids.size(); ++i) {
                if (i) out += ", ";
                go(n.kids[i], out);
            }
            out += ')';
            return;
        }
    }

    std::set<std::string> taken_;
    std::vector<std::string> abs_names_;
    std::vector<std::string> rec_names_;
};

}  // namespace detail

inline std::string to_string(const Term& t) { return detail::Printer(t).print(t); }

}  // namespace icrs
