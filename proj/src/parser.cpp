#include <cctype>
#include <memory>

#include "cps/syntax.hpp"

namespace cps {

namespace {

struct Token {
    enum class Kind { Ident, Number, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    SourcePos pos;
};

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        const unsigned char c = static_cast<unsigned char>(src[i]);
        if (std::isspace(c)) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.pos = {line, col};
        if (std::isalpha(c) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.kind = Token::Kind::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = Token::Kind::Number;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else {
            const std::string_view rest = src.substr(i);
            t.kind = Token::Kind::Punct;
            if (rest.starts_with(":=") || rest.starts_with("!=")) {
                t.text = std::string(rest.substr(0, 2));
            } else if (std::string_view("=(){},|/:").find(static_cast<char>(c)) != std::string_view::npos) {
                t.text = std::string(1, static_cast<char>(c));
            } else {
                throw ParseError(t.pos, std::string("unexpected character '") + static_cast<char>(c) + "'");
            }
            advance(t.text.size());
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.pos = {line, col};
    out.push_back(end);
    return out;
}

bool is_keyword(std::string_view s) {
    static constexpr std::string_view kw[] = {"skip", "if",  "then", "else",  "endif", "forall", "in",
                                              "do",   "enddo", "par", "endpar", "and",  "or",     "not",
                                              "true", "false", "empty"};
    for (auto k : kw)
        if (k == s) return true;
    return false;
}

TermPtr at(TermPtr t, SourcePos pos) {
    auto m = std::make_shared<Term>(*t);
    m->pos = pos;
    return m;
}

RulePtr at(RulePtr r, SourcePos pos) {
    auto m = std::make_shared<Rule>(*r);
    m->pos = pos;
    return m;
}

class Parser {
public:
    Parser(std::string_view text, const Signature& sig) : toks_(tokenize(text)), sig_(sig) {}

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Token::Kind::End; }
    bool is(std::string_view text, std::size_t k = 0) const {
        const Token& t = peek(k);
        return t.kind != Token::Kind::End && t.kind != Token::Kind::Number && t.text == text;
    }
    Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        const std::string got = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.pos, msg + ", got " + got);
    }

    Token expect(std::string_view text) {
        if (!is(text)) fail("expected '" + std::string(text) + "'");
        return take();
    }

    std::string ident() {
        if (peek().kind != Token::Kind::Ident || is_keyword(peek().text)) fail("expected identifier");
        return take().text;
    }

    void expect_end() {
        if (!at_end()) fail("expected end of input");
    }

    // ---- terms

    TermPtr term() { return disj(); }

    TermPtr disj() {
        TermPtr lhs = conj();
        while (is("or")) {
            const SourcePos p = take().pos;
            lhs = at(build::builtin(Builtin::Or, {lhs, conj()}), p);
        }
        return lhs;
    }

    TermPtr conj() {
        TermPtr lhs = negation();
        while (is("and")) {
            const SourcePos p = take().pos;
            lhs = at(build::builtin(Builtin::And, {lhs, negation()}), p);
        }
        return lhs;
    }

    TermPtr negation() {
        if (is("not")) {
            const SourcePos p = take().pos;
            return at(build::builtin(Builtin::Not, {negation()}), p);
        }
        return comparison();
    }

    TermPtr comparison() {
        TermPtr lhs = primary();
        if (is("=")) {
            const SourcePos p = take().pos;
            return at(build::eq(lhs, primary()), p);
        }
        if (is("!=")) {
            const SourcePos p = take().pos;
            return at(build::builtin(Builtin::Not, {at(build::eq(lhs, primary()), p)}), p);
        }
        if (is("in")) {
            const SourcePos p = take().pos;
            return at(build::builtin(Builtin::In, {lhs, primary()}), p);
        }
        return lhs;
    }

    TermPtr primary() {
        const Token& t = peek();
        const SourcePos p = t.pos;
        if (t.kind == Token::Kind::Number) {
            const std::string digits = take().text;
            if (digits.size() > 4) throw ParseError(p, "numeral too large");
            return at(build::numeral(std::stoi(digits)), p);
        }
        if (is("(")) {
            take();
            TermPtr inner = term();
            expect(")");
            return inner;
        }
        if (is("{")) return braces();
        if (t.kind != Token::Kind::Ident) fail("expected term");
        if (is("true")) return take(), at(build::truth(), p);
        if (is("false")) return take(), at(build::falsity(), p);
        if (is("empty")) return take(), at(build::empty(), p);
        if (is_keyword(t.text)) fail("expected term");

        const std::string name = take().text;
        if (is("(")) {
            take();
            std::vector<TermPtr> args;
            if (!is(")")) {
                args.push_back(term());
                while (is(",")) take(), args.push_back(term());
            }
            expect(")");
            return at(build::apply(sig_, name, std::move(args)), p);
        }
        if (sig_.find_dynamic(name) || sig_.find_input(name) || name == "Atoms")
            return at(build::apply(sig_, name, {}), p);
        if (std::islower(static_cast<unsigned char>(name[0])) || name[0] == '_') return at(build::var(name), p);
        // Unresolved: validate() reports it with this position.
        return at(build::apply(sig_, name, {}), p);
    }

    TermPtr braces() {
        const SourcePos p = expect("{").pos;
        if (is("}")) return take(), at(build::empty(), p);
        TermPtr first = term();
        if (is("|")) {
            take();
            const std::string v = ident();
            expect("in");
            TermPtr source = primary();
            TermPtr guard = build::truth();
            if (is("and")) take(), guard = term();
            expect("}");
            return at(build::comprehension(first, v, source, guard), p);
        }
        std::vector<TermPtr> items{first};
        while (is(",")) take(), items.push_back(term());
        expect("}");
        return at(build::enumeration(std::move(items)), p);
    }

    // ---- rules

    RulePtr rule() {
        const SourcePos p = peek().pos;
        if (is("skip")) return take(), at(build::skip(), p);
        if (is("if")) {
            take();
            TermPtr cond = term();
            expect("then");
            RulePtr then_rule = rule();
            RulePtr else_rule = build::skip();
            if (is("else")) take(), else_rule = rule();
            expect("endif");
            return at(build::if_then(cond, then_rule, else_rule), p);
        }
        if (is("forall")) {
            take();
            const std::string v = ident();
            expect("in");
            TermPtr source = term();
            expect("do");
            RulePtr body = rule();
            expect("enddo");
            return at(build::forall(v, source, body), p);
        }
        if (is("par")) {
            take();
            std::vector<RulePtr> rules;
            while (!is("endpar")) {
                if (at_end()) fail("expected 'endpar'");
                rules.push_back(rule());
            }
            take();
            return at(build::par(std::move(rules)), p);
        }
        if (peek().kind != Token::Kind::Ident || is_keyword(peek().text)) fail("expected rule");
        const std::string target = take().text;
        std::vector<TermPtr> args;
        if (is("(")) {
            take();
            if (!is(")")) {
                args.push_back(term());
                while (is(",")) take(), args.push_back(term());
            }
            expect(")");
        }
        expect(":=");
        TermPtr value = term();
        return at(build::assign(sig_, target, std::move(args), value), p);
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const Signature& sig_;
};

int parse_arity(const Token& t) {
    if (t.kind != Token::Kind::Number || t.text.size() > 3) throw ParseError(t.pos, "expected arity");
    return std::stoi(t.text);
}

}  // namespace

Program parse_program_unchecked(std::string_view text) {
    // The header is parsed first so that the rule body can resolve names.
    auto sig = std::make_shared<Signature>();
    Parser header(text, *sig);
    if (header.is("signature")) {
        header.take();
        header.expect(":");
        while (header.is("input") || header.is("dynamic")) {
            const bool input = header.take().text == "input";
            const Token name_tok = header.peek();
            const std::string name = header.ident();
            header.expect("/");
            const int arity = parse_arity(header.take());
            bool relational = false;
            if (!input && header.is("relational")) header.take(), relational = true;
            try {
                if (input)
                    sig->add_input(name, arity);
                else
                    sig->add_dynamic(name, arity, relational);
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                throw ParseError(name_tok.pos, e.what());
            }
        }
    }
    header.expect("rule");
    header.expect(":");
    // Re-tokenizing is simpler than threading the offset; files are small.
    Parser body(text, *sig);
    while (!(body.is("rule") && body.is(":", 1))) body.take();
    body.take();
    body.take();
    RulePtr r = body.rule();
    body.expect_end();
    return Program{sig, r};
}

Program parse_program(std::string_view text) {
    Program p = parse_program_unchecked(text);
    auto diags = validate(p);
    if (!diags.empty()) throw ValidationError(std::move(diags));
    return p;
}

TermPtr parse_term(const Signature& sig, std::string_view text) {
    Parser p(text, sig);
    TermPtr t = p.term();
    p.expect_end();
    return t;
}

RulePtr parse_rule(const Signature& sig, std::string_view text) {
    Parser p(text, sig);
    RulePtr r = p.rule();
    p.expect_end();
    return r;
}

}  // namespace cps
