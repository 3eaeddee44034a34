#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "xorhorn/theory.hpp"

namespace xorhorn {

namespace {

enum class Tok { Ident, Var, Number, LParen, RParen, Comma, Dot, Slash, Plus, Arrow, Leads, LBracket, RBracket, LBrace, RBrace, End, Bad };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        const std::size_t l = line, cl = col;
        auto ident_char = [&](char ch) {
            return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '\'';
        };
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            std::string text(src.substr(i, j - i));
            Tok kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_') ? Tok::Var : Tok::Ident;
            advance(j - i);
            out.push_back({kind, std::move(text), l, cl});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            std::string text(src.substr(i, j - i));
            advance(j - i);
            out.push_back({Tok::Number, std::move(text), l, cl});
            continue;
        }
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
            advance(2);
            out.push_back({Tok::Arrow, "->", l, cl});
            continue;
        }
        if (c == '~' && i + 1 < src.size() && src[i + 1] == '>') {
            advance(2);
            out.push_back({Tok::Leads, "~>", l, cl});
            continue;
        }
        Tok kind = Tok::Bad;
        switch (c) {
            case '(': kind = Tok::LParen; break;
            case ')': kind = Tok::RParen; break;
            case ',': kind = Tok::Comma; break;
            case '.': kind = Tok::Dot; break;
            case '/': kind = Tok::Slash; break;
            case '+': kind = Tok::Plus; break;
            case '[': kind = Tok::LBracket; break;
            case ']': kind = Tok::RBracket; break;
            case '{': kind = Tok::LBrace; break;
            case '}': kind = Tok::RBrace; break;
            default: break;
        }
        out.push_back({kind, std::string(1, c), l, cl});
        advance(1);
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

struct SyntaxError {
    std::size_t line;
    std::size_t column;
    std::string message;
};

class Parser {
public:
    Parser(std::vector<Token> toks, bool check_symbols) : toks_(std::move(toks)), check_(check_symbols) {}

    ParseResult run() {
        while (peek().kind != Tok::End) {
            try {
                statement();
            } catch (const SyntaxError& e) {
                result_.diagnostics.push_back({DiagnosticKind::Syntax, e.line, e.column, e.message});
                recover();
            }
        }
        if (!pending_exempt_.empty()) {
            result_.diagnostics.push_back({DiagnosticKind::Syntax, exempt_line_, exempt_col_,
                                           "exempt declaration is not followed by a clause"});
        }
        return std::move(result_);
    }

    std::optional<Term> only_term() {
        try {
            Term t = term();
            if (peek().kind != Tok::End) return std::nullopt;
            return t;
        } catch (const SyntaxError&) {
            return std::nullopt;
        }
    }

    std::optional<Atom> only_atom() {
        try {
            Atom a = atom();
            if (peek().kind != Tok::End) return std::nullopt;
            return a;
        } catch (const SyntaxError&) {
            return std::nullopt;
        }
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) {
        throw SyntaxError{t.line, t.column, msg + (t.kind == Tok::End ? " at end of input" : " near '" + t.text + "'")};
    }

    const Token& expect(Tok kind, const char* what) {
        if (peek().kind != kind) fail(peek(), std::string("expected ") + what);
        return next();
    }

    void recover() {
        while (peek().kind != Tok::End && peek().kind != Tok::Dot) next();
        if (peek().kind == Tok::Dot) next();
    }

    void diag(DiagnosticKind kind, const Token& at, std::string msg) {
        result_.diagnostics.push_back({kind, at.line, at.column, std::move(msg)});
    }

    std::size_t number() {
        const Token& t = expect(Tok::Number, "a number");
        if (t.text.size() > 6) fail(t, "number out of range");
        return static_cast<std::size_t>(std::stoul(t.text));
    }

    void statement() {
        const Token& head = peek();
        if (head.kind == Tok::Ident) {
            if (head.text == "fun" || head.text == "const" || head.text == "pred") {
                if (toks_[pos_ + 1].kind == Tok::Ident) {
                    declaration();
                    return;
                }
            } else if (head.text == "query" && toks_[pos_ + 1].kind == Tok::Ident) {
                query();
                return;
            } else if (head.text == "exempt" && toks_[pos_ + 1].kind == Tok::Var) {
                exempt();
                return;
            }
        }
        clause();
    }

    void declaration() {
        const std::string keyword = next().text;
        const Token& name = expect(Tok::Ident, "a name");
        std::size_t arity = 0;
        if (keyword != "const") {
            expect(Tok::Slash, "'/'");
            arity = number();
        }
        expect(Tok::Dot, "'.'");
        if (is_reserved_word(name.text)) {
            diag(DiagnosticKind::Reserved, name, "'" + name.text + "' is a reserved word");
            return;
        }
        auto& table = keyword == "pred" ? result_.theory.predicates : result_.theory.signature;
        auto& other = keyword == "pred" ? result_.theory.signature : result_.theory.predicates;
        if (keyword == "pred" && arity == 0) {
            diag(DiagnosticKind::Arity, name, "predicate '" + name.text + "' needs at least one argument");
            return;
        }
        if (other.count(name.text)) {
            diag(DiagnosticKind::Reserved, name, "'" + name.text + "' is declared both as symbol and predicate");
            return;
        }
        auto [it, inserted] = table.emplace(name.text, arity);
        if (!inserted && it->second != arity) {
            diag(DiagnosticKind::Arity, name,
                 "'" + name.text + "' redeclared with arity " + std::to_string(arity) + ", was " +
                     std::to_string(it->second));
        }
    }

    void exempt() {
        const Token& kw = next();
        exempt_line_ = kw.line;
        exempt_col_ = kw.column;
        pending_exempt_.insert(expect(Tok::Var, "a variable").text);
        while (peek().kind == Tok::Comma) {
            next();
            pending_exempt_.insert(expect(Tok::Var, "a variable").text);
        }
        expect(Tok::Dot, "'.'");
    }

    std::optional<Role> role() {
        if (peek().kind != Tok::LBracket) return std::nullopt;
        next();
        const Token& r = expect(Tok::Ident, "a role");
        Role out;
        if (r.text == "protocol") {
            out = Role::ProtocolRule;
        } else if (r.text == "intruder") {
            out = Role::IntruderRule;
        } else if (r.text == "fact") {
            out = Role::IntruderFact;
        } else if (r.text == "event") {
            out = Role::EventRule;
        } else {
            fail(r, "unknown role");
        }
        expect(Tok::RBracket, "']'");
        return out;
    }

    void clause() {
        const Token start = peek();
        std::optional<Role> r = role();
        HornClause c;
        if (peek().kind != Tok::Arrow) {
            c.premises.push_back(atom());
            while (peek().kind == Tok::Comma) {
                next();
                c.premises.push_back(atom());
            }
        }
        expect(Tok::Arrow, "'->'");
        c.conclusion = atom();
        expect(Tok::Dot, "'.'");
        c.role = r ? *r : (c.premises.empty() ? Role::IntruderFact : Role::ProtocolRule);
        c.exempt_vars = std::move(pending_exempt_);
        pending_exempt_.clear();

        std::set<std::string> lhs, rhs;
        for (const auto& p : c.premises) collect_vars(p, lhs);
        collect_vars(c.conclusion, rhs);
        for (const auto& v : rhs) {
            if (!lhs.count(v) && !c.exempt_vars.count(v)) {
                diag(DiagnosticKind::VariableCondition, start,
                     "variable " + v + " occurs in the conclusion but in no premise");
            }
        }
        result_.theory.clauses.push_back(std::move(c));
    }

    void require_ground(const Atom& a, const Token& at, const char* what) {
        std::set<std::string> vs;
        collect_vars(a, vs);
        if (!vs.empty()) diag(DiagnosticKind::VariableCondition, at, std::string(what) + " must be ground");
    }

    void query() {
        next();
        const Token& kind = expect(Tok::Ident, "'secret' or 'corresp'");
        if (kind.text == "secret") {
            const Token at = peek();
            Term t = term();
            expect(Tok::Dot, "'.'");
            Atom goal = intruder(t);
            require_ground(goal, at, "secrecy goal");
            result_.queries.push_back(SecrecyQuery{std::move(goal)});
        } else if (kind.text == "corresp") {
            CorrespondenceQuery q;
            q.end = atom();
            expect(Tok::Leads, "'~>'");
            q.begin = atom();
            const Token& given = expect(Tok::Ident, "'given'");
            if (given.text != "given") fail(given, "expected 'given'");
            expect(Tok::LBrace, "'{'");
            if (peek().kind != Tok::RBrace) {
                const Token at = peek();
                q.fixed_begins.push_back(atom());
                require_ground(q.fixed_begins.back(), at, "begin fact");
                while (peek().kind == Tok::Comma) {
                    next();
                    const Token at2 = peek();
                    q.fixed_begins.push_back(atom());
                    require_ground(q.fixed_begins.back(), at2, "begin fact");
                }
            }
            expect(Tok::RBrace, "'}'");
            const Token& goal_kw = expect(Tok::Ident, "'goal'");
            if (goal_kw.text != "goal") fail(goal_kw, "expected 'goal'");
            const Token at = peek();
            q.goal = atom();
            require_ground(q.goal, at, "correspondence goal");
            expect(Tok::Dot, "'.'");
            result_.queries.push_back(std::move(q));
        } else {
            fail(kind, "unknown query kind");
        }
    }

    Atom atom() {
        const Token name = peek();
        if (name.kind != Tok::Ident && !(name.kind == Tok::Var && name.text == kIntruder)) fail(name, "expected a predicate");
        next();
        Atom a{name.text, {}};
        expect(Tok::LParen, "'('");
        a.args.push_back(term());
        while (peek().kind == Tok::Comma) {
            next();
            a.args.push_back(term());
        }
        expect(Tok::RParen, "')'");
        if (check_) {
            auto it = result_.theory.predicates.find(a.predicate);
            if (it == result_.theory.predicates.end()) {
                diag(DiagnosticKind::UnknownSymbol, name, "undeclared predicate '" + a.predicate + "'");
            } else if (it->second != a.args.size()) {
                diag(DiagnosticKind::Arity, name,
                     "predicate '" + a.predicate + "' expects " + std::to_string(it->second) + " arguments, got " +
                         std::to_string(a.args.size()));
            }
        }
        return a;
    }

    Term term() {
        Term acc = primary();
        while (peek().kind == Tok::Plus) {
            next();
            acc = Term::xor_of(acc, primary());
        }
        return acc;
    }

    Term primary() {
        const Token t = peek();
        switch (t.kind) {
            case Tok::Number:
                next();
                if (t.text != "0") fail(t, "only the constant 0 is numeric");
                return Term::zero();
            case Tok::Var:
                next();
                return Term::var(t.text);
            case Tok::LParen: {
                next();
                Term inner = term();
                expect(Tok::RParen, "')'");
                return inner;
            }
            case Tok::Ident: {
                next();
                std::vector<Term> args;
                if (peek().kind == Tok::LParen) {
                    next();
                    args.push_back(term());
                    while (peek().kind == Tok::Comma) {
                        next();
                        args.push_back(term());
                    }
                    expect(Tok::RParen, "')'");
                }
                if (check_) {
                    auto it = result_.theory.signature.find(t.text);
                    if (it == result_.theory.signature.end()) {
                        diag(DiagnosticKind::UnknownSymbol, t, "undeclared symbol '" + t.text + "'");
                    } else if (it->second != args.size()) {
                        diag(DiagnosticKind::Arity, t,
                             "symbol '" + t.text + "' expects " + std::to_string(it->second) + " arguments, got " +
                                 std::to_string(args.size()));
                    }
                }
                return Term::apply(t.text, std::move(args));
            }
            default: fail(t, "expected a term");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    bool check_;
    ParseResult result_;
    std::set<std::string> pending_exempt_;
    std::size_t exempt_line_ = 0;
    std::size_t exempt_col_ = 0;
};

}  // namespace

ParseResult parse_theory(std::string_view text) { return Parser(lex(text), true).run(); }

std::optional<Term> parse_term(std::string_view text) { return Parser(lex(text), false).only_term(); }

std::optional<Atom> parse_atom(std::string_view text) { return Parser(lex(text), false).only_atom(); }

// Symbols the emitter introduces, plus keywords of the output dialect.
bool is_reserved_word(const std::string& name) {
    static const std::set<std::string> words = {
        "xor", "xx", "xtab", "zero", "attacker", "pred", "fun", "query", "clauses", "reduc",
        "not", "param", "nounif", "elimVar", "elimVarStrict", "equation", "forall", "new", "let",
        "in", "if", "then", "else", "event", "noninterf", "weaksecret", "free", "const", "type",
        "process", "out", "phase", "set", "channel", "private", "table", "insert", "get", "otherwise"};
    return words.count(name) > 0;
}

}  // namespace xorhorn
