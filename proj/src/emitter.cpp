#include "xorhorn/emitter.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "xorhorn/normalization.hpp"

namespace xorhorn {

namespace {

constexpr const char* kAttacker = "attacker";
constexpr const char* kXor = "xor";
constexpr const char* kFrozen = "xx";
constexpr const char* kZero = "zero";
constexpr const char* kTable = "xtab";
constexpr const char* kDialect = "ProVerif untyped Horn clauses (.horn front-end)";

std::string pred_name(const std::string& p) { return p == kIntruder ? kAttacker : p; }

class Printer {
public:
    Printer(const CSet& c, Encoding enc) : c_(c), enc_(enc) {}

    std::string term(const Term& t) {
        std::string out;
        write(t, out);
        return out;
    }

    std::string atom(const Atom& a) {
        std::string out = pred_name(a.predicate) + ":";
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (i) out += ",";
            write(a.args[i], out);
        }
        return out;
    }

    std::string chain(std::uint64_t mask) {
        std::string out;
        write_chain(mask, out);
        return out;
    }

    std::set<std::string> used;  // encoding symbols that appeared

private:
    void write(const Term& t, std::string& out) {
        switch (t.kind()) {
            case TermKind::Zero:
                used.insert(kZero);
                out += "zero()";
                return;
            case TermKind::Variable: out += t.name(); return;
            case TermKind::Apply:
                out += t.name();
                out += "(";
                for (std::size_t i = 0; i < t.arity(); ++i) {
                    if (i) out += ",";
                    write(t.args()[i], out);
                }
                out += ")";
                return;
            case TermKind::Xor: break;
        }
        if (enc_ == Encoding::Plain) {
            write_xor(t.left(), t.right(), out);
            return;
        }
        std::uint64_t mask = 0;
        std::vector<Term> rest;
        for (const auto& s : summands(t)) {
            auto idx = s.is_ground() ? c_.index_of(s) : std::nullopt;
            if (idx) {
                mask ^= std::uint64_t{1} << *idx;
            } else {
                rest.push_back(s);
            }
        }
        if (mask == 0) {
            write_plain_sum(rest, 0, out);
        } else if (rest.empty()) {
            write_chain(mask, out);
        } else {
            used.insert(kXor);
            out += "xor(";
            write_chain(mask, out);
            out += ",";
            write_plain_sum(rest, 0, out);
            out += ")";
        }
    }

    void write_xor(const Term& l, const Term& r, std::string& out) {
        used.insert(kXor);
        out += "xor(";
        write(l, out);
        out += ",";
        write(r, out);
        out += ")";
    }

    void write_plain_sum(const std::vector<Term>& parts, std::size_t from, std::string& out) {
        if (from + 1 == parts.size()) {
            write(parts[from], out);
            return;
        }
        used.insert(kXor);
        out += "xor(";
        write(parts[from], out);
        out += ",";
        write_plain_sum(parts, from + 1, out);
        out += ")";
    }

    void write_chain(std::uint64_t mask, std::string& out) {
        if (mask == 0) {
            used.insert(kZero);
            out += "zero()";
            return;
        }
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (mask >> i & 1) idx.push_back(i);
        }
        std::size_t open = 0;
        for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
            used.insert(kFrozen);
            out += "xx(";
            write(c_.normalized(idx[k]), out);
            out += ",";
            ++open;
        }
        write(c_.normalized(idx.back()), out);
        out.append(open, ')');
    }

    const CSet& c_;
    Encoding enc_;
};

void collect_symbols(const Term& t, std::map<std::string, std::size_t>& out) {
    if (t.is_apply()) out.emplace(t.name(), t.arity());
    for (const auto& a : t.args()) collect_symbols(a, out);
}

void check_reserved(const ReducedTheory& rt) {
    for (const auto& [name, arity] : rt.theory.signature) {
        if (is_reserved_word(name)) throw EmitError("symbol '" + name + "' collides with a reserved word");
    }
    for (const auto& [name, arity] : rt.theory.predicates) {
        if (name != kIntruder && is_reserved_word(name)) {
            throw EmitError("predicate '" + name + "' collides with a reserved word");
        }
    }
}

// Instances of the xor families that the xtab schemas cannot express,
// because one of their open positions would carry the 0 mask.
bool needs_literal(const Origin& o) {
    switch (o.family) {
        case Family::Rule:
        case Family::Pop: return true;
        case Family::Const: return false;
        case Family::Variant: return o.c2 == 0 || (o.c ^ o.c2) == 0;
        case Family::Gen: return o.c == 0 || o.c2 == 0;
    }
    return true;
}

}  // namespace

std::string_view encoding_name(Encoding e) { return e == Encoding::Plain ? "plain" : "optimized"; }

std::string emit_proverif(const ReducedTheory& rt, const EmitOptions& opts) {
    check_reserved(rt);
    const bool optimized = opts.encoding == Encoding::Optimized && !rt.c_set.empty();
    Printer pr(rt.c_set, optimized ? Encoding::Optimized : Encoding::Plain);

    std::vector<std::string> clauses;
    for (std::size_t i = 0; i < rt.theory.clauses.size(); ++i) {
        if (optimized && !needs_literal(rt.origin[i])) continue;
        const HornClause& cl = rt.theory.clauses[i];
        std::string line;
        for (std::size_t k = 0; k < cl.premises.size(); ++k) {
            if (k) line += " & ";
            line += pr.atom(cl.premises[k]);
        }
        if (!cl.premises.empty()) line += " -> ";
        line += pr.atom(cl.conclusion);
        clauses.push_back(std::move(line));
    }
    for (const auto& f : opts.extra_facts) clauses.push_back(pr.atom(normal_form(f, rt.c_set)));

    if (optimized) {
        clauses.push_back("xtab:X1,X2,X3 & attacker:X1 & attacker:X2 -> attacker:X3");
        clauses.push_back("xtab:X1,X2,X3 & attacker:X1 & attacker:xor(X2,T) -> attacker:xor(X3,T)");
        clauses.push_back("xtab:X1,X2,X3 & attacker:xor(X1,T) & attacker:xor(X2,T) -> attacker:X3");
        pr.used.insert(kXor);
        const std::uint64_t n = rt.c_set.closure().size();
        for (std::uint64_t i = 0; i < n; ++i) {
            for (std::uint64_t j = 0; j < n; ++j) {
                clauses.push_back(std::string(kTable) + ":" + pr.chain(i) + "," + pr.chain(j) + "," + pr.chain(i ^ j));
            }
        }
    }

    std::vector<std::string> queries;
    for (const auto& g : opts.query_goals) queries.push_back(pr.atom(normal_form(g, rt.c_set)));

    const ReduceStats stats = reduce_stats(rt);
    std::ostringstream os;
    os << "(* generated by xorhorn *)\n";
    os << "(* dialect: " << kDialect << " *)\n";
    os << "(* encoding: " << encoding_name(optimized ? Encoding::Optimized : Encoding::Plain) << " *)\n";
    os << "(* C = " << to_string(rt.c_set) << ", closure size " << stats.closure_size << " *)\n";
    os << "(* clauses per family:";
    for (const auto& [family, count] : stats.clauses_per_family) {
        os << " (" << static_cast<int>(family) << ") " << family_name(family) << "=" << count;
    }
    os << " *)\n";
    for (const auto& line : opts.header_options) os << line << "\n";
    os << "\n";

    os << "pred attacker/1 elimVar,decompData.\n";
    if (optimized) os << "pred xtab/3.\n";
    for (const auto& [name, arity] : rt.theory.predicates) {
        if (name != kIntruder) os << "pred " << name << "/" << arity << ".\n";
    }
    std::map<std::string, std::size_t> funs = rt.theory.signature;
    for (const auto& cl : rt.theory.clauses) {
        for (const auto& p : cl.premises) {
            for (const auto& t : p.args) collect_symbols(t, funs);
        }
        for (const auto& t : cl.conclusion.args) collect_symbols(t, funs);
    }
    if (pr.used.count(kXor)) funs[kXor] = 2;
    if (pr.used.count(kFrozen)) funs[kFrozen] = 2;
    if (pr.used.count(kZero)) funs[kZero] = 0;
    for (const auto& [name, arity] : funs) os << "fun " << name << "/" << arity << ".\n";
    os << "\n";
    for (const auto& q : queries) os << "query " << q << ".\n";
    if (!queries.empty()) os << "\n";

    os << "reduc\n";
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        os << "  " << clauses[i] << (i + 1 == clauses.size() ? ".\n" : ";\n");
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Reader

namespace {

struct Tok {
    enum Kind { Ident, Punct, Arrow, End } kind;
    std::string text;
    std::size_t line;
};

struct ReadFailure {
    std::size_t line;
    std::string message;
};

std::vector<Tok> tokenize(std::string_view s) {
    std::vector<Tok> out;
    std::size_t line = 1;
    std::size_t i = 0;
    while (i < s.size()) {
        const char ch = s[i];
        if (ch == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
        } else if (ch == '(' && i + 1 < s.size() && s[i + 1] == '*') {
            const std::size_t start = line;
            i += 2;
            while (i + 1 < s.size() && !(s[i] == '*' && s[i + 1] == ')')) {
                if (s[i] == '\n') ++line;
                ++i;
            }
            if (i + 1 >= s.size()) throw ReadFailure{start, "unterminated comment"};
            i += 2;
        } else if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\'')) ++j;
            out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), line});
            i = j;
        } else if (ch == '-' && i + 1 < s.size() && s[i + 1] == '>') {
            out.push_back({Tok::Arrow, "->", line});
            i += 2;
        } else if (std::string_view("():,;.&/=").find(ch) != std::string_view::npos) {
            out.push_back({Tok::Punct, std::string(1, ch), line});
            ++i;
        } else {
            throw ReadFailure{line, std::string("unexpected character '") + ch + "'"};
        }
    }
    out.push_back({Tok::End, "", line});
    return out;
}

class Reader {
public:
    explicit Reader(std::vector<Tok> toks) : toks_(std::move(toks)) {}

    ProverifFile run() {
        while (peek().kind != Tok::End) {
            const Tok& kw = expect_ident();
            if (kw.text == "pred") {
                declaration(file_.predicates);
            } else if (kw.text == "fun") {
                declaration(file_.functions);
            } else if (kw.text == "query") {
                file_.queries.push_back(atom());
                expect(".");
            } else if (kw.text == "reduc") {
                reduc();
            } else if (kw.text == "param" || kw.text == "set" || kw.text == "nounif" || kw.text == "not") {
                option(kw);
            } else {
                fail(kw, "unknown statement '" + kw.text + "'");
            }
        }
        return std::move(file_);
    }

private:
    const Tok& peek() const { return toks_[pos_]; }
    const Tok& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const Tok& at, const std::string& msg) const { throw ReadFailure{at.line, msg}; }

    bool accept(const char* p) {
        if (peek().kind == Tok::Punct && peek().text == p) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(const char* p) {
        if (!accept(p)) fail(peek(), std::string("expected '") + p + "', found '" + peek().text + "'");
    }

    const Tok& expect_ident() {
        if (peek().kind != Tok::Ident) fail(peek(), "expected identifier, found '" + peek().text + "'");
        return next();
    }

    std::size_t number() {
        const Tok& t = expect_ident();
        for (char ch : t.text) {
            if (!std::isdigit(static_cast<unsigned char>(ch))) fail(t, "expected arity, found '" + t.text + "'");
        }
        return std::stoul(t.text);
    }

    void declaration(std::map<std::string, std::size_t>& table) {
        const Tok& name = expect_ident();
        expect("/");
        const std::size_t arity = number();
        if (peek().kind == Tok::Ident) {
            expect_ident();
            while (accept(",")) expect_ident();
        }
        expect(".");
        if (file_.predicates.count(name.text) || file_.functions.count(name.text)) {
            fail(name, "'" + name.text + "' declared twice");
        }
        table.emplace(name.text, arity);
    }

    void option(const Tok& kw) {
        std::string text = kw.text;
        while (!accept(".")) {
            if (peek().kind == Tok::End) fail(peek(), "unterminated option line");
            text += " " + next().text;
        }
        file_.options.push_back(text + ".");
    }

    Term term() {
        const Tok& name = expect_ident();
        if (!accept("(")) {
            if (file_.functions.count(name.text)) fail(name, "function '" + name.text + "' used without parentheses");
            if (!std::isalpha(static_cast<unsigned char>(name.text[0])) && name.text[0] != '_') {
                fail(name, "bad variable '" + name.text + "'");
            }
            return Term::var(name.text);
        }
        std::vector<Term> args;
        if (!accept(")")) {
            do {
                args.push_back(term());
            } while (accept(","));
            expect(")");
        }
        auto it = file_.functions.find(name.text);
        if (it == file_.functions.end()) fail(name, "undeclared function '" + name.text + "'");
        if (it->second != args.size()) {
            fail(name, "function '" + name.text + "' expects " + std::to_string(it->second) + " arguments, got " +
                           std::to_string(args.size()));
        }
        return Term::apply(name.text, std::move(args));
    }

    Atom atom() {
        const Tok& name = expect_ident();
        auto it = file_.predicates.find(name.text);
        if (it == file_.predicates.end()) fail(name, "undeclared predicate '" + name.text + "'");
        expect(":");
        Atom a{name.text, {}};
        do {
            a.args.push_back(term());
        } while (accept(","));
        if (a.args.size() != it->second) {
            fail(name, "predicate '" + name.text + "' expects " + std::to_string(it->second) + " arguments");
        }
        return a;
    }

    void reduc() {
        while (true) {
            ProverifClause cl;
            Atom first = atom();
            if (peek().kind == Tok::Arrow || (peek().kind == Tok::Punct && peek().text == "&")) {
                cl.premises.push_back(std::move(first));
                while (accept("&")) cl.premises.push_back(atom());
                if (peek().kind != Tok::Arrow) fail(peek(), "expected '->'");
                next();
                cl.conclusion = atom();
            } else {
                cl.conclusion = std::move(first);
            }
            file_.clauses.push_back(std::move(cl));
            if (accept(".")) return;
            expect(";");
        }
    }

    std::vector<Tok> toks_;
    std::size_t pos_ = 0;
    ProverifFile file_;
};

Term decode_term(const Term& t) {
    switch (t.kind()) {
        case TermKind::Zero:
        case TermKind::Variable: return t;
        case TermKind::Xor: return Term::xor_of(decode_term(t.left()), decode_term(t.right()));
        case TermKind::Apply: break;
    }
    if (t.name() == kZero && t.arity() == 0) return Term::zero();
    if ((t.name() == kXor || t.name() == kFrozen) && t.arity() == 2) {
        return Term::xor_of(decode_term(t.args()[0]), decode_term(t.args()[1]));
    }
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(decode_term(a));
    return Term::apply(t.name(), std::move(args));
}

Atom decode_atom(const Atom& a, const CSet& c) {
    Atom out{a.predicate == kAttacker ? kIntruder : a.predicate, {}};
    for (const auto& t : a.args) out.args.push_back(normal_form(decode_term(t), c));
    return out;
}

bool free_of_constants(const Term& t) {
    if (t.is_var()) return true;
    if (!t.is_apply() || t.arity() == 0) return false;
    for (const auto& a : t.args())
        if (!free_of_constants(a)) return false;
    return true;
}

// The file does not record roles. Clauses over attacker built from
// variables and non-constant symbols only are read as intruder rules.
Role infer_role(const HornClause& h) {
    if (h.premises.empty()) return Role::IntruderFact;
    auto plain = [](const Atom& a) {
        if (a.predicate != kIntruder) return false;
        for (const auto& t : a.args)
            if (!free_of_constants(t)) return false;
        return true;
    };
    if (!plain(h.conclusion)) return Role::ProtocolRule;
    for (const auto& p : h.premises)
        if (!plain(p)) return Role::ProtocolRule;
    return Role::IntruderRule;
}

}  // namespace

std::optional<ProverifFile> read_proverif(std::string_view text, std::vector<std::string>* errors) {
    try {
        return Reader(tokenize(text)).run();
    } catch (const ReadFailure& f) {
        if (errors) errors->push_back("line " + std::to_string(f.line) + ": " + f.message);
        return std::nullopt;
    }
}

Theory decode_proverif(const ProverifFile& file, const CSet& c) {
    Theory out;
    out.xor_rule_implicit = false;
    for (const auto& [name, arity] : file.functions) {
        if (name != kXor && name != kFrozen && name != kZero) out.signature.emplace(name, arity);
    }
    for (const auto& [name, arity] : file.predicates) {
        if (name != kAttacker && name != kTable) out.predicates.emplace(name, arity);
    }

    std::vector<Atom> table;
    for (const auto& cl : file.clauses) {
        if (cl.premises.empty() && cl.conclusion.predicate == kTable) table.push_back(cl.conclusion);
    }

    std::set<std::string> seen;
    auto add = [&](const std::vector<Atom>& premises, const Atom& conclusion) {
        HornClause h;
        for (const auto& p : premises) h.premises.push_back(decode_atom(p, c));
        h.conclusion = decode_atom(conclusion, c);
        for (const auto& p : h.premises) {
            if (p == h.conclusion) return;
        }
        std::set<std::string> body;
        for (const auto& p : h.premises) collect_vars(p, body);
        std::set<std::string> head;
        collect_vars(h.conclusion, head);
        for (const auto& v : head) {
            if (!body.count(v)) h.exempt_vars.insert(v);
        }
        h.role = infer_role(h);
        if (!seen.insert(to_string(h)).second) return;
        out.clauses.push_back(std::move(h));
    };

    for (const auto& cl : file.clauses) {
        if (cl.premises.empty() && cl.conclusion.predicate == kTable) continue;
        std::vector<Atom> rest;
        const Atom* schema = nullptr;
        for (const auto& p : cl.premises) {
            if (p.predicate == kTable && !schema) {
                schema = &p;
            } else {
                rest.push_back(p);
            }
        }
        if (!schema) {
            add(cl.premises, cl.conclusion);
            continue;
        }
        for (const auto& row : table) {
            Substitution s;
            bool ok = true;
            for (std::size_t i = 0; i < 3 && ok; ++i) {
                const Term& pat = schema->args[i];
                if (!pat.is_var()) {
                    ok = pat == row.args[i];
                    continue;
                }
                auto [it, inserted] = s.emplace(pat.name(), row.args[i]);
                ok = inserted || it->second == row.args[i];
            }
            if (!ok) continue;
            std::vector<Atom> prem;
            for (const auto& p : rest) prem.push_back(apply_subst(p, s));
            add(prem, apply_subst(cl.conclusion, s));
        }
    }
    return out;
}

}  // namespace xorhorn
