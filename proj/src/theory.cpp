#include <sstream>

#include "xorhorn/theory.hpp"

namespace xorhorn {

int compare(const Atom& a, const Atom& b) {
    if (int c = a.predicate.compare(b.predicate); c != 0) return c < 0 ? -1 : 1;
    if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (int c = compare(a.args[i], b.args[i]); c != 0) return c;
    }
    return 0;
}

std::size_t hash_atom(const Atom& a) {
    std::size_t h = std::hash<std::string>{}(a.predicate);
    for (const auto& t : a.args) h = h * 1000003u ^ t.hash();
    return h;
}

Atom apply_subst(const Atom& a, const Substitution& sigma) {
    Atom out{a.predicate, {}};
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) out.args.push_back(apply_subst(t, sigma));
    return out;
}

void collect_vars(const Atom& a, std::set<std::string>& out) {
    for (const auto& t : a.args) collect_vars(t, out);
}

Atom xor_reduce(const Atom& a) {
    Atom out{a.predicate, {}};
    for (const auto& t : a.args) out.args.push_back(xor_reduce(t));
    return out;
}

bool equiv_mod_xor(const Atom& a, const Atom& b) {
    if (a.predicate != b.predicate || a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!equiv_mod_xor(a.args[i], b.args[i])) return false;
    }
    return true;
}

std::string to_string(const Atom& a) {
    std::ostringstream os;
    os << a.predicate << '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) os << ", ";
        os << a.args[i];
    }
    os << ')';
    return os.str();
}

std::string_view role_name(Role r) {
    switch (r) {
        case Role::IntruderFact: return "fact";
        case Role::IntruderRule: return "intruder";
        case Role::ProtocolRule: return "protocol";
        case Role::EventRule: return "event";
    }
    return "protocol";
}

std::set<std::string> vars(const HornClause& c) {
    std::set<std::string> out;
    for (const auto& p : c.premises) collect_vars(p, out);
    collect_vars(c.conclusion, out);
    return out;
}

std::string to_string(const HornClause& c) {
    std::ostringstream os;
    for (std::size_t i = 0; i < c.premises.size(); ++i) {
        if (i) os << ", ";
        os << to_string(c.premises[i]);
    }
    os << (c.premises.empty() ? "-> " : " -> ") << to_string(c.conclusion);
    return os.str();
}

Theory::Theory() { predicates[kIntruder] = 1; }

void Theory::declare_symbols_of(const Term& t) {
    if (t.is_apply()) signature.emplace(t.name(), t.arity());
    for (const auto& a : t.args()) declare_symbols_of(a);
}

void Theory::declare_symbols_of(const Atom& a) {
    predicates.emplace(a.predicate, a.args.size());
    for (const auto& t : a.args) declare_symbols_of(t);
}

std::string_view kind_name(DiagnosticKind k) {
    switch (k) {
        case DiagnosticKind::Syntax: return "syntax";
        case DiagnosticKind::UnknownSymbol: return "unknown-symbol";
        case DiagnosticKind::Arity: return "arity";
        case DiagnosticKind::VariableCondition: return "variable-condition";
        case DiagnosticKind::Reserved: return "reserved";
    }
    return "syntax";
}

std::string to_string(const Diagnostic& d) {
    std::ostringstream os;
    os << d.line << ':' << d.column << ": " << kind_name(d.kind) << ": " << d.message;
    return os.str();
}

namespace {

void check_term(const Theory& th, const Term& t, const std::string& where, std::vector<Diagnostic>& out) {
    if (t.is_apply()) {
        auto it = th.signature.find(t.name());
        if (it == th.signature.end()) {
            out.push_back({DiagnosticKind::UnknownSymbol, 0, 0, where + ": undeclared symbol '" + t.name() + "'"});
        } else if (it->second != t.arity()) {
            out.push_back({DiagnosticKind::Arity, 0, 0,
                           where + ": symbol '" + t.name() + "' has arity " + std::to_string(it->second)});
        }
    }
    for (const auto& a : t.args()) check_term(th, a, where, out);
}

void check_atom(const Theory& th, const Atom& a, const std::string& where, std::vector<Diagnostic>& out) {
    auto it = th.predicates.find(a.predicate);
    if (it == th.predicates.end()) {
        out.push_back({DiagnosticKind::UnknownSymbol, 0, 0, where + ": undeclared predicate '" + a.predicate + "'"});
    } else if (it->second != a.args.size() || a.args.empty()) {
        out.push_back({DiagnosticKind::Arity, 0, 0,
                       where + ": predicate '" + a.predicate + "' has arity " + std::to_string(it->second)});
    }
    for (const auto& t : a.args) check_term(th, t, where, out);
}

}  // namespace

std::vector<Diagnostic> validate(const Theory& theory) {
    std::vector<Diagnostic> out;
    for (std::size_t i = 0; i < theory.clauses.size(); ++i) {
        const auto& c = theory.clauses[i];
        const std::string where = "clause " + std::to_string(i);
        for (const auto& p : c.premises) check_atom(theory, p, where, out);
        check_atom(theory, c.conclusion, where, out);
        std::set<std::string> lhs;
        for (const auto& p : c.premises) collect_vars(p, lhs);
        std::set<std::string> rhs;
        collect_vars(c.conclusion, rhs);
        for (const auto& v : rhs) {
            if (!lhs.count(v) && !c.exempt_vars.count(v)) {
                out.push_back({DiagnosticKind::VariableCondition, 0, 0,
                               where + ": variable " + v + " occurs only in the conclusion"});
            }
        }
    }
    return out;
}

namespace {

void print_atom_list(std::ostream& os, const std::vector<Atom>& atoms) {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) os << ", ";
        os << to_string(atoms[i]);
    }
}

}  // namespace

std::string print_theory(const Theory& theory, const std::vector<Query>& queries) {
    std::ostringstream os;
    for (const auto& [name, arity] : theory.signature) {
        if (arity == 0) {
            os << "const " << name << ".\n";
        } else {
            os << "fun " << name << '/' << arity << ".\n";
        }
    }
    for (const auto& [name, arity] : theory.predicates) {
        if (name == kIntruder) continue;
        os << "pred " << name << '/' << arity << ".\n";
    }
    for (const auto& c : theory.clauses) {
        if (!c.exempt_vars.empty()) {
            os << "exempt ";
            bool first = true;
            for (const auto& v : c.exempt_vars) {
                if (!first) os << ", ";
                first = false;
                os << v;
            }
            os << ".\n";
        }
        os << '[' << role_name(c.role) << "] ";
        print_atom_list(os, c.premises);
        os << (c.premises.empty() ? "-> " : " -> ") << to_string(c.conclusion) << ".\n";
    }
    for (const auto& q : queries) {
        if (const auto* s = std::get_if<SecrecyQuery>(&q)) {
            if (s->goal.predicate == kIntruder && s->goal.args.size() == 1) {
                os << "query secret " << s->goal.args[0] << ".\n";
            }
        } else {
            const auto& cq = std::get<CorrespondenceQuery>(q);
            os << "query corresp " << to_string(cq.end) << " ~> " << to_string(cq.begin) << " given { ";
            print_atom_list(os, cq.fixed_begins);
            os << (cq.fixed_begins.empty() ? "} goal " : " } goal ") << to_string(cq.goal) << ".\n";
        }
    }
    return os.str();
}

}  // namespace xorhorn
