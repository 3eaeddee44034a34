#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "xorhorn/term.hpp"

namespace xorhorn {

/// Name of the intruder-knowledge predicate. Always declared with arity 1.
inline constexpr const char* kIntruder = "I";

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    friend bool operator==(const Atom& a, const Atom& b) {
        return a.predicate == b.predicate && a.args == b.args;
    }
    friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }
};

int compare(const Atom& a, const Atom& b);
std::size_t hash_atom(const Atom& a);

struct AtomHash {
    std::size_t operator()(const Atom& a) const { return hash_atom(a); }
};

Atom apply_subst(const Atom& a, const Substitution& sigma);
void collect_vars(const Atom& a, std::set<std::string>& out);
Atom xor_reduce(const Atom& a);
bool equiv_mod_xor(const Atom& a, const Atom& b);
std::string to_string(const Atom& a);

inline Atom intruder(Term t) { return Atom{kIntruder, {std::move(t)}}; }

enum class Role { IntruderFact, IntruderRule, ProtocolRule, EventRule };

std::string_view role_name(Role r);

struct HornClause {
    std::vector<Atom> premises;
    Atom conclusion;
    Role role = Role::ProtocolRule;
    std::set<std::string> exempt_vars;

    bool is_fact() const { return premises.empty(); }

    friend bool operator==(const HornClause& a, const HornClause& b) {
        return a.premises == b.premises && a.conclusion == b.conclusion && a.role == b.role &&
               a.exempt_vars == b.exempt_vars;
    }
};

std::set<std::string> vars(const HornClause& c);
std::string to_string(const HornClause& c);

struct SecrecyQuery {
    Atom goal;
};

struct CorrespondenceQuery {
    Atom end;                      // pattern
    Atom begin;                    // pattern
    std::vector<Atom> fixed_begins;  // ground
    Atom goal;                     // ground
};

using Query = std::variant<SecrecyQuery, CorrespondenceQuery>;

struct Theory {
    std::map<std::string, std::size_t> signature;   // function symbols
    std::map<std::string, std::size_t> predicates;  // includes I/1
    std::vector<HornClause> clauses;
    /// The rule I(x), I(y) -> I(x + y) is implied, never stored.
    bool xor_rule_implicit = true;

    Theory();

    /// Adds symbols occurring in the clause to the signature when missing.
    void declare_symbols_of(const Term& t);
    void declare_symbols_of(const Atom& a);
};

enum class DiagnosticKind { Syntax, UnknownSymbol, Arity, VariableCondition, Reserved };

std::string_view kind_name(DiagnosticKind k);

struct Diagnostic {
    DiagnosticKind kind;
    std::size_t line = 0;
    std::size_t column = 0;
    std::string message;
};

std::string to_string(const Diagnostic& d);

struct ParseResult {
    Theory theory;
    std::vector<Query> queries;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return diagnostics.empty(); }
};

/// Parses the line-oriented theory format. Never throws on malformed input;
/// problems are reported as diagnostics.
ParseResult parse_theory(std::string_view text);

/// Parses one term or atom with the theory's variable convention
/// (identifiers starting with an uppercase letter are variables).
std::optional<Term> parse_term(std::string_view text);
std::optional<Atom> parse_atom(std::string_view text);

/// Clause invariants: declared symbols, consistent arities, and the variable
/// condition on conclusions.
std::vector<Diagnostic> validate(const Theory& theory);

/// Names the ProVerif emitter needs for itself or that its dialect keeps.
bool is_reserved_word(const std::string& name);

/// Canonical text form; parse_theory(print_theory(t, q)) reproduces t and q.
std::string print_theory(const Theory& theory, const std::vector<Query>& queries = {});

}  // namespace xorhorn
