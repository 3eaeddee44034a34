#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace xorhorn {

enum class TermKind { Zero, Variable, Apply, Xor };

class Term;

/// Immutable term node. Shared freely between terms and threads.
struct TermNode {
    TermKind kind;
    std::string name;          // variable or symbol name; empty for Zero/Xor
    std::vector<Term> args;    // Apply arguments, or {left, right} for Xor
    std::size_t hash;
    std::size_t size;          // node count
    bool ground;
};

/// Value handle over a shared immutable node.
///
/// Equality is syntactic. Use xor_reduce() or equiv_mod_xor() for the
/// XOR congruence.
class Term {
public:
    Term();  // the constant 0

    static Term zero();
    static Term var(std::string name);
    static Term apply(std::string symbol, std::vector<Term> args = {});
    static Term constant(std::string symbol) { return apply(std::move(symbol)); }
    static Term xor_of(Term left, Term right);

    TermKind kind() const { return node_->kind; }
    bool is_zero() const { return kind() == TermKind::Zero; }
    bool is_var() const { return kind() == TermKind::Variable; }
    bool is_apply() const { return kind() == TermKind::Apply; }
    bool is_xor() const { return kind() == TermKind::Xor; }

    const std::string& name() const { return node_->name; }
    const std::vector<Term>& args() const { return node_->args; }
    std::size_t arity() const { return node_->args.size(); }
    const Term& left() const { return node_->args[0]; }
    const Term& right() const { return node_->args[1]; }

    std::size_t hash() const { return node_->hash; }
    std::size_t size() const { return node_->size; }
    bool is_ground() const { return node_->ground; }

    bool same_node(const Term& other) const { return node_ == other.node_; }

    friend bool operator==(const Term& a, const Term& b);
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

private:
    explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const TermNode> node_;
};

/// Total order on terms: kind (0 < variable < application < xor), then
/// symbol name, then arity, then arguments left to right.
int compare(const Term& a, const Term& b);

struct TermLess {
    bool operator()(const Term& a, const Term& b) const { return compare(a, b) < 0; }
};

struct TermHash {
    std::size_t operator()(const Term& t) const { return t.hash(); }
};

using TermSet = std::set<Term, TermLess>;
using Substitution = std::map<std::string, Term>;

/// Right-associated sum s0 + (s1 + (... + sn)); 0 for an empty list.
Term make_sum(const std::vector<Term>& summands);

/// Top-level summands of a term: descends through Xor nodes only. Zero
/// summands are dropped; a standard term yields itself.
std::vector<Term> summands(const Term& t);

bool is_standard(const Term& t);

/// Canonical xor-reduced representative: cancellation applied everywhere,
/// summands sorted by compare(), right-associated.
Term xor_reduce(const Term& t);

bool equiv_mod_xor(const Term& a, const Term& b);

std::set<std::string> vars(const Term& t);
void collect_vars(const Term& t, std::set<std::string>& out);
bool is_ground(const Term& t);

/// Simultaneous application; no renormalization.
Term apply_subst(const Term& t, const Substitution& sigma);

/// Complete non-standard subterms: the term itself if it is an xor, plus
/// every xor that is a direct argument of a standard term.
TermSet complete_nonstandard_subterms(const Term& t);

/// Every syntactic subterm, including t itself.
std::vector<Term> subterms(const Term& t);

std::string to_string(const Term& t);
std::string to_string(const Substitution& s);
std::ostream& operator<<(std::ostream& os, const Term& t);

}  // namespace xorhorn
