#include "xorhorn/term.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace xorhorn {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::shared_ptr<const TermNode> make_node(TermKind kind, std::string name, std::vector<Term> args) {
    auto node = std::make_shared<TermNode>();
    node->kind = kind;
    node->hash = mix(static_cast<std::size_t>(kind) * 0x51ed27ULL, std::hash<std::string>{}(name));
    node->size = 1;
    node->ground = kind != TermKind::Variable;
    for (const auto& a : args) {
        node->hash = mix(node->hash, a.hash());
        node->size += a.size();
        node->ground = node->ground && a.is_ground();
    }
    node->name = std::move(name);
    node->args = std::move(args);
    return node;
}

const std::shared_ptr<const TermNode>& zero_node() {
    static const auto node = make_node(TermKind::Zero, "", {});
    return node;
}

int kind_rank(TermKind k) {
    switch (k) {
        case TermKind::Zero: return 0;
        case TermKind::Variable: return 1;
        case TermKind::Apply: return 2;
        case TermKind::Xor: return 3;
    }
    return 4;
}

void flatten(const Term& t, std::vector<Term>& out) {
    if (t.is_xor()) {
        flatten(t.left(), out);
        flatten(t.right(), out);
    } else if (!t.is_zero()) {
        out.push_back(t);
    }
}

void print(std::ostream& os, const Term& t) {
    switch (t.kind()) {
        case TermKind::Zero: os << '0'; return;
        case TermKind::Variable: os << t.name(); return;
        case TermKind::Apply:
            os << t.name();
            if (t.arity() > 0) {
                os << '(';
                for (std::size_t i = 0; i < t.arity(); ++i) {
                    if (i) os << ", ";
                    print(os, t.args()[i]);
                }
                os << ')';
            }
            return;
        case TermKind::Xor:
            print(os, t.left());
            os << " + ";
            if (t.right().is_xor()) {
                os << '(';
                print(os, t.right());
                os << ')';
            } else {
                print(os, t.right());
            }
            return;
    }
}

}  // namespace

Term::Term() : node_(zero_node()) {}

Term Term::zero() { return Term(); }

Term Term::var(std::string name) { return Term(make_node(TermKind::Variable, std::move(name), {})); }

Term Term::apply(std::string symbol, std::vector<Term> args) {
    return Term(make_node(TermKind::Apply, std::move(symbol), std::move(args)));
}

Term Term::xor_of(Term left, Term right) {
    return Term(make_node(TermKind::Xor, "", {std::move(left), std::move(right)}));
}

bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.size() != b.size()) return false;
    return compare(a, b) == 0;
}

int compare(const Term& a, const Term& b) {
    if (a.same_node(b)) return 0;
    int ka = kind_rank(a.kind()), kb = kind_rank(b.kind());
    if (ka != kb) return ka < kb ? -1 : 1;
    if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
    if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
    for (std::size_t i = 0; i < a.arity(); ++i) {
        if (int c = compare(a.args()[i], b.args()[i]); c != 0) return c;
    }
    return 0;
}

Term make_sum(const std::vector<Term>& parts) {
    if (parts.empty()) return Term::zero();
    Term acc = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;) acc = Term::xor_of(parts[i], acc);
    return acc;
}

std::vector<Term> summands(const Term& t) {
    std::vector<Term> out;
    flatten(t, out);
    return out;
}

bool is_standard(const Term& t) { return !t.is_xor() && !t.is_zero(); }

Term xor_reduce(const Term& t) {
    switch (t.kind()) {
        case TermKind::Zero:
        case TermKind::Variable: return t;
        case TermKind::Apply: {
            if (t.is_ground() && t.arity() == 0) return t;
            std::vector<Term> args;
            args.reserve(t.arity());
            for (const auto& a : t.args()) args.push_back(xor_reduce(a));
            return Term::apply(t.name(), std::move(args));
        }
        case TermKind::Xor: break;
    }
    std::vector<Term> parts;
    for (const auto& s : summands(t)) {
        Term r = xor_reduce(s);
        // a reduced standard term stays standard, so no further flattening
        parts.push_back(std::move(r));
    }
    std::sort(parts.begin(), parts.end(), TermLess{});
    std::vector<Term> kept;
    for (std::size_t i = 0; i < parts.size();) {
        std::size_t j = i;
        while (j < parts.size() && parts[j] == parts[i]) ++j;
        if ((j - i) % 2 == 1) kept.push_back(parts[i]);
        i = j;
    }
    return make_sum(kept);
}

bool equiv_mod_xor(const Term& a, const Term& b) { return xor_reduce(a) == xor_reduce(b); }

void collect_vars(const Term& t, std::set<std::string>& out) {
    if (t.is_ground()) return;
    if (t.is_var()) {
        out.insert(t.name());
        return;
    }
    for (const auto& a : t.args()) collect_vars(a, out);
}

std::set<std::string> vars(const Term& t) {
    std::set<std::string> out;
    collect_vars(t, out);
    return out;
}

bool is_ground(const Term& t) { return t.is_ground(); }

Term apply_subst(const Term& t, const Substitution& sigma) {
    if (t.is_ground() || sigma.empty()) return t;
    if (t.is_var()) {
        auto it = sigma.find(t.name());
        return it == sigma.end() ? t : it->second;
    }
    std::vector<Term> args;
    args.reserve(t.arity());
    bool changed = false;
    for (const auto& a : t.args()) {
        args.push_back(apply_subst(a, sigma));
        changed = changed || !args.back().same_node(a);
    }
    if (!changed) return t;
    if (t.is_xor()) return Term::xor_of(args[0], args[1]);
    return Term::apply(t.name(), std::move(args));
}

namespace {

void complete_nonstandard(const Term& t, bool complete_position, TermSet& out) {
    if (t.is_xor()) {
        if (complete_position) out.insert(t);
        complete_nonstandard(t.left(), false, out);
        complete_nonstandard(t.right(), false, out);
    } else if (t.is_apply()) {
        for (const auto& a : t.args()) complete_nonstandard(a, true, out);
    }
}

void collect_subterms(const Term& t, std::vector<Term>& out) {
    out.push_back(t);
    for (const auto& a : t.args()) collect_subterms(a, out);
}

}  // namespace

TermSet complete_nonstandard_subterms(const Term& t) {
    TermSet out;
    complete_nonstandard(t, true, out);
    return out;
}

std::vector<Term> subterms(const Term& t) {
    std::vector<Term> out;
    collect_subterms(t, out);
    return out;
}

std::string to_string(const Term& t) {
    std::ostringstream os;
    print(os, t);
    return os.str();
}

std::string to_string(const Substitution& s) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [x, v] : s) {
        if (!first) os << ", ";
        first = false;
        os << x << " -> ";
        print(os, v);
    }
    os << '}';
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
    print(os, t);
    return os;
}

}  // namespace xorhorn
