#include "xorhorn/normalization.hpp"

#include <algorithm>
#include <stdexcept>

namespace xorhorn {

namespace {

void normalized_summands(const Term& t, const CSet& c, std::vector<Term>& out);

Term nf(const Term& t, const CSet& c) {
    switch (t.kind()) {
        case TermKind::Zero:
        case TermKind::Variable: return t;
        case TermKind::Apply: {
            if (t.arity() == 0) return t;
            std::vector<Term> args;
            args.reserve(t.arity());
            for (const auto& a : t.args()) args.push_back(nf(a, c));
            return Term::apply(t.name(), std::move(args));
        }
        case TermKind::Xor: break;
    }
    std::vector<Term> parts;
    normalized_summands(t, c, parts);
    std::sort(parts.begin(), parts.end(), TermLess{});

    std::uint64_t mask = 0;
    std::vector<Term> rest;
    for (std::size_t i = 0; i < parts.size();) {
        std::size_t j = i;
        while (j < parts.size() && parts[j] == parts[i]) ++j;
        if ((j - i) % 2 == 1) {
            if (auto idx = c.index_of(parts[i])) {
                mask |= std::uint64_t{1} << *idx;
            } else {
                rest.push_back(parts[i]);
            }
        }
        i = j;
    }
    Term tail = make_sum(rest);
    if (mask == 0) return tail;
    Term head = c.chain(mask);
    return rest.empty() ? head : Term::xor_of(head, tail);
}

void normalized_summands(const Term& t, const CSet& c, std::vector<Term>& out) {
    for (const auto& s : summands(t)) out.push_back(nf(s, c));
}

bool merge_into(Substitution& acc, const Substitution& more) {
    for (const auto& [x, v] : more) {
        auto [it, inserted] = acc.emplace(x, v);
        if (!inserted && it->second != v) return false;
    }
    return true;
}

// Both arguments are in normal form; target is ground.
std::optional<Substitution> match_nf(const Term& s, const Term& t, const CSet& c) {
    if (s.is_var()) return Substitution{{s.name(), t}};
    if (s.is_ground()) {
        if (s == t) return Substitution{};
        return std::nullopt;
    }
    if (s.is_xor()) {
        std::vector<Term> ground;
        std::optional<Term> open;
        for (const auto& p : summands(s)) {
            if (p.is_ground()) {
                ground.push_back(p);
            } else if (open) {
                throw std::invalid_argument("pattern sum with two non-ground summands: " + to_string(s));
            } else {
                open = p;
            }
        }
        ground.push_back(t);
        return match_nf(*open, nf(make_sum(ground), c), c);
    }
    if (!t.is_apply() || t.name() != s.name() || t.arity() != s.arity()) return std::nullopt;
    Substitution acc;
    for (std::size_t i = 0; i < s.arity(); ++i) {
        auto sub = match_nf(s.args()[i], t.args()[i], c);
        if (!sub || !merge_into(acc, *sub)) return std::nullopt;
    }
    return acc;
}

bool has_free_var(const Term& t, const std::set<std::string>& opaque) {
    if (t.is_ground()) return false;
    if (t.is_var()) return !opaque.count(t.name());
    for (const auto& a : t.args()) {
        if (has_free_var(a, opaque)) return true;
    }
    return false;
}

void collect_fragile(const Term& t, const std::set<std::string>& opaque, TermSet& out) {
    if (t.is_xor()) {
        for (const auto& side : t.args()) {
            if (is_standard(side) && has_free_var(side, opaque)) out.insert(side);
        }
    }
    for (const auto& a : t.args()) collect_fragile(a, opaque, out);
}

struct SubstLess {
    bool operator()(const Substitution& a, const Substitution& b) const {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first < y.first;
            return compare(x.second, y.second) < 0;
        });
    }
};

std::set<std::string> fragile_vars(const TermSet& frag, const std::set<std::string>& opaque) {
    std::set<std::string> out;
    for (const auto& s : frag) collect_vars(s, out);
    for (const auto& v : opaque) out.erase(v);
    return out;
}

}  // namespace

Term normal_form(const Term& t, const CSet& c) { return nf(t, c); }

Atom normal_form(const Atom& a, const CSet& c) {
    Atom out{a.predicate, {}};
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) out.args.push_back(nf(t, c));
    return out;
}

bool matchable(const Term& pattern) {
    if (pattern.is_ground()) return true;
    if (pattern.is_xor()) {
        std::size_t open = 0;
        for (const auto& p : summands(pattern)) {
            if (!p.is_ground()) {
                if (++open > 1 || !matchable(p)) return false;
            }
        }
        return true;
    }
    for (const auto& a : pattern.args()) {
        if (!matchable(a)) return false;
    }
    return true;
}

std::optional<Substitution> match_mod_xor(const Term& pattern, const Term& target, const CSet& c) {
    if (!target.is_ground()) throw std::invalid_argument("match target must be ground: " + to_string(target));
    return match_nf(nf(pattern, c), nf(target, c), c);
}

std::optional<Substitution> match_normalized(const Term& pattern, const Term& target, const CSet& c) {
    if (!target.is_ground()) throw std::invalid_argument("match target must be ground: " + to_string(target));
    return match_nf(pattern, target, c);
}

TermSet fragile_subterms(const Term& t, const std::set<std::string>& opaque) {
    TermSet out;
    collect_fragile(t, opaque, out);
    return out;
}

std::vector<Substitution> fsub(const Term& t, const CSet& c, const std::set<std::string>& opaque) {
    const TermSet frag = fragile_subterms(t, opaque);
    const std::set<std::string> domain = fragile_vars(frag, opaque);
    if (domain.empty()) return {Substitution{}};

    const auto& closure = c.closure();
    std::map<std::string, TermSet> options;
    for (const auto& x : domain) {
        TermSet& opts = options[x];
        const Term var = Term::var(x);
        opts.insert(var);
        if (frag.count(var)) {
            for (std::size_t m = 1; m < closure.size(); ++m) opts.insert(Term::xor_of(closure[m], var));
        }
    }
    for (const auto& s : frag) {
        for (const auto& target : closure) {
            auto theta = match_mod_xor(s, target, c);
            if (!theta) continue;
            for (const auto& [x, v] : *theta) {
                if (options.count(x) && is_c_dominated(v, c)) options[x].insert(v);
            }
        }
    }

    std::vector<Substitution> out{Substitution{}};
    for (const auto& [x, opts] : options) {
        std::vector<Substitution> next;
        next.reserve(out.size() * opts.size());
        for (const auto& partial : out) {
            for (const auto& v : opts) {
                Substitution s = partial;
                s.emplace(x, v);
                next.push_back(std::move(s));
            }
        }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end(), SubstLess{});
    return out;
}

SigmaResult sigma_of(const Term& t, const Substitution& theta, const CSet& c, const std::set<std::string>& opaque) {
    for (const auto& x : vars(t)) {
        auto it = theta.find(x);
        if (it == theta.end() || !it->second.is_ground()) {
            throw std::invalid_argument("substitution must be ground on every variable, missing " + x);
        }
    }
    const TermSet frag = fragile_subterms(t, opaque);
    SigmaResult out;
    for (const auto& [x, v] : theta) out.residual.emplace(x, v);

    for (const auto& x : fragile_vars(frag, opaque)) {
        const Term& value = theta.at(x);
        bool closed = false;
        for (const auto& s : frag) {
            if (!vars(s).count(x)) continue;
            if (in_xor_closure(apply_subst(s, theta), c)) {
                closed = true;
                break;
            }
        }
        if (closed) {
            out.sigma.emplace(x, value);
            out.residual.erase(x);
            continue;
        }
        const Term var = Term::var(x);
        if (frag.count(var) && value.is_xor() && in_xor_closure(value.left(), c) && is_standard(value.right()) &&
            !in_xor_closure(value.right(), c)) {
            out.sigma.emplace(x, Term::xor_of(value.left(), var));
            out.residual[x] = value.right();
            continue;
        }
        out.sigma.emplace(x, var);
    }
    return out;
}

Substitution compose(const Substitution& inner, const Substitution& outer) {
    Substitution out;
    for (const auto& [x, v] : inner) out.emplace(x, apply_subst(v, outer));
    for (const auto& [x, v] : outer) out.emplace(x, v);
    return out;
}

}  // namespace xorhorn
