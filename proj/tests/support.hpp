#pragma once

// Shared helpers for the test binaries: terse term construction, an
// independent XOR model used as an oracle, and small-universe enumerators.

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "xorhorn/domination.hpp"
#include "xorhorn/normalization.hpp"
#include "xorhorn/term.hpp"
#include "xorhorn/theory.hpp"

namespace testing_support {

using namespace xorhorn;

inline Term T(const std::string& text) {
    auto t = parse_term(text);
    if (!t) throw std::invalid_argument("bad test term: " + text);
    return *t;
}

inline Atom A(const std::string& text) {
    auto a = parse_atom(text);
    if (!a) throw std::invalid_argument("bad test atom: " + text);
    return *a;
}

inline CSet C(std::initializer_list<const char*> names) {
    std::vector<Term> els;
    for (const char* n : names) els.push_back(T(n));
    return CSet(els);
}

// XOR model: a term denotes a finite set of standard "atoms" under
// symmetric difference. A standard term's atom is keyed by its symbol and
// the denotations of its arguments, so two terms are equivalent exactly
// when their denotations coincide. None of this goes through xor_reduce.
using Denotation = std::set<std::string>;

inline std::string key_of(const Denotation& d) {
    std::string out = "{";
    for (const auto& s : d) out += s + ";";
    return out + "}";
}

inline Denotation denote(const Term& t) {
    switch (t.kind()) {
    case TermKind::Zero:
        return {};
    case TermKind::Variable:
        return {"?" + t.name()};
    case TermKind::Xor: {
        Denotation l = denote(t.left());
        for (const auto& s : denote(t.right())) {
            if (!l.erase(s)) l.insert(s);
        }
        return l;
    }
    case TermKind::Apply: {
        std::string k = t.name() + "(";
        for (const auto& a : t.args()) k += key_of(denote(a)) + ",";
        return {k + ")"};
    }
    }
    return {};
}

inline bool model_equiv(const Term& a, const Term& b) { return denote(a) == denote(b); }

struct Signature {
    std::vector<std::string> constants;
    std::vector<std::string> unary;
    std::vector<std::string> binary;
    std::vector<std::string> variables;
    bool with_zero = false;
    bool with_xor = true;
};

// Every term with at most max_nodes nodes, grouped by exact node count.
inline std::vector<std::vector<Term>> enumerate_by_size(const Signature& sig, std::size_t max_nodes) {
    std::vector<std::vector<Term>> by(max_nodes + 1);
    if (max_nodes == 0) return by;
    for (const auto& c : sig.constants) by[1].push_back(Term::constant(c));
    for (const auto& v : sig.variables) by[1].push_back(Term::var(v));
    if (sig.with_zero) by[1].push_back(Term::zero());
    for (std::size_t n = 2; n <= max_nodes; ++n) {
        for (const auto& f : sig.unary)
            for (const auto& a : by[n - 1]) by[n].push_back(Term::apply(f, {a}));
        for (std::size_t l = 1; l + 1 < n; ++l) {
            const std::size_t r = n - 1 - l;
            for (const auto& x : by[l]) {
                for (const auto& y : by[r]) {
                    for (const auto& g : sig.binary) by[n].push_back(Term::apply(g, {x, y}));
                    if (sig.with_xor) by[n].push_back(Term::xor_of(x, y));
                }
            }
        }
    }
    return by;
}

inline std::vector<Term> enumerate_terms(const Signature& sig, std::size_t max_nodes) {
    std::vector<Term> out;
    for (const auto& level : enumerate_by_size(sig, max_nodes)) out.insert(out.end(), level.begin(), level.end());
    return out;
}

// Closure oracle: subset sums of C computed in the model.
inline std::vector<Denotation> subset_sums(const std::vector<Term>& c) {
    std::vector<Denotation> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << c.size()); ++mask) {
        Term s = Term::zero();
        for (std::size_t i = 0; i < c.size(); ++i)
            if (mask & (std::size_t{1} << i)) s = Term::xor_of(s, c[i]);
        out.push_back(denote(s));
    }
    return out;
}

inline bool model_in_closure(const Term& t, const std::vector<Term>& c) {
    const Denotation d = denote(t);
    for (const auto& s : subset_sums(c))
        if (s == d) return true;
    return false;
}

inline Term random_pick(std::mt19937& rng, const std::vector<Term>& pool) {
    std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
    return pool[d(rng)];
}

}  // namespace testing_support
