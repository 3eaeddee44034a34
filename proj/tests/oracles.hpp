#pragma once

// Property harnesses shared by the unit tests (small universes) and the
// acceptance binary (full universes). Each returns counts plus the first
// counterexample so a failure can be reproduced.

#include <chrono>
#include <random>
#include <sstream>

#include "support.hpp"
#include "xorhorn/engine.hpp"
#include "xorhorn/reduction.hpp"

namespace testing_support {

struct Report {
    std::size_t checked = 0;
    std::size_t failures = 0;
    std::string first_failure;
    std::map<std::string, std::size_t> counters;

    void fail(const std::string& what) {
        if (failures++ == 0) first_failure = what;
    }
};

// ---------------------------------------------------------------------
// Matcher against exhaustive substitution search.
//
// For a C-dominated pattern every variable sits either under a free
// symbol or next to a closure element, so any solution binds it to a term
// equivalent to c + s for some closure element c and some subterm s of the
// reduced target (or 0). Searching that finite universe is exhaustive.

inline std::vector<Term> binding_universe(const Term& target, const CSet& c) {
    std::vector<Term> bases = subterms(target);
    bases.push_back(Term::zero());
    std::map<std::string, Term> by_class;
    for (const auto& s : bases) {
        for (const auto& e : c.closure()) {
            const Term v = Term::xor_of(e, s);
            by_class.emplace(key_of(denote(v)), v);
        }
    }
    std::vector<Term> out;
    for (auto& [k, v] : by_class) out.push_back(v);
    return out;
}

inline std::vector<Substitution> brute_force_matchers(const Term& pattern, const Term& target, const CSet& c) {
    const std::set<std::string> vs = vars(pattern);
    const std::vector<std::string> names(vs.begin(), vs.end());
    const Denotation want = denote(target);
    std::vector<Substitution> sols;
    if (names.empty()) {
        if (denote(pattern) == want) sols.emplace_back();
        return sols;
    }
    const std::vector<Term> universe = binding_universe(target, c);
    std::vector<std::size_t> pick(names.size(), 0);
    while (true) {
        Substitution theta;
        for (std::size_t i = 0; i < names.size(); ++i) theta.emplace(names[i], universe[pick[i]]);
        if (denote(apply_subst(pattern, theta)) == want) sols.push_back(theta);
        std::size_t k = 0;
        while (k < names.size() && ++pick[k] == universe.size()) pick[k++] = 0;
        if (k == names.size()) break;
    }
    return sols;
}

// A pattern headed by a free symbol only matches targets with that head.
inline bool heads_compatible(const Term& pattern, const Term& target) {
    if (!pattern.is_apply()) return true;
    return target.is_apply() && target.name() == pattern.name() && target.arity() == pattern.arity();
}

inline void check_matcher_pair(const Term& pattern, const Term& target, const CSet& c, Report& r) {
    ++r.checked;
    const std::optional<Substitution> got = match_mod_xor(pattern, target, c);
    const std::vector<Substitution> sols =
        heads_compatible(pattern, target) ? brute_force_matchers(pattern, target, c) : std::vector<Substitution>{};
    std::ostringstream ctx;
    ctx << "pattern " << pattern << " target " << target << " C " << to_string(c);
    if (!got) {
        if (!sols.empty()) r.fail(ctx.str() + ": matcher found none, search found " + to_string(sols[0]));
        return;
    }
    ++r.counters["found"];
    if (denote(apply_subst(pattern, *got)) != denote(target)) {
        r.fail(ctx.str() + ": unsound matcher " + to_string(*got));
        return;
    }
    if (sols.empty()) {
        r.fail(ctx.str() + ": search found none, matcher returned " + to_string(*got));
        return;
    }
    for (const auto& s : sols) {
        for (const auto& [x, v] : s) {
            auto it = got->find(x);
            if (it == got->end() || !model_equiv(it->second, v)) {
                r.fail(ctx.str() + ": second matcher " + to_string(s) + " besides " + to_string(*got));
                return;
            }
        }
    }
}

struct MatcherUniverse {
    std::vector<Term> patterns;
    std::vector<Term> targets;
};

// Patterns are C-dominated, matchable and distinct in normal form; targets
// are ground and distinct modulo XOR.
inline MatcherUniverse matcher_universe(const CSet& c, std::size_t pattern_nodes, std::size_t target_nodes) {
    Signature psig{{"a", "b", "m"}, {"f"}, {"g"}, {"X", "Y"}, false, true};
    Signature tsig{{"a", "b", "m"}, {"f"}, {"g"}, {}, true, true};
    MatcherUniverse u;
    TermSet seen;
    for (const auto& p : enumerate_terms(psig, pattern_nodes)) {
        if (!matchable(p) || !is_c_dominated(p, c)) continue;
        if (seen.insert(normal_form(p, c)).second) u.patterns.push_back(p);
    }
    seen.clear();
    for (const auto& t : enumerate_terms(tsig, target_nodes)) {
        if (seen.insert(xor_reduce(t)).second) u.targets.push_back(t);
    }
    return u;
}

inline Report matcher_harness(const std::vector<CSet>& csets, std::size_t pattern_nodes, std::size_t target_nodes) {
    Report r;
    for (const auto& c : csets) {
        const MatcherUniverse u = matcher_universe(c, pattern_nodes, target_nodes);
        for (const auto& p : u.patterns)
            for (const auto& t : u.targets) check_matcher_pair(p, t, c, r);
    }
    return r;
}

// ---------------------------------------------------------------------
// Domination versus bad complete subterms over every reduced ground term.

inline Report bad_subterm_harness(std::size_t max_nodes) {
    Signature sig{{"a", "b"}, {"f"}, {}, {}, false, true};
    const std::vector<Term> c_elems{Term::constant("a")};
    const CSet c(c_elems);
    TermSet reduced;
    for (const auto& t : enumerate_terms(sig, max_nodes)) reduced.insert(xor_reduce(t));
    Report r;
    for (const auto& t : reduced) {
        ++r.checked;
        bool any_bad = false;
        for (const auto& s : complete_nonstandard_subterms(t)) {
            Denotation rest = denote(s);
            rest.erase(*denote(c_elems[0]).begin());
            const bool bad = rest.size() > 1;
            if (bad != is_bad(s, c)) r.fail("is_bad disagrees on " + to_string(s));
            any_bad = any_bad || bad;
        }
        const bool dominated = bool(is_c_dominated(t, c));
        if (dominated == any_bad) r.fail("domination verdict wrong on " + to_string(t));
        ++r.counters[dominated ? "dominated" : "not dominated"];
    }
    return r;
}

// ---------------------------------------------------------------------
// Random (t, theta) pairs: for sigma = sigma_of(t, theta) with residual
// theta', every subterm t' satisfies nf(t' theta) = nf(t' sigma) theta'.

inline std::vector<Term> dominated_values(const CSet& c) {
    const std::vector<Term> standard{T("m"), T("f(a)"), T("f(m)"), T("g(a, m)"), T("g(m, b)"), T("f(a + b)"),
                                     T("f(m + a)")};
    std::vector<Term> raw(c.closure().begin(), c.closure().end());
    for (const auto& s : standard) {
        raw.push_back(s);
        for (const auto& e : c.closure()) raw.push_back(Term::xor_of(e, s));
    }
    TermSet out;
    for (const auto& v : raw) {
        const Term n = normal_form(v, c);
        if (is_c_dominated(n, c)) out.insert(n);
    }
    return {out.begin(), out.end()};
}

inline std::vector<Term> dominated_patterns(const CSet& c, std::size_t max_nodes) {
    Signature sig{{"a", "b", "m"}, {"f"}, {"g"}, {"X", "Y"}, false, true};
    TermSet out;
    for (const auto& p : enumerate_terms(sig, max_nodes)) {
        if (p.is_ground() || !is_c_dominated(p, c)) continue;
        out.insert(p);
    }
    return {out.begin(), out.end()};
}

inline bool agrees_up_to_identity(const Substitution& a, const Substitution& b) {
    auto value = [](const Substitution& s, const std::string& x) {
        auto it = s.find(x);
        return it == s.end() ? Term::var(x) : it->second;
    };
    std::set<std::string> dom;
    for (const auto& [x, v] : a) dom.insert(x);
    for (const auto& [x, v] : b) dom.insert(x);
    for (const auto& x : dom)
        if (value(a, x) != value(b, x)) return false;
    return true;
}

inline Report sigma_residual_harness(std::size_t pairs, const std::vector<CSet>& csets, unsigned seed,
                              std::size_t pattern_nodes = 6) {
    std::mt19937 rng(seed);
    Report r;
    // Most patterns have no fragile subterm, so those with one are drawn
    // from a separate pool four times out of five.
    struct Pool {
        CSet c;
        std::vector<Term> fragile, plain, values;
    };
    std::vector<Pool> pools;
    for (const auto& c : csets) {
        Pool p{c, {}, {}, dominated_values(c)};
        for (const auto& t : dominated_patterns(c, pattern_nodes))
            (fragile_subterms(t).empty() ? p.plain : p.fragile).push_back(t);
        pools.push_back(std::move(p));
    }
    std::uniform_int_distribution<std::size_t> which(0, pools.size() - 1);
    std::uniform_int_distribution<int> fifth(0, 4);

    for (std::size_t i = 0; i < pairs; ++i) {
        const Pool& pool = pools[which(rng)];
        const CSet& c = pool.c;
        const bool want_fragile = !pool.fragile.empty() && (pool.plain.empty() || fifth(rng) != 0);
        const Term t = random_pick(rng, want_fragile ? pool.fragile : pool.plain);
        Substitution theta;
        for (const auto& x : vars(t)) theta.emplace(x, random_pick(rng, pool.values));
        ++r.checked;

        std::ostringstream ctx;
        ctx << "t = " << t << ", theta = " << to_string(theta) << ", C = " << to_string(c);
        const SigmaResult sr = sigma_of(t, theta, c);
        for (const auto& sub : subterms(t)) {
            const Term lhs = normal_form(apply_subst(sub, theta), c);
            const Term rhs = apply_subst(normal_form(apply_subst(sub, sr.sigma), c), sr.residual);
            if (lhs != rhs) {
                r.fail(ctx.str() + ": subterm " + to_string(sub) + " gives " + to_string(lhs) + " vs " +
                       to_string(rhs));
                break;
            }
        }
        for (const auto& x : vars(t)) {
            auto it = sr.sigma.find(x);
            const Term sx = it == sr.sigma.end() ? Term::var(x) : it->second;
            if (normal_form(apply_subst(sx, sr.residual), c) != theta.at(x)) {
                r.fail(ctx.str() + ": theta differs from sigma theta' at " + x);
                break;
            }
        }
        bool member = false;
        for (const auto& s : fsub(t, c)) member = member || agrees_up_to_identity(s, sr.sigma);
        if (!member) r.fail(ctx.str() + ": sigma " + to_string(sr.sigma) + " is not in fsub");
        ++r.counters[std::to_string(sr.sigma.size()) + " fragile"];
    }
    return r;
}

// ---------------------------------------------------------------------
// Random small C-dominated theories: the search modulo XOR on T and the
// syntactic search on T+ must never reach opposite conclusive verdicts.

struct RandomTheory {
    Theory theory;
    CSet c;
    Atom goal;
};

inline RandomTheory random_theory(std::mt19937& rng) {
    static const std::vector<Term> ground = [] {
        Signature s{{"a", "b", "m"}, {"f"}, {"g"}, {}, false, true};
        return enumerate_terms(s, 3);
    }();
    static const std::vector<Term> open = [] {
        Signature s{{"a", "b", "m"}, {"f"}, {"g"}, {"X", "Y"}, false, true};
        std::vector<Term> out;
        for (const auto& t : enumerate_terms(s, 3))
            if (!t.is_ground()) out.push_back(t);
        return out;
    }();
    const std::vector<std::vector<Term>> csets{{}, {T("a")}, {T("b")}, {T("a"), T("b")}, {T("a"), T("m")}};
    std::uniform_int_distribution<std::size_t> pick_c(0, csets.size() - 1);
    std::uniform_int_distribution<int> nclauses(2, 6), nprem(1, 2), coin(0, 2);

    while (true) {
        RandomTheory rt;
        rt.c = CSet(csets[pick_c(rng)]);
        Theory& th = rt.theory;
        const int n = nclauses(rng);
        for (int k = 0; k < n; ++k) {
            HornClause cl;
            if (k < 2 || coin(rng) == 0) {
                cl.role = Role::IntruderFact;
                cl.conclusion = intruder(random_pick(rng, ground));
            } else {
                cl.role = Role::ProtocolRule;
                for (int p = nprem(rng); p > 0; --p) cl.premises.push_back(intruder(random_pick(rng, open)));
                std::set<std::string> pv;
                for (const auto& p : cl.premises) collect_vars(p, pv);
                // Conclusions reuse premise variables or are ground.
                std::vector<Term> allowed;
                for (const auto& t : open) {
                    bool ok = true;
                    for (const auto& v : vars(t)) ok = ok && pv.count(v);
                    if (ok) allowed.push_back(t);
                }
                allowed.insert(allowed.end(), ground.begin(), ground.end());
                cl.conclusion = intruder(random_pick(rng, allowed));
            }
            th.declare_symbols_of(cl.conclusion);
            for (const auto& p : cl.premises) th.declare_symbols_of(p);
            th.clauses.push_back(cl);
        }
        if (!is_c_dominated(th, rt.c)) continue;
        Term g = normal_form(random_pick(rng, ground), rt.c);
        if (!is_c_dominated(g, rt.c)) continue;
        rt.goal = intruder(g);
        return rt;
    }
}

inline bool conclusive(Outcome o) { return o == Outcome::Found || o == Outcome::Saturated; }

inline Report reduction_agreement_harness(std::size_t theories, unsigned seed, EngineOptions opts = {}) {
    std::mt19937 rng(seed);
    opts.lazy_composition = false;
    Report r;
    for (std::size_t i = 0; i < theories; ++i) {
        const RandomTheory rt = random_theory(rng);
        ++r.checked;
        const ReducedTheory plus = build_t_plus(rt.theory, rt.c);
        const SearchResult x = derive_mod_xor(rt.theory, rt.goal, &rt.c, opts);
        const SearchResult s = derive_syntactic(plus.theory, normal_form(rt.goal, rt.c), opts);

        std::ostringstream ctx;
        ctx << "theory #" << i << " C = " << to_string(rt.c) << " goal " << to_string(rt.goal) << "\n"
            << print_theory(rt.theory);
        if (conclusive(x.outcome) && conclusive(s.outcome)) {
            ++r.counters["both conclusive"];
            if (x.outcome != s.outcome) {
                r.fail(ctx.str() + "xor mode: " + std::string(outcome_name(x.outcome)) +
                       ", reduced: " + std::string(outcome_name(s.outcome)));
            }
        }
        ++r.counters[std::string("xor ") + std::string(outcome_name(x.outcome))];
        ++r.counters[std::string("reduced ") + std::string(outcome_name(s.outcome))];
        if (x.outcome == Outcome::Found && !verify_derivation(rt.theory, x.derivation, Mode::Xor))
            r.fail(ctx.str() + "xor-mode derivation does not replay");
        if (s.outcome == Outcome::Found) {
            if (!verify_derivation(plus.theory, s.derivation, Mode::Syntactic))
                r.fail(ctx.str() + "reduced derivation does not replay");
            const Derivation lifted = lift_derivation(plus, s.derivation);
            if (!verify_derivation(rt.theory, lifted, Mode::Xor)) r.fail(ctx.str() + "lifted derivation does not replay");
        }
    }
    return r;
}

inline std::string summary(const Report& r) {
    std::ostringstream os;
    os << r.checked << " checked, " << r.failures << " failures";
    for (const auto& [k, v] : r.counters) os << ", " << k << " " << v;
    return os.str();
}

}  // namespace testing_support
