#include "xorhorn/reduction.hpp"

#include <set>

#include "xorhorn/normalization.hpp"

namespace xorhorn {

std::string_view family_name(Family f) {
    switch (f) {
        case Family::Rule: return "rule";
        case Family::Const: return "const";
        case Family::Pop: return "pop";
        case Family::Variant: return "variant";
        case Family::Gen: return "gen";
    }
    return "rule";
}

namespace {

Term clause_tuple(const HornClause& cl) {
    std::vector<Term> parts(cl.conclusion.args.begin(), cl.conclusion.args.end());
    for (const auto& p : cl.premises) parts.insert(parts.end(), p.args.begin(), p.args.end());
    return Term::apply(kTupleSymbol, std::move(parts));
}

class Builder {
public:
    Builder(const Theory& src, const CSet& c) : src_(src), c_(c) {
        out_.c_set = c;
        out_.theory.signature = src.signature;
        out_.theory.predicates = src.predicates;
        out_.theory.xor_rule_implicit = false;
    }

    ReducedTheory run() {
        for (std::size_t i = 0; i < src_.clauses.size(); ++i) rule_instances(i);
        if (src_.xor_rule_implicit) xor_families();
        return std::move(out_);
    }

private:
    void add(HornClause cl, Origin origin) {
        for (const auto& p : cl.premises) {
            if (p == cl.conclusion) return;
        }
        if (!seen_.insert(to_string(cl)).second) return;
        out_.theory.clauses.push_back(std::move(cl));
        out_.origin.push_back(std::move(origin));
    }

    void rule_instances(std::size_t idx) {
        const HornClause& cl = src_.clauses[idx];
        for (const auto& sigma : fsub(clause_tuple(cl), c_, cl.exempt_vars)) {
            HornClause inst;
            inst.role = cl.role;
            inst.exempt_vars = cl.exempt_vars;
            for (const auto& p : cl.premises) inst.premises.push_back(normal_form(apply_subst(p, sigma), c_));
            inst.conclusion = normal_form(apply_subst(cl.conclusion, sigma), c_);
            add(std::move(inst), Origin{Family::Rule, idx, sigma, 0, 0});
        }
    }

    Term with_var(std::uint64_t mask) const {
        const Term x = Term::var(kFamilyVar);
        return mask == 0 ? x : Term::xor_of(c_.chain(mask), x);
    }

    void push(Family f, std::vector<Term> premises, Term conclusion, std::uint64_t c, std::uint64_t c2) {
        HornClause cl;
        cl.role = Role::IntruderRule;
        for (auto& t : premises) cl.premises.push_back(intruder(std::move(t)));
        cl.conclusion = intruder(std::move(conclusion));
        add(std::move(cl), Origin{f, std::nullopt, {}, c, c2});
    }

    void xor_families() {
        const std::uint64_t n = c_.closure().size();
        const Term x = Term::var(kFamilyVar);
        for (std::uint64_t i = 1; i < n; ++i) {
            for (std::uint64_t j = i + 1; j < n; ++j) {
                push(Family::Const, {c_.chain(i), c_.chain(j)}, c_.chain(i ^ j), i, j);
            }
        }
        for (std::uint64_t i = 1; i < n; ++i) push(Family::Pop, {c_.chain(i), x}, with_var(i), i, 0);
        for (std::uint64_t i = 1; i < n; ++i) {
            for (std::uint64_t j = 0; j < n; ++j) {
                push(Family::Variant, {c_.chain(i), with_var(j)}, with_var(i ^ j), i, j);
            }
        }
        for (std::uint64_t i = 0; i < n; ++i) {
            for (std::uint64_t j = i; j < n; ++j) {
                if (i == j && i != 0) continue;
                push(Family::Gen, {with_var(i), with_var(j)}, c_.chain(i ^ j), i, j);
            }
        }
    }

    const Theory& src_;
    const CSet& c_;
    ReducedTheory out_;
    std::set<std::string> seen_;
};

}  // namespace

ReducedTheory build_t_plus(const Theory& t, const CSet& c) {
    if (Verdict v = is_c_dominated(t, c); !v) {
        throw NotDominated("theory is not dominated by " + to_string(c) + ": " + to_string(*v.witness), v);
    }
    return Builder(t, c).run();
}

ReduceStats reduce_stats(const ReducedTheory& rt) {
    ReduceStats s;
    s.closure_size = std::size_t{1} << rt.c_set.size();
    for (const auto& o : rt.origin) {
        ++s.clauses_per_family[o.family];
        if (o.source) ++s.source_clause_fanout[*o.source];
    }
    return s;
}

}  // namespace xorhorn
