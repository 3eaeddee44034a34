#include "xorhorn/engine.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "xorhorn/normalization.hpp"

namespace xorhorn {

std::string_view outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Found: return "found";
        case Outcome::Saturated: return "saturated";
        case Outcome::Exhausted: return "exhausted";
        case Outcome::Timeout: return "timeout";
    }
    return "exhausted";
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr std::size_t kPending = std::numeric_limits<std::size_t>::max();

struct TimeoutSignal {};
struct FactCapSignal {};

struct AtomEq {
    bool operator()(const Atom& a, const Atom& b) const { return a == b; }
};

bool syntactic_match(const Term& p, const Term& t, Substitution& acc) {
    if (p.is_var()) {
        auto [it, inserted] = acc.emplace(p.name(), t);
        return inserted || it->second == t;
    }
    if (p.kind() != t.kind() || p.name() != t.name() || p.arity() != t.arity()) return false;
    if (p.is_ground()) return p == t;
    for (std::size_t i = 0; i < p.arity(); ++i) {
        if (!syntactic_match(p.args()[i], t.args()[i], acc)) return false;
    }
    return true;
}

struct PreparedClause {
    std::size_t id = 0;
    std::vector<Atom> premises;
    Atom conclusion;
    std::set<std::string> free_exempt;  // exempt variables not bound by premises
    bool composition = false;
};

// Composition clause I(t1), ..., I(tn) -> I(f(t1, ..., tn)) with linear,
// xor-free ti. Premise i is the i-th argument of the result.
struct Composer {
    std::size_t clause = 0;
    Term head;
};

bool linear_pattern(const Term& t, std::set<std::string>& seen) {
    if (t.is_var()) return seen.insert(t.name()).second;
    if (!t.is_apply()) return false;
    for (const auto& a : t.args()) {
        if (!linear_pattern(a, seen)) return false;
    }
    return true;
}

// Binds the variables of a linear pattern against t; no unification.
bool bind_pattern(const Term& pat, const Term& t, Substitution& out) {
    if (pat.is_var()) {
        out.emplace(pat.name(), t);
        return true;
    }
    if (!t.is_apply() || t.name() != pat.name() || t.arity() != pat.arity()) return false;
    for (std::size_t i = 0; i < pat.arity(); ++i) {
        if (!bind_pattern(pat.args()[i], t.args()[i], out)) return false;
    }
    return true;
}

std::optional<Composer> composition_shape(const HornClause& c, std::size_t id) {
    if (!c.exempt_vars.empty() || c.conclusion.predicate != kIntruder || c.conclusion.args.size() != 1) {
        return std::nullopt;
    }
    const Term& head = c.conclusion.args[0];
    if (!head.is_apply() || head.arity() == 0 || head.arity() != c.premises.size()) return std::nullopt;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < c.premises.size(); ++i) {
        const Atom& p = c.premises[i];
        if (p.predicate != kIntruder || p.args.size() != 1 || p.args[0] != head.args()[i]) return std::nullopt;
        if (!linear_pattern(p.args[0], seen)) return std::nullopt;
    }
    return Composer{id, head};
}

class Engine {
public:
    Engine(const Theory& th, Mode mode, const CSet* c, const EngineOptions& opts, const std::vector<Atom>& assumptions,
           const Atom& goal)
        : th_(th), mode_(mode), opts_(opts), assumptions_(assumptions) {
        if (c) cset_ = *c;
        xor_rule_ = mode_ == Mode::Xor && th_.xor_rule_implicit;
        bool dominated = c && is_c_dominated(th_, cset_);
        prune_ = xor_rule_ && dominated && opts_.prune;
        goal_ = canon(goal);
        if (prune_) {
            for (const auto& a : goal_.args) definitive_possible_ = definitive_possible_ && is_c_dominated(a, cset_).ok;
        }
        for (std::size_t i = 0; i < th_.clauses.size(); ++i) prepare(i);
        for (std::size_t i = 0; i < opts_.sid_pool; ++i) sid_pool_.push_back(Term::constant("sid" + std::to_string(i)));
        deadline_ = Clock::now() + opts_.bounds.timeout;
    }

    SearchResult run() {
        SearchResult res;
        try {
            search();
            if (goal_idx_) {
                res.outcome = Outcome::Found;
                res.derivation = extract(*goal_idx_);
            } else if (saturated_ && !size_pruned_ && !matching_incomplete_ && definitive_possible_ &&
                       !(opts_.lazy_composition && !composers_.empty())) {
                res.outcome = Outcome::Saturated;
            } else {
                res.outcome = Outcome::Exhausted;
            }
        } catch (const TimeoutSignal&) {
            res.outcome = goal_idx_ ? Outcome::Found : Outcome::Timeout;
            if (goal_idx_) res.derivation = extract(*goal_idx_);
        } catch (const FactCapSignal&) {
            res.fact_cap_hit = true;
            res.outcome = goal_idx_ ? Outcome::Found : Outcome::Exhausted;
            if (goal_idx_) res.derivation = extract(*goal_idx_);
        }
        res.facts = steps_.size();
        res.rounds = round_;
        res.size_pruned = size_pruned_;
        res.matching_incomplete = matching_incomplete_;
        return res;
    }

private:
    // ----- canonical forms -------------------------------------------------

    Term canon(const Term& t) const { return mode_ == Mode::Xor ? normal_form(t, cset_) : t; }

    Atom canon(const Atom& a) const {
        Atom out{a.predicate, {}};
        for (const auto& t : a.args) out.args.push_back(canon(t));
        return out;
    }

    // Non-closure part of a canonical ground term.
    Term rest_of(const Term& t) const {
        std::vector<Term> rest;
        for (const auto& s : summands(t)) {
            if (!cset_.index_of(s)) rest.push_back(s);
        }
        return make_sum(rest);
    }

    void prepare(std::size_t id) {
        const HornClause& c = th_.clauses[id];
        PreparedClause pc;
        pc.id = id;
        for (const auto& p : c.premises) pc.premises.push_back(canon(p));
        pc.conclusion = canon(c.conclusion);
        std::set<std::string> bound;
        for (const auto& p : c.premises) collect_vars(p, bound);
        for (const auto& v : c.exempt_vars) {
            if (!bound.count(v)) pc.free_exempt.insert(v);
        }
        if (auto comp = composition_shape(c, id)) {
            pc.composition = true;
            composers_.emplace(c.conclusion.args[0].name(), *comp);
        }
        clauses_.push_back(std::move(pc));
    }

    void tick() {
        if ((++ticks_ & 255u) == 0 && Clock::now() > deadline_) throw TimeoutSignal{};
    }

    // ----- fact store --------------------------------------------------------

    bool fits(const Atom& a) {
        for (const auto& t : a.args) {
            if (t.size() > opts_.bounds.max_term_size) {
                size_pruned_ = true;
                return false;
            }
        }
        return true;
    }

    std::optional<std::size_t> lookup(const Atom& canonical) const {
        auto it = index_.find(canonical);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<std::size_t> add(Atom canonical, Justification just) {
        if (auto idx = lookup(canonical)) return idx;
        if (!fits(canonical)) return std::nullopt;
        if (steps_.size() >= opts_.bounds.max_facts) throw FactCapSignal{};
        const std::size_t idx = steps_.size();
        index_.emplace(canonical, idx);
        by_pred_[canonical.predicate].push_back(idx);
        by_head_[head_key(canonical)].push_back(idx);
        if (xor_rule_ && canonical.predicate == kIntruder && canonical.args.size() == 1) {
            intruder_facts_.push_back(idx);
            by_rest_[rest_of(canonical.args[0])].push_back(idx);
            for (const auto& s : summands(canonical.args[0])) by_summand_[s].push_back(idx);
        }
        round_of_.push_back(round_);
        steps_.push_back(Step{std::move(canonical), std::move(just)});
        ++added_this_round_;
        if (!goal_idx_ && steps_.back().atom == goal_) goal_idx_ = idx;
        return idx;
    }

    // ----- matching ---------------------------------------------------------

    void general_match(const Term& s, const Term& t, const Substitution& acc, std::vector<Substitution>& out) {
        if (out.size() >= opts_.match_cap) {
            matching_incomplete_ = true;
            return;
        }
        const Term p = apply_subst(s, acc);
        if (p.is_ground()) {
            if (canon(p) == t) out.push_back(acc);
            return;
        }
        if (p.is_var()) {
            Substitution next = acc;
            next.emplace(p.name(), t);
            out.push_back(std::move(next));
            return;
        }
        if (p.is_apply()) {
            if (!t.is_apply() || t.name() != p.name() || t.arity() != p.arity()) return;
            std::vector<Substitution> partial{acc};
            for (std::size_t i = 0; i < p.arity() && !partial.empty(); ++i) {
                std::vector<Substitution> next;
                for (const auto& a : partial) general_match(p.args()[i], t.args()[i], a, next);
                partial = std::move(next);
            }
            for (auto& a : partial) out.push_back(std::move(a));
            return;
        }
        std::vector<Term> ground, open;
        for (const auto& q : summands(p)) (q.is_ground() ? ground : open).push_back(q);
        ground.push_back(t);
        const Term u = canon(make_sum(ground));
        if (open.size() == 1) {
            general_match(open[0], u, acc, out);
            return;
        }
        // several open summands: distribute target summands, no cancellation
        // between open summands is attempted
        matching_incomplete_ = true;
        std::stable_partition(open.begin(), open.end(), [](const Term& q) { return !q.is_var(); });
        distribute(open, 0, summands(u), acc, out);
    }

    void distribute(const std::vector<Term>& open, std::size_t k, const std::vector<Term>& remaining,
                    const Substitution& acc, std::vector<Substitution>& out) {
        if (out.size() >= opts_.match_cap) return;
        if (k + 1 == open.size()) {
            general_match(open[k], canon(make_sum(remaining)), acc, out);
            return;
        }
        if (!open[k].is_var()) {
            for (std::size_t j = 0; j < remaining.size(); ++j) {
                std::vector<Substitution> here;
                general_match(open[k], remaining[j], acc, here);
                std::vector<Term> rest = remaining;
                rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(j));
                for (const auto& a : here) distribute(open, k + 1, rest, a, out);
            }
            return;
        }
        if (remaining.size() > 16) return;
        const std::uint32_t n = 1u << remaining.size();
        for (std::uint32_t mask = 0; mask < n; ++mask) {
            std::vector<Term> pick, rest;
            for (std::size_t j = 0; j < remaining.size(); ++j) (mask >> j & 1u ? pick : rest).push_back(remaining[j]);
            std::vector<Substitution> here;
            general_match(open[k], canon(make_sum(pick)), acc, here);
            for (const auto& a : here) distribute(open, k + 1, rest, a, out);
        }
    }

    static std::string head_key(const Atom& a) {
        std::string key = a.predicate;
        key += '|';
        if (a.args.empty()) return key;
        const Term& t = a.args[0];
        if (t.is_apply()) {
            key += t.name();
            key += '/';
            key += std::to_string(t.arity());
        } else {
            key += t.is_zero() ? "0" : "+";
        }
        return key;
    }

    // Facts that can match the pattern: those with the same head symbol on
    // the first argument when the pattern fixes one.
    const std::vector<std::size_t>& candidates(const Atom& pattern) {
        static const std::vector<std::size_t> none;
        if (pattern.args.empty() || !pattern.args[0].is_apply()) return by_pred_[pattern.predicate];
        auto it = by_head_.find(head_key(pattern));
        return it == by_head_.end() ? none : it->second;
    }

    // Necessary condition for a match: application skeletons agree. Sums
    // and variables are not inspected.
    static bool skeleton_fits(const Term& p, const Term& t) {
        if (!p.is_apply()) return true;
        if (!t.is_apply() || t.name() != p.name() || t.arity() != p.arity()) return false;
        for (std::size_t i = 0; i < p.arity(); ++i) {
            if (!skeleton_fits(p.args()[i], t.args()[i])) return false;
        }
        return true;
    }

    // Extensions of acc under which pattern matches the canonical fact.
    std::vector<Substitution> match_atom(const Atom& pattern, const Atom& fact, const Substitution& acc) {
        std::vector<Substitution> partial;
        if (pattern.predicate != fact.predicate || pattern.args.size() != fact.args.size()) return partial;
        partial.push_back(acc);
        for (std::size_t i = 0; i < pattern.args.size() && !partial.empty(); ++i) {
            std::vector<Substitution> next;
            for (const auto& a : partial) {
                const Term p = apply_subst(pattern.args[i], a);
                const Term& t = fact.args[i];
                if (!skeleton_fits(p, t)) continue;
                if (mode_ == Mode::Syntactic) {
                    Substitution ext = a;
                    if (syntactic_match(p, t, ext)) next.push_back(std::move(ext));
                } else if (p.is_ground()) {
                    if (canon(p) == t) next.push_back(a);
                } else if (matchable(p)) {
                    if (auto m = match_normalized(canon(p), t, cset_)) {
                        Substitution ext = a;
                        ext.insert(m->begin(), m->end());
                        next.push_back(std::move(ext));
                    }
                } else {
                    general_match(canon(p), t, a, next);
                }
            }
            partial = std::move(next);
        }
        return partial;
    }

    // ----- on-demand synthesis ---------------------------------------------

    std::optional<std::size_t> synth(const Term& t) {
        tick();
        const Atom fact = intruder(t);
        if (auto idx = lookup(fact)) return idx;
        if (t.size() > opts_.bounds.max_term_size) {
            size_pruned_ = true;
            return std::nullopt;
        }
        if (failed_.count(t) || in_progress_.count(t)) return std::nullopt;
        in_progress_.insert(t);
        std::optional<std::size_t> out = synth_fresh(t);
        in_progress_.erase(t);
        if (!out) failed_.insert(t);
        return out;
    }

    std::optional<std::size_t> synth_fresh(const Term& t) {
        if (t.is_apply()) {
            auto it = composers_.find(t.name());
            Substitution theta;
            if (it == composers_.end() || !bind_pattern(it->second.head, t, theta)) return std::nullopt;
            std::vector<std::size_t> arg_steps;
            for (const auto& a : t.args()) {
                auto idx = synth(a);
                if (!idx) return std::nullopt;
                arg_steps.push_back(*idx);
            }
            return compose_step(it->second, theta, t, arg_steps);
        }
        if (!xor_rule_) return std::nullopt;
        if (t.is_zero()) {
            if (intruder_facts_.empty()) return std::nullopt;
            const std::size_t any = intruder_facts_.front();
            return add(intruder(Term::zero()), xor_just(any, any));
        }
        if (!t.is_xor()) return std::nullopt;
        // every summand on its own
        std::vector<std::size_t> parts;
        for (const auto& s : summands(t)) {
            auto idx = synth(s);
            if (!idx) {
                parts.clear();
                break;
            }
            parts.push_back(*idx);
        }
        if (!parts.empty()) return fold_xor(parts);
        // a stored fact sharing the summands outside the closure
        const Term rest = rest_of(t);
        if (rest.is_zero()) return std::nullopt;
        auto group = by_rest_.find(rest);
        if (group == by_rest_.end()) return std::nullopt;
        const std::vector<std::size_t> candidates = group->second;
        for (std::size_t u : candidates) {
            const Term remainder = canon(Term::xor_of(t, steps_[u].atom.args[0]));
            std::vector<std::size_t> rem_parts{u};
            bool ok = true;
            for (const auto& s : summands(remainder)) {
                auto idx = synth(s);
                if (!idx) {
                    ok = false;
                    break;
                }
                rem_parts.push_back(*idx);
            }
            if (ok) return fold_xor(rem_parts);
        }
        return std::nullopt;
    }

    static Justification xor_just(std::size_t l, std::size_t r) {
        Justification j;
        j.kind = Justification::Kind::Xor;
        j.left = l;
        j.right = r;
        return j;
    }

    std::optional<std::size_t> fold_xor(const std::vector<std::size_t>& parts) {
        std::size_t acc = parts.front();
        for (std::size_t k = 1; k < parts.size(); ++k) {
            const Term sum = canon(Term::xor_of(steps_[acc].atom.args[0], steps_[parts[k]].atom.args[0]));
            auto idx = add(intruder(sum), xor_just(acc, parts[k]));
            if (!idx) return std::nullopt;
            acc = *idx;
        }
        return acc;
    }

    std::optional<std::size_t> compose_step(const Composer& comp, Substitution theta, const Term& t,
                                            const std::vector<std::size_t>& arg_steps) {
        Justification j;
        j.kind = Justification::Kind::Clause;
        j.clause = comp.clause;
        j.bindings = std::move(theta);
        j.premises = arg_steps;
        return add(intruder(t), std::move(j));
    }

    // Ways to satisfy I(p) where p is an application of a composable symbol
    // with at most one unbound variable. Each solution records the ground
    // term to synthesize when the clause instance is used.
    void compose_solutions(const Term& p, const Substitution& acc, std::vector<Substitution>& out, int depth) {
        tick();
        const Term inst = apply_subst(p, acc);
        if (inst.is_ground()) {
            if (synth(canon(inst))) out.push_back(acc);
            return;
        }
        const std::size_t n = by_pred_[kIntruder].size();
        if (inst.is_var()) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t idx = by_pred_[kIntruder][i];
                Substitution ext = acc;
                ext.emplace(inst.name(), steps_[idx].atom.args[0]);
                out.push_back(std::move(ext));
            }
            return;
        }
        const Atom pattern = intruder(inst);
        const std::vector<std::size_t>& pool = candidates(pattern);
        const std::size_t m = pool.size();
        for (std::size_t i = 0; i < m; ++i) {
            tick();
            for (auto& ext : match_atom(pattern, steps_[pool[i]].atom, acc)) out.push_back(std::move(ext));
        }
        if (depth <= 0 || !inst.is_apply()) return;
        auto it = composers_.find(inst.name());
        Substitution shape;
        if (it == composers_.end() || !bind_pattern(it->second.head, inst, shape)) return;
        std::vector<Substitution> partial{acc};
        for (const auto& arg : inst.args()) {
            std::vector<Substitution> next;
            for (const auto& a : partial) compose_solutions(arg, a, next, depth - 1);
            partial = std::move(next);
            if (partial.empty()) return;
        }
        for (auto& a : partial) {
            Substitution fit;
            if (bind_pattern(it->second.head, apply_subst(inst, a), fit)) out.push_back(std::move(a));
        }
    }

    // ----- clause evaluation --------------------------------------------------

    std::size_t unbound_count(const Atom& a, const Substitution& acc) const {
        std::set<std::string> vs;
        collect_vars(a, vs);
        std::size_t n = 0;
        for (const auto& v : vs) n += acc.count(v) ? 0 : 1;
        return n;
    }

    template <typename Emit>
    void solve(const PreparedClause& pc, std::vector<std::size_t>& used, const Substitution& acc, std::size_t remaining,
               Emit&& emit) {
        tick();
        if (remaining == 0) {
            emit(acc, used);
            return;
        }
        const bool composes = lazy() && th_.clauses[pc.id].role != Role::IntruderRule;
        std::size_t best = kPending, best_score = kPending;
        for (std::size_t i = 0; i < pc.premises.size(); ++i) {
            if (used[i] != kUnset) continue;
            const Atom& p = pc.premises[i];
            std::size_t score = unbound_count(p, acc) * 2;
            if (p.args.size() == 1 && p.args[0].is_var() && !acc.count(p.args[0].name())) score += 3;
            if (composes && p.predicate == kIntruder && p.args.size() == 1) score += 8 * exposed_vars(p.args[0], acc);
            if (score < best_score) {
                best_score = score;
                best = i;
            }
        }
        const Atom inst = apply_subst(pc.premises[best], acc);
        std::set<std::string> inst_vars;
        collect_vars(inst, inst_vars);
        // An instance over facts that all predate the previous round was
        // already produced by it.
        bool fresh = false;
        for (std::size_t u : used) fresh = fresh || (u != kUnset && (u == kPending || u >= old_limit_));
        const bool need_fresh = remaining == 1 && !fresh;

        if (inst_vars.empty()) {
            const Atom key = canon(inst);
            std::optional<std::size_t> idx = lookup(key);
            if (!idx && lazy() && key.predicate == kIntruder && key.args.size() == 1) idx = synth(key.args[0]);
            if (!idx || (need_fresh && *idx < old_limit_)) return;
            used[best] = *idx;
            solve(pc, used, acc, remaining - 1, emit);
            used[best] = kUnset;
            return;
        }
        const std::vector<std::size_t>& pool = candidates(inst);
        const std::size_t n = pool.size();
        const std::size_t first =
            need_fresh ? static_cast<std::size_t>(std::lower_bound(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n),
                                                                   old_limit_) -
                                                  pool.begin())
                       : 0;
        for (std::size_t i = first; i < n; ++i) {
            tick();
            const std::size_t idx = pool[i];
            for (const auto& ext : match_atom(inst, steps_[idx].atom, acc)) {
                used[best] = idx;
                solve(pc, used, ext, remaining - 1, emit);
            }
        }
        used[best] = kUnset;
        // Destructors gain nothing from a composed premise: its parts are known.
        if (composes && inst.predicate == kIntruder &&
            inst.args.size() == 1 && inst.args[0].is_apply() &&
            (inst_vars.size() <= 1 || exposed_vars(inst.args[0], acc) == 0) && composers_.count(inst.args[0].name())) {
            std::vector<Substitution> composed;
            compose_solutions(inst.args[0], acc, composed, static_cast<int>(opts_.bounds.max_term_size));
            for (const auto& ext : composed) {
                const Atom ground = canon(apply_subst(inst, ext));
                if (lookup(ground)) continue;  // already covered by the stored facts
                used[best] = kPending;
                solve(pc, used, ext, remaining - 1, emit);
            }
            used[best] = kUnset;
        }
    }

    bool lazy() const { return opts_.lazy_composition; }

    // Unbound variables reachable from the root through composable symbols
    // only. Each one ranges over every fact when the premise is composed.
    std::size_t exposed_vars(const Term& t, const Substitution& acc) const {
        if (t.is_var()) return acc.count(t.name()) ? 0 : 1;
        if (!t.is_apply() || !composers_.count(t.name())) return 0;
        std::size_t n = 0;
        for (const auto& a : t.args()) n += exposed_vars(a, acc);
        return n;
    }

    void fire(const PreparedClause& pc, const Substitution& acc, const std::vector<std::size_t>& used) {
        std::vector<Substitution> instances{acc};
        for (const auto& v : pc.free_exempt) {
            std::vector<Substitution> next;
            for (const auto& a : instances) {
                for (const auto& sid : sid_pool_) {
                    Substitution ext = a;
                    ext.emplace(v, sid);
                    next.push_back(std::move(ext));
                }
            }
            instances = std::move(next);
        }
        for (const auto& theta : instances) {
            const Atom head = canon(apply_subst(pc.conclusion, theta));
            std::set<std::string> left;
            collect_vars(head, left);
            if (!left.empty() || lookup(head) || !fits(head)) continue;
            Justification j;
            j.kind = Justification::Kind::Clause;
            j.clause = pc.id;
            std::set<std::string> clause_vars = vars(th_.clauses[pc.id]);
            for (const auto& [x, v] : theta) {
                if (clause_vars.count(x)) j.bindings.emplace(x, v);
            }
            bool ok = true;
            for (std::size_t i = 0; i < used.size() && ok; ++i) {
                std::size_t idx = used[i];
                if (idx == kPending) {
                    const Atom ground = canon(apply_subst(pc.premises[i], theta));
                    auto s = synth(ground.args[0]);
                    ok = s.has_value();
                    idx = s.value_or(0);
                }
                j.premises.push_back(idx);
            }
            if (ok) add(head, std::move(j));
        }
    }

    void apply_clause(const PreparedClause& pc) {
        std::vector<std::size_t> used(pc.premises.size(), kUnset);
        solve(pc, used, Substitution{}, pc.premises.size(),
              [&](const Substitution& acc, const std::vector<std::size_t>& u) { fire(pc, acc, u); });
    }

    void xor_round(std::size_t delta_begin, std::size_t delta_end) {
        std::vector<std::size_t> delta;
        for (std::size_t idx : intruder_facts_) {
            if (idx >= delta_begin && idx < delta_end) delta.push_back(idx);
        }
        const std::vector<std::size_t> all = intruder_facts_;
        for (std::size_t f : delta) {
            const Term tf = steps_[f].atom.args[0];
            std::vector<std::size_t> partners;
            if (prune_) {
                const Term rest = rest_of(tf);
                if (rest.is_zero()) {
                    partners = all;
                } else {
                    auto g = by_rest_.find(rest);
                    if (g != by_rest_.end()) partners = g->second;
                    auto z = by_rest_.find(Term::zero());
                    if (z != by_rest_.end()) partners.insert(partners.end(), z->second.begin(), z->second.end());
                }
            } else {
                partners = all;
            }
            for (std::size_t g : partners) {
                tick();
                if (g >= delta_end) continue;
                const Term sum = canon(Term::xor_of(tf, steps_[g].atom.args[0]));
                if (prune_ && !is_c_dominated(sum, cset_)) continue;
                const Atom fact = intruder(sum);
                if (lookup(fact)) continue;
                add(fact, xor_just(f, g));
            }
        }
    }

    void search() {
        round_ = 0;
        for (const auto& a : assumptions_) {
            add(canon(a), Justification{});
        }
        for (const auto& pc : clauses_) {
            if (pc.premises.empty()) fire(pc, Substitution{}, {});
        }
        std::size_t delta_begin = 0;
        for (round_ = 1; round_ < opts_.bounds.max_depth && !goal_idx_; ++round_) {
            const std::size_t delta_end = steps_.size();
            old_limit_ = delta_begin;
            added_this_round_ = 0;
            failed_.clear();
            if (lazy() && goal_.predicate == kIntruder && goal_.args.size() == 1 && goal_.args[0].is_ground()) {
                synth(goal_.args[0]);
                if (goal_idx_) return;
            }
            for (const auto& pc : clauses_) {
                if (pc.premises.empty() || (pc.composition && lazy())) continue;
                apply_clause(pc);
                if (goal_idx_) return;
            }
            if (xor_rule_) xor_round(delta_begin, delta_end);
            delta_begin = delta_end;
            if (added_this_round_ == 0) {
                saturated_ = true;
                return;
            }
        }
    }

    Derivation extract(std::size_t goal) const {
        std::set<std::size_t> keep;
        std::vector<std::size_t> stack{goal};
        while (!stack.empty()) {
            std::size_t k = stack.back();
            stack.pop_back();
            if (!keep.insert(k).second) continue;
            const Justification& j = steps_[k].just;
            if (j.kind == Justification::Kind::Clause) {
                for (std::size_t p : j.premises) stack.push_back(p);
            } else if (j.kind == Justification::Kind::Xor) {
                stack.push_back(j.left);
                stack.push_back(j.right);
            }
        }
        std::unordered_map<std::size_t, std::size_t> renum;
        Derivation d;
        for (std::size_t k : keep) {
            renum[k] = d.steps.size();
            Step s = steps_[k];
            for (auto& p : s.just.premises) p = renum.at(p);
            if (s.just.kind == Justification::Kind::Xor) {
                s.just.left = renum.at(s.just.left);
                s.just.right = renum.at(s.just.right);
            }
            d.steps.push_back(std::move(s));
        }
        return d;
    }

    static constexpr std::size_t kUnset = kPending - 1;

    const Theory& th_;
    Mode mode_;
    CSet cset_;
    EngineOptions opts_;
    const std::vector<Atom>& assumptions_;
    bool xor_rule_ = false;
    bool prune_ = false;
    bool definitive_possible_ = true;
    Atom goal_;
    std::optional<std::size_t> goal_idx_;
    std::vector<Term> sid_pool_;
    Clock::time_point deadline_;
    std::size_t ticks_ = 0;

    std::vector<PreparedClause> clauses_;
    std::map<std::string, Composer> composers_;

    std::vector<Step> steps_;
    std::vector<std::size_t> round_of_;
    std::unordered_map<Atom, std::size_t, AtomHash, AtomEq> index_;
    std::map<std::string, std::vector<std::size_t>> by_pred_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_head_;
    std::size_t old_limit_ = 0;
    std::vector<std::size_t> intruder_facts_;
    std::unordered_map<Term, std::vector<std::size_t>, TermHash> by_rest_;
    std::unordered_map<Term, std::vector<std::size_t>, TermHash> by_summand_;
    std::unordered_set<Term, TermHash> failed_;
    std::unordered_set<Term, TermHash> in_progress_;

    std::size_t round_ = 0;
    std::size_t added_this_round_ = 0;
    bool saturated_ = false;
    bool size_pruned_ = false;
    bool matching_incomplete_ = false;
};

}  // namespace

SearchResult derive_syntactic(const Theory& t, const Atom& goal, const EngineOptions& opts,
                              const std::vector<Atom>& assumptions) {
    if (t.xor_rule_implicit) throw std::invalid_argument("syntactic search needs a theory without the xor rule");
    return Engine(t, Mode::Syntactic, nullptr, opts, assumptions, goal).run();
}

SearchResult derive_mod_xor(const Theory& t, const Atom& goal, const CSet* c, const EngineOptions& opts,
                            const std::vector<Atom>& assumptions) {
    return Engine(t, Mode::Xor, c, opts, assumptions, goal).run();
}

// ----- verification -----------------------------------------------------------

namespace {

bool same(const Atom& a, const Atom& b, Mode mode) { return mode == Mode::Xor ? equiv_mod_xor(a, b) : a == b; }

}  // namespace

bool verify_derivation(const Theory& t, const Derivation& d, Mode mode, const std::vector<Atom>& assumptions) {
    for (std::size_t k = 0; k < d.steps.size(); ++k) {
        const Step& s = d.steps[k];
        const Justification& j = s.just;
        switch (j.kind) {
            case Justification::Kind::Initial: {
                bool ok = std::any_of(assumptions.begin(), assumptions.end(),
                                      [&](const Atom& a) { return same(a, s.atom, mode); });
                if (!ok) return false;
                break;
            }
            case Justification::Kind::Clause: {
                if (j.clause >= t.clauses.size()) return false;
                const HornClause& cl = t.clauses[j.clause];
                for (const auto& v : vars(cl)) {
                    auto it = j.bindings.find(v);
                    if (it == j.bindings.end() || !it->second.is_ground()) return false;
                }
                if (j.premises.size() != cl.premises.size()) return false;
                for (std::size_t i = 0; i < cl.premises.size(); ++i) {
                    if (j.premises[i] >= k) return false;
                    if (!same(apply_subst(cl.premises[i], j.bindings), d.steps[j.premises[i]].atom, mode)) return false;
                }
                if (!same(apply_subst(cl.conclusion, j.bindings), s.atom, mode)) return false;
                break;
            }
            case Justification::Kind::Xor: {
                if (mode != Mode::Xor || !t.xor_rule_implicit) return false;
                if (j.left >= k || j.right >= k) return false;
                const Atom& l = d.steps[j.left].atom;
                const Atom& r = d.steps[j.right].atom;
                if (l.predicate != kIntruder || r.predicate != kIntruder || l.args.size() != 1 || r.args.size() != 1) {
                    return false;
                }
                if (!same(intruder(Term::xor_of(l.args[0], r.args[0])), s.atom, mode)) return false;
                break;
            }
        }
    }
    return true;
}

Derivation lift_derivation(const ReducedTheory& rt, const Derivation& d) {
    Derivation out;
    for (const auto& s : d.steps) {
        Step lifted = s;
        if (s.just.kind == Justification::Kind::Clause) {
            const Origin& o = rt.origin.at(s.just.clause);
            if (o.family == Family::Rule) {
                lifted.just.clause = *o.source;
                lifted.just.bindings.clear();
                for (const auto& [x, v] : compose(o.sigma, s.just.bindings)) lifted.just.bindings.emplace(x, v);
            } else {
                lifted.just = Justification{};
                lifted.just.kind = Justification::Kind::Xor;
                lifted.just.left = s.just.premises.at(0);
                lifted.just.right = s.just.premises.at(1);
            }
        }
        out.steps.push_back(std::move(lifted));
    }
    return out;
}

// ----- correspondence -------------------------------------------------------------

CorrespondenceResult check_correspondence(const Theory& t, const CorrespondenceQuery& q, Mode mode, const CSet* c,
                                          const EngineOptions& opts) {
    std::vector<Substitution> theta;
    if (q.end.predicate == q.goal.predicate && q.end.args.size() == q.goal.args.size()) {
        Substitution acc;
        bool ok = true;
        const CSet empty;
        for (std::size_t i = 0; i < q.end.args.size() && ok; ++i) {
            auto m = match_mod_xor(apply_subst(q.end.args[i], acc), q.goal.args[i], c ? *c : empty);
            ok = m.has_value();
            if (ok) acc.insert(m->begin(), m->end());
        }
        if (ok) theta.push_back(acc);
    }
    if (theta.empty()) throw std::invalid_argument("goal is not an instance of the end pattern");
    const Atom begin = apply_subst(q.begin, theta.front());
    for (const auto& b : q.fixed_begins) {
        if (equiv_mod_xor(b, begin) || equiv_mod_xor(b, q.goal)) {
            throw std::invalid_argument("the begin event of the goal is among the fixed begins");
        }
    }
    CorrespondenceResult out;
    out.search = mode == Mode::Xor ? derive_mod_xor(t, q.goal, c, opts, q.fixed_begins)
                                   : derive_syntactic(t, q.goal, opts, q.fixed_begins);
    switch (out.search.outcome) {
        case Outcome::Found:
            out.verdict = CorrespondenceVerdict::Violated;
            out.definitive = true;
            break;
        case Outcome::Saturated:
            out.verdict = CorrespondenceVerdict::Holds;
            out.definitive = true;
            break;
        case Outcome::Exhausted:
            out.verdict = out.search.fact_cap_hit ? CorrespondenceVerdict::Inconclusive : CorrespondenceVerdict::Holds;
            break;
        case Outcome::Timeout: out.verdict = CorrespondenceVerdict::Inconclusive; break;
    }
    return out;
}

// ----- serialization ------------------------------------------------------------

std::string format_trace(const Derivation& d) {
    std::ostringstream os;
    for (std::size_t k = 0; k < d.steps.size(); ++k) {
        const Step& s = d.steps[k];
        os << "step " << k + 1 << ": " << to_string(s.atom) << "  by ";
        switch (s.just.kind) {
            case Justification::Kind::Initial: os << "initial"; break;
            case Justification::Kind::Clause:
                os << "clause " << s.just.clause << " with " << to_string(s.just.bindings);
                break;
            case Justification::Kind::Xor: os << "xor(" << s.just.left + 1 << ',' << s.just.right + 1 << ')'; break;
        }
        os << '\n';
    }
    return os.str();
}

std::string trace_json(const Derivation& d) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t k = 0; k < d.steps.size(); ++k) {
        const Step& s = d.steps[k];
        nlohmann::json j;
        j["step"] = k + 1;
        j["atom"] = to_string(s.atom);
        switch (s.just.kind) {
            case Justification::Kind::Initial: j["just"] = "initial"; break;
            case Justification::Kind::Clause: {
                j["just"] = "clause";
                j["clause"] = s.just.clause;
                nlohmann::json b = nlohmann::json::object();
                for (const auto& [x, v] : s.just.bindings) b[x] = to_string(v);
                j["bindings"] = b;
                nlohmann::json p = nlohmann::json::array();
                for (std::size_t i : s.just.premises) p.push_back(i + 1);
                j["premises"] = p;
                break;
            }
            case Justification::Kind::Xor:
                j["just"] = "xor";
                j["left"] = s.just.left + 1;
                j["right"] = s.just.right + 1;
                break;
        }
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

}  // namespace xorhorn
