// Acceptance run: one PASS/FAIL line per criterion, then a nonzero exit
// status if any criterion failed.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "xorhorn/cli.hpp"
#include "xorhorn/corpus.hpp"
#include "xorhorn/emitter.hpp"

using namespace xorhorn;
using namespace testing_support;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome_ {
    bool pass;
    std::string detail;
};

Theory corpus_theory(const char* name) { return parse_theory(corpus_entry(name)->text).theory; }

EngineOptions bounds(std::size_t depth, std::size_t size, double timeout_s) {
    EngineOptions o;
    o.bounds.max_depth = depth;
    o.bounds.max_term_size = size;
    o.bounds.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000));
    return o;
}

std::string fmt(double s) {
    std::ostringstream os;
    os.precision(3);
    os << s << " s";
    return os.str();
}

bool has_clause(const ReducedTheory& rt, const std::string& text) {
    const ParseResult pr = parse_theory("fun f/1. const a. const b.\n" + text);
    if (!pr.ok()) return false;
    const HornClause& want = pr.theory.clauses.at(0);
    for (const auto& cl : rt.theory.clauses)
        if (cl.premises == want.premises && cl.conclusion == want.conclusion) return true;
    return false;
}

Outcome_ ac1() {
    const std::vector<std::string> args{"xorhorn", "solve",      "corpus:nsl-xor", "--mode",    "xor", "--goal",
                                        "I(m(b,a))", "--max-depth", "12",             "--max-size", "24",  "--timeout",
                                        "5"};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const auto t0 = Clock::now();
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    const double t = seconds_since(t0);

    const Theory th = corpus_theory("nsl-xor");
    const CSet c = compute_c_set(th);
    const SearchResult r = derive_mod_xor(th, A("I(m(b, a))"), &c, bounds(12, 24, 5));
    const bool replay = r.outcome == Outcome::Found && verify_derivation(th, r.derivation, Mode::Xor);
    std::ostringstream d;
    d << "exit " << code << ", " << r.derivation.steps.size() << " steps, replay " << (replay ? "ok" : "failed")
      << ", " << fmt(t);
    return {code == kExitFound && replay && t < 5.0, d.str()};
}

Outcome_ ac2() {
    const Theory th = corpus_theory("nsl-xor");
    const auto t0 = Clock::now();
    const CSet c = compute_c_set(th);
    const ReducedTheory rt = build_t_plus(th, c);
    const std::string text = emit_proverif(rt);
    const SearchResult r = derive_syntactic(rt.theory, A("I(m(b, a))"), bounds(12, 24, 5));
    const double t = seconds_since(t0);
    if (r.outcome != Outcome::Found) return {false, std::string("syntactic search: ") + std::string(outcome_name(r.outcome))};
    const Derivation lifted = lift_derivation(rt, r.derivation);
    const bool ok = verify_derivation(th, lifted, Mode::Xor) && equiv_mod_xor(lifted.last(), A("I(m(b, a))"));
    std::ostringstream d;
    d << rt.theory.clauses.size() << " clauses, " << r.derivation.steps.size() << " steps, lifted "
      << lifted.steps.size() << " steps " << (ok ? "verify" : "do not verify") << " modulo XOR, " << fmt(t);
    return {ok && t < 5.0, d.str()};
}

Outcome_ ac3() {
    const ParseResult pr = parse_theory(
        "fun pub/1. fun penc/2. fun pair/2. fun m/2. const a. const b. const ska. const skb.\n"
        "I(penc(pair(X, a), pub(skb))) -> I(penc(pair(m(b, a), X + b), pub(ska))).\n");
    const HornClause& cl = pr.theory.clauses.at(0);
    const CSet c = C({"a", "b"});
    const Term tuple = Term::apply(kTupleSymbol, {cl.conclusion.args[0], cl.premises[0].args[0]});
    const auto subs = fsub(tuple, c);

    std::size_t matched = 0;
    for (const char* v : {"X", "a + X", "b + X", "(a + b) + X", "0", "a", "b", "a + b"}) {
        const Substitution want{{"X", normal_form(T(v), c)}};
        for (const auto& s : subs)
            if (agrees_up_to_identity(s, want)) {
                ++matched;
                break;
            }
    }
    Theory th;
    th.clauses.push_back(cl);
    for (const auto& [f, n] : pr.theory.signature) th.signature.emplace(f, n);
    const ReducedTheory rt = build_t_plus(th, c);
    const ParseResult want = parse_theory(
        "fun pub/1. fun penc/2. fun pair/2. fun m/2. const a. const b. const ska. const skb.\n"
        "I(penc(pair((a + b) + X, a), pub(skb))) -> I(penc(pair(m(b, a), a + X), pub(ska))).\n");
    bool sigma4 = false;
    for (const auto& g : rt.theory.clauses)
        sigma4 = sigma4 || (g.premises == want.theory.clauses[0].premises &&
                            g.conclusion == want.theory.clauses[0].conclusion);
    std::ostringstream d;
    d << subs.size() << " substitutions, " << matched << " of 8 listed present, sigma4 instance "
      << (sigma4 ? "present" : "missing");
    return {subs.size() == 8 && matched == 8 && sigma4, d.str()};
}

Outcome_ ac4() {
    const ReducedTheory rt = build_t_plus(corpus_theory("nsl-xor"), C({"a", "b"}));
    const bool first = has_clause(rt, "I(a + b), I(b + X) -> I(a + X).");
    const bool second = has_clause(rt, "I(b), I(a + X) -> I((a + b) + X).");
    std::ostringstream d;
    d << "I(a+b),I(b+X)->I(a+X) " << (first ? "present" : "missing") << ", I(b),I(a+X)->I((a+b)+X) "
      << (second ? "present" : "missing");
    return {first && second, d.str()};
}

Outcome_ ac5() {
    const Theory th = corpus_theory("cca-0");
    const CSet c = compute_c_set(th);
    const auto t0 = Clock::now();
    const SearchResult r = derive_mod_xor(th, A("I(pdk)"), &c, bounds(10, 24, 60));
    const double t = seconds_since(t0);
    if (r.outcome != Outcome::Found) return {false, std::string(outcome_name(r.outcome)) + " after " + fmt(t)};
    const std::vector<std::string> steps{"I(e(kk + k3 + pin, km + imp))", "I(e(kk + k3 + pin + exp, km + imp))",
                                         "I(e(pdk, km))", "I(e(pdk, km + exp))", "I(e(pdk, pdk))"};
    std::ostringstream d;
    std::size_t seen = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const Atom want = A(steps[i]);
        bool found = false;
        for (const auto& st : r.derivation.steps) found = found || equiv_mod_xor(st.atom, want);
        seen += found;
        if (!found) d << "A" << i + 1 << " missing, ";
    }
    const bool replay = verify_derivation(th, r.derivation, Mode::Xor);
    d << r.derivation.steps.size() << " steps, " << seen << " of A1-A5 in trace, replay " << (replay ? "ok" : "failed")
      << ", " << r.rounds << " rounds, " << fmt(t);
    return {seen == 5 && replay && r.rounds <= 10 && t < 60.0, d.str()};
}

Outcome_ ac6() {
    const auto t0 = Clock::now();
    EngineOptions o = bounds(8, 12, 2);
    o.bounds.max_facts = 5000;
    const Report r = reduction_agreement_harness(600, 2024, o);
    const double t = seconds_since(t0);
    if (r.failures) std::cerr << r.first_failure << "\n";
    return {r.checked >= 500 && r.failures == 0 && t < 600.0, summary(r) + ", " + fmt(t)};
}

Outcome_ ac7() {
    const Report r = sigma_residual_harness(1500, {C({"a"}), C({"a", "b"}), C({"b", "m"}), C({"a", "b", "m"})}, 99);
    if (r.failures) std::cerr << r.first_failure << "\n";
    return {r.checked >= 1000 && r.failures == 0, summary(r)};
}

Outcome_ ac8() {
    const auto t0 = Clock::now();
    const Report r = matcher_harness({CSet(), C({"a"}), C({"a", "b"})}, 5, 5);
    if (r.failures) std::cerr << r.first_failure << "\n";
    return {r.failures == 0 && r.checked > 0, summary(r) + ", " + fmt(seconds_since(t0))};
}

Outcome_ ac9() {
    const Report r = bad_subterm_harness(6);
    if (r.failures) std::cerr << r.first_failure << "\n";
    return {r.failures == 0 && r.checked > 0, summary(r)};
}

Outcome_ ac10() {
    std::ostringstream d;
    bool ok = true;
    for (const auto& e : corpus()) {
        const auto t0 = Clock::now();
        const ParseResult pr = parse_theory(e.text);
        const CSet c = compute_c_set(pr.theory);
        const ReducedTheory rt = build_t_plus(pr.theory, c);
        const std::string text = emit_proverif(rt);
        const double t = seconds_since(t0);
        ok = ok && t < 2.0 && !text.empty();
        d << e.name << " " << fmt(t) << " (" << rt.theory.clauses.size() << " clauses); ";
    }
    return {ok, d.str()};
}

Outcome_ ac11() {
    const Theory th = corpus_theory("nsl-xor-fix");
    const CSet c = compute_c_set(th);
    const SearchResult r = derive_mod_xor(th, A("I(m(b, a))"), &c, bounds(12, 24, 5));
    std::ostringstream d;
    d << outcome_name(r.outcome) << " (" << r.facts << " facts, " << r.rounds << " rounds)";
    if (r.outcome == Outcome::Found) d << ", derivation of " << r.derivation.steps.size() << " steps";
    return {r.outcome == Outcome::Saturated || r.outcome == Outcome::Exhausted, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome_()>>> criteria{
        {"AC1 running-example attack in xor mode", ac1},
        {"AC2 reduced theory derivation lifts and verifies", ac2},
        {"AC3 fsub of the responder clause", ac3},
        {"AC4 xor-simulation clause spot checks", ac4},
        {"AC5 CCA attack reconstruction", ac5},
        {"AC6 random theories, xor mode versus reduced theory", ac6},
        {"AC7 sigma/residual property on random pairs", ac7},
        {"AC8 matcher versus exhaustive substitution search", ac8},
        {"AC9 domination versus bad subterms", ac9},
        {"AC10 reduction time per corpus theory", ac10},
        {"AC11 fixed protocol, bounded negative", ac11},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome_ o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
