#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "xorhorn/reduction.hpp"

namespace xorhorn {

enum class Mode { Syntactic, Xor };

struct SearchBounds {
    std::size_t max_depth = 12;
    std::size_t max_term_size = 24;
    std::size_t max_facts = 200000;
    std::chrono::milliseconds timeout{5000};
};

struct EngineOptions {
    SearchBounds bounds;
    /// Fresh constants sid0, sid1, ... substituted for exempt variables.
    std::size_t sid_pool = 2;
    /// Combine facts with the xor rule only when the result stays dominated.
    bool prune = true;
    /// Composition clauses are used on demand instead of fired forward.
    bool lazy_composition = true;
    /// Matchers enumerated per premise for sums with several open summands.
    std::size_t match_cap = 64;
};

struct Justification {
    enum class Kind { Initial, Clause, Xor };
    Kind kind = Kind::Initial;
    std::size_t clause = 0;
    Substitution bindings;
    std::vector<std::size_t> premises;  // step indices, one per clause premise
    std::size_t left = 0;
    std::size_t right = 0;
};

struct Step {
    Atom atom;
    Justification just;
};

struct Derivation {
    std::vector<Step> steps;

    bool empty() const { return steps.empty(); }
    const Atom& last() const { return steps.back().atom; }
};

enum class Outcome {
    Found,      // derivation in `derivation`
    Saturated,  // fixpoint under complete rules: definitive negative
    Exhausted,  // depth, size or fact bound reached without a derivation
    Timeout,
};

std::string_view outcome_name(Outcome o);

struct SearchResult {
    Outcome outcome = Outcome::Exhausted;
    Derivation derivation;
    std::size_t facts = 0;
    std::size_t rounds = 0;
    bool fact_cap_hit = false;
    bool size_pruned = false;
    bool matching_incomplete = false;
};

/// Syntactic forward search. Throws std::invalid_argument when the theory
/// carries the implicit xor rule.
SearchResult derive_syntactic(const Theory& t, const Atom& goal, const EngineOptions& opts = {},
                              const std::vector<Atom>& assumptions = {});

/// Forward search modulo XOR. With a dominating set for a dominated
/// theory, xor combinations are restricted to dominated results.
SearchResult derive_mod_xor(const Theory& t, const Atom& goal, const CSet* c = nullptr,
                            const EngineOptions& opts = {}, const std::vector<Atom>& assumptions = {});

/// Replays every step. Initial steps must be equal (modulo XOR in xor mode)
/// to one of the assumptions.
bool verify_derivation(const Theory& t, const Derivation& d, Mode mode, const std::vector<Atom>& assumptions = {});

/// Maps a derivation over the reduced theory to one over its source.
Derivation lift_derivation(const ReducedTheory& rt, const Derivation& d);

enum class CorrespondenceVerdict { Holds, Violated, Inconclusive };

struct CorrespondenceResult {
    CorrespondenceVerdict verdict = CorrespondenceVerdict::Inconclusive;
    bool definitive = false;
    SearchResult search;
};

/// Throws std::invalid_argument when the goal is not an instance of the end
/// pattern or its begin instance is among the fixed begins.
CorrespondenceResult check_correspondence(const Theory& t, const CorrespondenceQuery& q, Mode mode,
                                          const CSet* c = nullptr, const EngineOptions& opts = {});

std::string format_trace(const Derivation& d);
std::string trace_json(const Derivation& d);

}  // namespace xorhorn
