#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xorhorn/domination.hpp"

namespace xorhorn {

/// Normal form with respect to C. Sums are written as the ordered chain of
/// closure summands followed by the remaining summands; terms outside the
/// dominated class get the remaining summands in sorted order, so the
/// result is canonical for every term.
Term normal_form(const Term& t, const CSet& c);
Atom normal_form(const Atom& a, const CSet& c);

/// Matcher modulo XOR of a pattern against a ground target, in normal
/// form. Throws std::invalid_argument when some sum in the pattern has
/// two non-ground summands.
std::optional<Substitution> match_mod_xor(const Term& pattern, const Term& target, const CSet& c);

/// match_mod_xor for arguments already in normal form.
std::optional<Substitution> match_normalized(const Term& pattern, const Term& target, const CSet& c);

/// True when every sum in the pattern has at most one non-ground summand.
bool matchable(const Term& pattern);

/// Non-ground standard terms occurring directly under a sum. Variables in
/// `opaque` count as ground.
TermSet fragile_subterms(const Term& t, const std::set<std::string>& opaque = {});

/// Substitution family over the variables of the fragile subterms.
/// Deterministic order.
std::vector<Substitution> fsub(const Term& t, const CSet& c, const std::set<std::string>& opaque = {});

struct SigmaResult {
    Substitution sigma;
    Substitution residual;
};

/// Selects the member of fsub(t) covering the ground normal-form
/// substitution theta, plus the residual with theta = sigma residual.
SigmaResult sigma_of(const Term& t, const Substitution& theta, const CSet& c,
                     const std::set<std::string>& opaque = {});

/// Composition helper: apply `inner`, then `outer`.
Substitution compose(const Substitution& inner, const Substitution& outer);

/// Internal tuple constructor used to treat a clause as one term.
inline constexpr const char* kTupleSymbol = "%tuple";

}  // namespace xorhorn
