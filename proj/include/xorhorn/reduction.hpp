#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "xorhorn/domination.hpp"

namespace xorhorn {

/// Clause families of the XOR-free theory. Rule instances come from the
/// source theory; the other four simulate the xor rule on closure values.
enum class Family { Rule = 1, Const = 2, Pop = 3, Variant = 4, Gen = 5 };

struct Origin {
    Family family = Family::Rule;
    std::optional<std::size_t> source;  // Rule: index of the source clause
    Substitution sigma;                 // Rule: the instantiating substitution
    std::uint64_t c = 0;                // closure masks for the other families
    std::uint64_t c2 = 0;
};

struct ReducedTheory {
    Theory theory;               // xor_rule_implicit is false
    std::vector<Origin> origin;  // parallel to theory.clauses
    CSet c_set;
};

class NotDominated : public std::runtime_error {
public:
    NotDominated(const std::string& msg, Verdict v) : std::runtime_error(msg), verdict(std::move(v)) {}
    Verdict verdict;
};

/// Name of the variable used by the xor-simulating families.
inline constexpr const char* kFamilyVar = "X";

/// Throws NotDominated, or CapExceeded from the closure.
ReducedTheory build_t_plus(const Theory& t, const CSet& c);

struct ReduceStats {
    std::map<Family, std::size_t> clauses_per_family;
    std::size_t closure_size = 0;
    std::map<std::size_t, std::size_t> source_clause_fanout;
};

ReduceStats reduce_stats(const ReducedTheory& rt);

std::string_view family_name(Family f);

}  // namespace xorhorn
