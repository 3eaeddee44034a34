#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "xorhorn/theory.hpp"

namespace xorhorn {

class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordered dominating set. Position in elements() is the order used by
/// normal forms. Copies share one lazily filled cache.
class CSet {
public:
    static constexpr std::size_t kDefaultCap = 12;

    CSet();
    /// Elements are xor-reduced and deduplicated modulo XOR, keeping the
    /// given order. Throws std::invalid_argument for non-ground or
    /// non-standard elements.
    explicit CSet(std::vector<Term> elements, std::size_t cap = kDefaultCap);

    std::size_t size() const;
    bool empty() const { return size() == 0; }
    std::size_t cap() const;
    const std::vector<Term>& elements() const;

    /// Index of the element t is equivalent to, if any. t must be standard.
    std::optional<std::size_t> index_of(const Term& t) const;

    /// Normal form of element i.
    const Term& normalized(std::size_t i) const;

    /// Normal form of the sum of the elements selected by mask.
    Term chain(std::uint64_t mask) const;

    /// Bitmask of a ground term in the closure; nullopt otherwise.
    std::optional<std::uint64_t> mask_of(const Term& t) const;

    /// All 2^n normalized closure elements indexed by mask. Throws
    /// CapExceeded when size() > cap().
    const std::vector<Term>& closure() const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

std::string to_string(const CSet& c);

struct Verdict {
    bool ok = true;
    std::optional<Term> witness;
    std::optional<std::size_t> clause;  // index into Theory::clauses

    explicit operator bool() const { return ok; }
};

Verdict is_xor_linear(const Term& t);
Verdict is_xor_linear(const HornClause& c);
Verdict is_xor_linear(const Theory& th);

bool in_xor_closure(const Term& t, const CSet& c);
bool is_bad(const Term& t, const CSet& c);

Verdict is_c_dominated(const Term& t, const CSet& c);
Verdict is_c_dominated(const HornClause& cl, const CSet& c);
Verdict is_c_dominated(const Theory& th, const CSet& c);

class NotXorLinear : public std::runtime_error {
public:
    NotXorLinear(const std::string& msg, Verdict v) : std::runtime_error(msg), verdict(std::move(v)) {}
    Verdict verdict;
};

/// Heuristic dominating set. Throws NotXorLinear.
CSet compute_c_set(const Theory& th, std::size_t cap = CSet::kDefaultCap);

/// { normal form of c | c in the closure }, 2^|C| terms.
TermSet enumerate_cc_norm(const CSet& c);

}  // namespace xorhorn
