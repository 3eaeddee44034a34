#include "xorhorn/domination.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "xorhorn/normalization.hpp"

namespace xorhorn {

struct CSet::Impl {
    std::vector<Term> elements;
    std::size_t cap = kDefaultCap;
    std::unordered_map<Term, std::size_t, TermHash> index;
    std::set<std::size_t> sizes;
    std::vector<std::optional<Term>> normalized;

    std::once_flag closure_once;
    std::vector<Term> closure;
};

CSet::CSet() : impl_(std::make_shared<Impl>()) {}

CSet::CSet(std::vector<Term> elements, std::size_t cap) : impl_(std::make_shared<Impl>()) {
    impl_->cap = cap;
    for (const auto& e : elements) {
        Term r = xor_reduce(e);
        if (!r.is_ground() || !is_standard(r)) {
            throw std::invalid_argument("dominating-set element must be ground and standard: " + to_string(e));
        }
        if (impl_->index.count(r)) continue;
        impl_->index.emplace(r, impl_->elements.size());
        impl_->sizes.insert(r.size());
        impl_->elements.push_back(r);
    }
    if (impl_->elements.size() > 63) throw std::invalid_argument("dominating set larger than 63 elements");

    // Each element only contains strictly smaller elements, so normalizing
    // by increasing size finds every nested chain already available.
    impl_->normalized.resize(impl_->elements.size());
    std::vector<std::size_t> order(impl_->elements.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return impl_->elements[a].size() < impl_->elements[b].size();
    });
    for (std::size_t i : order) impl_->normalized[i] = normal_form(impl_->elements[i], *this);
}

std::size_t CSet::size() const { return impl_->elements.size(); }
std::size_t CSet::cap() const { return impl_->cap; }
const std::vector<Term>& CSet::elements() const { return impl_->elements; }

std::optional<std::size_t> CSet::index_of(const Term& t) const {
    if (!t.is_ground() || !is_standard(t) || !impl_->sizes.count(t.size())) return std::nullopt;
    auto it = impl_->index.find(xor_reduce(t));
    if (it == impl_->index.end()) return std::nullopt;
    return it->second;
}

const Term& CSet::normalized(std::size_t i) const { return *impl_->normalized.at(i); }

Term CSet::chain(std::uint64_t mask) const {
    std::vector<Term> parts;
    for (std::size_t i = 0; i < size(); ++i) {
        if (mask >> i & 1u) parts.push_back(normalized(i));
    }
    return make_sum(parts);
}

std::optional<std::uint64_t> CSet::mask_of(const Term& t) const {
    if (!t.is_ground()) return std::nullopt;
    std::uint64_t mask = 0;
    for (const auto& s : summands(t)) {
        auto idx = index_of(s);
        if (!idx) {
            // a summand outside C may still cancel against an equal one
            Term r = xor_reduce(t);
            if (r == t) return std::nullopt;
            return mask_of(r);
        }
        mask ^= std::uint64_t{1} << *idx;
    }
    return mask;
}

const std::vector<Term>& CSet::closure() const {
    if (size() > cap()) {
        throw CapExceeded("closure of " + std::to_string(size()) + " elements exceeds cap " + std::to_string(cap()));
    }
    std::call_once(impl_->closure_once, [this] {
        const std::uint64_t n = std::uint64_t{1} << size();
        impl_->closure.reserve(n);
        for (std::uint64_t m = 0; m < n; ++m) impl_->closure.push_back(chain(m));
    });
    return impl_->closure;
}

std::string to_string(const CSet& c) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) os << ", ";
        os << c.elements()[i];
    }
    os << '}';
    return os.str();
}

namespace {

template <typename Pred>
std::optional<Term> first_xor_violation(const Term& t, Pred&& ok) {
    if (t.is_xor() && !ok(t.left(), t.right())) return t;
    for (const auto& a : t.args()) {
        if (auto w = first_xor_violation(a, ok)) return w;
    }
    return std::nullopt;
}

template <typename Check>
Verdict check_clause(const HornClause& c, Check&& check) {
    for (const auto& p : c.premises) {
        for (const auto& t : p.args) {
            if (Verdict v = check(t); !v) return v;
        }
    }
    for (const auto& t : c.conclusion.args) {
        if (Verdict v = check(t); !v) return v;
    }
    return {};
}

template <typename Check>
Verdict check_theory(const Theory& th, Check&& check) {
    for (std::size_t i = 0; i < th.clauses.size(); ++i) {
        Verdict v = check_clause(th.clauses[i], check);
        if (!v) {
            v.clause = i;
            return v;
        }
    }
    return {};
}

}  // namespace

Verdict is_xor_linear(const Term& t) {
    auto w = first_xor_violation(t, [](const Term& l, const Term& r) { return l.is_ground() || r.is_ground(); });
    return w ? Verdict{false, w, std::nullopt} : Verdict{};
}

Verdict is_xor_linear(const HornClause& c) {
    return check_clause(c, [](const Term& t) { return is_xor_linear(t); });
}

Verdict is_xor_linear(const Theory& th) {
    return check_theory(th, [](const Term& t) { return is_xor_linear(t); });
}

bool in_xor_closure(const Term& t, const CSet& c) { return t.is_ground() && c.mask_of(t).has_value(); }

bool is_bad(const Term& t, const CSet& c) {
    std::size_t outside = 0;
    for (const auto& s : summands(xor_reduce(t))) {
        if (!c.index_of(s)) ++outside;
    }
    return outside > 1;
}

Verdict is_c_dominated(const Term& t, const CSet& c) {
    auto w = first_xor_violation(
        t, [&](const Term& l, const Term& r) { return in_xor_closure(l, c) || in_xor_closure(r, c); });
    return w ? Verdict{false, w, std::nullopt} : Verdict{};
}

Verdict is_c_dominated(const HornClause& cl, const CSet& c) {
    return check_clause(cl, [&](const Term& t) { return is_c_dominated(t, c); });
}

Verdict is_c_dominated(const Theory& th, const CSet& c) {
    return check_theory(th, [&](const Term& t) { return is_c_dominated(t, c); });
}

namespace {

bool lighter(const Term& a, const Term& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    const bool ca = a.is_apply() && a.arity() == 0, cb = b.is_apply() && b.arity() == 0;
    if (ca != cb) return ca;
    return compare(a, b) <= 0;
}

void add_summands(const Term& t, TermSet& out) {
    for (const auto& s : summands(xor_reduce(t))) out.insert(s);
}

void collect_candidates(const Term& t, TermSet& out) {
    if (t.is_xor()) {
        const Term& l = t.left();
        const Term& r = t.right();
        if (l.is_ground() && r.is_ground()) {
            add_summands(lighter(l, r) ? l : r, out);
        } else if (l.is_ground()) {
            add_summands(l, out);
        } else if (r.is_ground()) {
            add_summands(r, out);
        }
    }
    for (const auto& a : t.args()) collect_candidates(a, out);
}

}  // namespace

CSet compute_c_set(const Theory& th, std::size_t cap) {
    if (Verdict v = is_xor_linear(th); !v) {
        throw NotXorLinear("theory is not xor-linear: " + to_string(*v.witness), v);
    }
    TermSet candidates;
    for (const auto& cl : th.clauses) {
        for (const auto& p : cl.premises) {
            for (const auto& t : p.args) collect_candidates(t, candidates);
        }
        for (const auto& t : cl.conclusion.args) collect_candidates(t, candidates);
    }
    std::vector<Term> kept(candidates.begin(), candidates.end());
    for (std::size_t i = kept.size(); i-- > 0;) {
        std::vector<Term> trial = kept;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
        if (is_c_dominated(th, CSet(trial, cap))) kept = std::move(trial);
    }
    return CSet(std::move(kept), cap);
}

TermSet enumerate_cc_norm(const CSet& c) {
    const auto& cl = c.closure();
    return TermSet(cl.begin(), cl.end());
}

}  // namespace xorhorn
