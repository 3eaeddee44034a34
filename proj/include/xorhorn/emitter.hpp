#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xorhorn/reduction.hpp"

namespace xorhorn {

enum class Encoding { Plain, Optimized };

std::string_view encoding_name(Encoding e);

struct EmitOptions {
    Encoding encoding = Encoding::Optimized;
    /// Copied verbatim after the comment header, one per line.
    std::vector<std::string> header_options;
    std::vector<Atom> query_goals;
    /// Ground atoms added as facts, e.g. the begin events of a correspondence instance.
    std::vector<Atom> extra_facts;
};

class EmitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// ProVerif untyped Horn-clause text for a reduced theory. Throws EmitError
/// when a user symbol or predicate collides with a reserved word.
std::string emit_proverif(const ReducedTheory& rt, const EmitOptions& opts = {});

/// The dialect as read back: constants are `f()`, predicates `p:t1,...,tn`,
/// clauses `p1 & ... & pn -> c` inside `reduc`.
struct ProverifClause {
    std::vector<Atom> premises;
    Atom conclusion;
};

struct ProverifFile {
    std::map<std::string, std::size_t> predicates;
    std::map<std::string, std::size_t> functions;
    std::vector<std::string> options;
    std::vector<Atom> queries;
    std::vector<ProverifClause> clauses;
};

/// Grammar and declaration check. On failure returns nullopt and appends
/// messages of the form `line N: ...` to errors.
std::optional<ProverifFile> read_proverif(std::string_view text, std::vector<std::string>* errors = nullptr);

/// Maps an emitted file back to an xor-free theory over the source
/// vocabulary: `xx`, `xor` and `zero` become sums, `attacker` becomes I, the
/// xtab schema clauses are expanded against the xtab facts, and every atom
/// is put in normal form for c.
Theory decode_proverif(const ProverifFile& file, const CSet& c);

}  // namespace xorhorn
