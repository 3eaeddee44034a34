#include "xorhorn/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

#include "xorhorn/corpus.hpp"
#include "xorhorn/emitter.hpp"
#include "xorhorn/engine.hpp"
#include "xorhorn/normalization.hpp"

namespace xorhorn {

namespace {

struct InputError {
    std::string message;
};

constexpr std::string_view kCorpusPrefix = "corpus:";

std::string read_source(const std::string& path) {
    if (path.rfind(kCorpusPrefix, 0) == 0) {
        const std::string name = path.substr(kCorpusPrefix.size());
        auto entry = corpus_entry(name);
        if (!entry) throw InputError{"no corpus entry named '" + name + "'"};
        return entry->text;
    }
    std::ifstream in(path);
    if (!in) throw InputError{"cannot open " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ParseResult load(const std::string& path, std::ostream& err) {
    ParseResult pr = parse_theory(read_source(path));
    if (!pr.ok()) {
        for (const auto& d : pr.diagnostics) err << path << ":" << to_string(d) << "\n";
        throw InputError{"input rejected"};
    }
    return pr;
}

// C for a linear theory; nullopt otherwise.
std::optional<CSet> dominating_set(const Theory& t) {
    if (!is_xor_linear(t)) return std::nullopt;
    return compute_c_set(t);
}

struct SolveSettings {
    std::string mode = "xor";
    std::string goal;
    std::size_t max_depth = SearchBounds{}.max_depth;
    std::size_t max_size = SearchBounds{}.max_term_size;
    std::size_t max_facts = SearchBounds{}.max_facts;
    double timeout_s = 5.0;
    bool json = false;
    bool no_prune = false;
    bool eager = false;
};

EngineOptions engine_options(const SolveSettings& s) {
    EngineOptions o;
    o.bounds.max_depth = s.max_depth;
    o.bounds.max_term_size = s.max_size;
    o.bounds.max_facts = s.max_facts;
    o.bounds.timeout = std::chrono::milliseconds(static_cast<long long>(s.timeout_s * 1000));
    o.prune = !s.no_prune;
    o.lazy_composition = !s.eager;
    return o;
}

void print_trace(const Derivation& d, const SolveSettings& s, std::ostream& out) {
    if (s.json) {
        out << trace_json(d) << "\n";
    } else {
        out << format_trace(d);
    }
}

int report_search(const SearchResult& r, const SolveSettings& s, std::ostream& out) {
    switch (r.outcome) {
        case Outcome::Found:
            out << "found: derivation with " << r.derivation.steps.size() << " steps\n";
            print_trace(r.derivation, s, out);
            return kExitFound;
        case Outcome::Saturated:
            out << "saturated: no derivation (" << r.facts << " facts, " << r.rounds << " rounds)\n";
            return kExitOk;
        case Outcome::Exhausted:
            if (r.fact_cap_hit) {
                out << "inconclusive: fact bound reached (" << r.facts << " facts)\n";
                return kExitInconclusive;
            }
            out << "no derivation within bounds (" << r.facts << " facts, " << r.rounds << " rounds)\n";
            return kExitOk;
        case Outcome::Timeout:
            out << "inconclusive: timeout after " << r.rounds << " rounds (" << r.facts << " facts)\n";
            return kExitInconclusive;
    }
    return kExitInconclusive;
}

int run_solve(const std::string& path, const SolveSettings& s, std::ostream& out, std::ostream& err) {
    ParseResult pr = load(path, err);
    const EngineOptions opts = engine_options(s);
    const bool xor_mode = s.mode == "xor";

    std::optional<Query> query;
    if (!s.goal.empty()) {
        auto goal = parse_atom(s.goal);
        if (!goal) throw InputError{"cannot parse goal '" + s.goal + "'"};
        std::set<std::string> vs;
        collect_vars(*goal, vs);
        if (!vs.empty()) throw InputError{"goal must be ground"};
        query = SecrecyQuery{*goal};
    } else if (!pr.queries.empty()) {
        query = pr.queries.front();
    } else {
        throw InputError{"no goal given and the theory has no query"};
    }

    const std::optional<CSet> c = dominating_set(pr.theory);
    const Theory* target = &pr.theory;
    ReducedTheory rt;
    if (!xor_mode) {
        if (!c) throw InputError{"syntactic mode needs an xor-linear theory: " + to_string(*is_xor_linear(pr.theory).witness)};
        rt = build_t_plus(pr.theory, *c);
        target = &rt.theory;
        out << "reduced theory: " << rt.theory.clauses.size() << " clauses, C = " << to_string(*c) << "\n";
    }
    const CSet* cptr = c ? &*c : nullptr;

    if (auto* secret = std::get_if<SecrecyQuery>(&*query)) {
        Atom goal = secret->goal;
        if (!xor_mode) goal = normal_form(goal, *c);
        out << "goal: " << to_string(goal) << "\n";
        const SearchResult r = xor_mode ? derive_mod_xor(*target, goal, cptr, opts) : derive_syntactic(*target, goal, opts);
        return report_search(r, s, out);
    }

    CorrespondenceQuery q = std::get<CorrespondenceQuery>(*query);
    if (!xor_mode) {
        q.goal = normal_form(q.goal, *c);
        for (auto& b : q.fixed_begins) b = normal_form(b, *c);
    }
    out << "correspondence: " << to_string(q.end) << " ~> " << to_string(q.begin) << ", goal " << to_string(q.goal)
        << "\n";
    CorrespondenceResult r;
    try {
        r = check_correspondence(*target, q, xor_mode ? Mode::Xor : Mode::Syntactic, cptr, opts);
    } catch (const std::invalid_argument& e) {
        throw InputError{e.what()};
    }
    switch (r.verdict) {
        case CorrespondenceVerdict::Violated:
            out << "violated: end event reachable without its begin\n";
            print_trace(r.search.derivation, s, out);
            return kExitFound;
        case CorrespondenceVerdict::Holds:
            out << (r.definitive ? "holds (saturated, " : "holds within bounds (") << r.search.facts << " facts, "
                << r.search.rounds << " rounds)\n";
            return kExitOk;
        case CorrespondenceVerdict::Inconclusive:
            out << "inconclusive: " << outcome_name(r.search.outcome) << " (" << r.search.facts << " facts, "
                << r.search.rounds << " rounds)\n";
            return kExitInconclusive;
    }
    return kExitInconclusive;
}

int run_check(const std::string& path, std::ostream& out, std::ostream& err) {
    ParseResult pr = load(path, err);
    const Theory& t = pr.theory;
    out << "clauses: " << t.clauses.size() << "\n";
    out << "queries: " << pr.queries.size() << "\n";
    const Verdict lin = is_xor_linear(t);
    if (!lin) {
        out << "xor-linear: no, witness " << to_string(*lin.witness) << "\n";
        return kExitOk;
    }
    out << "xor-linear: yes\n";
    const CSet c = compute_c_set(t);
    out << "C = " << to_string(c) << "\n";
    out << "closure size: " << (std::size_t{1} << c.size()) << "\n";
    out << "dominated: " << (is_c_dominated(t, c) ? "yes" : "no") << "\n";
    return kExitOk;
}

struct ReduceSettings {
    std::string encoding = "optimized";
    std::string output;
    std::vector<std::string> header;
};

int run_reduce(const std::string& path, const ReduceSettings& s, std::ostream& out, std::ostream& err) {
    ParseResult pr = load(path, err);
    const Verdict lin = is_xor_linear(pr.theory);
    if (!lin) {
        err << "not xor-linear: " << to_string(*lin.witness) << "\n";
        return kExitInputError;
    }
    const CSet c = compute_c_set(pr.theory);
    const ReducedTheory rt = build_t_plus(pr.theory, c);

    EmitOptions opts;
    opts.encoding = s.encoding == "plain" ? Encoding::Plain : Encoding::Optimized;
    opts.header_options = s.header;
    for (const auto& q : pr.queries) {
        if (auto* secret = std::get_if<SecrecyQuery>(&q)) {
            opts.query_goals.push_back(secret->goal);
        } else {
            const auto& corr = std::get<CorrespondenceQuery>(q);
            opts.query_goals.push_back(corr.goal);
            for (const auto& b : corr.fixed_begins) opts.extra_facts.push_back(b);
        }
    }
    std::string text;
    try {
        text = emit_proverif(rt, opts);
    } catch (const EmitError& e) {
        throw InputError{e.what()};
    }
    if (s.output.empty()) {
        out << text;
    } else {
        std::ofstream f(s.output);
        if (!f) throw InputError{"cannot write " + s.output};
        f << text;
        out << "wrote " << s.output << " (" << rt.theory.clauses.size() << " clauses)\n";
    }
    return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"XOR Horn theory reduction and derivation search", "xorhorn"};
    app.require_subcommand(1);

    std::string file;

    auto* check = app.add_subcommand("check", "parse, validate and report xor-linearity and C");
    check->add_option("file", file, "theory file or corpus:<name>")->required();

    ReduceSettings rs;
    auto* reduce = app.add_subcommand("reduce", "emit the xor-free theory as ProVerif clauses");
    reduce->add_option("file", file, "theory file or corpus:<name>")->required();
    reduce->add_option("--encoding", rs.encoding, "plain or optimized")->check(CLI::IsMember({"plain", "optimized"}));
    reduce->add_option("-o,--output", rs.output, "output file");
    reduce->add_option("--header", rs.header, "verbatim option line for the output header");

    SolveSettings ss;
    auto* solve = app.add_subcommand("solve", "bounded derivation search");
    solve->add_option("file", file, "theory file or corpus:<name>")->required();
    solve->add_option("--mode", ss.mode, "xor or syntactic")->check(CLI::IsMember({"xor", "syntactic"}));
    solve->add_option("--goal", ss.goal, "ground goal atom, e.g. I(m(b,a))");
    solve->add_option("--max-depth", ss.max_depth)->check(CLI::PositiveNumber);
    solve->add_option("--max-size", ss.max_size)->check(CLI::PositiveNumber);
    solve->add_option("--max-facts", ss.max_facts)->check(CLI::PositiveNumber);
    solve->add_option("--timeout", ss.timeout_s, "seconds")->check(CLI::PositiveNumber);
    solve->add_flag("--json", ss.json, "print the trace as JSON");
    solve->add_flag("--no-prune", ss.no_prune, "combine facts without the domination restriction");
    solve->add_flag("--eager", ss.eager, "fire composition clauses forward");

    std::string corpus_cmd, corpus_name;
    auto* corp = app.add_subcommand("corpus", "bundled theories");
    corp->add_option("command", corpus_cmd, "list, show or run")
        ->required()
        ->check(CLI::IsMember({"list", "show", "run"}));
    corp->add_option("name", corpus_name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, er;
        const int code = app.exit(e, o, er);
        out << o.str();
        err << er.str();
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (*check) return run_check(file, out, err);
        if (*reduce) return run_reduce(file, rs, out, err);
        if (*solve) return run_solve(file, ss, out, err);
        if (corpus_cmd == "list") {
            for (const auto& e : corpus()) out << e.name << "\t" << e.summary << "\n";
            return kExitOk;
        }
        if (corpus_name.empty()) throw InputError{"corpus " + corpus_cmd + " needs a name"};
        auto entry = corpus_entry(corpus_name);
        if (!entry) throw InputError{"no corpus entry named '" + corpus_name + "'"};
        if (corpus_cmd == "show") {
            out << entry->text;
            return kExitOk;
        }
        return run_solve(std::string(kCorpusPrefix) + corpus_name, ss, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.message << "\n";
        return kExitInputError;
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const NotDominated& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace xorhorn
