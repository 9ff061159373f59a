#pragma once

// Library side of omvtool: fixture generation, oracle verification,
// benchmarking and the cell-probe sweep. Kept out of main() so tests can
// drive it directly.

#include <omv/apps.hpp>
#include <omv/cellprobe.hpp>
#include <omv/omv.hpp>
#include <omv/oracle.hpp>
#include <omv/text_io.hpp>
#include <omv/vmv.hpp>
#include <omv/workload.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace omv::harness {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Zero / negative / empty fields mean "use the command's default".
struct Config {
    std::size_t n = 0;
    std::size_t m = 0;  // corpus string length
    std::size_t k = 4;  // alphabet size
    std::size_t q = 0;
    std::uint64_t seed = 1;
    double density = -1;
    std::string engine;
    double delta = 1.0;
    double epsilon = 0.5;
    double c = 8.0;
    std::size_t word_size = 0;
    std::string out;
    std::string mix = "mixed";
    std::size_t reps = 5;
    std::string from;  // fixture directory written by gen
    std::string kind = "all";
    std::size_t clauses = 0;
    std::size_t matrices = 20;
    std::size_t n_min = 1;
};

enum class Command { gen, verify, bench, sweep };

inline Config with_defaults(Config c, Command cmd) {
    switch (cmd) {
        case Command::gen:
            if (!c.n) c.n = 64;
            if (!c.q) c.q = 100;
            if (c.density < 0) c.density = 0.01;
            break;
        case Command::verify:
            if (!c.n) c.n = 64;
            if (!c.q) c.q = 1000;
            if (c.density < 0) c.density = 0.01;
            if (c.engine.empty()) c.engine = "omv";
            break;
        case Command::bench:
            if (!c.n) c.n = 1024;
            if (!c.q) c.q = 1024;
            if (c.density < 0) c.density = 0.001;
            if (c.engine.empty()) c.engine = "all";
            break;
        case Command::sweep:
            if (!c.n) c.n = 12;
            if (!c.q) c.q = 10000;
            break;
    }
    if (!c.m) c.m = std::min<std::size_t>(c.n, 16);
    if (!c.clauses) c.clauses = std::max<std::size_t>(1, c.n / 4);
    return c;
}

inline void validate(const Config& c) {
    if (c.n == 0) throw UsageError("--n must be positive");
    if (c.k == 0) throw UsageError("--k must be positive");
    if (c.density > 1) throw UsageError("--density must lie in [0, 1]");
    if (!(c.delta > 0)) throw UsageError("--delta must be positive");
    if (!(c.epsilon > 0)) throw UsageError("--epsilon must be positive");
    if (!(c.c > 0)) throw UsageError("--c must be positive");
    if (c.reps == 0) throw UsageError("--reps must be positive");
    if (c.matrices == 0) throw UsageError("--matrices must be positive");
    try {
        workload::parse_mix(c.mix);
    } catch (const InputError& e) {
        throw UsageError(e.what());
    }
}

// ---------------------------------------------------------------------------
// Fixtures

namespace stream {
inline constexpr std::uint64_t matrix = 0x11, queries = 0x22, engine = 0x33, corpus = 0x44, patterns = 0x55,
                               formula = 0x66, assignments = 0x77, graph = 0x88;
}

inline Rng rng_for(const Config& c, std::uint64_t tag) { return Rng(mix_seed(c.seed, tag)); }

inline OmvParams omv_params(const Config& c) { return {c.delta, c.epsilon, c.c, mix_seed(c.seed, stream::engine)}; }

inline VmvParams vmv_params(const Config& c, std::size_t n) {
    return VmvParams::defaults(n, c.delta, c.epsilon, c.c, mix_seed(c.seed, stream::engine));
}

inline BitMatrix fixture_matrix(const Config& c) {
    auto rng = rng_for(c, stream::matrix);
    return workload::random_matrix(c.n, c.n, c.density, rng);
}

inline BitMatrix fixture_graph(const Config& c) {
    auto rng = rng_for(c, stream::graph);
    return workload::random_graph(c.n, c.density, rng);
}

inline std::vector<BitVector> fixture_vectors(const Config& c) {
    auto rng = rng_for(c, stream::queries);
    return workload::vector_queries(c.n, c.q, workload::parse_mix(c.mix), rng);
}

inline std::vector<workload::PairQuery> fixture_pairs(const Config& c) {
    auto rng = rng_for(c, stream::queries);
    return workload::pair_queries(c.n, c.q, workload::parse_mix(c.mix), rng);
}

inline text::Corpus fixture_corpus(const Config& c) {
    auto rng = rng_for(c, stream::corpus);
    text::Corpus corpus{c.m, c.k, {}};
    for (std::size_t i = 0; i < c.n; ++i) corpus.strings.push_back(workload::random_pattern(c.m, c.k, 0.3, rng));
    return corpus;
}

/// Half the patterns are perturbed corpus strings (so matches occur), half are
/// mostly-wildcard random patterns.
inline std::vector<Pattern> fixture_patterns(const Config& c, const text::Corpus& corpus) {
    auto rng = rng_for(c, stream::patterns);
    std::vector<Pattern> out;
    for (std::size_t t = 0; t < c.q; ++t) {
        Pattern p;
        if (t % 2 == 0 && !corpus.strings.empty()) {
            p = corpus.strings[uniform_below(rng, corpus.strings.size())];
            for (auto& s : p) {
                const auto roll = uniform_below(rng, 64);
                if (roll < 16) s = kWildcard;
                else if (roll == 16) s = static_cast<Symbol>(uniform_below(rng, corpus.alphabet));
            }
        } else {
            p = workload::random_pattern(corpus.length, corpus.alphabet, 0.9, rng);
        }
        out.push_back(std::move(p));
    }
    return out;
}

inline text::Formula fixture_cnf(const Config& c) {
    auto rng = rng_for(c, stream::formula);
    return {c.n, workload::random_cnf(c.n, c.clauses, rng)};
}

inline std::vector<BitVector> fixture_assignments(const Config& c) {
    auto rng = rng_for(c, stream::assignments);
    std::vector<BitVector> out;
    for (std::size_t t = 0; t < c.q; ++t) out.push_back(workload::random_vector(c.n, 0.5, rng));
    return out;
}

namespace files {
inline constexpr const char* matrix = "matrix.txt";
inline constexpr const char* vectors = "vectors.txt";
inline constexpr const char* pairs = "pairs.txt";
inline constexpr const char* graph = "graph.txt";
inline constexpr const char* corpus = "corpus.txt";
inline constexpr const char* patterns = "patterns.txt";
inline constexpr const char* cnf = "cnf.txt";
inline constexpr const char* assignments = "assignments.txt";
}  // namespace files

namespace detail {

inline std::ifstream open_in(const std::string& dir, const char* name) {
    const auto path = std::filesystem::path(dir) / name;
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return in;
}

template <class Parse>
auto load(const std::string& dir, const char* name, Parse parse) {
    auto in = open_in(dir, name);
    try {
        return parse(in);
    } catch (const InputError& e) {
        throw InputError((std::filesystem::path(dir) / name).string() + ": " + e.what());
    }
}

inline void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << body;
    if (!out) throw InputError("write failed for " + path.string());
}

inline std::vector<workload::PairQuery> pairs_from_vectors(const std::vector<BitVector>& vs) {
    if (vs.size() % 2) throw InputError("pairs file must hold an even number of lines");
    std::vector<workload::PairQuery> out;
    for (std::size_t t = 0; t + 1 < vs.size(); t += 2) {
        if (vs[t].size() != vs[t + 1].size()) throw InputError("pairs file: U and V differ in length");
        out.emplace_back(IndexSet(vs[t]), IndexSet(vs[t + 1]));
    }
    return out;
}

}  // namespace detail

inline BitMatrix input_matrix(Config& c, const char* name = files::matrix) {
    if (c.from.empty()) return std::string(name) == files::graph ? fixture_graph(c) : fixture_matrix(c);
    auto a = detail::load(c.from, name, [](std::istream& in) { return text::read_matrix(in); });
    if (!a.square()) throw InputError(std::string(name) + ": matrix must be square");
    c.n = a.rows();
    return a;
}

inline std::vector<BitVector> input_vectors(const Config& c, const char* name = files::vectors) {
    if (c.from.empty()) return std::string(name) == files::assignments ? fixture_assignments(c) : fixture_vectors(c);
    auto vs = detail::load(c.from, name, [](std::istream& in) { return text::read_vectors(in); });
    for (const auto& v : vs)
        if (v.size() != c.n) throw InputError(std::string(name) + ": vector length differs from n");
    return vs;
}

inline std::vector<workload::PairQuery> input_pairs(const Config& c) {
    if (c.from.empty()) return fixture_pairs(c);
    auto ps = detail::pairs_from_vectors(
        detail::load(c.from, files::pairs, [](std::istream& in) { return text::read_vectors(in); }));
    for (const auto& [u, v] : ps)
        if (u.universe() != c.n) throw InputError("pairs.txt: vector length differs from n");
    return ps;
}

// ---------------------------------------------------------------------------
// gen

inline std::vector<std::string> run_gen(Config c) {
    c = with_defaults(std::move(c), Command::gen);
    validate(c);
    if (c.out.empty()) throw UsageError("gen needs --out DIR");
    static const std::vector<std::string> kinds{"matrix",  "vectors", "pairs", "graph",
                                                "corpus",  "patterns", "cnf", "assignments"};
    if (c.kind != "all" && std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
        throw UsageError("unknown --kind '" + c.kind + "'");
    const std::filesystem::path dir(c.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());

    std::vector<std::string> written;
    auto want = [&](const char* k) { return c.kind == "all" || c.kind == k; };
    auto emit = [&](const char* name, const std::string& body) {
        detail::write_file(dir / name, body);
        written.push_back((dir / name).string());
    };
    auto render = [](auto&& fn) {
        std::ostringstream os;
        fn(os);
        return os.str();
    };

    if (want("matrix")) emit(files::matrix, render([&](auto& os) { text::write_matrix(os, fixture_matrix(c)); }));
    if (want("vectors"))
        emit(files::vectors, render([&](auto& os) { text::write_vectors(os, fixture_vectors(c)); }));
    if (want("pairs"))
        emit(files::pairs, render([&](auto& os) {
                 for (const auto& [u, v] : fixture_pairs(c))
                     os << text::format_vector(u.bits()) << '\n' << text::format_vector(v.bits()) << '\n';
             }));
    if (want("graph")) emit(files::graph, render([&](auto& os) { text::write_matrix(os, fixture_graph(c)); }));
    if (want("corpus") || want("patterns")) {
        if (c.m > c.n) throw UsageError("--m must not exceed --n for corpora");
        const auto corpus = fixture_corpus(c);
        if (want("corpus")) emit(files::corpus, render([&](auto& os) { text::write_corpus(os, corpus); }));
        if (want("patterns"))
            emit(files::patterns, render([&](auto& os) {
                     for (const auto& p : fixture_patterns(c, corpus)) os << text::format_pattern(p, c.k) << '\n';
                 }));
    }
    if (want("cnf")) emit(files::cnf, render([&](auto& os) { text::write_cnf(os, fixture_cnf(c)); }));
    if (want("assignments"))
        emit(files::assignments, render([&](auto& os) { text::write_vectors(os, fixture_assignments(c)); }));
    return written;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyReport {
    std::string engine;
    std::size_t n = 0;
    std::size_t queries = 0;
    std::size_t checks = 0;
    std::size_t mismatches = 0;
    /// False for engines whose contract is only with high probability.
    bool exact = true;
    std::vector<std::string> mismatch_examples;
    std::vector<std::string> audit_failures;
    nlohmann::ordered_json stats = nlohmann::ordered_json::object();

    static VerifyReport start(std::string engine, std::size_t n, std::size_t queries) {
        VerifyReport r;
        r.engine = std::move(engine);
        r.n = n;
        r.queries = queries;
        return r;
    }

    bool ok() const { return audit_failures.empty() && (!exact || mismatches == 0); }

    void mismatch(const std::string& what) {
        ++mismatches;
        if (mismatch_examples.size() < 10) mismatch_examples.push_back(what);
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["engine"] = engine;
        j["n"] = n;
        j["queries"] = queries;
        j["checks"] = checks;
        j["exact"] = exact;
        j["mismatches"] = mismatches;
        j["mismatch_examples"] = mismatch_examples;
        j["audit_failures"] = audit_failures;
        j["stats"] = stats;
        j["ok"] = ok();
        return j;
    }
};

namespace detail {

inline nlohmann::ordered_json step_json(const VmvStats& s) {
    nlohmann::ordered_json j;
    j["queries"] = s.queries;
    j["entered"] = std::vector<std::uint64_t>(s.entered.begin() + 1, s.entered.end());
    j["answered"] = std::vector<std::uint64_t>(s.answered.begin() + 1, s.answered.end());
    j["triples_added"] = s.triples_added;
    j["brute_force_without_insert"] = s.brute_force_without_insert;
    j["guessed"] = s.guessed;
    j["listings"] = s.listings;
    j["listed_total"] = s.listed_total;
    j["listed_max"] = s.listed_max;
    return j;
}

inline void audit_into(VerifyReport& r, const VmvState& s, const std::string& prefix) {
    for (auto& f : audit_invariants(s)) r.audit_failures.push_back(prefix + f);
}

inline VerifyReport verify_matvec(Config& c) {
    const BitMatrix a = input_matrix(c);
    const auto vs = input_vectors(c);
    auto r = VerifyReport::start(c.engine, c.n, vs.size());
    if (c.engine == "omv") {
        OmvState s(a, omv_params(c));
        for (std::size_t t = 0; t < vs.size(); ++t) {
            const auto before = s.stats().block_queries;
            const auto got = s.query(vs[t]);
            ++r.checks;
            if (got != naive_matvec(a, vs[t])) r.mismatch("query " + std::to_string(t));
            if (s.stats().block_queries - before > block_query_bound(c.n, s.side(), got.count()))
                r.audit_failures.push_back("query " + std::to_string(t) + ": block-query bound exceeded");
        }
        std::size_t max_triples = 0, total_triples = 0;
        for (std::size_t bi = 0; bi < s.grid(); ++bi)
            for (std::size_t bj = 0; bj < s.grid(); ++bj) {
                const auto& b = s.block(bi, bj);
                audit_into(r, b, "block (" + std::to_string(bi) + "," + std::to_string(bj) + "): ");
                max_triples = std::max(max_triples, b.triples().size());
                total_triples += b.triples().size();
            }
        r.stats["side"] = s.side();
        r.stats["grid"] = s.grid();
        r.stats["block_budget"] = s.block(0, 0).params().budget;
        r.stats["block_queries"] = s.stats().block_queries;
        r.stats["max_block_queries"] = s.stats().max_block_queries;
        r.stats["ones_found"] = s.stats().ones_found;
        r.stats["skipped_blocks"] = s.stats().skipped_blocks;
        r.stats["block_triples_total"] = total_triples;
        r.stats["block_triples_max"] = max_triples;
        r.stats["steps"] = step_json(s.block_stats());
    } else {
        for (std::size_t t = 0; t < vs.size(); ++t) {
            const auto expected = naive_matvec(a, vs[t]);
            const auto got = c.engine == "naive" ? naive_matvec(a, vs[t]) : word_parallel_matvec(a, vs[t]);
            ++r.checks;
            if (got != expected) r.mismatch("query " + std::to_string(t));
        }
    }
    return r;
}

inline VerifyReport verify_vmv(Config& c) {
    const BitMatrix a = input_matrix(c);
    const auto ps = input_pairs(c);
    auto r = VerifyReport::start(c.engine, c.n, ps.size());
    VmvState s(a, vmv_params(c, c.n));
    for (std::size_t t = 0; t < ps.size(); ++t) {
        ++r.checks;
        if (s.query(ps[t].first, ps[t].second) != naive_vmv(a, ps[t].first, ps[t].second))
            r.mismatch("query " + std::to_string(t));
    }
    audit_into(r, s, "");
    r.stats["budget"] = s.params().budget;
    r.stats["dense_samples"] = s.params().dense_samples;
    r.stats["group_size"] = s.group_size();
    r.stats["triples"] = s.triples().size();
    r.stats["unseen"] = s.unseen_count();
    r.stats["steps"] = step_json(s.stats());
    return r;
}

inline VerifyReport verify_pm(Config& c) {
    text::Corpus corpus;
    std::vector<Pattern> qs;
    if (c.from.empty()) {
        if (c.m > c.n) throw UsageError("--m must not exceed --n for corpora");
        corpus = fixture_corpus(c);
        qs = fixture_patterns(c, corpus);
    } else {
        corpus = load(c.from, files::corpus, [](std::istream& in) { return text::read_corpus(in); });
        qs = load(c.from, files::patterns,
                  [&](std::istream& in) { return text::read_patterns(in, corpus.alphabet); });
        c.n = corpus.strings.size();
    }
    PartialMatchIndex idx(corpus.strings, corpus.alphabet, omv_params(c));
    auto r = VerifyReport::start(c.engine, c.n, qs.size());
    std::size_t matches = 0;
    for (std::size_t t = 0; t < qs.size(); ++t) {
        const auto got = idx.query(qs[t]);
        for (std::size_t i = 0; i < corpus.strings.size(); ++i) {
            const bool expected = pattern_matches(corpus.strings[i], qs[t]);
            matches += expected;
            ++r.checks;
            if (got.get(i) != expected) r.mismatch("query " + std::to_string(t) + " string " + std::to_string(i));
        }
    }
    r.stats["length"] = corpus.length;
    r.stats["alphabet"] = corpus.alphabet;
    r.stats["code_dimension"] = idx.codes().dimension;
    r.stats["tiles"] = idx.row_tiles() * idx.col_tiles();
    r.stats["matches"] = matches;
    return r;
}

inline bool graph_independent(const BitMatrix& a, const IndexSet& s) {
    bool ok = true;
    s.for_each([&](std::size_t i) { ok = ok && !inner_product_bool(a.row(i), s.bits()); });
    return ok;
}

inline VerifyReport verify_graph(Config& c) {
    const BitMatrix a = input_matrix(c, files::graph);
    const auto vs = input_vectors(c);
    GraphHandle g(a, omv_params(c));
    auto r = VerifyReport::start(c.engine, c.n, vs.size());
    std::size_t positives = 0;
    for (std::size_t t = 0; t < vs.size(); ++t) {
        const IndexSet s(vs[t]);
        const IndexSet rest = s.complement();
        const bool ind = graph_independent(a, s);
        bool dom = true;
        for (std::size_t v = 0; v < c.n && dom; ++v) dom = s.contains(v) || inner_product_bool(a.row(v), s.bits());
        const bool cover = graph_independent(a, rest);
        const std::size_t v = t % c.n;
        const bool tri = !graph_independent(a, IndexSet(a.row(v)));
        const std::string tag = "query " + std::to_string(t);
        const bool got_ind = g.set_query(s, SetMode::independent);
        const bool got_cover = g.set_query(s, SetMode::vertex_cover);
        r.checks += 5;
        if (got_ind != ind) r.mismatch(tag + " independent");
        if (g.set_query(s, SetMode::dominating) != dom) r.mismatch(tag + " dominating");
        if (got_cover != cover) r.mismatch(tag + " vertex_cover");
        if (got_cover != g.set_query(rest, SetMode::independent)) r.mismatch(tag + " complement identity");
        if (g.triangle_query(v) != tri) r.mismatch(tag + " triangle");
        positives += ind + dom + cover + tri;
    }
    r.stats["edges"] = a.count() / 2;
    r.stats["positive_answers"] = positives;
    return r;
}

inline VerifyReport verify_cnf(Config& c) {
    text::Formula f;
    std::vector<BitVector> as;
    if (c.from.empty()) {
        f = fixture_cnf(c);
        as = fixture_assignments(c);
    } else {
        f = load(c.from, files::cnf, [](std::istream& in) { return text::read_cnf(in); });
        c.n = f.variables;
        as = input_vectors(c, files::assignments);
    }
    CnfHandle h(f.variables, f.clauses, omv_params(c));
    auto r = VerifyReport::start(c.engine, c.n, as.size());
    std::size_t satisfied = 0;
    for (std::size_t t = 0; t < as.size(); ++t) {
        bool expected = true;
        for (const auto& cl : f.clauses) {
            const bool a = as[t].get(cl.a.var) != cl.a.negated;
            const bool b = as[t].get(cl.b.var) != cl.b.negated;
            expected = expected && (a || b);
        }
        satisfied += expected;
        ++r.checks;
        if (h.eval(as[t]) != expected) r.mismatch("assignment " + std::to_string(t));
    }
    r.stats["clauses"] = f.clauses.size();
    r.stats["satisfied"] = satisfied;
    return r;
}

inline VerifyReport verify_cellprobe(Config& c) {
    const std::size_t w = c.word_size ? c.word_size : 4;
    const BitMatrix a = input_matrix(c);
    auto r = VerifyReport::start(c.engine, c.n, 0);
    ProbeLedger ledger{w};
    std::uint64_t max_probes = 0, total = 0;
    if (c.n <= kDefaultExhaustiveLimit) {
        const auto list = cp_preprocess(a, w);
        const auto ps = input_pairs(c);
        r.queries = ps.size();
        const double bound = double(list.size() * rect_read_cost(c.n, w)) + probe_threshold(c.n, w);
        if (double(list.size()) > std::sqrt(double(c.n) * double(w)) + 1e-9)
            r.audit_failures.push_back("rectangle list longer than sqrt(n w)");
        for (std::size_t t = 0; t < ps.size(); ++t) {
            const auto ans = cp_query(a, list, ps[t].first, ps[t].second, ledger);
            ++r.checks;
            if (ans.answer != naive_vmv(a, ps[t].first, ps[t].second)) r.mismatch("query " + std::to_string(t));
            if (double(ans.probes) > bound) r.audit_failures.push_back("query " + std::to_string(t) + ": probe bound");
            max_probes = std::max(max_probes, ans.probes);
            total += ans.probes;
        }
        r.stats["mode"] = "vmv";
        r.stats["list_size"] = list.size();
    } else {
        const auto s = cp_omv_build(a, w);
        const auto vs = input_vectors(c);
        r.queries = vs.size();
        for (std::size_t t = 0; t < vs.size(); ++t) {
            const auto ans = cp_omv_query(s, vs[t], ledger);
            ++r.checks;
            if (ans.product != naive_matvec(a, vs[t])) r.mismatch("query " + std::to_string(t));
            max_probes = std::max(max_probes, ans.probes);
            total += ans.probes;
        }
        std::size_t lists = 0;
        for (const auto& l : s.lists) lists += l.size();
        r.stats["mode"] = "omv";
        r.stats["side"] = s.side;
        r.stats["stored_rectangles"] = lists;
    }
    r.stats["word_bits"] = w;
    r.stats["threshold"] = probe_threshold(c.n, w);
    r.stats["max_probes"] = max_probes;
    r.stats["mean_probes"] = r.queries ? double(total) / double(r.queries) : 0.0;
    return r;
}

inline VerifyReport verify_wc(Config& c) {
    const BitMatrix a = input_matrix(c);
    const auto ps = input_pairs(c);
    auto s = wc_preprocess(a, vmv_params(c, c.n));
    auto r = VerifyReport::start(c.engine, c.n, ps.size());
    r.exact = false;
    if (find_insertable_query(s)) r.audit_failures.push_back("post-state still admits an insertable query");
    audit_into(r, s, "");
    const std::size_t preprocessed = s.triples().size();
    for (std::size_t t = 0; t < ps.size(); ++t) {
        ++r.checks;
        if (wc_query(s, ps[t].first, ps[t].second) != naive_vmv(a, ps[t].first, ps[t].second))
            r.mismatch("query " + std::to_string(t));
    }
    if (s.triples().size() != preprocessed) r.audit_failures.push_back("wc_query modified the stored list");
    r.stats["triples"] = preprocessed;
    r.stats["budget"] = s.params().budget;
    r.stats["error_rate"] = ps.empty() ? 0.0 : double(r.mismatches) / double(ps.size());
    r.stats["steps"] = step_json(s.stats());
    return r;
}

}  // namespace detail

inline const std::vector<std::string>& verify_engines() {
    static const std::vector<std::string> e{"naive", "word-parallel", "omv",       "vmv", "pm",
                                            "cnf",   "graph",         "cellprobe", "wc"};
    return e;
}

inline VerifyReport run_verify(Config c) {
    c = with_defaults(std::move(c), Command::verify);
    validate(c);
    const auto& e = c.engine;
    if (e == "naive" || e == "word-parallel" || e == "omv") return detail::verify_matvec(c);
    if (e == "vmv") return detail::verify_vmv(c);
    if (e == "pm") return detail::verify_pm(c);
    if (e == "graph") return detail::verify_graph(c);
    if (e == "cnf") return detail::verify_cnf(c);
    if (e == "cellprobe") return detail::verify_cellprobe(c);
    if (e == "wc") return detail::verify_wc(c);
    throw UsageError("unknown --engine '" + e + "'");
}

// ---------------------------------------------------------------------------
// bench

struct BenchRow {
    std::string engine;
    std::size_t n = 0, q = 0;
    std::uint64_t seed = 0;
    double density = 0;
    std::string mix;
    std::size_t reps = 0;
    double build_ms = 0;
    double wall_ms = 0;
    double per_query_us = 0;
    double ratio = 0;  // wall / word-parallel wall
    std::uint64_t mismatches = 0;
    std::optional<VmvStats> steps;  // omv only
    std::size_t budget = 0;
    std::size_t max_block_triples = 0;
    std::uint64_t block_queries = 0;
};

struct BatchRow {
    std::size_t queries_done = 0;
    std::uint64_t triples_added = 0;
    std::uint64_t batch_triples = 0;
    std::uint64_t step5_entries = 0;
    std::size_t max_block_triples = 0;
    std::size_t budget = 0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<BatchRow> batches;
    std::size_t n = 0;
    std::uint64_t seed = 0;

    std::uint64_t mismatches() const {
        std::uint64_t m = 0;
        for (const auto& r : rows) m += r.mismatches;
        return m;
    }

    std::string csv() const {
        std::ostringstream os;
        os << "# omv-bench schema 1\n"
              "engine,n,q,seed,density,mix,reps,build_ms,wall_ms,per_query_us,ratio_vs_word_parallel,mismatches,"
              "step1,step2,step3,step4,step5,step6,triples_added,budget,max_block_triples,block_queries,"
              "listings,w_mean,w_max\n";
        os << std::setprecision(6);
        for (const auto& r : rows) {
            os << r.engine << ',' << r.n << ',' << r.q << ',' << r.seed << ',' << r.density << ',' << r.mix << ','
               << r.reps << ',' << r.build_ms << ',' << r.wall_ms << ',' << r.per_query_us << ',' << r.ratio << ','
               << r.mismatches;
            if (r.steps) {
                const auto& s = *r.steps;
                for (std::size_t k = 1; k <= 6; ++k) os << ',' << s.entered[k];
                os << ',' << s.triples_added << ',' << r.budget << ',' << r.max_block_triples << ','
                   << r.block_queries << ',' << s.listings << ','
                   << (s.listings ? double(s.listed_total) / double(s.listings) : 0.0) << ',' << s.listed_max;
            } else {
                os << ",,,,,,,,,,,,,";
            }
            os << '\n';
        }
        return os.str();
    }

    std::string batch_csv() const {
        std::ostringstream os;
        os << "# omv-bench-batches schema 1\n"
              "engine,n,seed,queries_done,triples_added,batch_triples,step5_entries,max_block_triples,budget\n";
        for (const auto& b : batches)
            os << "omv," << n << ',' << seed << ',' << b.queries_done << ',' << b.triples_added << ','
               << b.batch_triples << ',' << b.step5_entries << ',' << b.max_block_triples << ',' << b.budget << '\n';
        return os.str();
    }
};

namespace detail {

inline double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t h = xs.size() / 2;
    return xs.size() % 2 ? xs[h] : 0.5 * (xs[h - 1] + xs[h]);
}

inline double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline std::size_t max_block_triples(const OmvState& s) {
    std::size_t m = 0;
    for (std::size_t bi = 0; bi < s.grid(); ++bi)
        for (std::size_t bj = 0; bj < s.grid(); ++bj) m = std::max(m, s.block(bi, bj).triples().size());
    return m;
}

inline std::vector<std::string> bench_engines(const std::string& spec) {
    if (spec == "all") return {"word-parallel", "naive", "omv"};
    std::vector<std::string> out;
    std::istringstream in(spec);
    std::string e;
    while (std::getline(in, e, ','))
        if (e == "naive" || e == "word-parallel" || e == "omv")
            out.push_back(e);
        else
            throw UsageError("bench engine must be naive, word-parallel, omv or all; got '" + e + "'");
    // The baseline is always measured first; it also provides the reference outputs.
    out.erase(std::remove(out.begin(), out.end(), "word-parallel"), out.end());
    out.insert(out.begin(), "word-parallel");
    return out;
}

}  // namespace detail

inline BenchReport run_bench(Config c) {
    c = with_defaults(std::move(c), Command::bench);
    validate(c);
    const auto engines = detail::bench_engines(c.engine);
    const BitMatrix a = input_matrix(c);
    const auto vs = input_vectors(c);
    BenchReport rep;
    rep.n = c.n;
    rep.seed = c.seed;

    std::vector<BitVector> reference;
    double baseline_ms = 0;
    for (const auto& e : engines) {
        BenchRow row;
        row.engine = e;
        row.n = c.n;
        row.q = vs.size();
        row.seed = c.seed;
        row.density = c.density;
        row.mix = c.mix;
        row.reps = c.reps;
        std::vector<double> walls, builds;
        for (std::size_t r = 0; r < c.reps; ++r) {
            std::vector<BitVector> outs;
            outs.reserve(vs.size());
            if (e == "omv") {
                auto t0 = std::chrono::steady_clock::now();
                OmvState s(a, omv_params(c));
                builds.push_back(detail::ms_since(t0));
                std::uint64_t last_triples = 0;
                std::size_t next_mark = 1;
                t0 = std::chrono::steady_clock::now();
                for (std::size_t t = 0; t < vs.size(); ++t) {
                    outs.push_back(s.query(vs[t]));
                    if (r == 0 && (t + 1 == next_mark || t + 1 == vs.size())) {
                        // checkpoint bookkeeping is excluded from the timing
                        const auto paused = std::chrono::steady_clock::now();
                        const auto st = s.block_stats();
                        BatchRow b;
                        b.queries_done = t + 1;
                        b.triples_added = st.triples_added;
                        b.batch_triples = st.triples_added - last_triples;
                        b.step5_entries = st.entered[static_cast<std::size_t>(Step::brute_force)];
                        b.max_block_triples = detail::max_block_triples(s);
                        b.budget = s.block(0, 0).params().budget;
                        rep.batches.push_back(b);
                        last_triples = st.triples_added;
                        while (next_mark <= t + 1) next_mark *= 2;
                        t0 += std::chrono::steady_clock::now() - paused;
                    }
                }
                walls.push_back(detail::ms_since(t0));
                if (r == 0) {
                    row.steps = s.block_stats();
                    row.budget = s.block(0, 0).params().budget;
                    row.max_block_triples = detail::max_block_triples(s);
                    row.block_queries = s.stats().block_queries;
                }
            } else {
                builds.push_back(0);
                const bool naive = e == "naive";
                const auto t0 = std::chrono::steady_clock::now();
                for (const auto& v : vs) outs.push_back(naive ? naive_matvec(a, v) : word_parallel_matvec(a, v));
                walls.push_back(detail::ms_since(t0));
            }
            if (reference.empty()) reference = outs;
            if (r == 0)
                for (std::size_t t = 0; t < vs.size(); ++t) row.mismatches += outs[t] != reference[t];
        }
        row.build_ms = detail::median(builds);
        row.wall_ms = detail::median(walls);
        row.per_query_us = vs.empty() ? 0 : 1000.0 * row.wall_ms / double(vs.size());
        if (e == "word-parallel") baseline_ms = row.wall_ms;
        row.ratio = baseline_ms > 0 ? row.wall_ms / baseline_ms : 0;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// cell-probe sweep

struct SweepRow {
    std::size_t n = 0, w = 0, matrices = 0, queries = 0;
    double list_mean = 0;
    std::size_t list_max = 0;
    double list_bound = 0;
    double mean_probes = 0;
    std::uint64_t max_probes = 0;
    double threshold = 0;
    double constant = 0;  // max_probes / threshold
    std::uint64_t mismatches = 0;
    std::uint64_t bound_violations = 0;
    std::uint64_t list_violations = 0;
};

/// n = 1 is left out of the fits: its probe count is a single rounded list
/// read whatever w is.
inline constexpr std::size_t kFitMinN = 2;

/// log(max probes) ~ log a + b log n (+ c log w for the joint fit, w = 0).
struct SweepFit {
    std::size_t w = 0;
    double exponent_n = 0;
    double exponent_w = 0;
    double scale = 0;
    std::size_t points = 0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    std::vector<SweepFit> fits;

    std::uint64_t failures() const {
        std::uint64_t f = 0;
        for (const auto& r : rows) f += r.mismatches + r.bound_violations + r.list_violations;
        return f;
    }

    std::string csv() const {
        std::ostringstream os;
        os << "# omv-cellprobe-sweep schema 1\n"
              "n,w,matrices,queries,list_size_mean,list_size_max,list_bound,mean_probes,max_probes,threshold,"
              "fitted_constant,mismatches,bound_violations,list_violations\n";
        os << std::setprecision(6);
        for (const auto& r : rows)
            os << r.n << ',' << r.w << ',' << r.matrices << ',' << r.queries << ',' << r.list_mean << ','
               << r.list_max << ',' << r.list_bound << ',' << r.mean_probes << ',' << r.max_probes << ','
               << r.threshold << ',' << r.constant << ',' << r.mismatches << ',' << r.bound_violations << ','
               << r.list_violations << '\n';
        for (const auto& f : fits) {
            if (f.w)
                os << "# fit w=" << f.w << ": max_probes ~ " << f.scale << " * n^" << f.exponent_n;
            else
                os << "# fit joint: max_probes ~ " << f.scale << " * n^" << f.exponent_n << " * w^" << f.exponent_w;
            os << " (" << f.points << " points, n >= " << kFitMinN << ")\n";
        }
        return os.str();
    }
};

namespace detail {

/// Least squares for y = b0 + b1 x1 (+ b2 x2).
inline std::vector<double> least_squares(const std::vector<std::vector<double>>& xs, const std::vector<double>& y) {
    const std::size_t p = xs.empty() ? 1 : xs.front().size() + 1;
    std::vector<std::vector<double>> ata(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t i = 0; i < y.size(); ++i) {
        std::vector<double> row{1.0};
        row.insert(row.end(), xs[i].begin(), xs[i].end());
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t s = 0; s < p; ++s) ata[r][s] += row[r] * row[s];
            ata[r][p] += row[r] * y[i];
        }
    }
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::abs(ata[r][col]) > std::abs(ata[piv][col])) piv = r;
        std::swap(ata[col], ata[piv]);
        if (std::abs(ata[col][col]) < 1e-12) return std::vector<double>(p, std::nan(""));
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double f = ata[r][col] / ata[col][col];
            for (std::size_t s = col; s <= p; ++s) ata[r][s] -= f * ata[col][s];
        }
    }
    std::vector<double> beta(p);
    for (std::size_t r = 0; r < p; ++r) beta[r] = ata[r][p] / ata[r][r];
    return beta;
}

}  // namespace detail

inline SweepReport run_cellprobe_sweep(Config c) {
    c = with_defaults(std::move(c), Command::sweep);
    validate(c);
    if (c.n > kDefaultExhaustiveLimit)
        throw ScaleError("cellprobe-sweep: n=" + std::to_string(c.n) + " exceeds exhaustive limit " +
                         std::to_string(kDefaultExhaustiveLimit));
    if (c.n_min == 0 || c.n_min > c.n) throw UsageError("--n-min must lie in [1, n]");
    const std::vector<std::size_t> ws =
        c.word_size ? std::vector<std::size_t>{c.word_size} : std::vector<std::size_t>{2, 4, 8};
    static constexpr double kDensities[] = {0.02, 0.1, 0.3, 0.5};

    SweepReport rep;
    for (std::size_t w : ws)
        for (std::size_t n = c.n_min; n <= c.n; ++n) {
            SweepRow row;
            row.n = n;
            row.w = w;
            row.matrices = c.matrices;
            row.threshold = probe_threshold(n, w);
            row.list_bound = std::sqrt(double(n) * double(w));
            Rng rng(mix_seed(c.seed, mix_seed(n, w)));
            double probe_sum = 0, list_sum = 0;
            for (std::size_t k = 0; k < c.matrices; ++k) {
                const double d = c.density >= 0 ? c.density : kDensities[k % 4];
                const auto a = workload::random_matrix(n, n, d, rng);
                const auto list = cp_preprocess(a, w);
                list_sum += double(list.size());
                row.list_max = std::max(row.list_max, list.size());
                if (double(list.size()) > row.list_bound + 1e-9) ++row.list_violations;
                for (std::size_t i = 0; i < list.size(); ++i)
                    if (submatrix_has_one(a, list.rects()[i].rows, list.rects()[i].cols) ||
                        double(list.increments()[i]) < row.threshold)
                        ++row.list_violations;
                const double bound = double(list.size() * rect_read_cost(n, w)) + row.threshold;
                ProbeLedger ledger{w};
                for (const auto& [u, v] : workload::pair_queries(n, c.q, workload::QueryMix::varied, rng)) {
                    const auto ans = cp_query(a, list, u, v, ledger);
                    ++row.queries;
                    row.mismatches += ans.answer != naive_vmv(a, u, v);
                    row.bound_violations += double(ans.probes) > bound;
                    row.max_probes = std::max(row.max_probes, ans.probes);
                    probe_sum += double(ans.probes);
                }
            }
            row.list_mean = list_sum / double(c.matrices);
            row.mean_probes = row.queries ? probe_sum / double(row.queries) : 0;
            row.constant = double(row.max_probes) / row.threshold;
            rep.rows.push_back(row);
        }

    auto fit = [&](std::size_t w) {
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        for (const auto& r : rep.rows) {
            if ((w && r.w != w) || r.max_probes == 0 || r.n < kFitMinN) continue;
            if (w)
                xs.push_back({std::log(double(r.n))});
            else
                xs.push_back({std::log(double(r.n)), std::log(double(r.w))});
            ys.push_back(std::log(double(r.max_probes)));
        }
        SweepFit f;
        f.w = w;
        f.points = ys.size();
        const auto beta = detail::least_squares(xs, ys);
        f.scale = std::exp(beta[0]);
        f.exponent_n = beta.size() > 1 ? beta[1] : std::nan("");
        f.exponent_w = beta.size() > 2 ? beta[2] : 0.0;
        return f;
    };
    for (std::size_t w : ws) rep.fits.push_back(fit(w));
    if (ws.size() > 1) rep.fits.push_back(fit(0));
    return rep;
}

}  // namespace omv::harness
