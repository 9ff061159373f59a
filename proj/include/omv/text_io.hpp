#pragma once

// Plain-text fixture formats.
//
//   matrix:   "n m" on the first line, then n lines of m characters in {0,1}
//   vector:   one line of n characters in {0,1}; a vectors file holds one per line
//   corpus:   "n m k" on the first line, then n lines of m symbols. '*' is the
//             wildcard. For k <= 26 symbols are letters a.. and may be written
//             without separators; otherwise write whitespace-separated
//             integers 0..k-1.
//   queries:  one pattern per line in the corpus symbol syntax
//   2-CNF:    "n c" on the first line, then c lines "a b" of nonzero signed
//             1-based literals (-3 is not x3)

#include <omv/apps.hpp>
#include <omv/bitcore.hpp>
#include <omv/errors.hpp>

#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace omv::text {

namespace detail {

inline bool next_content_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

inline BitVector parse_vector(std::string_view line) {
    const std::string s = detail::trim(line);
    BitVector v(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (s[j] == '1')
            v.set(j);
        else if (s[j] != '0')
            throw InputError("vector: unexpected character '" + std::string(1, s[j]) + "'");
    }
    return v;
}

inline std::string format_vector(const BitVector& v) {
    std::string s(v.size(), '0');
    v.for_each_set([&](std::size_t j) { s[j] = '1'; });
    return s;
}

inline BitMatrix read_matrix(std::istream& in) {
    std::string line;
    if (!detail::next_content_line(in, line)) throw InputError("matrix: missing header");
    std::istringstream hdr(line);
    std::size_t n = 0, m = 0;
    if (!(hdr >> n >> m)) throw InputError("matrix: header must be 'n m'");
    BitMatrix a(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        if (!detail::next_content_line(in, line)) throw InputError("matrix: expected " + std::to_string(n) + " rows");
        BitVector r = parse_vector(line);
        if (r.size() != m)
            throw InputError("matrix: row " + std::to_string(i) + " has " + std::to_string(r.size()) + " columns");
        a.set_row(i, std::move(r));
    }
    return a;
}

inline void write_matrix(std::ostream& out, const BitMatrix& a) {
    out << a.rows() << ' ' << a.cols() << '\n';
    for (std::size_t i = 0; i < a.rows(); ++i) out << format_vector(a.row(i)) << '\n';
}

inline std::vector<BitVector> read_vectors(std::istream& in) {
    std::vector<BitVector> out;
    std::string line;
    while (detail::next_content_line(in, line)) out.push_back(parse_vector(line));
    return out;
}

inline void write_vectors(std::ostream& out, const std::vector<BitVector>& vs) {
    for (const auto& v : vs) out << format_vector(v) << '\n';
}

inline Pattern parse_pattern(std::string_view line, std::size_t k) {
    const std::string s = detail::trim(line);
    Pattern p;
    const bool tokens = s.find_first_of(" \t") != std::string::npos || k > 26;
    if (tokens) {
        std::istringstream in(s);
        std::string tok;
        while (in >> tok) {
            if (tok == "*") {
                p.push_back(kWildcard);
                continue;
            }
            if (k <= 26 && tok.size() == 1 && std::islower(static_cast<unsigned char>(tok[0]))) {
                p.push_back(tok[0] - 'a');
            } else {
                try {
                    std::size_t used = 0;
                    const int val = std::stoi(tok, &used);
                    if (used != tok.size()) throw InputError("pattern: bad symbol '" + tok + "'");
                    p.push_back(val);
                } catch (const std::logic_error&) {
                    throw InputError("pattern: bad symbol '" + tok + "'");
                }
            }
        }
    } else {
        for (char c : s) {
            if (c == '*')
                p.push_back(kWildcard);
            else if (std::islower(static_cast<unsigned char>(c)))
                p.push_back(c - 'a');
            else
                throw InputError("pattern: bad symbol '" + std::string(1, c) + "'");
        }
    }
    for (Symbol c : p)
        if (c != kWildcard && (c < 0 || static_cast<std::size_t>(c) >= k))
            throw InputError("pattern: symbol " + std::to_string(c) + " outside alphabet of size " + std::to_string(k));
    return p;
}

inline std::string format_pattern(const Pattern& p, std::size_t k) {
    std::string s;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (k <= 26) {
            s += p[j] == kWildcard ? '*' : static_cast<char>('a' + p[j]);
        } else {
            if (j) s += ' ';
            s += p[j] == kWildcard ? std::string("*") : std::to_string(p[j]);
        }
    }
    return s;
}

struct Corpus {
    std::size_t length = 0;
    std::size_t alphabet = 0;
    std::vector<Pattern> strings;
};

inline Corpus read_corpus(std::istream& in) {
    std::string line;
    if (!detail::next_content_line(in, line)) throw InputError("corpus: missing header");
    std::istringstream hdr(line);
    std::size_t n = 0;
    Corpus c;
    if (!(hdr >> n >> c.length >> c.alphabet)) throw InputError("corpus: header must be 'n m k'");
    for (std::size_t i = 0; i < n; ++i) {
        if (!detail::next_content_line(in, line)) throw InputError("corpus: expected " + std::to_string(n) + " strings");
        Pattern p = parse_pattern(line, c.alphabet);
        if (p.size() != c.length)
            throw InputError("corpus: string " + std::to_string(i) + " has length " + std::to_string(p.size()));
        c.strings.push_back(std::move(p));
    }
    return c;
}

inline void write_corpus(std::ostream& out, const Corpus& c) {
    out << c.strings.size() << ' ' << c.length << ' ' << c.alphabet << '\n';
    for (const auto& s : c.strings) out << format_pattern(s, c.alphabet) << '\n';
}

inline std::vector<Pattern> read_patterns(std::istream& in, std::size_t k) {
    std::vector<Pattern> out;
    std::string line;
    while (detail::next_content_line(in, line)) out.push_back(parse_pattern(line, k));
    return out;
}

struct Formula {
    std::size_t variables = 0;
    std::vector<Clause> clauses;
};

inline Literal parse_literal(long long v, std::size_t variables) {
    if (v == 0 || static_cast<std::size_t>(v < 0 ? -v : v) > variables)
        throw InputError("cnf: literal " + std::to_string(v) + " out of range");
    return {static_cast<std::uint32_t>((v < 0 ? -v : v) - 1), v < 0};
}

inline Formula read_cnf(std::istream& in) {
    std::string line;
    if (!detail::next_content_line(in, line)) throw InputError("cnf: missing header");
    std::istringstream hdr(line);
    Formula f;
    std::size_t count = 0;
    if (!(hdr >> f.variables >> count)) throw InputError("cnf: header must be 'n c'");
    for (std::size_t k = 0; k < count; ++k) {
        if (!detail::next_content_line(in, line)) throw InputError("cnf: expected " + std::to_string(count) + " clauses");
        std::istringstream cl(line);
        long long a = 0, b = 0;
        if (!(cl >> a >> b)) throw InputError("cnf: clause line must hold two literals");
        f.clauses.push_back({parse_literal(a, f.variables), parse_literal(b, f.variables)});
    }
    return f;
}

inline void write_cnf(std::ostream& out, const Formula& f) {
    out << f.variables << ' ' << f.clauses.size() << '\n';
    auto lit = [](Literal l) {
        const long long v = static_cast<long long>(l.var) + 1;
        return l.negated ? -v : v;
    };
    for (const auto& c : f.clauses) out << lit(c.a) << ' ' << lit(c.b) << '\n';
}

}  // namespace omv::text
