#pragma once

// Maximal independent sets of characteristic graphs, and checks on
// probabilistic assignments of vertices to those sets.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace cbcast {

struct MISFamily {
    std::string label;
    std::size_t vertex_count = 0;
    std::vector<std::vector<VertexId>> sets;   // each sorted; family sorted lexicographically

    bool contains(std::size_t w, VertexId v) const {
        const auto& s = sets.at(w);
        return std::binary_search(s.begin(), s.end(), v);
    }

    /// Indices of the sets containing v, ascending.
    std::vector<std::uint32_t> sets_containing(VertexId v) const {
        std::vector<std::uint32_t> out;
        for (std::size_t w = 0; w < sets.size(); ++w)
            if (contains(w, v)) out.push_back(static_cast<std::uint32_t>(w));
        return out;
    }
};

struct MisOptions {
    std::size_t max_vertices = 10'000;
    std::chrono::milliseconds timeout{60'000};
};

namespace detail {

class Bitset {
public:
    explicit Bitset(std::size_t bits = 0) : words_((bits + 63) / 64, 0) {}

    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

    bool none() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }

    std::size_t count_and(const Bitset& o) const {
        std::size_t c = 0;
        for (std::size_t k = 0; k < words_.size(); ++k) c += static_cast<std::size_t>(std::popcount(words_[k] & o.words_[k]));
        return c;
    }

    Bitset operator&(const Bitset& o) const {
        Bitset r = *this;
        for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
        return r;
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            auto w = words_[k];
            while (w) {
                const auto b = static_cast<std::size_t>(std::countr_zero(w));
                fn(k * 64 + b);
                w &= w - 1;
            }
        }
    }

    /// this & ~o
    Bitset minus(const Bitset& o) const {
        Bitset r = *this;
        for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= ~o.words_[k];
        return r;
    }

private:
    std::vector<std::uint64_t> words_;
};

// Bron-Kerbosch with pivoting on the complement graph: cliques of the
// complement are independent sets of g. Pivot maximizes |P ∩ N_c(u)| so that
// the branch set P \ N_c(u) is as small as possible.
class MisEnumerator {
public:
    MisEnumerator(const CharGraph& g, const MisOptions& opt)
        : n_(g.vertex_count()), compat_(n_, Bitset(n_)), deadline_(std::chrono::steady_clock::now() + opt.timeout) {
        for (VertexId a = 0; a < n_; ++a) {
            for (VertexId b = 0; b < n_; ++b)
                if (a != b) compat_[a].set(b);
            for (VertexId b : g.neighbors(a)) compat_[a].reset(b);
        }
    }

    std::vector<std::vector<VertexId>> run() {
        Bitset p(n_);
        for (std::size_t v = 0; v < n_; ++v) p.set(v);
        if (n_ > 0) expand(p, Bitset(n_));
        return std::move(out_);
    }

private:
    void expand(Bitset p, Bitset x) {
        if ((++calls_ & 1023) == 0 && std::chrono::steady_clock::now() > deadline_)
            throw TimeoutError("maximal independent set enumeration exceeded its time budget");
        if (p.none()) {
            if (x.none()) {
                auto s = current_;
                std::sort(s.begin(), s.end());
                out_.push_back(std::move(s));
            }
            return;
        }
        std::size_t pivot = 0;
        std::size_t best = 0;
        bool have = false;
        auto consider = [&](std::size_t u) {
            const auto c = p.count_and(compat_[u]);
            if (!have || c > best) {
                have = true;
                best = c;
                pivot = u;
            }
        };
        p.for_each(consider);
        x.for_each(consider);

        const Bitset branch = p.minus(compat_[pivot]);
        branch.for_each([&](std::size_t v) {
            current_.push_back(static_cast<VertexId>(v));
            expand(p & compat_[v], x & compat_[v]);
            current_.pop_back();
            p.reset(v);
            x.set(v);
        });
    }

    std::size_t n_;
    std::vector<Bitset> compat_;
    std::chrono::steady_clock::time_point deadline_;
    std::vector<VertexId> current_;
    std::vector<std::vector<VertexId>> out_;
    std::uint64_t calls_ = 0;
};

} // namespace detail

/// All maximal independent sets of g, each sorted, family sorted.
inline MISFamily enumerate_mis(const CharGraph& g, const MisOptions& opt = {}) {
    if (g.vertex_count() > opt.max_vertices)
        throw GuardError("graph has " + std::to_string(g.vertex_count()) + " vertices; MIS enumeration limit is " +
                         std::to_string(opt.max_vertices));
    MISFamily fam;
    fam.label = g.label();
    fam.vertex_count = g.vertex_count();
    fam.sets = detail::MisEnumerator(g, opt).run();
    std::sort(fam.sets.begin(), fam.sets.end());
    return fam;
}

inline bool is_independent(const CharGraph& g, const std::vector<VertexId>& s) {
    for (VertexId v : s)
        if (v >= g.vertex_count()) throw std::out_of_range("vertex " + std::to_string(v) + " not in graph");
    for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t b = a + 1; b < s.size(); ++b)
            if (g.adjacent(s[a], s[b])) return false;
    return true;
}

/// Vertex ids of the given tuple names ("011", ...) in a block-length-1 graph.
inline std::vector<VertexId> vertices_by_name(const CharGraph& g, const std::vector<std::string>& names) {
    std::vector<VertexId> out;
    for (const auto& n : names) {
        auto v = g.find(g.space().parse(n));
        if (!v) throw std::out_of_range("tuple " + n + " is not a vertex of " + g.label());
        out.push_back(*v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::string format_set(const CharGraph& g, const std::vector<VertexId>& s) {
    std::string out = "{";
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k) out += ',';
        out += g.vertex_name(s[k]);
    }
    return out + "}";
}

/// Conditional assignment P(W | x) of vertices to the sets of an MISFamily.
/// rows[v][w] is the probability that vertex v is encoded as set w.
struct CoverDistribution {
    std::vector<std::vector<double>> rows;

    /// Deterministic cover sending vertex v to set assignment[v].
    static CoverDistribution deterministic(const std::vector<std::uint32_t>& assignment, std::size_t family_size) {
        CoverDistribution c;
        c.rows.assign(assignment.size(), std::vector<double>(family_size, 0.0));
        for (std::size_t v = 0; v < assignment.size(); ++v) c.rows[v].at(assignment[v]) = 1.0;
        return c;
    }

    bool is_deterministic() const {
        for (const auto& r : rows)
            for (double w : r)
                if (w > 0.0 && w < 1.0) return false;
        return true;
    }
};

struct CoverReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

inline CoverReport validate_cover(const MISFamily& family, const CoverDistribution& cover) {
    CoverReport rep;
    if (cover.rows.size() != family.vertex_count) {
        rep.violations.push_back({"row-count", "cover has " + std::to_string(cover.rows.size()) + " rows for " +
                                                   std::to_string(family.vertex_count) + " vertices"});
        return rep;
    }
    for (VertexId v = 0; v < cover.rows.size(); ++v) {
        const auto& row = cover.rows[v];
        const auto where = "vertex " + std::to_string(v);
        if (row.size() != family.sets.size()) {
            rep.violations.push_back({"row-size", where + " row has " + std::to_string(row.size()) + " entries for " +
                                                      std::to_string(family.sets.size()) + " sets"});
            continue;
        }
        double sum = 0.0;
        for (std::size_t w = 0; w < row.size(); ++w) {
            if (!(row[w] >= 0.0)) rep.violations.push_back({"negative-weight", where + " set " + std::to_string(w)});
            if (row[w] > 0.0 && !family.contains(w, v))
                rep.violations.push_back({"x-not-in-W", where + " assigned to set " + std::to_string(w) +
                                                            " which does not contain it"});
            sum += row[w];
        }
        if (std::abs(sum - 1.0) > 1e-9)
            rep.violations.push_back({"row-not-normalized", where + " row sums to " + std::to_string(sum)});
    }
    return rep;
}

} // namespace cbcast
