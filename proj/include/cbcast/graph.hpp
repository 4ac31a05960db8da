#pragma once

// Characteristic graphs on source tuples, their edge-unions, and OR powers.
//
// A vertex is a sequence of `block_length` source tuples (length 1 for the
// per-user and union graphs). Vertices are kept in lexicographic order and
// adjacency lists are sorted, so every downstream enumeration is
// deterministic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "instance.hpp"

namespace cbcast {

using VertexId = std::uint32_t;

inline constexpr std::uint64_t or_power_vertex_guard = 1'000'000;
inline constexpr std::uint64_t or_power_edge_guard = 20'000'000;

class CharGraph {
public:
    CharGraph() = default;

    CharGraph(std::string label, TupleSpace space, int block_length, std::vector<TupleId> symbols,
              std::vector<std::vector<VertexId>> adjacency)
        : label_(std::move(label)), space_(space), block_length_(block_length), symbols_(std::move(symbols)),
          adjacency_(std::move(adjacency)) {
        const auto v = vertex_count();
        if (adjacency_.size() != v) throw std::invalid_argument("adjacency size does not match vertex count");
        for (VertexId u = 0; u < v; ++u) {
            auto& nb = adjacency_[u];
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
            for (VertexId w : nb) {
                if (w == u) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
                if (w >= v) throw std::invalid_argument("edge endpoint outside the vertex set");
            }
        }
        for (VertexId u = 0; u < v; ++u)
            for (VertexId w : adjacency_[u])
                if (!std::binary_search(adjacency_[w].begin(), adjacency_[w].end(), u))
                    throw std::invalid_argument("adjacency is not symmetric");
    }

    const std::string& label() const noexcept { return label_; }
    const TupleSpace& space() const noexcept { return space_; }
    int block_length() const noexcept { return block_length_; }

    std::size_t vertex_count() const noexcept {
        return block_length_ == 0 ? 0 : symbols_.size() / static_cast<std::size_t>(block_length_);
    }

    std::size_t edge_count() const noexcept {
        std::size_t e = 0;
        for (const auto& nb : adjacency_) e += nb.size();
        return e / 2;
    }

    const std::vector<VertexId>& neighbors(VertexId v) const { return adjacency_.at(v); }
    const std::vector<std::vector<VertexId>>& adjacency() const noexcept { return adjacency_; }

    bool adjacent(VertexId a, VertexId b) const {
        const auto& nb = adjacency_.at(a);
        return std::binary_search(nb.begin(), nb.end(), b);
    }

    /// Source tuples making up vertex v.
    std::vector<TupleId> symbols(VertexId v) const {
        const auto n = static_cast<std::size_t>(block_length_);
        return {symbols_.begin() + static_cast<std::ptrdiff_t>(v * n),
                symbols_.begin() + static_cast<std::ptrdiff_t>((v + 1) * n)};
    }

    /// Source tuple of vertex v in a block-length-1 graph.
    TupleId tuple(VertexId v) const { return symbols_.at(v); }

    const std::vector<TupleId>& all_symbols() const noexcept { return symbols_; }

    /// Vertex list of a block-length-1 graph, as source tuples.
    std::vector<TupleId> tuples() const {
        if (block_length_ != 1) throw std::logic_error("tuples() needs a block-length-1 graph");
        return symbols_;
    }

    /// Position of a source tuple in a block-length-1 graph, if present.
    std::optional<VertexId> find(TupleId t) const {
        if (block_length_ != 1) return std::nullopt;
        auto it = std::lower_bound(symbols_.begin(), symbols_.end(), t);
        if (it == symbols_.end() || *it != t) return std::nullopt;
        return static_cast<VertexId>(it - symbols_.begin());
    }

    std::string vertex_name(VertexId v) const {
        if (block_length_ == 1) return space_.format(symbols_.at(v));
        std::string s = "(";
        for (const auto t : symbols(v)) {
            if (s.size() > 1) s += ',';
            s += space_.format(t);
        }
        return s + ")";
    }

    /// Edges (a, b) with a < b, sorted.
    std::vector<std::pair<VertexId, VertexId>> edges() const {
        std::vector<std::pair<VertexId, VertexId>> out;
        for (VertexId a = 0; a < adjacency_.size(); ++a)
            for (VertexId b : adjacency_[a])
                if (a < b) out.emplace_back(a, b);
        return out;
    }

    bool same_vertices(const CharGraph& other) const {
        return block_length_ == other.block_length_ && symbols_ == other.symbols_ && space_.q == other.space_.q &&
               space_.n == other.space_.n;
    }

private:
    std::string label_;
    TupleSpace space_{};
    int block_length_ = 1;
    std::vector<TupleId> symbols_;
    std::vector<std::vector<VertexId>> adjacency_;
};

/// G_{f_i}: vertices are the support; x ~ x' iff they agree on every side
/// coordinate of user i and f_i(x) != f_i(x'). Only pairs inside the same
/// side-information class are examined.
inline CharGraph build_characteristic_graph(const Instance& inst, std::size_t user) {
    if (user >= inst.users.size())
        throw std::out_of_range("user index " + std::to_string(user + 1) + " outside [1, " +
                                std::to_string(inst.users.size()) + "]");
    const auto vertices = support(inst);
    const auto classes = side_classes(inst, user, vertices);
    std::map<std::uint32_t, std::vector<VertexId>> groups;
    for (VertexId v = 0; v < vertices.size(); ++v) groups[classes[v]].push_back(v);

    const auto& f = inst.users[user].demand;
    std::vector<std::vector<VertexId>> adj(vertices.size());
    for (const auto& [cls, members] : groups) {
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                const VertexId u = members[a];
                const VertexId w = members[b];
                if (f(vertices[u]) != f(vertices[w])) {
                    adj[u].push_back(w);
                    adj[w].push_back(u);
                }
            }
        }
    }
    return CharGraph("G_f" + std::to_string(user + 1), inst.space(), 1, vertices, std::move(adj));
}

inline std::vector<CharGraph> build_characteristic_graphs(const Instance& inst) {
    std::vector<CharGraph> out;
    for (std::size_t i = 0; i < inst.users.size(); ++i) out.push_back(build_characteristic_graph(inst, i));
    return out;
}

/// Edge-union of graphs sharing one vertex list.
inline CharGraph build_union_graph(const std::vector<CharGraph>& graphs, std::string label = "union") {
    if (graphs.empty()) throw std::invalid_argument("union of zero graphs");
    const auto& first = graphs.front();
    for (const auto& g : graphs)
        if (!g.same_vertices(first)) throw std::invalid_argument("union graph inputs have different vertex sets");
    std::vector<std::vector<VertexId>> adj(first.vertex_count());
    for (const auto& g : graphs)
        for (VertexId v = 0; v < adj.size(); ++v)
            adj[v].insert(adj[v].end(), g.neighbors(v).begin(), g.neighbors(v).end());
    return CharGraph(std::move(label), first.space(), first.block_length(), first.all_symbols(), std::move(adj));
}

inline CharGraph build_union_graph(const Instance& inst) {
    return build_union_graph(build_characteristic_graphs(inst));
}

/// Number of edges of the n-fold OR power, computed without building it:
/// unordered non-adjacent distinct pairs of the power are ((V + 2*nonEdges)^n - V^n) / 2.
inline long double or_power_edge_count(const CharGraph& g, int n) {
    const long double v = static_cast<long double>(g.vertex_count());
    const long double e = static_cast<long double>(g.edge_count());
    const long double non_edges = v * (v - 1) / 2 - e;
    const long double vn = std::pow(v, n);
    const long double closed = std::pow(v + 2 * non_edges, n);
    return vn * (vn - 1) / 2 - (closed - vn) / 2;
}

/// n-fold OR (disjunctive) power: distinct n-tuples of vertices are adjacent
/// iff some coordinate pair is adjacent in g.
inline CharGraph or_power(const CharGraph& g, int n) {
    if (n < 1) throw std::invalid_argument("OR power needs n >= 1");
    if (n == 1) return g;
    const std::uint64_t base = g.vertex_count();
    long double size = std::pow(static_cast<long double>(base), n);
    if (size > static_cast<long double>(or_power_vertex_guard))
        throw GuardError("OR power would have " + std::to_string(static_cast<double>(size)) + " vertices (limit " +
                         std::to_string(or_power_vertex_guard) + ")");
    if (or_power_edge_count(g, n) > static_cast<long double>(or_power_edge_guard))
        throw GuardError("OR power would have more than " + std::to_string(or_power_edge_guard) + " edges");

    const auto count = static_cast<std::size_t>(std::llround(static_cast<double>(size)));
    const auto bn = static_cast<std::size_t>(g.block_length());
    std::vector<TupleId> symbols;
    symbols.reserve(count * static_cast<std::size_t>(n) * bn);

    // Power vertex id = mixed-radix number over base vertex ids, first coordinate most significant.
    std::vector<std::size_t> place(static_cast<std::size_t>(n));
    place[static_cast<std::size_t>(n - 1)] = 1;
    for (int k = n - 2; k >= 0; --k) place[static_cast<std::size_t>(k)] = place[static_cast<std::size_t>(k + 1)] * base;
    auto coord = [&](std::size_t id, int k) { return static_cast<VertexId>((id / place[static_cast<std::size_t>(k)]) % base); };

    for (std::size_t id = 0; id < count; ++id)
        for (int k = 0; k < n; ++k)
            for (TupleId t : g.symbols(coord(id, k))) symbols.push_back(t);

    // Closed non-neighbourhoods: b == a or b not adjacent to a.
    std::vector<std::vector<VertexId>> non_adj(base);
    for (VertexId a = 0; a < base; ++a)
        for (VertexId b = 0; b < base; ++b)
            if (a == b || !g.adjacent(a, b)) non_adj[a].push_back(b);

    // Enumerate neighbours of each vertex by the first coordinate at which
    // they are adjacent: earlier coordinates non-adjacent, that coordinate
    // adjacent, later coordinates free. Each neighbour is produced once.
    std::vector<std::vector<VertexId>> adj(count);
    std::vector<const std::vector<VertexId>*> choices(static_cast<std::size_t>(n));
    std::vector<VertexId> all(base);
    for (VertexId a = 0; a < base; ++a) all[a] = a;
    std::vector<std::size_t> pos(static_cast<std::size_t>(n));
    for (std::size_t id = 0; id < count; ++id) {
        for (int first = 0; first < n; ++first) {
            const VertexId here = coord(id, first);
            if (g.neighbors(here).empty()) continue;
            bool empty = false;
            for (int k = 0; k < n; ++k) {
                const auto uk = static_cast<std::size_t>(k);
                if (k < first) choices[uk] = &non_adj[coord(id, k)];
                else if (k == first) choices[uk] = &g.neighbors(here);
                else choices[uk] = &all;
                if (choices[uk]->empty()) empty = true;
            }
            if (empty) continue;
            std::fill(pos.begin(), pos.end(), 0);
            for (;;) {
                std::size_t other = 0;
                for (int k = 0; k < n; ++k) other += (*choices[static_cast<std::size_t>(k)])[pos[static_cast<std::size_t>(k)]] * place[static_cast<std::size_t>(k)];
                adj[id].push_back(static_cast<VertexId>(other));
                int k = n - 1;
                while (k >= 0 && ++pos[static_cast<std::size_t>(k)] == choices[static_cast<std::size_t>(k)]->size()) {
                    pos[static_cast<std::size_t>(k)] = 0;
                    --k;
                }
                if (k < 0) break;
            }
        }
    }
    return CharGraph(g.label() + "^" + std::to_string(n), g.space(), g.block_length() * n, std::move(symbols),
                     std::move(adj));
}

/// Undirected DOT text; vertices and edges in canonical order.
inline std::string export_dot(const CharGraph& g) {
    std::string out = g.label().empty() ? "graph {\n" : "graph \"" + g.label() + "\" {\n";
    for (VertexId v = 0; v < g.vertex_count(); ++v) out += "  \"" + g.vertex_name(v) + "\";\n";
    for (const auto& [a, b] : g.edges()) out += "  \"" + g.vertex_name(a) + "\" -- \"" + g.vertex_name(b) + "\";\n";
    out += "}\n";
    return out;
}

} // namespace cbcast
