#ifndef ITC_GRAPH_HPP
#define ITC_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "itc/error.hpp"

namespace itc {

/// Dense vertex index. Labels are metadata kept on the graph.
using Vertex = std::size_t;

/// Sorted, duplicate-free list of vertices.
using VertexSet = std::vector<Vertex>;

/// Ordered sequence of distinct vertices, consecutive ones adjacent.
using Path = std::vector<Vertex>;

using Edge = std::pair<Vertex, Vertex>;

inline VertexSet make_set(std::vector<Vertex> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

inline bool contains(const VertexSet& s, Vertex v) { return std::binary_search(s.begin(), s.end(), v); }

inline VertexSet set_union(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

/// Kind of the edge between an ordered pair (i, j).
enum class EdgeMark : std::uint8_t {
    None,
    Out,         // i -> j
    In,          // i <- j
    Undirected,  // i -- j
};

inline EdgeMark reversed(EdgeMark m) {
    switch (m) {
        case EdgeMark::Out: return EdgeMark::In;
        case EdgeMark::In: return EdgeMark::Out;
        default: return m;
    }
}

class MixedGraph;

/// Mutable edge store used to assemble graphs. Enforces at most one edge per pair
/// and no self-loops.
class GraphBuilder {
public:
    GraphBuilder() = default;
    explicit GraphBuilder(std::size_t n, std::vector<std::string> labels = {})
        : n_(n), marks_(n * n, EdgeMark::None), labels_(std::move(labels)) {
        if (!labels_.empty() && labels_.size() != n_) {
            throw InputError("label count " + std::to_string(labels_.size()) + " does not match vertex count " +
                             std::to_string(n_));
        }
    }
    explicit GraphBuilder(const MixedGraph& g);

    std::size_t size() const { return n_; }

    EdgeMark mark(Vertex i, Vertex j) const { return marks_[i * n_ + j]; }
    bool adjacent(Vertex i, Vertex j) const { return mark(i, j) != EdgeMark::None; }
    bool directed(Vertex i, Vertex j) const { return mark(i, j) == EdgeMark::Out; }
    bool undirected(Vertex i, Vertex j) const { return mark(i, j) == EdgeMark::Undirected; }

    GraphBuilder& add_directed(Vertex from, Vertex to) {
        check_new(from, to);
        set(from, to, EdgeMark::Out);
        return *this;
    }

    GraphBuilder& add_undirected(Vertex a, Vertex b) {
        check_new(a, b);
        set(a, b, EdgeMark::Undirected);
        return *this;
    }

    /// Turns an existing edge into from -> to.
    GraphBuilder& orient(Vertex from, Vertex to) {
        check_vertex(from);
        check_vertex(to);
        if (!adjacent(from, to)) {
            throw InputError("cannot orient missing edge " + std::to_string(from) + " - " + std::to_string(to));
        }
        set(from, to, EdgeMark::Out);
        return *this;
    }

    GraphBuilder& make_undirected(Vertex a, Vertex b) {
        if (!adjacent(a, b)) {
            throw InputError("cannot unorient missing edge " + std::to_string(a) + " - " + std::to_string(b));
        }
        set(a, b, EdgeMark::Undirected);
        return *this;
    }

    GraphBuilder& remove(Vertex a, Vertex b) {
        set(a, b, EdgeMark::None);
        return *this;
    }

    MixedGraph build() const;

private:
    friend class MixedGraph;

    void check_vertex(Vertex v) const {
        if (v >= n_) {
            throw InputError("unknown vertex id " + std::to_string(v) + " (graph has " + std::to_string(n_) +
                             " vertices)");
        }
    }
    void check_new(Vertex a, Vertex b) const {
        check_vertex(a);
        check_vertex(b);
        if (a == b) throw InputError("self-loop at vertex " + std::to_string(a));
        if (adjacent(a, b)) {
            throw InputError("duplicate edge between " + std::to_string(a) + " and " + std::to_string(b));
        }
    }
    void set(Vertex a, Vertex b, EdgeMark m) {
        marks_[a * n_ + b] = m;
        marks_[b * n_ + a] = reversed(m);
    }

    std::size_t n_ = 0;
    std::vector<EdgeMark> marks_;
    std::vector<std::string> labels_;
};

/// Immutable graph with directed and undirected edges. Neighbour lists are sorted;
/// edge queries go through an n*n mark table.
class MixedGraph {
public:
    MixedGraph() = default;

    static MixedGraph from_edges(std::size_t n, std::span<const Edge> directed, std::span<const Edge> undirected,
                                 std::vector<std::string> labels = {}) {
        GraphBuilder b(n, std::move(labels));
        for (auto [i, j] : directed) b.add_directed(i, j);
        for (auto [i, j] : undirected) b.add_undirected(i, j);
        return b.build();
    }

    std::size_t size() const { return n_; }

    const std::vector<std::string>& labels() const { return labels_; }
    bool has_labels() const { return !labels_.empty(); }
    std::string name(Vertex v) const { return has_labels() ? labels_[v] : std::to_string(v); }

    std::optional<Vertex> find(std::string_view name) const {
        for (Vertex v = 0; v < labels_.size(); ++v) {
            if (labels_[v] == name) return v;
        }
        return std::nullopt;
    }

    void check_vertex(Vertex v) const {
        if (v >= n_) {
            throw InputError("unknown vertex id " + std::to_string(v) + " (graph has " + std::to_string(n_) +
                             " vertices)");
        }
    }

    EdgeMark mark(Vertex i, Vertex j) const { return marks_[i * n_ + j]; }
    bool adjacent(Vertex i, Vertex j) const { return mark(i, j) != EdgeMark::None; }
    bool directed(Vertex i, Vertex j) const { return mark(i, j) == EdgeMark::Out; }
    bool undirected(Vertex i, Vertex j) const { return mark(i, j) == EdgeMark::Undirected; }

    const VertexSet& parents(Vertex v) const { return parents_[v]; }
    const VertexSet& children(Vertex v) const { return children_[v]; }
    const VertexSet& siblings(Vertex v) const { return siblings_[v]; }
    const VertexSet& adjacent(Vertex v) const { return adjacent_[v]; }

    std::size_t num_directed() const { return num_directed_; }
    std::size_t num_undirected() const { return num_undirected_; }
    std::size_t num_edges() const { return num_directed_ + num_undirected_; }

    std::vector<Edge> directed_edges() const {
        std::vector<Edge> out;
        for (Vertex i = 0; i < n_; ++i) {
            for (Vertex j : children_[i]) out.emplace_back(i, j);
        }
        return out;
    }

    /// Undirected edges as (i, j) with i < j.
    std::vector<Edge> undirected_edges() const {
        std::vector<Edge> out;
        for (Vertex i = 0; i < n_; ++i) {
            for (Vertex j : siblings_[i]) {
                if (i < j) out.emplace_back(i, j);
            }
        }
        return out;
    }

    friend bool operator==(const MixedGraph& a, const MixedGraph& b) {
        return a.n_ == b.n_ && a.marks_ == b.marks_;
    }

private:
    friend class GraphBuilder;

    std::size_t n_ = 0;
    std::vector<EdgeMark> marks_;
    std::vector<std::string> labels_;
    std::vector<VertexSet> parents_, children_, siblings_, adjacent_;
    std::size_t num_directed_ = 0;
    std::size_t num_undirected_ = 0;
};

inline GraphBuilder::GraphBuilder(const MixedGraph& g) : n_(g.n_), marks_(g.marks_), labels_(g.labels_) {}

inline MixedGraph GraphBuilder::build() const {
    MixedGraph g;
    g.n_ = n_;
    g.marks_ = marks_;
    g.labels_ = labels_;
    g.parents_.resize(n_);
    g.children_.resize(n_);
    g.siblings_.resize(n_);
    g.adjacent_.resize(n_);
    for (Vertex i = 0; i < n_; ++i) {
        for (Vertex j = 0; j < n_; ++j) {
            switch (mark(i, j)) {
                case EdgeMark::Out:
                    g.children_[i].push_back(j);
                    ++g.num_directed_;
                    break;
                case EdgeMark::In: g.parents_[i].push_back(j); break;
                case EdgeMark::Undirected:
                    g.siblings_[i].push_back(j);
                    if (i < j) ++g.num_undirected_;
                    break;
                case EdgeMark::None: continue;
            }
            g.adjacent_[i].push_back(j);
        }
    }
    return g;
}

enum class Neighborhood { Parents, Children, Siblings, Adjacent };

inline VertexSet neighbors(const MixedGraph& g, Vertex x, Neighborhood kind) {
    g.check_vertex(x);
    switch (kind) {
        case Neighborhood::Parents: return g.parents(x);
        case Neighborhood::Children: return g.children(x);
        case Neighborhood::Siblings: return g.siblings(x);
        case Neighborhood::Adjacent: return g.adjacent(x);
    }
    return {};
}

namespace detail {

template <class Next>
VertexSet reach(const MixedGraph& g, Vertex start, Next&& next) {
    std::vector<char> seen(g.size(), 0);
    std::vector<Vertex> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        for (Vertex w : next(v)) {
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    VertexSet out;
    for (Vertex v = 0; v < g.size(); ++v) {
        if (seen[v]) out.push_back(v);
    }
    return out;
}

}  // namespace detail

/// Reflexive ancestors of x along directed edges only.
inline VertexSet ancestors(const MixedGraph& g, Vertex x) {
    g.check_vertex(x);
    return detail::reach(g, x, [&](Vertex v) -> const VertexSet& { return g.parents(v); });
}

/// Reflexive descendants of x along directed edges only.
inline VertexSet descendants(const MixedGraph& g, Vertex x) {
    g.check_vertex(x);
    return detail::reach(g, x, [&](Vertex v) -> const VertexSet& { return g.children(v); });
}

/// Vertices reachable from x by partially directed paths (never against an arrow).
inline VertexSet possible_descendants(const MixedGraph& g, Vertex x) {
    g.check_vertex(x);
    return detail::reach(g, x, [&](Vertex v) { return set_union(g.children(v), g.siblings(v)); });
}

/// Topological order of the directed part, or nullopt when it has a directed cycle.
inline std::optional<std::vector<Vertex>> topological_order(const MixedGraph& g) {
    std::vector<std::size_t> indeg(g.size());
    for (Vertex v = 0; v < g.size(); ++v) indeg[v] = g.parents(v).size();
    std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> ready;
    for (Vertex v = 0; v < g.size(); ++v) {
        if (indeg[v] == 0) ready.push(v);
    }
    std::vector<Vertex> order;
    order.reserve(g.size());
    while (!ready.empty()) {
        Vertex v = ready.top();
        ready.pop();
        order.push_back(v);
        for (Vertex c : g.children(v)) {
            if (--indeg[c] == 0) ready.push(c);
        }
    }
    if (order.size() != g.size()) return std::nullopt;
    return order;
}

inline bool is_acyclic(const MixedGraph& g) { return topological_order(g).has_value(); }

/// A MixedGraph without undirected edges and without directed cycles.
class Dag {
public:
    Dag() = default;
    explicit Dag(MixedGraph g) : g_(std::move(g)) {
        if (g_.num_undirected() != 0) throw InputError("DAG has undirected edges");
        if (!is_acyclic(g_)) throw InputError("graph has a directed cycle");
    }

    const MixedGraph& graph() const { return g_; }
    std::size_t size() const { return g_.size(); }
    const VertexSet& parents(Vertex v) const { return g_.parents(v); }
    const VertexSet& children(Vertex v) const { return g_.children(v); }

    friend bool operator==(const Dag& a, const Dag& b) { return a.g_ == b.g_; }

private:
    MixedGraph g_;
};

inline MixedGraph induced_subgraph(const MixedGraph& g, const VertexSet& vertices) {
    std::vector<std::string> labels;
    if (g.has_labels()) {
        for (Vertex v : vertices) labels.push_back(g.labels()[v]);
    }
    GraphBuilder b(vertices.size(), std::move(labels));
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        for (std::size_t j = i + 1; j < vertices.size(); ++j) {
            switch (g.mark(vertices[i], vertices[j])) {
                case EdgeMark::Out: b.add_directed(i, j); break;
                case EdgeMark::In: b.add_directed(j, i); break;
                case EdgeMark::Undirected: b.add_undirected(i, j); break;
                case EdgeMark::None: break;
            }
        }
    }
    return b.build();
}

/// Same vertex set, only the undirected edges.
inline MixedGraph undirected_part(const MixedGraph& g) {
    GraphBuilder b(g.size(), g.labels());
    for (auto [i, j] : g.undirected_edges()) b.add_undirected(i, j);
    return b.build();
}

/// Same vertex set, only the directed edges.
inline MixedGraph directed_part(const MixedGraph& g) {
    GraphBuilder b(g.size(), g.labels());
    for (auto [i, j] : g.directed_edges()) b.add_directed(i, j);
    return b.build();
}

/// Skeleton with every edge undirected.
inline MixedGraph skeleton(const MixedGraph& g) {
    GraphBuilder b(g.size(), g.labels());
    for (Vertex i = 0; i < g.size(); ++i) {
        for (Vertex j : g.adjacent(i)) {
            if (i < j) b.add_undirected(i, j);
        }
    }
    return b.build();
}

/// Connected components of the undirected subgraph, each sorted; ordered by smallest member.
inline std::vector<VertexSet> chain_components(const MixedGraph& g) {
    std::vector<char> seen(g.size(), 0);
    std::vector<VertexSet> out;
    for (Vertex s = 0; s < g.size(); ++s) {
        if (seen[s]) continue;
        VertexSet comp = detail::reach(g, s, [&](Vertex v) -> const VertexSet& { return g.siblings(v); });
        for (Vertex v : comp) seen[v] = 1;
        out.push_back(std::move(comp));
    }
    return out;
}

inline bool is_complete(const MixedGraph& g, const VertexSet& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            if (!g.adjacent(s[i], s[j])) return false;
        }
    }
    return true;
}

namespace detail {

inline void require_undirected(const MixedGraph& g, const char* op) {
    if (g.num_directed() != 0) throw InputError(std::string(op) + ": graph has directed edges");
}

/// Maximum-cardinality search visit order (ties broken by smallest index).
inline std::vector<Vertex> mcs_order(const MixedGraph& g) {
    const std::size_t n = g.size();
    std::vector<std::size_t> weight(n, 0);
    std::vector<char> numbered(n, 0);
    std::vector<Vertex> order;
    order.reserve(n);
    for (std::size_t step = 0; step < n; ++step) {
        Vertex best = n;
        for (Vertex v = 0; v < n; ++v) {
            if (!numbered[v] && (best == n || weight[v] > weight[best])) best = v;
        }
        numbered[best] = 1;
        order.push_back(best);
        for (Vertex w : g.adjacent(best)) {
            if (!numbered[w]) ++weight[w];
        }
    }
    return order;
}

/// True when `elim` (first eliminated first) is a perfect elimination ordering.
inline bool is_perfect_elimination(const MixedGraph& g, const std::vector<Vertex>& elim) {
    std::vector<std::size_t> pos(g.size());
    for (std::size_t i = 0; i < elim.size(); ++i) pos[elim[i]] = i;
    for (Vertex v : elim) {
        std::optional<Vertex> first;
        for (Vertex w : g.adjacent(v)) {
            if (pos[w] > pos[v] && (!first || pos[w] < pos[*first])) first = w;
        }
        if (!first) continue;
        for (Vertex w : g.adjacent(v)) {
            if (pos[w] > pos[v] && w != *first && !g.adjacent(*first, w)) return false;
        }
    }
    return true;
}

inline std::vector<Vertex> elimination_order(const MixedGraph& g) {
    auto order = mcs_order(g);
    std::reverse(order.begin(), order.end());
    return order;
}

inline bool size_then_lex(const VertexSet& a, const VertexSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

}  // namespace detail

/// Chordality via maximum-cardinality search and a perfect-elimination check.
inline bool is_chordal(const MixedGraph& ug) {
    detail::require_undirected(ug, "is_chordal");
    return detail::is_perfect_elimination(ug, detail::elimination_order(ug));
}

/// All maximal cliques of a chordal graph, sorted by size then lexicographically.
inline std::vector<VertexSet> maximal_cliques(const MixedGraph& ug) {
    detail::require_undirected(ug, "maximal_cliques");
    const auto elim = detail::elimination_order(ug);
    if (!detail::is_perfect_elimination(ug, elim)) throw InputError("maximal_cliques: graph is not chordal");
    if (ug.size() == 0) return {};

    std::vector<std::size_t> pos(ug.size());
    for (std::size_t i = 0; i < elim.size(); ++i) pos[elim[i]] = i;
    std::vector<VertexSet> candidates;
    for (Vertex v : elim) {
        VertexSet c{v};
        for (Vertex w : ug.adjacent(v)) {
            if (pos[w] > pos[v]) c.push_back(w);
        }
        candidates.push_back(make_set(std::move(c)));
    }
    std::vector<VertexSet> out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < candidates.size() && !dominated; ++j) {
            if (i == j) continue;
            const auto& a = candidates[i];
            const auto& b = candidates[j];
            bool subset = std::includes(b.begin(), b.end(), a.begin(), a.end());
            dominated = subset && (a.size() < b.size() || j < i);
        }
        if (!dominated) out.push_back(candidates[i]);
    }
    std::sort(out.begin(), out.end(), detail::size_then_lex);
    return out;
}

/// Every clique (including the empty set) of an undirected graph, sorted by size then
/// lexicographically.
inline std::vector<VertexSet> all_cliques(const MixedGraph& ug) {
    std::vector<VertexSet> out{{}};
    VertexSet current;
    auto extend = [&](auto&& self, Vertex from) -> void {
        for (Vertex v = from; v < ug.size(); ++v) {
            bool ok = std::all_of(current.begin(), current.end(), [&](Vertex u) { return ug.adjacent(u, v); });
            if (!ok) continue;
            current.push_back(v);
            out.push_back(current);
            self(self, v + 1);
            current.pop_back();
        }
    };
    extend(extend, 0);
    std::sort(out.begin(), out.end(), detail::size_then_lex);
    return out;
}

inline bool is_path(const MixedGraph& g, const Path& p) {
    if (p.empty()) return false;
    for (Vertex v : p) {
        if (v >= g.size()) return false;
    }
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (!g.adjacent(p[i], p[i + 1])) return false;
    }
    return true;
}

/// True iff no edge of g joins two nonconsecutive vertices of p.
inline bool chordless(const MixedGraph& g, const Path& p) {
    if (!is_path(g, p)) throw InputError("chordless: sequence is not a path of the graph");
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 2; j < p.size(); ++j) {
            if (g.adjacent(p[i], p[j])) return false;
        }
    }
    return true;
}

/// True iff no three consecutive vertices of p form a triangle.
inline bool triangle_free(const MixedGraph& g, const Path& p) {
    if (!is_path(g, p)) throw InputError("triangle_free: sequence is not a path of the graph");
    for (std::size_t i = 0; i + 2 < p.size(); ++i) {
        if (g.adjacent(p[i], p[i + 2])) return false;
    }
    return true;
}

}  // namespace itc

#endif  // ITC_GRAPH_HPP
