#ifndef ITC_EQUIVALENCE_HPP
#define ITC_EQUIVALENCE_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include "itc/graph.hpp"

namespace itc {

namespace detail {

// Meek's rules, each asking whether the undirected edge a - b must become a -> b.
inline bool meek_rule1(const GraphBuilder& g, Vertex a, Vertex b) {
    for (Vertex c = 0; c < g.size(); ++c) {
        if (g.directed(c, a) && c != b && !g.adjacent(c, b)) return true;
    }
    return false;
}

inline bool meek_rule2(const GraphBuilder& g, Vertex a, Vertex b) {
    for (Vertex c = 0; c < g.size(); ++c) {
        if (g.directed(a, c) && g.directed(c, b)) return true;
    }
    return false;
}

inline bool meek_rule3(const GraphBuilder& g, Vertex a, Vertex b) {
    for (Vertex c = 0; c < g.size(); ++c) {
        if (!g.undirected(a, c) || !g.directed(c, b)) continue;
        for (Vertex d = c + 1; d < g.size(); ++d) {
            if (g.undirected(a, d) && g.directed(d, b) && !g.adjacent(c, d)) return true;
        }
    }
    return false;
}

inline bool meek_rule4(const GraphBuilder& g, Vertex a, Vertex b) {
    for (Vertex c = 0; c < g.size(); ++c) {
        if (c == a || !g.directed(c, b) || !g.adjacent(a, c)) continue;
        for (Vertex d = 0; d < g.size(); ++d) {
            if (d != a && d != b && g.directed(d, c) && g.adjacent(a, d) && !g.adjacent(d, b)) return true;
        }
    }
    return false;
}

inline bool meek_applies(const GraphBuilder& g, Vertex a, Vertex b) {
    return meek_rule1(g, a, b) || meek_rule2(g, a, b) || meek_rule3(g, a, b) || meek_rule4(g, a, b);
}

/// Applies Meek's rules in place until no rule fires.
inline void meek_close(GraphBuilder& g) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (Vertex a = 0; a < g.size(); ++a) {
            for (Vertex b = 0; b < g.size(); ++b) {
                if (g.undirected(a, b) && meek_applies(g, a, b)) {
                    g.orient(a, b);
                    changed = true;
                }
            }
        }
    }
}

}  // namespace detail

/// Closes a partially directed graph under Meek's rules R1-R4. Only turns undirected
/// edges into directed ones.
inline MixedGraph meek_closure(const MixedGraph& g) {
    GraphBuilder b(g);
    detail::meek_close(b);
    return b.build();
}

struct CpdagValidation {
    bool ok = true;
    std::string property;  // first violated property, empty when ok
    std::string detail;

    explicit operator bool() const { return ok; }
};

inline CpdagValidation validate_cpdag(const MixedGraph& g);

/// Validated essential graph with cached chain components.
class Cpdag {
public:
    Cpdag() = default;

    explicit Cpdag(MixedGraph g) : g_(std::move(g)) {
        auto report = validate_cpdag(g_);
        if (!report) throw InputError("not a valid CPDAG: " + report.property + " (" + report.detail + ")");
        init();
    }

    /// Skips validation; for graphs that are CPDAGs by construction.
    static Cpdag trusted(MixedGraph g) {
        Cpdag c;
        c.g_ = std::move(g);
        c.init();
        return c;
    }

    const MixedGraph& graph() const { return g_; }
    std::size_t size() const { return g_.size(); }
    const MixedGraph& undirected() const { return undirected_; }
    const std::vector<VertexSet>& components() const { return components_; }
    std::size_t component_of(Vertex v) const { return component_of_[v]; }
    const VertexSet& component(Vertex v) const { return components_[component_of_[v]]; }
    bool same_component(Vertex a, Vertex b) const { return component_of_[a] == component_of_[b]; }

    friend bool operator==(const Cpdag& a, const Cpdag& b) { return a.g_ == b.g_; }

private:
    void init() {
        undirected_ = undirected_part(g_);
        components_ = chain_components(g_);
        component_of_.assign(g_.size(), 0);
        for (std::size_t c = 0; c < components_.size(); ++c) {
            for (Vertex v : components_[c]) component_of_[v] = c;
        }
    }

    MixedGraph g_;
    MixedGraph undirected_;
    std::vector<VertexSet> components_;
    std::vector<std::size_t> component_of_;
};

/// Skeleton + v-structures + Meek closure.
inline Cpdag dag_to_cpdag(const Dag& dag) {
    const auto& g = dag.graph();
    GraphBuilder b(skeleton(g));
    for (Vertex v = 0; v < g.size(); ++v) {
        const auto& pa = g.parents(v);
        for (std::size_t i = 0; i < pa.size(); ++i) {
            for (std::size_t j = i + 1; j < pa.size(); ++j) {
                if (!g.adjacent(pa[i], pa[j])) {
                    b.orient(pa[i], v);
                    b.orient(pa[j], v);
                }
            }
        }
    }
    detail::meek_close(b);
    return Cpdag::trusted(b.build());
}

/// Orients every chain component along a maximum-cardinality-search order. For a
/// graph with chordal components and acyclic directed part this is a member DAG.
inline MixedGraph orient_by_mcs(const MixedGraph& g) {
    GraphBuilder b(g);
    for (const auto& comp : chain_components(g)) {
        if (comp.size() < 2) continue;
        auto sub = induced_subgraph(undirected_part(g), comp);
        auto order = detail::mcs_order(sub);
        std::vector<std::size_t> pos(comp.size());
        for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
        for (std::size_t i = 0; i < comp.size(); ++i) {
            for (std::size_t j : sub.adjacent(i)) {
                if (pos[i] < pos[j]) b.orient(comp[i], comp[j]);
            }
        }
    }
    return b.build();
}

/// Some DAG in the class of a valid CPDAG.
inline Dag consistent_extension(const Cpdag& g) { return Dag(orient_by_mcs(g.graph())); }

inline CpdagValidation validate_cpdag(const MixedGraph& g) {
    auto fail = [](std::string property, std::string detail) {
        return CpdagValidation{false, std::move(property), std::move(detail)};
    };
    if (!is_acyclic(g)) return fail("directed-cycle", "the directed subgraph has a cycle");

    const auto ug = undirected_part(g);
    for (const auto& comp : chain_components(g)) {
        if (comp.size() > 3 && !is_chordal(induced_subgraph(ug, comp))) {
            return fail("non-chordal-component", "chain component containing " + g.name(comp.front()) +
                                                     " is not chordal");
        }
    }

    for (auto [a, b] : g.directed_edges()) {
        if (contains(possible_descendants(g, b), a)) {
            return fail("partially-directed-cycle",
                        "edge " + g.name(a) + " -> " + g.name(b) + " lies on a partially directed cycle");
        }
    }

    GraphBuilder builder(g);
    for (auto [a, b] : g.undirected_edges()) {
        for (auto [u, v] : {Edge{a, b}, Edge{b, a}}) {
            if (detail::meek_applies(builder, u, v)) {
                return fail("not-meek-closed", "a Meek rule orients " + g.name(u) + " -> " + g.name(v));
            }
        }
    }

    auto essential = dag_to_cpdag(Dag(orient_by_mcs(g)));
    for (auto [a, b] : g.directed_edges()) {
        if (!essential.graph().directed(a, b)) {
            return fail("unprotected-directed-edge",
                        "edge " + g.name(a) + " -> " + g.name(b) + " is not compelled in the class");
        }
    }
    return {};
}

/// x with its CPDAG parents and the induced subgraph over its siblings. Vertex i of
/// `sibling_graph` is `siblings[i]`.
struct LocalStructure {
    Vertex x = 0;
    VertexSet parents;
    VertexSet siblings;
    MixedGraph sibling_graph;
};

inline LocalStructure local_structure(const Cpdag& g, Vertex x) {
    g.graph().check_vertex(x);
    LocalStructure ls;
    ls.x = x;
    ls.parents = g.graph().parents(x);
    ls.siblings = g.graph().siblings(x);
    ls.sibling_graph = induced_subgraph(g.undirected(), ls.siblings);
    return ls;
}

/// All Q within sib(x) such that pa(x) + Q is the parent set of x in some member DAG,
/// i.e. the cliques (with the empty set) of the sibling subgraph. Sorted by size, then
/// lexicographically.
inline std::vector<VertexSet> valid_parent_extensions(const LocalStructure& ls) {
    std::vector<VertexSet> out;
    for (const auto& local : all_cliques(ls.sibling_graph)) {
        VertexSet q;
        for (Vertex i : local) q.push_back(ls.siblings[i]);
        out.push_back(std::move(q));
    }
    return out;
}

inline std::vector<VertexSet> valid_parent_extensions(const Cpdag& g, Vertex x) {
    return valid_parent_extensions(local_structure(g, x));
}

/// g with Q -> x and x -> (sib(x) \ Q); no closure applied.
inline MixedGraph orient_locally(const MixedGraph& g, Vertex x, const VertexSet& q) {
    GraphBuilder b(g);
    for (Vertex s : g.siblings(x)) {
        if (contains(q, s)) {
            b.orient(s, x);
        } else {
            b.orient(x, s);
        }
    }
    return b.build();
}

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

namespace detail {

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b, std::uint64_t cap) {
    if (a == 0 || b == 0) return 0;
    if (a > cap / b) return cap + 1;
    return std::min(a * b, cap + 1);
}

/// Number of v-structure-free acyclic orientations of a connected chordal graph,
/// saturating at cap + 1. Each orientation has a unique source; fixing the source and
/// closing under Meek's rules splits the rest into independent chordal pieces.
inline std::uint64_t count_rooted_orientations(const MixedGraph& ug, std::uint64_t cap) {
    if (ug.size() <= 1) return 1;
    std::uint64_t total = 0;
    for (Vertex root = 0; root < ug.size(); ++root) {
        GraphBuilder b(ug);
        for (Vertex w : ug.siblings(root)) b.orient(root, w);
        meek_close(b);
        auto h = b.build();
        auto rest = undirected_part(h);
        std::uint64_t prod = 1;
        for (const auto& comp : chain_components(h)) {
            if (comp.size() < 2) continue;
            prod = saturating_mul(prod, count_rooted_orientations(induced_subgraph(rest, comp), cap), cap);
        }
        total = std::min(total + prod, cap + 1);
    }
    return total;
}

inline void enumerate_members(const MixedGraph& h, const std::function<void(const Dag&)>& visit) {
    const auto comps = chain_components(h);
    auto it = std::find_if(comps.begin(), comps.end(), [](const VertexSet& c) { return c.size() > 1; });
    if (it == comps.end()) {
        visit(Dag(h));
        return;
    }
    for (Vertex root : *it) {
        GraphBuilder b(h);
        for (Vertex w : h.siblings(root)) b.orient(root, w);
        meek_close(b);
        enumerate_members(b.build(), visit);
    }
}

}  // namespace detail

/// Size of the Markov equivalence class, saturating at cap + 1.
inline std::uint64_t count_equivalent_dags(const Cpdag& g, std::uint64_t cap = kDefaultEnumerationCap) {
    std::uint64_t prod = 1;
    for (const auto& comp : g.components()) {
        if (comp.size() < 2) continue;
        prod = detail::saturating_mul(prod, detail::count_rooted_orientations(induced_subgraph(g.undirected(), comp), cap),
                                      cap);
    }
    return prod;
}

/// Calls `visit` once for every DAG in the class of g.
inline void for_each_equivalent_dag(const Cpdag& g, const std::function<void(const Dag&)>& visit,
                                    std::uint64_t cap = kDefaultEnumerationCap) {
    auto count = count_equivalent_dags(g, cap);
    if (count > cap) {
        throw ResourceError("equivalence class has more than " + std::to_string(cap) + " DAGs (enumeration cap)");
    }
    detail::enumerate_members(g.graph(), visit);
}

inline std::vector<Dag> enumerate_equivalent_dags(const Cpdag& g, std::uint64_t cap = kDefaultEnumerationCap) {
    std::vector<Dag> out;
    for_each_equivalent_dag(g, [&](const Dag& d) { out.push_back(d); }, cap);
    return out;
}

}  // namespace itc

#endif  // ITC_EQUIVALENCE_HPP
