#ifndef ITC_TESTS_SUPPORT_HPP
#define ITC_TESTS_SUPPORT_HPP

// Brute-force reference implementations used by the tests. They share no code with
// the library beyond the graph container.

#include <functional>
#include <random>
#include <set>
#include <tuple>

#include "itc/all.hpp"

namespace itc::ref {

using Prng = std::mt19937_64;

inline Dag random_dag(std::size_t n, double p, Prng& rng) {
    std::vector<Vertex> order(n);
    for (Vertex i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution edge(p);
    GraphBuilder b(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (edge(rng)) b.add_directed(order[i], order[j]);
        }
    }
    return Dag(b.build());
}

/// Random chordal graph: perfect elimination built backwards, each new vertex joined
/// to a random clique of earlier vertices' neighbourhoods.
inline MixedGraph random_chordal(std::size_t n, Prng& rng, double density = 0.5) {
    GraphBuilder b(n);
    std::bernoulli_distribution coin(density);
    for (Vertex v = 1; v < n; ++v) {
        std::uniform_int_distribution<Vertex> pick(0, v - 1);
        Vertex anchor = pick(rng);
        // neighbours chosen among anchor and anchor's earlier neighbours that form a clique
        std::vector<Vertex> clique{anchor};
        for (Vertex u = 0; u < v; ++u) {
            if (u == anchor || !b.adjacent(u, anchor) || !coin(rng)) continue;
            bool ok = std::all_of(clique.begin(), clique.end(), [&](Vertex c) { return b.adjacent(c, u); });
            if (ok) clique.push_back(u);
        }
        if (coin(rng) || v == 1) {
            for (Vertex c : clique) b.add_undirected(v, c);
        }
    }
    return b.build();
}

inline bool acyclic_naive(const MixedGraph& g) {
    const std::size_t n = g.size();
    std::vector<int> state(n, 0);
    std::function<bool(Vertex)> dfs = [&](Vertex v) {
        state[v] = 1;
        for (Vertex w = 0; w < n; ++w) {
            if (!g.directed(v, w)) continue;
            if (state[w] == 1) return false;
            if (state[w] == 0 && !dfs(w)) return false;
        }
        state[v] = 2;
        return true;
    };
    for (Vertex v = 0; v < n; ++v) {
        if (state[v] == 0 && !dfs(v)) return false;
    }
    return true;
}

inline std::set<std::tuple<Vertex, Vertex, Vertex>> v_structures(const MixedGraph& dag) {
    std::set<std::tuple<Vertex, Vertex, Vertex>> out;
    const std::size_t n = dag.size();
    for (Vertex c = 0; c < n; ++c) {
        for (Vertex a = 0; a < n; ++a) {
            for (Vertex b = a + 1; b < n; ++b) {
                if (dag.directed(a, c) && dag.directed(b, c) && !dag.adjacent(a, b)) out.emplace(a, c, b);
            }
        }
    }
    return out;
}

inline bool naive_ancestor(const MixedGraph& dag, Vertex a, Vertex b) {
    if (a == b) return false;
    std::vector<char> seen(dag.size(), 0);
    std::vector<Vertex> stack{a};
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        for (Vertex w = 0; w < dag.size(); ++w) {
            if (!dag.directed(v, w) || seen[w]) continue;
            if (w == b) return true;
            seen[w] = 1;
            stack.push_back(w);
        }
    }
    return false;
}

/// Every DAG with the skeleton of g that is acyclic, keeps g's directed edges and has
/// the given v-structures. Exponential in the number of edges.
inline std::vector<MixedGraph> brute_members(const MixedGraph& g,
                                             const std::set<std::tuple<Vertex, Vertex, Vertex>>& vs) {
    std::vector<Edge> und = g.undirected_edges();
    std::vector<MixedGraph> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << und.size()); ++mask) {
        GraphBuilder b(g);
        for (std::size_t k = 0; k < und.size(); ++k) {
            auto [i, j] = und[k];
            if (mask >> k & 1) b.orient(j, i);
            else b.orient(i, j);
        }
        auto d = b.build();
        if (acyclic_naive(d) && v_structures(d) == vs) out.push_back(std::move(d));
    }
    return out;
}

/// Equivalence class of a DAG by the skeleton / v-structure criterion.
inline std::vector<MixedGraph> brute_class(const MixedGraph& dag) {
    GraphBuilder sk(dag.size());
    for (auto [i, j] : dag.directed_edges()) sk.add_undirected(i, j);
    return brute_members(sk.build(), v_structures(dag));
}

/// Edge directed iff every member agrees on its direction.
inline MixedGraph brute_cpdag(const std::vector<MixedGraph>& members) {
    const auto& first = members.front();
    GraphBuilder b(first.size(), first.labels());
    for (auto [i, j] : first.directed_edges()) {
        bool same = std::all_of(members.begin(), members.end(), [&](const MixedGraph& m) { return m.directed(i, j); });
        if (same) b.add_directed(i, j);
        else b.add_undirected(i, j);
    }
    return b.build();
}

/// d-separation by enumerating every simple path of the skeleton.
inline bool brute_d_separated(const MixedGraph& dag, Vertex x, Vertex y, const VertexSet& z) {
    const std::size_t n = dag.size();
    std::vector<char> in_z(n, 0);
    for (Vertex v : z) in_z[v] = 1;
    auto opens = [&](Vertex c) {
        if (in_z[c]) return true;
        for (Vertex v : z) {
            if (naive_ancestor(dag, c, v)) return true;
        }
        return false;
    };
    std::vector<char> on(n, 0);
    Path path{x};
    on[x] = 1;
    std::function<bool()> active_path = [&]() {
        Vertex tail = path.back();
        for (Vertex w = 0; w < n; ++w) {
            if (!dag.adjacent(tail, w) || on[w]) continue;
            path.push_back(w);
            bool ok = true;
            if (path.size() >= 3) {
                Vertex a = path[path.size() - 3], m = path[path.size() - 2];
                bool collider = dag.directed(a, m) && dag.directed(w, m);
                ok = collider ? opens(m) : !in_z[m];
            }
            if (ok) {
                if (w == y) return true;
                on[w] = 1;
                if (active_path()) return true;
                on[w] = 0;
            }
            path.pop_back();
        }
        return false;
    };
    return !active_path();
}

inline std::vector<VertexSet> brute_maximal_cliques(const MixedGraph& ug) {
    const std::size_t n = ug.size();
    std::vector<std::uint32_t> cliques;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        bool complete = true;
        for (Vertex a = 0; a < n && complete; ++a) {
            for (Vertex b = a + 1; b < n && complete; ++b) {
                if ((mask >> a & 1) && (mask >> b & 1) && !ug.adjacent(a, b)) complete = false;
            }
        }
        if (complete) cliques.push_back(mask);
    }
    std::vector<VertexSet> out;
    for (auto c : cliques) {
        bool maximal = std::none_of(cliques.begin(), cliques.end(), [&](std::uint32_t d) { return d != c && (d & c) == c; });
        if (!maximal) continue;
        VertexSet s;
        for (Vertex v = 0; v < n; ++v) {
            if (c >> v & 1) s.push_back(v);
        }
        out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Neighbours of x that start a chordless path from x to some member of z.
inline VertexSet brute_critical_set(const MixedGraph& ug, Vertex x, const VertexSet& z) {
    const std::size_t n = ug.size();
    std::set<Vertex> out;
    std::vector<char> on(n, 0);
    Path path{x};
    on[x] = 1;
    std::function<void()> walk = [&]() {
        Vertex tail = path.back();
        for (Vertex w = 0; w < n; ++w) {
            if (!ug.undirected(tail, w) || on[w]) continue;
            bool chord = false;
            for (std::size_t i = 0; i + 1 < path.size(); ++i) chord = chord || ug.adjacent(path[i], w);
            if (chord) continue;
            path.push_back(w);
            on[w] = 1;
            if (contains(z, w)) out.insert(path[1]);
            walk();
            on[w] = 0;
            path.pop_back();
        }
    };
    walk();
    return VertexSet(out.begin(), out.end());
}

/// Meek's four rules applied one edge at a time by scanning every vertex tuple.
inline MixedGraph naive_meek(const MixedGraph& g) {
    GraphBuilder b(g);
    const std::size_t n = g.size();
    for (bool changed = true; changed;) {
        changed = false;
        for (Vertex a = 0; a < n; ++a) {
            for (Vertex c = 0; c < n; ++c) {
                if (!b.undirected(a, c)) continue;
                bool orient = false;
                for (Vertex p = 0; p < n && !orient; ++p) {
                    // R1: p -> a -- c, p not adjacent c
                    if (p != c && b.directed(p, a) && !b.adjacent(p, c)) orient = true;
                    // R2: a -> p -> c
                    if (b.directed(a, p) && b.directed(p, c)) orient = true;
                }
                for (Vertex p = 0; p < n && !orient; ++p) {
                    for (Vertex q = p + 1; q < n && !orient; ++q) {
                        // R3: a -- p -> c, a -- q -> c, p not adjacent q
                        if (b.undirected(a, p) && b.undirected(a, q) && b.directed(p, c) && b.directed(q, c) &&
                            !b.adjacent(p, q)) {
                            orient = true;
                        }
                    }
                }
                for (Vertex p = 0; p < n && !orient; ++p) {
                    for (Vertex q = 0; q < n && !orient; ++q) {
                        // R4: a - q, q -> p -> c, a adjacent p, q not adjacent c
                        if (p == q || p == c || q == c || p == a || q == a) continue;
                        if (b.adjacent(a, q) && b.adjacent(a, p) && b.directed(q, p) && b.directed(p, c) &&
                            !b.adjacent(q, c) && b.undirected(a, q)) {
                            orient = true;
                        }
                    }
                }
                if (orient) {
                    b.orient(a, c);
                    changed = true;
                }
            }
        }
    }
    return b.build();
}

/// Causal relation of x to y read off an explicit list of member DAGs.
inline CausalRelation brute_relation(const std::vector<MixedGraph>& members, const MixedGraph& cpdag, Vertex x,
                                     Vertex y) {
    std::size_t causes = 0;
    for (const auto& m : members) causes += naive_ancestor(m, x, y) ? 1 : 0;
    if (causes == 0) return CausalRelation::DefiniteNonCause;
    if (causes < members.size()) return CausalRelation::PossibleCause;
    return naive_ancestor(directed_part(cpdag), x, y) ? CausalRelation::ExplicitCause : CausalRelation::ImplicitCause;
}

inline MixedGraph asia_dag() {
    // Smok, Lung, Bronc, Tub, Either, Xray, Dysp, Hosp
    std::vector<std::string> labels{"Smok", "Lung", "Bronc", "Tub", "Either", "Xray", "Dysp", "Hosp"};
    std::vector<Edge> directed{{0, 1}, {0, 2}, {3, 4}, {1, 4}, {4, 5}, {4, 6}, {2, 6}, {3, 7}, {1, 7}};
    return MixedGraph::from_edges(8, directed, {}, labels);
}

/// CPDAG with a single chain component {X, A, B, D, E, F, G} and directed edges into Y.
inline MixedGraph example_two_cpdag() {
    std::vector<std::string> labels{"X", "A", "B", "D", "E", "F", "G", "Y"};
    enum { X, A, B, D, E, F, G, Y };
    std::vector<Edge> undirected{{X, A}, {X, B}, {X, D}, {X, G}, {A, G}, {B, D}, {B, G}, {D, G}, {B, E}, {G, F}};
    std::vector<Edge> directed{{E, Y}, {D, Y}, {F, Y}};
    return MixedGraph::from_edges(8, directed, undirected, labels);
}

}  // namespace itc::ref

#endif  // ITC_TESTS_SUPPORT_HPP
