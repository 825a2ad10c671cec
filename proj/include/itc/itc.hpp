#ifndef ITC_ITC_HPP
#define ITC_ITC_HPP

#include <array>
#include <deque>
#include <string_view>
#include <unordered_set>

#include "itc/equivalence.hpp"
#include "itc/oracle.hpp"

namespace itc {

/// Causal relation of an ordered pair (x, y) across a Markov equivalence class.
enum class CausalRelation {
    ExplicitCause,     // directed path x -> ... -> y in the CPDAG
    ImplicitCause,     // cause in every member DAG, no common causal path
    PossibleCause,     // cause in some but not all members
    DefiniteNonCause,  // cause in no member
};

inline constexpr std::array kAllRelations{CausalRelation::ExplicitCause, CausalRelation::ImplicitCause,
                                          CausalRelation::PossibleCause, CausalRelation::DefiniteNonCause};

inline std::string_view to_string(CausalRelation r) {
    switch (r) {
        case CausalRelation::ExplicitCause: return "explicit-cause";
        case CausalRelation::ImplicitCause: return "implicit-cause";
        case CausalRelation::PossibleCause: return "possible-cause";
        case CausalRelation::DefiniteNonCause: return "definite-non-cause";
    }
    return "?";
}

inline bool is_definite_cause(CausalRelation r) {
    return r == CausalRelation::ExplicitCause || r == CausalRelation::ImplicitCause;
}

/// Three-way view used when explicit and implicit causes are merged. The numeric
/// values are the row/column indices of the evaluation confusion matrices.
enum class CoarseRelation { DefiniteNonCause = 0, PossibleCause = 1, DefiniteCause = 2 };

inline std::string_view to_string(CoarseRelation r) {
    switch (r) {
        case CoarseRelation::DefiniteNonCause: return "definite-non-cause";
        case CoarseRelation::PossibleCause: return "possible-cause";
        case CoarseRelation::DefiniteCause: return "definite-cause";
    }
    return "?";
}

inline CoarseRelation coarsen(CausalRelation r) {
    switch (r) {
        case CausalRelation::ExplicitCause:
        case CausalRelation::ImplicitCause: return CoarseRelation::DefiniteCause;
        case CausalRelation::PossibleCause: return CoarseRelation::PossibleCause;
        case CausalRelation::DefiniteNonCause: return CoarseRelation::DefiniteNonCause;
    }
    return CoarseRelation::DefiniteNonCause;
}

namespace detail {

// Breadth-first search over triples (alpha, psi, tau): a chordless path that starts
// x - alpha and currently ends with psi - tau. A triple is expanded at most once and
// alpha stops being expanded once it reaches z.
inline VertexSet critical_set_search(const MixedGraph& gu, Vertex x, const std::vector<char>& in_z) {
    const std::uint64_t n = gu.size();
    auto key = [n](Vertex a, Vertex p, Vertex t) { return (static_cast<std::uint64_t>(a) * n + p) * n + t; };

    struct Triple {
        Vertex alpha, psi, tau;
    };
    std::deque<Triple> waiting;
    std::unordered_set<std::uint64_t> seen;  // visited or queued
    std::vector<char> found(n, 0);
    VertexSet out;

    for (Vertex alpha : gu.siblings(x)) {
        waiting.push_back({alpha, x, alpha});
        seen.insert(key(alpha, x, alpha));
    }
    while (!waiting.empty()) {
        auto [alpha, psi, tau] = waiting.front();
        waiting.pop_front();
        if (found[alpha]) continue;  // removed from the queue when alpha was found
        if (in_z[tau]) {
            found[alpha] = 1;
            out.push_back(alpha);
            continue;
        }
        for (Vertex beta : gu.siblings(tau)) {
            if (beta == psi || gu.adjacent(beta, psi)) continue;
            if (seen.insert(key(alpha, tau, beta)).second) waiting.push_back({alpha, tau, beta});
        }
    }
    return make_set(std::move(out));
}

}  // namespace detail

/// Neighbours of x lying on a chordless undirected path from x to some member of z
/// in the chordal graph gu.
inline VertexSet critical_set(const MixedGraph& gu, Vertex x, const VertexSet& z) {
    gu.check_vertex(x);
    if (z.empty()) throw InputError("critical_set: target set is empty");
    if (contains(z, x)) throw InputError("critical_set: x is in the target set");
    if (!is_chordal(gu)) throw InputError("critical_set: graph is not chordal");
    std::vector<char> in_z(gu.size(), 0);
    for (Vertex v : z) {
        gu.check_vertex(v);
        in_z[v] = 1;
    }
    return detail::critical_set_search(gu, x, in_z);
}

/// Critical set of x with respect to y, factorised through y's ancestors inside x's
/// chain component. Requires that x is not an explicit cause of y.
inline VertexSet critical_set_pairwise(const Cpdag& g, Vertex x, Vertex y) {
    g.graph().check_vertex(x);
    g.graph().check_vertex(y);
    if (x == y) throw InputError("critical_set_pairwise: x == y");
    std::vector<char> in_z(g.size(), 0);
    if (g.same_component(x, y)) {
        in_z[y] = 1;
        return detail::critical_set_search(g.undirected(), x, in_z);
    }
    auto an_y = ancestors(g.graph(), y);
    if (contains(an_y, x)) throw ContractError("critical_set_pairwise: x is an explicit cause of y");
    bool any = false;
    for (Vertex v : set_intersection(an_y, g.component(x))) {
        in_z[v] = 1;
        any = true;
    }
    if (!any) return {};
    return detail::critical_set_search(g.undirected(), x, in_z);
}

namespace detail {

inline CausalRelation classify_given_ancestors(const Cpdag& g, Vertex x, const VertexSet& an_y,
                                               std::vector<char>& in_z) {
    if (contains(an_y, x)) return CausalRelation::ExplicitCause;
    bool any = false;
    for (Vertex v : g.component(x)) {
        in_z[v] = contains(an_y, v) ? 1 : 0;
        any = any || in_z[v];
    }
    VertexSet crit;
    if (any) crit = critical_set_search(g.undirected(), x, in_z);
    for (Vertex v : g.component(x)) in_z[v] = 0;
    if (crit.empty()) return CausalRelation::DefiniteNonCause;
    if (is_complete(g.undirected(), crit)) return CausalRelation::PossibleCause;
    return CausalRelation::ImplicitCause;
}

}  // namespace detail

/// Global classification from the full CPDAG.
inline CausalRelation classify_graphical(const Cpdag& g, Vertex x, Vertex y) {
    g.graph().check_vertex(x);
    g.graph().check_vertex(y);
    if (x == y) throw InputError("classify_graphical: treatment equals target");
    if (g.same_component(x, y)) return CausalRelation::PossibleCause;
    std::vector<char> in_z(g.size(), 0);
    return detail::classify_given_ancestors(g, x, ancestors(g.graph(), y), in_z);
}

/// classify_graphical for every ordered pair; entry [x][y], diagonal unused.
inline std::vector<std::vector<CausalRelation>> classify_graphical_all(const Cpdag& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<CausalRelation>> out(n, std::vector<CausalRelation>(n, CausalRelation::DefiniteNonCause));
    std::vector<char> in_z(n, 0);
    for (Vertex y = 0; y < n; ++y) {
        const auto an_y = ancestors(g.graph(), y);
        for (Vertex x = 0; x < n; ++x) {
            if (x == y) continue;
            out[x][y] = g.same_component(x, y) ? CausalRelation::PossibleCause
                                               : detail::classify_given_ancestors(g, x, an_y, in_z);
        }
    }
    return out;
}

struct QueryRecord {
    CiQuery query;
    bool independent = false;
};

/// Local classification from pa(x), the sibling subgraph and an independence oracle.
/// Issues at most (number of maximal cliques of the sibling subgraph) + 2 queries.
inline CausalRelation classify_local(const LocalStructure& ls, const IndependenceOracle& oracle, Vertex y,
                                     std::vector<QueryRecord>* transcript = nullptr) {
    if (y == ls.x) throw InputError("classify_local: treatment equals target");
    auto ask = [&](VertexSet z) {
        CiQuery q{ls.x, y, std::move(z)};
        bool ind = oracle.independent(q);
        if (transcript) transcript->push_back({q, ind});
        return ind;
    };

    if (ask(ls.parents)) return CausalRelation::DefiniteNonCause;
    if (!ask(set_union(ls.parents, ls.siblings))) return CausalRelation::ExplicitCause;
    for (const auto& local : maximal_cliques(ls.sibling_graph)) {
        VertexSet m;
        for (Vertex i : local) m.push_back(ls.siblings[i]);
        if (ask(set_union(ls.parents, m))) return CausalRelation::PossibleCause;
    }
    return CausalRelation::ImplicitCause;
}

/// Reference classifier: checks the ancestor relation in every member DAG.
inline CausalRelation classify_by_enumeration(const Cpdag& g, Vertex x, Vertex y,
                                              std::uint64_t cap = kDefaultEnumerationCap) {
    g.graph().check_vertex(x);
    g.graph().check_vertex(y);
    if (x == y) throw InputError("classify_by_enumeration: treatment equals target");
    std::size_t members = 0, causes = 0;
    for_each_equivalent_dag(
        g,
        [&](const Dag& d) {
            ++members;
            if (contains(ancestors(d.graph(), y), x)) ++causes;
        },
        cap);
    if (causes == 0) return CausalRelation::DefiniteNonCause;
    if (causes < members) return CausalRelation::PossibleCause;
    return contains(ancestors(g.graph(), y), x) ? CausalRelation::ExplicitCause : CausalRelation::ImplicitCause;
}

/// classify_by_enumeration for every ordered pair with a single pass over the class.
inline std::vector<std::vector<CausalRelation>> classify_all_by_enumeration(const Cpdag& g,
                                                                            std::uint64_t cap = kDefaultEnumerationCap) {
    const std::size_t n = g.size();
    std::vector<std::vector<std::size_t>> causes(n, std::vector<std::size_t>(n, 0));
    std::size_t members = 0;
    for_each_equivalent_dag(
        g,
        [&](const Dag& d) {
            ++members;
            for (Vertex y = 0; y < n; ++y) {
                for (Vertex x : ancestors(d.graph(), y)) ++causes[x][y];
            }
        },
        cap);
    std::vector<std::vector<CausalRelation>> out(n, std::vector<CausalRelation>(n, CausalRelation::DefiniteNonCause));
    for (Vertex y = 0; y < n; ++y) {
        const auto an_y = ancestors(g.graph(), y);
        for (Vertex x = 0; x < n; ++x) {
            if (x == y || causes[x][y] == 0) continue;
            if (causes[x][y] < members) {
                out[x][y] = CausalRelation::PossibleCause;
            } else {
                out[x][y] = contains(an_y, x) ? CausalRelation::ExplicitCause : CausalRelation::ImplicitCause;
            }
        }
    }
    return out;
}

}  // namespace itc

#endif  // ITC_ITC_HPP
