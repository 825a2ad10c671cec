#ifndef ITC_CE_METHODS_HPP
#define ITC_CE_METHODS_HPP

#include <cmath>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "itc/itc.hpp"

namespace itc {

/// Coefficient of x in the regression of y on {x} + adjustment set, with its p-value.
struct EffectEstimate {
    double theta = 0.0;
    double p_value = 1.0;
    VertexSet adjustment_set;
    bool tested = false;  // false when the effect was set to zero without a regression
};

/// OLS of y on an intercept, x and s; two-sided t-test on the x coefficient.
inline EffectEstimate estimate_effect(const Dataset& data, Vertex x, Vertex y, const VertexSet& s) {
    const std::size_t p = data.variables();
    if (x >= p || y >= p) throw InputError("estimate_effect: vertex outside the dataset");
    if (x == y) throw InputError("estimate_effect: treatment equals target");
    if (contains(s, x) || contains(s, y)) throw InputError("estimate_effect: adjustment set contains x or y");
    for (Vertex v : s) {
        if (v >= p) throw InputError("estimate_effect: adjustment vertex outside the dataset");
    }
    const std::size_t n = data.samples();
    if (n <= s.size() + 2) {
        throw InputError("estimate_effect: " + std::to_string(n) + " samples are too few for an adjustment set of size " +
                         std::to_string(s.size()));
    }

    const auto rows = static_cast<Eigen::Index>(n);
    const auto k = static_cast<Eigen::Index>(s.size() + 2);
    const auto& v = data.values();
    Eigen::MatrixXd design(rows, k);
    design.col(0).setOnes();
    design.col(1) = v.col(x);
    for (std::size_t i = 0; i < s.size(); ++i) design.col(static_cast<Eigen::Index>(i + 2)) = v.col(s[i]);
    Eigen::VectorXd target = v.col(y);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < k) {
        std::string cols;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index i = qr.rank(); i < k; ++i) {
            Eigen::Index c = perm(i);
            std::string name = c == 0 ? "intercept" : data.labels()[c == 1 ? x : s[c - 2]];
            cols += (cols.empty() ? "" : ", ") + name;
        }
        throw NumericalError("estimate_effect: rank-deficient design, collinear column(s): " + cols);
    }
    Eigen::VectorXd beta = qr.solve(target);
    const double dof = static_cast<double>(n) - static_cast<double>(k);
    const double rss = (target - design * beta).squaredNorm();
    const double sigma2 = rss / dof;
    Eigen::MatrixXd xtx_inv = (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    const double se = std::sqrt(sigma2 * xtx_inv(1, 1));
    if (!(se > 0) || !std::isfinite(se)) throw DegenerateDataError("estimate_effect: zero residual variance");

    EffectEstimate est;
    est.theta = beta(1);
    est.adjustment_set = s;
    est.tested = true;
    const double t = est.theta / se;
    boost::math::students_t dist(dof);
    est.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
    return est;
}

/// Produces an effect estimate for x on y adjusting for s.
class EffectEstimator {
public:
    virtual ~EffectEstimator() = default;
    virtual EffectEstimate estimate(Vertex x, Vertex y, const VertexSet& s) const = 0;
};

class RegressionEstimator : public EffectEstimator {
public:
    explicit RegressionEstimator(const Dataset& data) : data_(&data) {}
    EffectEstimate estimate(Vertex x, Vertex y, const VertexSet& s) const override {
        return estimate_effect(*data_, x, y, s);
    }

private:
    const Dataset* data_;
};

/// Exact regression coefficient from a known covariance; p = 1 when |theta| <= tol,
/// else 0. Emulates the large-sample limit.
class PopulationEstimator : public EffectEstimator {
public:
    explicit PopulationEstimator(GaussianCovariance cov, double tol = 1e-9) : cov_(std::move(cov)), tol_(tol) {}

    EffectEstimate estimate(Vertex x, Vertex y, const VertexSet& s) const override {
        if (contains(s, x) || contains(s, y)) throw InputError("PopulationEstimator: adjustment set contains x or y");
        std::vector<Vertex> idx{x};
        idx.insert(idx.end(), s.begin(), s.end());
        const auto k = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd a(k, k);
        Eigen::VectorXd b(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            b(i) = cov_(idx[i], y);
            for (Eigen::Index j = 0; j < k; ++j) a(i, j) = cov_(idx[i], idx[j]);
        }
        Eigen::VectorXd coef = a.ldlt().solve(b);
        EffectEstimate est;
        est.theta = coef(0);
        est.p_value = std::abs(est.theta) <= tol_ ? 1.0 : 0.0;
        est.adjustment_set = s;
        est.tested = true;
        return est;
    }

private:
    GaussianCovariance cov_;
    double tol_;
};

/// True iff some path from x to y has no edge and no chord pointing towards x
/// (a b-possibly causal path). g is expected to be closed under Meek's rules.
inline bool b_possible_ancestor(const MixedGraph& g, Vertex x, Vertex y) {
    g.check_vertex(x);
    g.check_vertex(y);
    if (x == y) return true;
    const std::size_t n = g.size();

    // Vertices that can still reach y along edges that do not point backwards.
    std::vector<char> useful(n, 0);
    for (Vertex v : detail::reach(g, y, [&](Vertex v) { return set_union(g.parents(v), g.siblings(v)); })) useful[v] = 1;
    if (!useful[x]) return false;

    std::vector<char> on_path(n, 0);
    Path path{x};
    on_path[x] = 1;
    auto extend = [&](auto&& self) -> bool {
        const Vertex tail = path.back();
        for (Vertex w : g.adjacent(tail)) {
            if (on_path[w] || !useful[w] || g.directed(w, tail)) continue;
            bool chord_back = false;
            for (std::size_t i = 0; i + 1 < path.size() && !chord_back; ++i) {
                chord_back = g.directed(w, path[i]);
            }
            if (chord_back) continue;
            if (w == y) return true;
            path.push_back(w);
            on_path[w] = 1;
            if (self(self)) return true;
            on_path[w] = 0;
            path.pop_back();
        }
        return false;
    };
    return extend(extend);
}

enum class CeMethod { M1, M2, M3, M4 };

/// One causal-effect-testing configuration. Bonferroni is ignored by the min/max
/// methods (M2, M4), which always test exactly two effects.
struct CeVariant {
    CeMethod method = CeMethod::M1;
    bool hybrid = false;
    bool bonferroni = false;
};

inline bool uses_min_max(CeMethod m) { return m == CeMethod::M2 || m == CeMethod::M4; }
inline bool uses_non_ancestors(CeMethod m) { return m == CeMethod::M3 || m == CeMethod::M4; }

inline CeVariant parse_ce_variant(std::string_view name, bool bonferroni = false) {
    CeVariant v;
    v.bonferroni = bonferroni;
    if (name.starts_with("hybrid-")) {
        v.hybrid = true;
        name.remove_prefix(7);
    }
    if (name == "m1") {
        v.method = CeMethod::M1;
    } else if (name == "m2") {
        v.method = CeMethod::M2;
    } else if (name == "m3" && !v.hybrid) {
        v.method = CeMethod::M3;
    } else if (name == "m4" && !v.hybrid) {
        v.method = CeMethod::M4;
    } else {
        throw InputError("unknown causal-effect variant '" + std::string(name) +
                         "' (expected m1|m2|m3|m4|hybrid-m1|hybrid-m2)");
    }
    return v;
}

struct CeResult {
    CoarseRelation relation = CoarseRelation::DefiniteNonCause;
    std::vector<EffectEstimate> effects;  // one per valid parent extension, in enumeration order
    std::size_t tests = 0;                // significance tests the decision used
};

namespace detail {

inline CeResult ce_decide(CeResult r, const CeVariant& variant, double alpha) {
    if (r.effects.empty()) {
        r.relation = CoarseRelation::DefiniteNonCause;
        return r;
    }
    if (uses_min_max(variant.method)) {
        std::size_t lo = 0, hi = 0;
        for (std::size_t i = 1; i < r.effects.size(); ++i) {
            if (std::abs(r.effects[i].theta) < std::abs(r.effects[lo].theta)) lo = i;
            if (std::abs(r.effects[i].theta) > std::abs(r.effects[hi].theta)) hi = i;
        }
        r.tests = (r.effects[lo].tested ? 1 : 0) + (hi != lo && r.effects[hi].tested ? 1 : 0);
        if (r.effects[lo].p_value <= alpha) {
            r.relation = CoarseRelation::DefiniteCause;
        } else if (r.effects[hi].p_value > alpha) {
            r.relation = CoarseRelation::DefiniteNonCause;
        } else {
            r.relation = CoarseRelation::PossibleCause;
        }
        return r;
    }

    for (const auto& e : r.effects) r.tests += e.tested ? 1 : 0;
    bool all_cause = true, all_none = true;
    for (const auto& e : r.effects) {
        double p = e.p_value;
        if (variant.bonferroni && e.tested) p = std::min(1.0, p * static_cast<double>(r.tests));
        all_cause = all_cause && p <= alpha;
        all_none = all_none && p > alpha;
    }
    r.relation = all_cause  ? CoarseRelation::DefiniteCause
                 : all_none ? CoarseRelation::DefiniteNonCause
                            : CoarseRelation::PossibleCause;
    return r;
}

inline EffectEstimate ce_estimate(const EffectEstimator& est, Vertex x, Vertex y, const VertexSet& s) {
    if (contains(s, y)) return EffectEstimate{0.0, 1.0, s, false};
    try {
        return est.estimate(x, y, s);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " [adjustment set " + set_to_string(s) + "]");
    } catch (const InputError& e) {
        throw InputError(std::string(e.what()) + " [adjustment set " + set_to_string(s) + "]");
    }
}

}  // namespace detail

/// Causal-effect-testing classification from the local structure alone (M1, M2).
inline CeResult ce_classify(const LocalStructure& ls, const EffectEstimator& est, Vertex y, double alpha,
                            const CeVariant& variant) {
    if (variant.hybrid || uses_non_ancestors(variant.method)) {
        throw InputError("ce_classify: M3, M4 and hybrid variants need the full CPDAG");
    }
    if (y == ls.x) throw InputError("ce_classify: treatment equals target");
    CeResult r;
    for (const auto& q : valid_parent_extensions(ls)) {
        r.effects.push_back(detail::ce_estimate(est, ls.x, y, set_union(ls.parents, q)));
    }
    return detail::ce_decide(std::move(r), variant, alpha);
}

/// Causal-effect-testing classification from the full CPDAG (all variants).
inline CeResult ce_classify(const Cpdag& g, const EffectEstimator& est, Vertex x, Vertex y, double alpha,
                            const CeVariant& variant) {
    g.graph().check_vertex(x);
    g.graph().check_vertex(y);
    if (x == y) throw InputError("ce_classify: treatment equals target");
    if (variant.hybrid && !contains(possible_descendants(g.graph(), x), y)) {
        return CeResult{CoarseRelation::DefiniteNonCause, {}, 0};
    }
    const auto ls = local_structure(g, x);
    CeResult r;
    for (const auto& q : valid_parent_extensions(ls)) {
        const auto s = set_union(ls.parents, q);
        if (uses_non_ancestors(variant.method)) {
            const auto h = meek_closure(orient_locally(g.graph(), x, q));
            if (!b_possible_ancestor(h, x, y)) {
                r.effects.push_back(EffectEstimate{0.0, 1.0, s, false});
                continue;
            }
        }
        r.effects.push_back(detail::ce_estimate(est, x, y, s));
    }
    return detail::ce_decide(std::move(r), variant, alpha);
}

inline CeResult ce_classify(const Cpdag& g, const Dataset& data, Vertex x, Vertex y, double alpha,
                            const CeVariant& variant) {
    if (data.variables() != g.size()) {
        throw InputError("dataset has " + std::to_string(data.variables()) + " columns but the graph has " +
                         std::to_string(g.size()) + " vertices");
    }
    return ce_classify(g, RegressionEstimator(data), x, y, alpha, variant);
}

}  // namespace itc

#endif  // ITC_CE_METHODS_HPP
