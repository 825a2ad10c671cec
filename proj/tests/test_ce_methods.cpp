#include <gtest/gtest.h>

#include <boost/math/distributions/students_t.hpp>

#include "support.hpp"

using namespace itc;
using itc::ref::Prng;

namespace {

Dataset noise(std::size_t rows, std::size_t cols, Prng& rng) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = z(rng);
    }
    return Dataset(std::move(m), {});
}

EffectEstimate fake(double theta, double p) { return EffectEstimate{theta, p, {}, true}; }

}  // namespace

TEST(Regression, SimpleSlopeMatchesClosedForm) {
    Prng rng(1);
    auto data = noise(40, 2, rng);
    Eigen::MatrixXd v = data.values();
    v.col(1) += 0.3 * v.col(0);
    Dataset d(v, {});
    Eigen::VectorXd x = v.col(0).array() - v.col(0).mean();
    Eigen::VectorXd y = v.col(1).array() - v.col(1).mean();
    double slope = x.dot(y) / x.squaredNorm();
    double rss = (y - slope * x).squaredNorm();
    double se = std::sqrt(rss / 38.0 / x.squaredNorm());
    boost::math::students_t t(38.0);
    double p = 2 * boost::math::cdf(boost::math::complement(t, std::abs(slope / se)));

    auto est = estimate_effect(d, 0, 1, {});
    EXPECT_NEAR(est.theta, slope, 1e-12);
    EXPECT_NEAR(est.p_value, p, 1e-10);
    EXPECT_TRUE(est.tested);
}

TEST(Regression, AdjustmentMatchesResidualRegression) {
    Prng rng(2);
    auto base = noise(80, 4, rng);
    Eigen::MatrixXd v = base.values();
    v.col(0) += 0.5 * v.col(2);
    v.col(1) += 0.7 * v.col(0) - 0.4 * v.col(2) + 0.2 * v.col(3);
    Dataset d(v, {});
    // partial out intercept, 2 and 3 from x and y (Frisch-Waugh)
    Eigen::MatrixXd z(80, 3);
    z.col(0).setOnes();
    z.col(1) = v.col(2);
    z.col(2) = v.col(3);
    auto resid = [&](const Eigen::VectorXd& col) -> Eigen::VectorXd {
        Eigen::VectorXd coef = (z.transpose() * z).inverse() * (z.transpose() * col);
        return col - z * coef;
    };
    Eigen::VectorXd rx = resid(v.col(0)), ry = resid(v.col(1));
    EXPECT_NEAR(estimate_effect(d, 0, 1, {2, 3}).theta, rx.dot(ry) / rx.squaredNorm(), 1e-10);
}

TEST(Regression, FalseRejectionRateIsCalibrated) {
    Prng rng(3);
    int rejections = 0;
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) {
        auto d = noise(30, 3, rng);
        if (estimate_effect(d, 0, 1, {2}).p_value <= 0.05) ++rejections;
    }
    double rate = double(rejections) / trials;
    EXPECT_GT(rate, 0.035);
    EXPECT_LT(rate, 0.065);
}

TEST(Regression, RankDeficiencyNamesColumns) {
    Prng rng(4);
    Eigen::MatrixXd v = noise(30, 3, rng).values();
    v.col(2) = 2.0 * v.col(0);
    Dataset d(v, {"a", "b", "c"});
    try {
        estimate_effect(d, 0, 1, {2});
        FAIL();
    } catch (const NumericalError& e) {
        std::string msg = e.what();
        EXPECT_TRUE(msg.find("a") != std::string::npos || msg.find("c") != std::string::npos) << msg;
    }
    EXPECT_THROW(estimate_effect(d, 0, 0, {}), InputError);
    EXPECT_THROW(estimate_effect(d, 0, 1, {1}), InputError);
    EXPECT_THROW(estimate_effect(noise(3, 3, rng), 0, 1, {2}), InputError);
}

TEST(Population, RecoversEdgeWeightWithParentAdjustment) {
    Dag dag(MixedGraph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}}, {}));
    WeightedDag wg{dag, {{{0, 1}, 1.2}, {{1, 2}, 0.9}, {{0, 2}, -1.1}}};
    PopulationEstimator est(analytic_covariance(wg));
    EXPECT_NEAR(est.estimate(1, 2, {0}).theta, 0.9, 1e-12);
    EXPECT_NEAR(est.estimate(0, 2, {}).theta, -1.1 + 1.2 * 0.9, 1e-12);
}

TEST(Decide, AllTestsBonferroniAndMinMax) {
    CeVariant m1{CeMethod::M1, false, false};
    CeVariant m1b{CeMethod::M1, false, true};
    CeVariant m2{CeMethod::M2, false, false};
    CeResult r;
    r.effects = {fake(0.5, 0.0004), fake(0.7, 0.0008)};
    EXPECT_EQ(detail::ce_decide(r, m1, 0.001).relation, CoarseRelation::DefiniteCause);
    EXPECT_EQ(detail::ce_decide(r, m1b, 0.001).relation, CoarseRelation::PossibleCause);
    r.effects = {fake(0.5, 0.0004), fake(0.01, 0.5), fake(2.0, 0.2)};
    EXPECT_EQ(detail::ce_decide(r, m1, 0.001).relation, CoarseRelation::PossibleCause);
    // min |theta| = 0.01 (p 0.5), max |theta| = 2.0 (p 0.2): no significant extreme
    EXPECT_EQ(detail::ce_decide(r, m2, 0.001).relation, CoarseRelation::DefiniteNonCause);
    EXPECT_EQ(detail::ce_decide(r, m2, 0.001).tests, 2u);
    r.effects = {fake(-3.0, 1e-6), fake(0.2, 0.9)};
    EXPECT_EQ(detail::ce_decide(r, m2, 0.001).relation, CoarseRelation::PossibleCause);
    r.effects = {fake(0.3, 0.001)};
    EXPECT_EQ(detail::ce_decide(r, m1, 0.001).relation, CoarseRelation::DefiniteCause);
}

TEST(Decide, TargetInAdjustmentSetIsZeroEffect) {
    auto g = ref::asia_dag();
    auto c = dag_to_cpdag(Dag(g));
    Prng rng(5);
    auto data = noise(50, 8, rng);
    RegressionEstimator est(data);
    const Vertex smok = *g.find("Smok"), lung = *g.find("Lung");
    auto r = ce_classify(c, est, lung, smok, 0.001, CeVariant{});
    ASSERT_EQ(r.effects.size(), 2u);
    // Lung's extensions: {} and {Smok}; the second adjusts for the target itself
    EXPECT_FALSE(r.effects[1].tested);
    EXPECT_EQ(r.effects[1].theta, 0.0);
    EXPECT_EQ(r.tests, 1u);
}

TEST(BPossible, MatchesMembersWithFixedParents) {
    Prng rng(6);
    for (int t = 0; t < 120; ++t) {
        std::size_t n = 3 + t % 5;
        auto d = ref::random_dag(n, 0.5, rng);
        auto c = dag_to_cpdag(d);
        auto members = enumerate_equivalent_dags(c);
        for (Vertex x = 0; x < n; ++x) {
            for (const auto& q : valid_parent_extensions(c, x)) {
                auto h = meek_closure(orient_locally(c.graph(), x, q));
                const auto pa = set_union(c.graph().parents(x), q);
                for (Vertex y = 0; y < n; ++y) {
                    if (y == x) continue;
                    bool any = false;
                    for (const auto& m : members) {
                        if (m.parents(x) == pa && ref::naive_ancestor(m.graph(), x, y)) any = true;
                    }
                    EXPECT_EQ(b_possible_ancestor(h, x, y), any) << format_graph(h) << x << "->" << y;
                }
            }
        }
    }
}

TEST(Classify, PopulationEffectsRecoverTruth) {
    Rng rng(7, 0);
    int checked = 0;
    for (int t = 0; t < 40; ++t) {
        auto dag = sample_er_dag(7, 2.5, rng);
        auto wg = assign_weights(dag, WeightMode::Mixed, rng);
        if (!numerically_faithful(wg, 1e-8)) continue;
        ++checked;
        auto c = dag_to_cpdag(dag);
        PopulationEstimator est(analytic_covariance(wg));
        for (const char* name : {"m1", "m2", "m3", "m4", "hybrid-m1", "hybrid-m2"}) {
            auto variant = parse_ce_variant(name);
            for (Vertex x = 0; x < 7; ++x) {
                for (Vertex y = 0; y < 7; ++y) {
                    if (x == y) continue;
                    auto truth = coarsen(classify_graphical(c, x, y));
                    EXPECT_EQ(ce_classify(c, est, x, y, 0.001, variant).relation, truth) << name << " " << x << "," << y;
                    if (!variant.hybrid && !uses_non_ancestors(variant.method)) {
                        EXPECT_EQ(ce_classify(local_structure(c, x), est, y, 0.001, variant).relation, truth);
                    }
                }
            }
        }
    }
    EXPECT_GT(checked, 30);
}

TEST(Variants, Parsing) {
    EXPECT_EQ(parse_ce_variant("hybrid-m2").method, CeMethod::M2);
    EXPECT_TRUE(parse_ce_variant("hybrid-m2").hybrid);
    EXPECT_TRUE(parse_ce_variant("m1", true).bonferroni);
    EXPECT_THROW(parse_ce_variant("hybrid-m3"), InputError);
    EXPECT_THROW(parse_ce_variant("m5"), InputError);
    auto c = dag_to_cpdag(Dag(ref::asia_dag()));
    Prng rng(8);
    auto data = noise(50, 8, rng);
    RegressionEstimator est(data);
    EXPECT_THROW(ce_classify(local_structure(c, 0), est, 1, 0.001, parse_ce_variant("m3")), InputError);
    EXPECT_THROW(ce_classify(c, noise(50, 7, rng), 0, 1, 0.001, CeVariant{}), InputError);
}
