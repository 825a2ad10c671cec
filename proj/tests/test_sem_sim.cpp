#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace itc;

TEST(Philox, KnownAnswerForZeroKeyAndCounter) {
    Philox4x32 g(0, 0);
    EXPECT_EQ(g(), 0xe169c58d6627e8d5ull);
    EXPECT_EQ(g(), 0x9b00dbd8bc57ac4cull);
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
    Rng a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    for (int i = 0; i < 10; ++i) {
        auto va = a();
        EXPECT_EQ(va, b());
        EXPECT_NE(va, c());
        EXPECT_NE(va, d());
    }
    Rng e(42, 3);
    e.discard(5);
    Rng f(42, 3);
    for (int i = 0; i < 5; ++i) f();
    EXPECT_EQ(e(), f());
}

TEST(ErDag, ExpectedEdgeCountAndValidation) {
    Rng rng(1, 0);
    const std::size_t n = 30;
    const double d = 2.5;
    double edges = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) edges += static_cast<double>(sample_er_dag(n, d, rng).graph().num_directed());
    // E[edges] = n d / 2, standard error about sqrt(n d / 2) / sqrt(trials)
    EXPECT_NEAR(edges / trials, n * d / 2, 0.3);
    EXPECT_THROW(sample_er_dag(1, 0.5, rng), InputError);
    EXPECT_THROW(sample_er_dag(10, 0.0, rng), InputError);
    EXPECT_THROW(sample_er_dag(10, 9.0, rng), InputError);
}

TEST(Weights, RangeAndSigns) {
    Rng rng(2, 0);
    auto dag = sample_er_dag(40, 4.0, rng);
    auto pos = assign_weights(dag, WeightMode::Positive, rng);
    for (const auto& [e, w] : pos.weights) {
        EXPECT_GE(w, 0.8);
        EXPECT_LE(w, 1.6);
    }
    auto mixed = assign_weights(dag, WeightMode::Mixed, rng);
    std::size_t negative = 0;
    for (const auto& [e, w] : mixed.weights) {
        EXPECT_GE(std::abs(w), 0.8);
        EXPECT_LE(std::abs(w), 1.6);
        negative += w < 0 ? 1 : 0;
    }
    EXPECT_GT(negative, mixed.weights.size() / 4);
    EXPECT_LT(negative, 3 * mixed.weights.size() / 4);
    EXPECT_EQ(pos.weights.size(), dag.graph().num_directed());
    EXPECT_EQ(parse_weight_mode("mixed"), WeightMode::Mixed);
    EXPECT_THROW(parse_weight_mode("negative"), InputError);
}

TEST(Covariance, AnalyticMatchesPowerSeries) {
    Rng rng(3, 0);
    for (int t = 0; t < 20; ++t) {
        auto wg = assign_weights(sample_er_dag(8, 3.0, rng), WeightMode::Mixed, rng);
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(8, 8);
        for (const auto& [e, w] : wg.weights) b(e.first, e.second) = w;
        // (I - B)^-1 = I + B + B^2 + ... for nilpotent B
        Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(8, 8), power = Eigen::MatrixXd::Identity(8, 8);
        for (int k = 1; k < 8; ++k) {
            power = power * b;
            inv += power;
        }
        Eigen::MatrixXd expected = inv.transpose() * inv;
        EXPECT_LT((analytic_covariance(wg).matrix() - expected).cwiseAbs().maxCoeff(), 1e-9 * expected.cwiseAbs().maxCoeff());
    }
}

TEST(Covariance, SampleConvergesToAnalytic) {
    Rng rng(4, 0);
    auto wg = assign_weights(sample_er_dag(6, 2.0, rng), WeightMode::Positive, rng);
    auto data = sample_data(wg, 200000, rng);
    auto sigma = analytic_covariance(wg).matrix();
    for (Eigen::Index i = 0; i < 6; ++i) {
        for (Eigen::Index j = 0; j < 6; ++j) {
            double scale = std::sqrt(sigma(i, i) * sigma(j, j));
            EXPECT_NEAR(data.covariance()(i, j) / scale, sigma(i, j) / scale, 0.02);
        }
    }
}

TEST(Weights, SidecarRoundTrip) {
    Rng rng(5, 0);
    auto wg = assign_weights(sample_er_dag(10, 3.0, rng), WeightMode::Mixed, rng);
    std::stringstream ss;
    write_weights(ss, wg);
    auto back = parse_weights(ss, wg.dag);
    EXPECT_EQ(back.weights, wg.weights);

    std::istringstream missing("");
    if (wg.dag.graph().num_directed() > 0) {
        EXPECT_THROW(parse_weights(missing, wg.dag), InputError);
    }
    std::istringstream bogus("0 -> 0 1.0\n");
    EXPECT_THROW(parse_weights(bogus, wg.dag), InputError);
}

TEST(Faithfulness, TypicalWeightsAreFaithful) {
    Rng rng(6, 0);
    int faithful = 0;
    for (int t = 0; t < 20; ++t) {
        auto wg = assign_weights(sample_er_dag(7, 2.0, rng), WeightMode::Positive, rng);
        faithful += numerically_faithful(wg, 1e-8) ? 1 : 0;
    }
    EXPECT_EQ(faithful, 20);
    // exact cancellation: 0 -> 1 -> 2 and 0 -> 2 with b02 = -b01 b12
    auto dag = Dag(MixedGraph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}}, {}));
    WeightedDag cancel{dag, {{{0, 1}, 1.0}, {{1, 2}, 1.0}, {{0, 2}, -1.0}}};
    EXPECT_FALSE(numerically_faithful(cancel, 1e-8));
}
