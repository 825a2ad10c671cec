#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace itc;

namespace {

ConfusionMatrix3 matrix(std::array<std::array<std::uint64_t, 3>, 3> m) {
    ConfusionMatrix3 cm;
    cm.m = m;
    return cm;
}

}  // namespace

TEST(Kappa, HandComputedExample) {
    auto cm = matrix({{{40, 5, 5}, {5, 15, 5}, {5, 5, 15}}});
    // p = 0.70, q = (50*50 + 25*25 + 25*25) / 100^2 = 0.375
    EXPECT_NEAR(kappa(cm), (0.70 - 0.375) / (1 - 0.375), 1e-15);
    EXPECT_NEAR(kappa(cm), 0.52, 1e-12);
    auto non = per_class_rates(cm, CoarseRelation::DefiniteNonCause);
    EXPECT_NEAR(*non.tpr, 0.8, 1e-15);
    EXPECT_NEAR(*non.fpr, 10.0 / 50.0, 1e-15);
    auto poss = per_class_rates(cm, CoarseRelation::PossibleCause);
    EXPECT_NEAR(*poss.tpr, 0.6, 1e-15);
    EXPECT_NEAR(*poss.fpr, 10.0 / 75.0, 1e-15);
}

TEST(Kappa, PerfectAndUndefined) {
    EXPECT_NEAR(kappa(matrix({{{5, 0, 0}, {0, 3, 0}, {0, 0, 2}}})), 1.0, 1e-15);
    EXPECT_THROW(kappa(ConfusionMatrix3{}), UndefinedMetricError);
    EXPECT_THROW(kappa(matrix({{{7, 0, 0}, {0, 0, 0}, {0, 0, 0}}})), UndefinedMetricError);
    auto rates = per_class_rates(matrix({{{7, 0, 0}, {0, 0, 0}, {0, 0, 0}}}), CoarseRelation::DefiniteCause);
    EXPECT_FALSE(rates.tpr);
    EXPECT_TRUE(rates.fpr);
    EXPECT_EQ(format_rate(rates.tpr), "—");
    EXPECT_EQ(format_rate(0.25), "0.2500");
}

TEST(Confusion, AddAndAccumulate) {
    ConfusionMatrix3 a, b;
    a.add(CoarseRelation::DefiniteCause, CoarseRelation::PossibleCause);
    b.add(CoarseRelation::DefiniteCause, CoarseRelation::PossibleCause, 2);
    a += b;
    EXPECT_EQ(a(2, 1), 3u);
    EXPECT_EQ(a.total(), 3u);
}

TEST(Config, ParsesKeysAndRejectsUnknown) {
    std::istringstream in(
        "# study\n"
        "n = 20\n"
        "d = 2.5\n"
        "weights = \"mixed\"\n"
        "n_effect = 100\n"
        "n_graph = 500\n"
        "seed = 9\n"
        "replications = 30\n"
        "pairs = all\n"
        "alpha = 0.01\n"
        "jobs = 2\n");
    auto cfg = parse_sim_config(in);
    EXPECT_EQ(cfg.n, 20u);
    EXPECT_EQ(cfg.d, 2.5);
    EXPECT_EQ(cfg.weight_mode, WeightMode::Mixed);
    EXPECT_EQ(cfg.n_effect, 100u);
    EXPECT_EQ(cfg.n_graph, std::size_t{500});
    EXPECT_EQ(cfg.seed, 9u);
    EXPECT_EQ(cfg.replications, 30u);
    EXPECT_TRUE(cfg.all_pairs);
    EXPECT_EQ(cfg.alpha, 0.01);
    EXPECT_EQ(cfg.jobs, 2u);

    std::istringstream bad("n = 5\nbogus = 1\n");
    try {
        parse_sim_config(bad);
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    std::istringstream nonnum("d = two\n");
    EXPECT_THROW(parse_sim_config(nonnum), InputError);
}

TEST(Methods, Parsing) {
    auto ms = parse_methods("local-itc, global-itc,m3,hybrid-m1,m1-multi");
    ASSERT_EQ(ms.size(), 5u);
    EXPECT_EQ(ms[0].kind, MethodKind::LocalItc);
    EXPECT_EQ(ms[1].kind, MethodKind::GlobalItc);
    EXPECT_EQ(ms[2].ce.method, CeMethod::M3);
    EXPECT_TRUE(ms[3].ce.hybrid);
    EXPECT_TRUE(ms[4].ce.bonferroni);
    EXPECT_EQ(ms[4].name, "m1-multi");
    EXPECT_THROW(parse_methods(""), InputError);
    EXPECT_THROW(parse_method("pc"), InputError);
}

TEST(Experiment, DeterministicAcrossThreadCounts) {
    SimConfig cfg;
    cfg.n = 15;
    cfg.d = 2.0;
    cfg.n_effect = 80;
    cfg.replications = 40;
    cfg.seed = 5;
    auto methods = parse_methods("local-itc,global-itc,m1,m4");
    cfg.jobs = 1;
    auto one = run_experiment(cfg, methods);
    cfg.jobs = 3;
    auto three = run_experiment(cfg, methods);
    ASSERT_EQ(one.methods.size(), three.methods.size());
    for (std::size_t k = 0; k < one.methods.size(); ++k) {
        EXPECT_EQ(one.methods[k].confusion, three.methods[k].confusion);
    }
    EXPECT_EQ(one.truth_counts, three.truth_counts);
    three.config.jobs = 1;
    EXPECT_EQ(format_report(one), format_report(three));
    EXPECT_EQ(one.replication_log, three.replication_log);

    const auto& global = one.method("global-itc");
    EXPECT_EQ(global.confusion.total(), 40u);
    EXPECT_EQ(global.confusion(0, 1) + global.confusion(0, 2) + global.confusion(1, 0) + global.confusion(1, 2) +
                  global.confusion(2, 0) + global.confusion(2, 1),
              0u);
}

TEST(Experiment, AllPairsFrequenciesSumToOne) {
    SimConfig cfg;
    cfg.n = 12;
    cfg.d = 2.0;
    cfg.replications = 10;
    cfg.all_pairs = true;
    cfg.jobs = 1;
    auto r = run_experiment(cfg, parse_methods("global-itc"));
    auto f = r.truth_frequencies();
    EXPECT_NEAR(f[0] + f[1] + f[2], 1.0, 1e-12);
    EXPECT_EQ(r.truth_counts[0] + r.truth_counts[1] + r.truth_counts[2], 10u * 12u * 11u);
    std::istringstream lines(report_jsonl(r));
    std::string first;
    std::getline(lines, first);
    auto header = nlohmann::json::parse(first);
    EXPECT_EQ(header["type"], "config");
    EXPECT_EQ(header["rng"], "philox4x32-10 v1");
}
