#ifndef ITC_EVAL_HPP
#define ITC_EVAL_HPP

#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "itc/ce_methods.hpp"
#include "itc/sem_sim.hpp"

namespace itc {

class UndefinedMetricError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Rows = true class, columns = predicted class, both indexed by CoarseRelation
/// (definite-non-cause, possible-cause, definite-cause).
struct ConfusionMatrix3 {
    std::array<std::array<std::uint64_t, 3>, 3> m{};

    void add(CoarseRelation truth, CoarseRelation predicted, std::uint64_t count = 1) {
        m[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)] += count;
    }
    std::uint64_t operator()(std::size_t i, std::size_t j) const { return m[i][j]; }
    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto& row : m) {
            for (auto v : row) t += v;
        }
        return t;
    }
    ConfusionMatrix3& operator+=(const ConfusionMatrix3& o) {
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) m[i][j] += o.m[i][j];
        }
        return *this;
    }
    friend bool operator==(const ConfusionMatrix3&, const ConfusionMatrix3&) = default;
};

/// Cohen's kappa: (p - q) / (1 - q) with p the observed agreement and q the agreement
/// expected from the row and column marginals.
inline double kappa(const ConfusionMatrix3& cm) {
    const double total = static_cast<double>(cm.total());
    if (total <= 0) throw UndefinedMetricError("kappa: empty confusion matrix");
    double diag = 0, chance = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        diag += static_cast<double>(cm(i, i));
        double row = 0, col = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            row += static_cast<double>(cm(i, j));
            col += static_cast<double>(cm(j, i));
        }
        chance += row * col;
    }
    const double p = diag / total;
    const double q = chance / (total * total);
    if (q >= 1.0) throw UndefinedMetricError("kappa: chance agreement is 1 (single-class marginals)");
    return (p - q) / (1.0 - q);
}

/// Empty optionals mark undefined rates (zero denominators).
struct ClassRates {
    std::optional<double> tpr;
    std::optional<double> fpr;
};

inline ClassRates per_class_rates(const ConfusionMatrix3& cm, CoarseRelation cls) {
    const auto c = static_cast<std::size_t>(cls);
    double row = 0, off_pred = 0, off_total = 0;
    for (std::size_t j = 0; j < 3; ++j) row += static_cast<double>(cm(c, j));
    for (std::size_t i = 0; i < 3; ++i) {
        if (i == c) continue;
        off_pred += static_cast<double>(cm(i, c));
        for (std::size_t j = 0; j < 3; ++j) off_total += static_cast<double>(cm(i, j));
    }
    ClassRates r;
    if (row > 0) r.tpr = static_cast<double>(cm(c, c)) / row;
    if (off_total > 0) r.fpr = off_pred / off_total;
    return r;
}

struct SimConfig {
    std::size_t n = 50;
    double d = 1.5;
    WeightMode weight_mode = WeightMode::Positive;
    std::size_t n_effect = 150;
    std::optional<std::size_t> n_graph;  // echoed only: graphs are never learned from data here
    std::uint64_t seed = 1;
    std::size_t replications = 100;
    bool all_pairs = false;
    double alpha = 0.001;
    std::size_t jobs = 0;  // 0 = hardware concurrency
};

/// Parses "key = value" lines ('#' comments). Unknown keys are rejected.
inline SimConfig parse_sim_config(std::istream& in, SimConfig cfg = {}) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body = line;
        if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = detail::trim(body);
        if (body.empty()) continue;
        auto eq = body.find('=');
        auto fail = [&](const std::string& m) { throw InputError("config line " + std::to_string(lineno) + ": " + m); };
        if (eq == std::string_view::npos) fail("expected key = value");
        std::string key(detail::trim(body.substr(0, eq)));
        std::string value(detail::trim(body.substr(eq + 1)));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        try {
            std::size_t used = 0;
            auto as_size = [&] {
                auto v = std::stoull(value, &used);
                if (used != value.size()) fail("invalid integer for " + key);
                return static_cast<std::size_t>(v);
            };
            auto as_double = [&] {
                auto v = std::stod(value, &used);
                if (used != value.size()) fail("invalid number for " + key);
                return v;
            };
            if (key == "n") cfg.n = as_size();
            else if (key == "d") cfg.d = as_double();
            else if (key == "weights") cfg.weight_mode = parse_weight_mode(value);
            else if (key == "n_effect") cfg.n_effect = as_size();
            else if (key == "n_graph") cfg.n_graph = as_size();
            else if (key == "seed") cfg.seed = as_size();
            else if (key == "replications") cfg.replications = as_size();
            else if (key == "alpha") cfg.alpha = as_double();
            else if (key == "jobs") cfg.jobs = as_size();
            else if (key == "pairs") {
                if (value == "one") cfg.all_pairs = false;
                else if (value == "all") cfg.all_pairs = true;
                else fail("pairs must be one|all");
            } else {
                fail("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            fail("invalid value for " + key);
        } catch (const std::out_of_range&) {
            fail("value out of range for " + key);
        }
    }
    return cfg;
}

enum class MethodKind { GlobalItc, LocalItc, CausalEffect };

struct MethodSpec {
    std::string name;
    MethodKind kind = MethodKind::LocalItc;
    CeVariant ce;
};

/// local-itc, global-itc, m1..m4, hybrid-m1, hybrid-m2; a "-multi" suffix turns on
/// Bonferroni for the CE methods.
inline MethodSpec parse_method(std::string_view name) {
    MethodSpec spec{std::string(name), MethodKind::LocalItc, {}};
    if (name == "local-itc") return spec;
    if (name == "global-itc") {
        spec.kind = MethodKind::GlobalItc;
        return spec;
    }
    bool multi = false;
    if (name.ends_with("-multi")) {
        multi = true;
        name.remove_suffix(6);
    }
    spec.kind = MethodKind::CausalEffect;
    try {
        spec.ce = parse_ce_variant(name, multi);
    } catch (const InputError&) {
        throw InputError("unknown method '" + spec.name +
                         "' (expected local-itc|global-itc|m1..m4|hybrid-m1|hybrid-m2, optional -multi)");
    }
    return spec;
}

inline std::vector<MethodSpec> parse_methods(std::string_view list) {
    std::vector<MethodSpec> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        auto comma = list.find(',', start);
        auto item = detail::trim(list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!item.empty()) out.push_back(parse_method(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw InputError("no methods given");
    return out;
}

/// Runs one method on one pair. The CPDAG is the true one; data feed the tests.
inline CausalRelation run_method(const MethodSpec& m, const Cpdag& g, const Dataset* data, Vertex x, Vertex y,
                                 double alpha) {
    switch (m.kind) {
        case MethodKind::GlobalItc: return classify_graphical(g, x, y);
        case MethodKind::LocalItc: {
            FisherZOracle oracle(*data, alpha);
            return classify_local(local_structure(g, x), oracle, y);
        }
        case MethodKind::CausalEffect: {
            auto r = ce_classify(g, RegressionEstimator(*data), x, y, alpha, m.ce);
            switch (r.relation) {
                case CoarseRelation::DefiniteCause: return CausalRelation::ImplicitCause;  // coarse only
                case CoarseRelation::PossibleCause: return CausalRelation::PossibleCause;
                case CoarseRelation::DefiniteNonCause: return CausalRelation::DefiniteNonCause;
            }
        }
    }
    return CausalRelation::DefiniteNonCause;
}

struct MethodReport {
    std::string name;
    ConfusionMatrix3 confusion;
    std::size_t failures = 0;
    double seconds = 0.0;
    std::optional<double> kappa;
    std::array<ClassRates, 3> rates;
};

struct ExperimentReport {
    SimConfig config;
    std::vector<MethodReport> methods;
    std::array<std::uint64_t, 3> truth_counts{};                 // coarse classes
    std::array<std::uint64_t, 4> truth_fine_counts{};            // CausalRelation order
    double generation_seconds = 0.0;
    double truth_seconds = 0.0;
    std::vector<nlohmann::json> replication_log;

    std::array<double, 3> truth_frequencies() const {
        double total = 0;
        for (auto c : truth_counts) total += static_cast<double>(c);
        std::array<double, 3> f{};
        for (std::size_t i = 0; i < 3; ++i) f[i] = total > 0 ? static_cast<double>(truth_counts[i]) / total : 0.0;
        return f;
    }

    const MethodReport& method(std::string_view name) const {
        for (const auto& m : methods) {
            if (m.name == name) return m;
        }
        throw InputError("no method '" + std::string(name) + "' in report");
    }
};

namespace detail {

struct ReplicationResult {
    std::array<std::uint64_t, 3> truth{};
    std::array<std::uint64_t, 4> truth_fine{};
    std::vector<ConfusionMatrix3> confusion;
    std::vector<std::size_t> failures;
    std::vector<double> seconds;
    double generation_seconds = 0.0;
    double truth_seconds = 0.0;
    nlohmann::json log;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline ReplicationResult run_replication(const SimConfig& cfg, const std::vector<MethodSpec>& methods,
                                         std::size_t rep) {
    ReplicationResult res;
    res.confusion.resize(methods.size());
    res.failures.assign(methods.size(), 0);
    res.seconds.assign(methods.size(), 0.0);

    Rng rng(cfg.seed, rep);
    auto t0 = std::chrono::steady_clock::now();
    const Dag dag = sample_er_dag(cfg.n, cfg.d, rng);
    const WeightedDag wg = assign_weights(dag, cfg.weight_mode, rng);
    const bool needs_data = std::any_of(methods.begin(), methods.end(),
                                        [](const MethodSpec& m) { return m.kind != MethodKind::GlobalItc; });
    std::optional<Dataset> data;
    if (needs_data) data = sample_data(wg, cfg.n_effect, rng);
    boost::random::uniform_int_distribution<std::size_t> pick(0, cfg.n - 1);
    std::vector<Edge> pairs;
    if (cfg.all_pairs) {
        for (Vertex x = 0; x < cfg.n; ++x) {
            for (Vertex y = 0; y < cfg.n; ++y) {
                if (x != y) pairs.emplace_back(x, y);
            }
        }
    } else {
        Vertex x = pick(rng);
        Vertex y = pick(rng);
        while (y == x) y = pick(rng);
        pairs.emplace_back(x, y);
    }
    res.generation_seconds = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const Cpdag cpdag = dag_to_cpdag(dag);
    std::vector<CausalRelation> truth;
    if (cfg.all_pairs) {
        auto all = classify_graphical_all(cpdag);
        for (auto [x, y] : pairs) truth.push_back(all[x][y]);
    } else {
        for (auto [x, y] : pairs) truth.push_back(classify_graphical(cpdag, x, y));
    }
    for (auto t : truth) {
        ++res.truth[static_cast<std::size_t>(coarsen(t))];
        ++res.truth_fine[static_cast<std::size_t>(t)];
    }
    res.truth_seconds = seconds_since(t0);

    res.log = {{"replication", rep}, {"edges", dag.graph().num_directed()}};
    if (!cfg.all_pairs) {
        res.log["x"] = pairs[0].first;
        res.log["y"] = pairs[0].second;
        res.log["truth"] = to_string(truth[0]);
    }
    for (std::size_t k = 0; k < methods.size(); ++k) {
        t0 = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            auto [x, y] = pairs[i];
            try {
                auto pred = run_method(methods[k], cpdag, data ? &*data : nullptr, x, y, cfg.alpha);
                res.confusion[k].add(coarsen(truth[i]), coarsen(pred));
                if (!cfg.all_pairs) {
                    res.log["predicted"][methods[k].name] =
                        methods[k].kind == MethodKind::CausalEffect ? std::string(to_string(coarsen(pred)))
                                                                    : std::string(to_string(pred));
                }
            } catch (const std::exception& e) {
                ++res.failures[k];
                res.log["failures"][methods[k].name] = e.what();
            }
        }
        res.seconds[k] = seconds_since(t0);
    }
    return res;
}

}  // namespace detail

/// Simulation study: per replication a fresh ER DAG, weights and data; the truth is
/// read from the DAG's CPDAG; every method classifies the same pair(s). Replications
/// run on cfg.jobs threads and are reduced in replication order.
inline ExperimentReport run_experiment(const SimConfig& cfg, const std::vector<MethodSpec>& methods) {
    if (methods.empty()) throw InputError("run_experiment: no methods");
    if (cfg.n < 2) throw InputError("run_experiment: n must be at least 2");
    std::vector<detail::ReplicationResult> results(cfg.replications);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t r; (r = next.fetch_add(1)) < cfg.replications;) {
            try {
                results[r] = detail::run_replication(cfg, methods, r);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = cfg.replications;
            }
        }
    };
    std::size_t jobs = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, std::max<std::size_t>(1, cfg.replications));
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);

    ExperimentReport report;
    report.config = cfg;
    for (const auto& m : methods) report.methods.push_back({m.name, {}, 0, 0.0, std::nullopt, {}});
    for (auto& r : results) {
        for (std::size_t i = 0; i < 3; ++i) report.truth_counts[i] += r.truth[i];
        for (std::size_t i = 0; i < 4; ++i) report.truth_fine_counts[i] += r.truth_fine[i];
        report.generation_seconds += r.generation_seconds;
        report.truth_seconds += r.truth_seconds;
        for (std::size_t k = 0; k < methods.size(); ++k) {
            report.methods[k].confusion += r.confusion[k];
            report.methods[k].failures += r.failures[k];
            report.methods[k].seconds += r.seconds[k];
        }
        report.replication_log.push_back(std::move(r.log));
    }
    for (auto& m : report.methods) {
        try {
            m.kappa = kappa(m.confusion);
        } catch (const UndefinedMetricError&) {
            m.kappa.reset();
        }
        for (std::size_t c = 0; c < 3; ++c) m.rates[c] = per_class_rates(m.confusion, static_cast<CoarseRelation>(c));
    }
    return report;
}

inline std::string format_rate(const std::optional<double>& v) {
    if (!v) return "—";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

/// Human-readable summary; contains no timings so reruns are byte-identical.
inline std::string format_report(const ExperimentReport& r) {
    std::ostringstream out;
    const auto& c = r.config;
    out << "# ER(n=" << c.n << ", d=" << c.d << "), edge probability d/(n-1), weights " << to_string(c.weight_mode)
        << ", N_effect=" << c.n_effect << ", alpha=" << c.alpha << ", seed=" << c.seed << ", replications="
        << c.replications << ", pairs=" << (c.all_pairs ? "all" : "one") << ", rng=" << Rng::name << " v"
        << Rng::version << '\n';
    auto f = r.truth_frequencies();
    char buf[160];
    std::snprintf(buf, sizeof buf, "true relation frequencies: non-cause %.4f  possible %.4f  definite %.4f\n", f[0],
                  f[1], f[2]);
    out << buf;
    std::snprintf(buf, sizeof buf, "%-22s %8s  %-17s %-17s %-17s %s\n", "method", "kappa", "non-cause TPR/FPR",
                  "possible TPR/FPR", "definite TPR/FPR", "failures");
    out << buf;
    for (const auto& m : r.methods) {
        std::string k = m.kappa ? format_rate(m.kappa) : "—";
        std::string cells[3];
        for (std::size_t i = 0; i < 3; ++i) cells[i] = format_rate(m.rates[i].tpr) + "/" + format_rate(m.rates[i].fpr);
        std::snprintf(buf, sizeof buf, "%-22s %8s  %-17s %-17s %-17s %zu\n", m.name.c_str(), k.c_str(),
                      cells[0].c_str(), cells[1].c_str(), cells[2].c_str(), m.failures);
        out << buf;
    }
    return out.str();
}

/// Line-delimited JSON: a header, one line per method, then one line per replication.
inline std::string report_jsonl(const ExperimentReport& r) {
    using nlohmann::json;
    std::ostringstream out;
    const auto& c = r.config;
    json header = {{"type", "config"},
                   {"n", c.n},
                   {"d", c.d},
                   {"edge_probability", c.d / static_cast<double>(c.n - 1)},
                   {"weights", to_string(c.weight_mode)},
                   {"n_effect", c.n_effect},
                   {"seed", c.seed},
                   {"replications", c.replications},
                   {"pairs", c.all_pairs ? "all" : "one"},
                   {"alpha", c.alpha},
                   {"rng", std::string(Rng::name) + " v" + std::to_string(Rng::version)},
                   {"truth_counts", r.truth_counts},
                   {"truth_fine_counts", r.truth_fine_counts},
                   {"generation_seconds", r.generation_seconds},
                   {"truth_seconds", r.truth_seconds}};
    if (c.n_graph) header["n_graph"] = *c.n_graph;
    out << header.dump() << '\n';
    for (const auto& m : r.methods) {
        json line = {{"type", "method"},         {"name", m.name},
                     {"confusion", m.confusion.m}, {"failures", m.failures},
                     {"seconds", m.seconds}};
        line["kappa"] = m.kappa ? json(*m.kappa) : json(nullptr);
        for (std::size_t i = 0; i < 3; ++i) {
            const auto cls = std::string(to_string(static_cast<CoarseRelation>(i)));
            line["tpr"][cls] = m.rates[i].tpr ? json(*m.rates[i].tpr) : json(nullptr);
            line["fpr"][cls] = m.rates[i].fpr ? json(*m.rates[i].fpr) : json(nullptr);
        }
        out << line.dump() << '\n';
    }
    for (const auto& rep : r.replication_log) {
        json line = rep;
        line["type"] = "replication";
        out << line.dump() << '\n';
    }
    return out.str();
}

}  // namespace itc

#endif  // ITC_EVAL_HPP
