#ifndef ITC_SEM_SIM_HPP
#define ITC_SEM_SIM_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "itc/graph_io.hpp"
#include "itc/oracle.hpp"

namespace itc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The key is the seed;
/// the upper half of the counter selects an independent substream, so replication r
/// of a run uses Philox4x32(seed, r) and can be regenerated on its own.
class Philox4x32 {
public:
    using result_type = std::uint64_t;
    static constexpr std::string_view name = "philox4x32-10";
    static constexpr int version = 1;

    explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (next_ == 4) {
            block_ = generate(block_index_++);
            next_ = 0;
        }
        std::uint64_t lo = block_[next_++];
        std::uint64_t hi = block_[next_++];
        return (hi << 32) | lo;
    }

    void discard(std::uint64_t z) {
        for (; z > 0; --z) (*this)();
    }

private:
    std::array<std::uint32_t, 4> generate(std::uint64_t index) const {
        std::array<std::uint32_t, 4> c{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                       static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        std::array<std::uint32_t, 2> k = key_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
            c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
            k[0] += 0x9E3779B9u;
            k[1] += 0xBB67AE85u;
        }
        return c;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_index_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int next_ = 4;
};

using Rng = Philox4x32;

inline std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("V" + std::to_string(i));
    return out;
}

/// Erdos-Renyi DAG: a uniformly random topological order, then every forward pair is
/// an edge with probability d / (n - 1), so the expected degree is d.
inline Dag sample_er_dag(std::size_t n, double d, Rng& rng) {
    if (n < 2) throw InputError("sample_er_dag: need at least 2 vertices");
    if (!(d > 0) || !(d < static_cast<double>(n - 1))) {
        throw InputError("sample_er_dag: average degree must lie in (0, n-1)");
    }
    std::vector<Vertex> order(n);
    for (Vertex i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) {
        boost::random::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(order[i], order[pick(rng)]);
    }
    const double p = d / static_cast<double>(n - 1);
    boost::random::uniform_real_distribution<double> unif(0.0, 1.0);
    GraphBuilder b(n, default_labels(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (unif(rng) < p) b.add_directed(order[i], order[j]);
        }
    }
    return Dag(b.build());
}

enum class WeightMode { Positive, Mixed };

inline std::string_view to_string(WeightMode m) { return m == WeightMode::Positive ? "positive" : "mixed"; }

inline WeightMode parse_weight_mode(std::string_view s) {
    if (s == "positive") return WeightMode::Positive;
    if (s == "mixed") return WeightMode::Mixed;
    throw InputError("unknown weight mode '" + std::string(s) + "' (expected positive|mixed)");
}

inline constexpr double kWeightLow = 0.8;
inline constexpr double kWeightHigh = 1.6;

/// DAG with a coefficient on every edge of the linear SEM X_j = sum_i b_ij X_i + e_j.
struct WeightedDag {
    Dag dag;
    std::map<Edge, double> weights;

    double weight(Vertex i, Vertex j) const {
        auto it = weights.find({i, j});
        return it == weights.end() ? 0.0 : it->second;
    }
};

/// Magnitudes Uniform[0.8, 1.6]; mixed mode draws the sign with probability 1/2.
inline WeightedDag assign_weights(const Dag& g, WeightMode mode, Rng& rng) {
    WeightedDag wg{g, {}};
    boost::random::uniform_real_distribution<double> magnitude(kWeightLow, kWeightHigh);
    boost::random::uniform_int_distribution<int> coin(0, 1);
    for (auto e : g.graph().directed_edges()) {
        double sign = 1.0;
        if (mode == WeightMode::Mixed && coin(rng) == 0) sign = -1.0;
        wg.weights[e] = sign * magnitude(rng);
    }
    return wg;
}

/// N samples in topological order with i.i.d. N(0, 1) noise.
inline Dataset sample_data(const WeightedDag& wg, std::size_t samples, Rng& rng) {
    if (samples < 1) throw InputError("sample_data: need at least one sample");
    const auto& g = wg.dag.graph();
    const auto n = static_cast<Eigen::Index>(g.size());
    const auto rows = static_cast<Eigen::Index>(samples);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rows, n);
    boost::random::normal_distribution<double> noise(0.0, 1.0);
    const auto order = topological_order(g);
    for (Vertex j : *order) {
        for (Eigen::Index r = 0; r < rows; ++r) x(r, j) = noise(rng);
        for (Vertex i : g.parents(j)) x.col(j) += wg.weight(i, j) * x.col(i);
    }
    auto labels = g.has_labels() ? g.labels() : default_labels(g.size());
    return Dataset(std::move(x), std::move(labels));
}

/// (I - B)^-T (I - B)^-1 with B(i, j) = b_ij.
inline GaussianCovariance analytic_covariance(const WeightedDag& wg) {
    const auto n = static_cast<Eigen::Index>(wg.dag.size());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [e, w] : wg.weights) b(e.first, e.second) = w;
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd inv = (eye - b).partialPivLu().solve(eye);
    Eigen::MatrixXd sigma = inv.transpose() * inv;
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    return GaussianCovariance(std::move(sigma));
}

/// Weights sidecar: one "i -> j <beta>" line per edge.
inline void write_weights(std::ostream& out, const WeightedDag& wg) {
    out << std::setprecision(17);
    for (const auto& [e, w] : wg.weights) out << e.first << " -> " << e.second << ' ' << w << '\n';
}

inline WeightedDag parse_weights(std::istream& in, const Dag& dag, std::string_view source = "<weights>") {
    WeightedDag wg{dag, {}};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body = line;
        if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = detail::trim(body);
        if (body.empty()) continue;
        auto tok = detail::split_ws(body);
        auto fail = [&](const std::string& m) {
            throw InputError(std::string(source) + ":" + std::to_string(lineno) + ": " + m);
        };
        if (tok.size() != 4 || tok[1] != "->") fail("expected '<i> -> <j> <beta>'");
        auto i = detail::parse_index(tok[0]);
        auto j = detail::parse_index(tok[2]);
        double w = 0;
        auto [ptr, ec] = std::from_chars(tok[3].data(), tok[3].data() + tok[3].size(), w);
        if (!i || !j || ec != std::errc{} || ptr != tok[3].data() + tok[3].size()) fail("malformed weight line");
        if (*i >= dag.size() || *j >= dag.size() || !dag.graph().directed(*i, *j)) fail("weight for a missing edge");
        if (!wg.weights.emplace(Edge{*i, *j}, w).second) fail("duplicate weight");
    }
    if (wg.weights.size() != dag.graph().num_directed()) {
        throw InputError(std::string(source) + ": weights missing for some edges");
    }
    return wg;
}

/// True when no d-connected query has |population partial correlation| <= tol, checked
/// exhaustively over all pairs and conditioning sets (n <= 12).
inline bool numerically_faithful(const WeightedDag& wg, double tol) {
    const std::size_t n = wg.dag.size();
    if (n > 12) throw InputError("numerically_faithful: exhaustive check limited to 12 vertices");
    const auto cov = analytic_covariance(wg);
    for (Vertex x = 0; x < n; ++x) {
        for (Vertex y = x + 1; y < n; ++y) {
            for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
                if (mask & ((1u << x) | (1u << y))) continue;
                VertexSet z;
                for (Vertex v = 0; v < n; ++v) {
                    if (mask & (1u << v)) z.push_back(v);
                }
                CiQuery q{x, y, z};
                if (!d_separated(wg.dag, q) && std::abs(partial_correlation(cov, x, y, z)) <= tol) return false;
            }
        }
    }
    return true;
}

}  // namespace itc

#endif  // ITC_SEM_SIM_HPP
