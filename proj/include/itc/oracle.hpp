#ifndef ITC_ORACLE_HPP
#define ITC_ORACLE_HPP

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "itc/graph.hpp"
#include "itc/graph_io.hpp"

namespace itc {

/// "Is x independent of y given z?"
struct CiQuery {
    Vertex x = 0;
    Vertex y = 0;
    VertexSet z;
};

inline std::string describe(const CiQuery& q, const MixedGraph* names = nullptr) {
    auto nm = [&](Vertex v) { return names ? names->name(v) : std::to_string(v); };
    std::string s = nm(q.x) + " _||_ " + nm(q.y) + " | {";
    for (std::size_t i = 0; i < q.z.size(); ++i) s += (i ? ", " : "") + nm(q.z[i]);
    return s + "}";
}

/// Raised when an oracle implementation fails; carries the query.
class OracleError : public std::runtime_error {
public:
    OracleError(CiQuery q, const std::string& what, bool numerical)
        : std::runtime_error("independence query " + describe(q) + " failed: " + what),
          query_(std::move(q)),
          numerical_(numerical) {}

    const CiQuery& query() const { return query_; }
    bool numerical() const { return numerical_; }

private:
    CiQuery query_;
    bool numerical_;
};

/// Independence query contract. The x-or-y-in-z convention (trivially independent)
/// and the query tally live here, so every implementation obeys them.
class IndependenceOracle {
public:
    virtual ~IndependenceOracle() = default;

    bool independent(const CiQuery& q) const {
        count_.fetch_add(1, std::memory_order_relaxed);
        if (q.x == q.y) throw ContractError("independence query with x == y");
        if (contains(q.z, q.x) || contains(q.z, q.y)) return true;
        try {
            return test(q);
        } catch (const NumericalError& e) {
            throw OracleError(q, e.what(), true);
        } catch (const InputError& e) {
            throw OracleError(q, e.what(), false);
        }
    }

    std::uint64_t query_count() const { return count_.load(std::memory_order_relaxed); }
    void reset_count() { count_.store(0); }

protected:
    /// Called only with x, y outside z.
    virtual bool test(const CiQuery& q) const = 0;

private:
    mutable std::atomic<std::uint64_t> count_{0};
};

/// d-separation by reachability (active-trail search) on a DAG.
inline bool d_separated(const Dag& dag, const CiQuery& q) {
    const auto& g = dag.graph();
    g.check_vertex(q.x);
    g.check_vertex(q.y);
    for (Vertex v : q.z) g.check_vertex(v);
    if (q.x == q.y) throw ContractError("d_separated: x == y");
    if (contains(q.z, q.x) || contains(q.z, q.y)) return true;

    const std::size_t n = g.size();
    std::vector<char> in_z(n, 0), anc_z(n, 0);
    for (Vertex v : q.z) in_z[v] = 1;
    {
        std::vector<Vertex> stack(q.z.begin(), q.z.end());
        for (Vertex v : q.z) anc_z[v] = 1;
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            for (Vertex p : g.parents(v)) {
                if (!anc_z[p]) {
                    anc_z[p] = 1;
                    stack.push_back(p);
                }
            }
        }
    }

    // State: (vertex, arrived-from-child = up / arrived-from-parent = down).
    std::vector<char> visited(2 * n, 0);
    std::vector<std::pair<Vertex, bool>> stack{{q.x, true}};
    while (!stack.empty()) {
        auto [v, up] = stack.back();
        stack.pop_back();
        if (visited[2 * v + up]) continue;
        visited[2 * v + up] = 1;
        if (v == q.y) return false;
        if (up) {
            if (in_z[v]) continue;
            for (Vertex p : g.parents(v)) stack.emplace_back(p, true);
            for (Vertex c : g.children(v)) stack.emplace_back(c, false);
        } else {
            if (!in_z[v]) {
                for (Vertex c : g.children(v)) stack.emplace_back(c, false);
            }
            if (anc_z[v]) {
                for (Vertex p : g.parents(v)) stack.emplace_back(p, true);
            }
        }
    }
    return true;
}

class DSeparationOracle : public IndependenceOracle {
public:
    explicit DSeparationOracle(Dag dag) : dag_(std::move(dag)) {}
    const Dag& dag() const { return dag_; }

protected:
    bool test(const CiQuery& q) const override { return d_separated(dag_, q); }

private:
    Dag dag_;
};

/// Symmetric positive-definite covariance matrix.
class GaussianCovariance {
public:
    explicit GaussianCovariance(Eigen::MatrixXd sigma) : sigma_(std::move(sigma)) {
        if (sigma_.rows() != sigma_.cols()) throw InputError("covariance matrix is not square");
        if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
            throw InputError("covariance matrix is not symmetric");
        }
        if (sigma_.llt().info() != Eigen::Success) throw NumericalError("covariance matrix is not positive definite");
    }

    const Eigen::MatrixXd& matrix() const { return sigma_; }
    std::size_t size() const { return static_cast<std::size_t>(sigma_.rows()); }
    double operator()(Vertex i, Vertex j) const { return sigma_(i, j); }

private:
    Eigen::MatrixXd sigma_;
};

namespace detail {

inline std::string set_to_string(const VertexSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + std::to_string(s[i]);
    return out + "}";
}

/// Partial correlation of x and y given z read off the inverse of the covariance
/// submatrix over {x, y} + z.
inline double partial_correlation(const Eigen::MatrixXd& cov, Vertex x, Vertex y, const VertexSet& z) {
    const auto p = static_cast<Vertex>(cov.rows());
    if (x >= p || y >= p) throw InputError("partial_correlation: vertex outside covariance matrix");
    if (x == y) throw InputError("partial_correlation: x == y");
    if (contains(z, x) || contains(z, y)) throw InputError("partial_correlation: x or y in conditioning set");
    if (z.empty()) {
        double denom = std::sqrt(cov(x, x) * cov(y, y));
        if (!(denom > 0)) throw NumericalError("zero variance in partial correlation of " + std::to_string(x) + ", " +
                                               std::to_string(y));
        return cov(x, y) / denom;
    }
    std::vector<Vertex> idx{x, y};
    for (Vertex v : z) {
        if (v >= p) throw InputError("partial_correlation: conditioning vertex outside covariance matrix");
        idx.push_back(v);
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = cov(idx[i], idx[j]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    bool singular = llt.info() != Eigen::Success;
    // a pivot is the residual variance of one variable given the earlier ones
    for (Eigen::Index i = 0; i < k && !singular; ++i) {
        const double pivot = llt.matrixLLT()(i, i);
        singular = !(pivot * pivot > 1e-12 * sub(i, i));
    }
    if (singular) throw NumericalError("singular covariance submatrix for conditioning set " + set_to_string(z));
    Eigen::MatrixXd prec = llt.solve(Eigen::MatrixXd::Identity(k, k));
    double denom = std::sqrt(prec(0, 0) * prec(1, 1));
    if (!(denom > 0) || !std::isfinite(denom)) {
        throw NumericalError("singular covariance submatrix for conditioning set " + set_to_string(z));
    }
    return -prec(0, 1) / denom;
}

}  // namespace detail

inline double partial_correlation(const GaussianCovariance& cov, Vertex x, Vertex y, const VertexSet& z) {
    return detail::partial_correlation(cov.matrix(), x, y, z);
}

/// Independence iff |partial correlation| <= tolerance, on a known covariance.
class PartialCorrelationOracle : public IndependenceOracle {
public:
    explicit PartialCorrelationOracle(GaussianCovariance cov, double tolerance = 1e-9)
        : cov_(std::move(cov)), tol_(tolerance) {}

protected:
    bool test(const CiQuery& q) const override { return std::abs(partial_correlation(cov_, q.x, q.y, q.z)) <= tol_; }

private:
    GaussianCovariance cov_;
    double tol_;
};

/// N x p sample matrix with column labels and the sample covariance.
class Dataset {
public:
    Dataset() = default;
    Dataset(Eigen::MatrixXd values, std::vector<std::string> labels)
        : values_(std::move(values)), labels_(std::move(labels)) {
        if (labels_.empty()) {
            for (Eigen::Index j = 0; j < values_.cols(); ++j) labels_.push_back("V" + std::to_string(j));
        }
        if (static_cast<Eigen::Index>(labels_.size()) != values_.cols()) {
            throw InputError("dataset has " + std::to_string(values_.cols()) + " columns but " +
                             std::to_string(labels_.size()) + " labels");
        }
        if (values_.rows() >= 2) {
            Eigen::MatrixXd centered = values_.rowwise() - values_.colwise().mean();
            cov_ = (centered.transpose() * centered) / static_cast<double>(values_.rows() - 1);
        } else {
            cov_ = Eigen::MatrixXd::Zero(values_.cols(), values_.cols());
        }
    }

    std::size_t samples() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t variables() const { return static_cast<std::size_t>(values_.cols()); }
    const Eigen::MatrixXd& values() const { return values_; }
    const Eigen::MatrixXd& covariance() const { return cov_; }
    const std::vector<std::string>& labels() const { return labels_; }

    std::optional<Vertex> find(std::string_view name) const {
        for (Vertex v = 0; v < labels_.size(); ++v) {
            if (labels_[v] == name) return v;
        }
        return std::nullopt;
    }

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> labels_;
    Eigen::MatrixXd cov_;
};

struct FisherZResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool independent = true;
};

inline double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

/// Fisher z test of zero partial correlation. p == alpha counts as dependent.
inline FisherZResult fisher_z_test(const Dataset& data, const CiQuery& q, double alpha) {
    if (q.x == q.y) throw ContractError("fisher_z_test: x == y");
    if (contains(q.z, q.x) || contains(q.z, q.y)) return {0.0, 1.0, true};
    const double dof = static_cast<double>(data.samples()) - static_cast<double>(q.z.size()) - 3.0;
    if (dof <= 0) {
        throw InputError("fisher_z_test: " + std::to_string(data.samples()) + " samples are too few for a conditioning set of size " +
                         std::to_string(q.z.size()));
    }
    double rho = 0.0;
    try {
        rho = detail::partial_correlation(data.covariance(), q.x, q.y, q.z);
    } catch (const NumericalError& e) {
        throw DegenerateDataError(e.what());
    }
    if (!std::isfinite(rho) || std::abs(rho) >= 1.0 - 1e-12) {
        throw DegenerateDataError("sample partial correlation of " + data.labels()[q.x] + " and " + data.labels()[q.y] +
                                  " is +-1");
    }
    FisherZResult r;
    r.statistic = std::sqrt(dof) * std::atanh(rho);
    r.p_value = normal_two_sided_p(r.statistic);
    r.independent = r.p_value > alpha;
    return r;
}

class FisherZOracle : public IndependenceOracle {
public:
    FisherZOracle(const Dataset& data, double alpha) : data_(&data), alpha_(alpha) {}
    double alpha() const { return alpha_; }

protected:
    bool test(const CiQuery& q) const override { return fisher_z_test(*data_, q, alpha_).independent; }

private:
    const Dataset* data_;
    double alpha_;
};

inline Dataset parse_dataset_csv(std::istream& in, std::string_view source = "<csv>") {
    std::string line;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 0;

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ss(s);
        while (std::getline(ss, cell, ',')) out.emplace_back(detail::trim(cell));
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        auto cells = split(line);
        if (labels.empty()) {
            labels = cells;
            continue;
        }
        if (cells.size() != labels.size()) {
            throw InputError(std::string(source) + ": row " + std::to_string(lineno) + " has " +
                             std::to_string(cells.size()) + " fields, expected " + std::to_string(labels.size()));
        }
        std::vector<double> row;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto& cell = cells[c];
            double v = 0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                throw InputError(std::string(source) + ": missing or non-numeric value at row " + std::to_string(lineno) +
                                 ", column " + std::to_string(c + 1) + " ('" + labels[c] + "')");
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (labels.empty()) throw InputError(std::string(source) + ": empty dataset");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(labels.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < labels.size(); ++c) m(r, c) = rows[r][c];
    }
    return Dataset(std::move(m), std::move(labels));
}

inline Dataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open data file '" + path + "'");
    return parse_dataset_csv(in, path);
}

inline void write_dataset_csv(std::ostream& out, const Dataset& data) {
    for (std::size_t c = 0; c < data.variables(); ++c) out << (c ? "," : "") << data.labels()[c];
    out << '\n';
    out << std::setprecision(17);
    for (Eigen::Index r = 0; r < data.values().rows(); ++r) {
        for (Eigen::Index c = 0; c < data.values().cols(); ++c) out << (c ? "," : "") << data.values()(r, c);
        out << '\n';
    }
}

}  // namespace itc

#endif  // ITC_ORACLE_HPP
