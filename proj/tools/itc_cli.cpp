// itc: command-line front end.
//   exit 0 ok, 1 usage, 2 input/format, 3 numerical/resource

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "itc/all.hpp"

using namespace itc;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
    if (const char* s = std::getenv("ITC_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw UsageError(std::string("ITC_SEED is not an unsigned integer: '") + s + "'");
        }
    }
    return 1;
}

template <class Lookup>
Vertex resolve(const std::string& token, std::size_t n, Lookup&& find, const char* what) {
    if (auto v = find(token)) return *v;
    if (auto v = detail::parse_index(token); v && *v < n) return *v;
    throw InputError(std::string(what) + " '" + token + "' is not a variable name or index");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    return out;
}

void print_transcript(const std::vector<QueryRecord>& transcript, const std::vector<std::string>& names) {
    for (const auto& r : transcript) {
        std::cout << "query " << names[r.query.x] << " _||_ " << names[r.query.y] << " | {";
        for (std::size_t i = 0; i < r.query.z.size(); ++i) std::cout << (i ? "," : "") << names[r.query.z[i]];
        std::cout << "}: " << (r.independent ? "independent" : "dependent") << '\n';
    }
}

std::vector<std::string> names_of(const MixedGraph& g) {
    std::vector<std::string> out;
    for (Vertex v = 0; v < g.size(); ++v) out.push_back(g.name(v));
    return out;
}

/// Local structure from --pa and --sib-graph, named against the dataset columns.
LocalStructure local_from_files(const Dataset& data, Vertex x, const std::string& pa, const std::string& sib_path) {
    auto col = [&](const std::string& name) {
        return resolve(name, data.variables(), [&](const std::string& s) { return data.find(s); }, "variable");
    };
    LocalStructure ls;
    ls.x = x;
    std::stringstream list(pa);
    for (std::string tok; std::getline(list, tok, ',');) {
        tok = std::string(detail::trim(tok));
        if (!tok.empty()) ls.parents.push_back(col(tok));
    }
    ls.parents = make_set(ls.parents);
    if (sib_path.empty()) {
        ls.sibling_graph = MixedGraph::from_edges(0, {}, {});
        return ls;
    }
    auto sib = read_graph_file(sib_path);
    if (sib.num_directed() > 0) throw InputError(sib_path + ": sibling graph must be undirected");
    std::vector<std::pair<Vertex, Vertex>> idx;  // dataset column, file vertex
    for (Vertex v = 0; v < sib.size(); ++v) idx.emplace_back(col(sib.name(v)), v);
    std::sort(idx.begin(), idx.end());
    VertexSet file_order;
    for (auto [c, v] : idx) {
        ls.siblings.push_back(c);
        file_order.push_back(v);
    }
    if (std::adjacent_find(ls.siblings.begin(), ls.siblings.end()) != ls.siblings.end()) {
        throw InputError(sib_path + ": duplicate sibling");
    }
    for (Vertex s : ls.siblings) {
        if (s == x || contains(ls.parents, s)) throw InputError("sibling '" + data.labels()[s] + "' overlaps pa or x");
    }
    GraphBuilder b(ls.siblings.size());
    for (std::size_t i = 0; i < file_order.size(); ++i) {
        for (std::size_t j = i + 1; j < file_order.size(); ++j) {
            if (sib.adjacent(file_order[i], file_order[j])) b.add_undirected(i, j);
        }
    }
    ls.sibling_graph = b.build();
    if (!is_chordal(ls.sibling_graph)) throw InputError(sib_path + ": sibling graph is not chordal");
    return ls;
}

struct IdentifyArgs {
    std::string graph, data, x, y, mode = "global", variant = "m1", pa, sib_graph;
    double alpha = 0.001;
    bool bonferroni = false, transcript = false;
};

int identify(const IdentifyArgs& a) {
    if (a.x == a.y) throw UsageError("treatment equals target");
    std::optional<Dataset> data;
    if (!a.data.empty()) data = read_dataset_csv(a.data);

    if (a.mode == "local" && a.graph.empty()) {
        if (!data) throw UsageError("local mode without --graph needs --data, --pa and --sib-graph");
        auto find = [&](const std::string& s) { return data->find(s); };
        Vertex x = resolve(a.x, data->variables(), find, "treatment");
        Vertex y = resolve(a.y, data->variables(), find, "target");
        if (x == y) throw UsageError("treatment equals target");
        auto ls = local_from_files(*data, x, a.pa, a.sib_graph);
        FisherZOracle oracle(*data, a.alpha);
        std::vector<QueryRecord> transcript;
        auto r = classify_local(ls, oracle, y, &transcript);
        if (a.transcript) print_transcript(transcript, data->labels());
        std::cout << to_string(r) << '\n';
        return 0;
    }
    if (a.graph.empty()) throw UsageError("--graph is required");

    Cpdag g(read_graph_file(a.graph));
    auto find = [&](const std::string& s) { return g.graph().find(s); };
    Vertex x = resolve(a.x, g.size(), find, "treatment");
    Vertex y = resolve(a.y, g.size(), find, "target");
    if (x == y) throw UsageError("treatment equals target");
    if (data && data->variables() != g.size()) {
        throw InputError("data has " + std::to_string(data->variables()) + " columns, graph has " +
                         std::to_string(g.size()) + " vertices");
    }

    if (a.mode == "global") {
        std::cout << to_string(classify_graphical(g, x, y)) << '\n';
    } else if (a.mode == "enum") {
        std::cout << to_string(classify_by_enumeration(g, x, y)) << '\n';
    } else if (a.mode == "local") {
        auto ls = local_structure(g, x);
        std::unique_ptr<IndependenceOracle> oracle;
        if (data) {
            oracle = std::make_unique<FisherZOracle>(*data, a.alpha);
        } else {
            oracle = std::make_unique<DSeparationOracle>(consistent_extension(g));
        }
        std::vector<QueryRecord> transcript;
        auto r = classify_local(ls, *oracle, y, &transcript);
        if (a.transcript) print_transcript(transcript, names_of(g.graph()));
        std::cout << to_string(r) << '\n';
    } else if (a.mode == "ce") {
        if (!data) throw UsageError("--mode ce needs --data");
        auto variant = parse_ce_variant(a.variant, a.bonferroni);
        auto r = ce_classify(g, *data, x, y, a.alpha, variant);
        const auto names = names_of(g.graph());
        for (const auto& e : r.effects) {
            std::cout << "effect theta=" << e.theta << " p=" << e.p_value << " adjust={";
            for (std::size_t i = 0; i < e.adjustment_set.size(); ++i) {
                std::cout << (i ? "," : "") << names[e.adjustment_set[i]];
            }
            std::cout << "}" << (e.tested ? "" : " untested") << '\n';
        }
        std::cout << to_string(r.relation) << '\n';
    } else {
        throw UsageError("unknown mode '" + a.mode + "' (expected global|local|enum|ce)");
    }
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"Identify causal relations in CPDAGs"};
    app.require_subcommand(1);

    std::string validate_in, validate_kind = "cpdag";
    auto* validate = app.add_subcommand("validate", "Check that a graph file is a valid CPDAG or DAG");
    validate->add_option("--in", validate_in, "graph file")->required();
    validate->add_option("--kind", validate_kind, "cpdag|dag")->check(CLI::IsMember({"cpdag", "dag"}));

    std::string cpdag_in;
    auto* cpdag = app.add_subcommand("cpdag", "Convert a DAG to its CPDAG");
    cpdag->add_option("--in", cpdag_in, "DAG file")->required();

    std::size_t gen_n = 10, gen_samples = 0, gen_rep = 0;
    double gen_d = 2.0;
    std::string gen_weights = "positive", gen_dag, gen_weights_out, gen_data;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("gen", "Sample an ER DAG, edge weights and Gaussian data");
    gen->add_option("--n", gen_n, "vertices");
    gen->add_option("--d", gen_d, "expected neighbourhood size");
    gen->add_option("--weights", gen_weights, "positive|mixed");
    gen->add_option("--samples", gen_samples, "rows of data (0 for none)");
    auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "seed (default $ITC_SEED or 1)");
    gen->add_option("--rep", gen_rep, "replication stream");
    gen->add_option("--dag-out", gen_dag, "DAG file (default stdout)");
    gen->add_option("--weights-out", gen_weights_out, "weights sidecar file");
    gen->add_option("--data-out", gen_data, "CSV file");

    IdentifyArgs id;
    auto* ident = app.add_subcommand("identify", "Classify the causal relation of x on y");
    ident->add_option("--graph", id.graph, "CPDAG file");
    ident->add_option("--x", id.x, "treatment (name or index)")->required();
    ident->add_option("--y", id.y, "target (name or index)")->required();
    ident->add_option("--mode", id.mode, "global|local|enum|ce");
    ident->add_option("--data", id.data, "CSV data");
    ident->add_option("--alpha", id.alpha, "significance level");
    ident->add_option("--variant", id.variant, "m1|m2|m3|m4|hybrid-m1|hybrid-m2");
    ident->add_flag("--bonferroni", id.bonferroni, "Bonferroni-correct the effect tests");
    ident->add_option("--pa", id.pa, "comma-separated parents of x (local mode without --graph)");
    ident->add_option("--sib-graph", id.sib_graph, "undirected sibling graph file (local mode without --graph)");
    ident->add_flag("--transcript", id.transcript, "print the independence queries (local mode)");

    std::string eval_config, eval_methods = "local-itc,global-itc", eval_out;
    std::size_t eval_jobs = 0;
    auto* eval = app.add_subcommand("eval", "Run a simulation study");
    eval->add_option("--config", eval_config, "key=value config file");
    eval->add_option("--methods", eval_methods, "comma-separated methods");
    auto* jobs_opt = eval->add_option("--jobs", eval_jobs, "worker threads (default: hardware)");
    eval->add_option("--out", eval_out, "JSON lines results file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (*validate) {
        auto g = read_graph_file(validate_in);
        if (validate_kind == "dag") {
            Dag d(g);
            std::cout << "ok: DAG with " << d.size() << " vertices, " << g.num_directed() << " edges\n";
            return 0;
        }
        auto report = validate_cpdag(g);
        if (!report) {
            std::cout << "invalid: " << report.property << " (" << report.detail << ")\n";
            return 2;
        }
        Cpdag c(g);
        std::cout << "ok: CPDAG with " << c.size() << " vertices, " << g.num_directed() << " directed, "
                  << g.num_undirected() << " undirected, " << c.components().size() << " chain components\n";
        return 0;
    }
    if (*cpdag) {
        std::cout << format_graph(dag_to_cpdag(Dag(read_graph_file(cpdag_in))).graph());
        return 0;
    }
    if (*gen) {
        if (!*gen_seed_opt) gen_seed = default_seed();
        Rng rng(gen_seed, gen_rep);
        auto dag = sample_er_dag(gen_n, gen_d, rng);
        auto wg = assign_weights(dag, parse_weight_mode(gen_weights), rng);
        if (gen_dag.empty()) {
            std::cout << format_graph(dag.graph());
        } else {
            open_out(gen_dag) << format_graph(dag.graph());
        }
        if (!gen_weights_out.empty()) {
            auto out = open_out(gen_weights_out);
            write_weights(out, wg);
        }
        if (gen_samples > 0) {
            if (gen_data.empty()) throw UsageError("--samples needs --data-out");
            auto out = open_out(gen_data);
            write_dataset_csv(out, sample_data(wg, gen_samples, rng));
        }
        return 0;
    }
    if (*ident) return identify(id);
    if (*eval) {
        SimConfig cfg;
        cfg.seed = default_seed();
        if (!eval_config.empty()) {
            std::ifstream in(eval_config);
            if (!in) throw InputError("cannot open config '" + eval_config + "'");
            cfg = parse_sim_config(in, cfg);
        }
        if (*jobs_opt) cfg.jobs = eval_jobs;
        auto report = run_experiment(cfg, parse_methods(eval_methods));
        std::cout << format_report(report);
        std::cerr << "generation " << report.generation_seconds << "s, truth " << report.truth_seconds << "s";
        for (const auto& m : report.methods) std::cerr << ", " << m.name << " " << m.seconds << "s";
        std::cerr << '\n';
        if (!eval_out.empty()) open_out(eval_out) << report_jsonl(report);
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "itc: " << e.what() << '\n';
        return 1;
    } catch (const OracleError& e) {
        std::cerr << "itc: " << e.what() << '\n';
        return e.numerical() ? 3 : 2;
    } catch (const InputError& e) {
        std::cerr << "itc: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "itc: " << e.what() << '\n';
        return 3;
    } catch (const ResourceError& e) {
        std::cerr << "itc: " << e.what() << '\n';
        return 3;
    } catch (const ContractError& e) {
        std::cerr << "itc: " << e.what() << '\n';
        return 1;
    }
}
