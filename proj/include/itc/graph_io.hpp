#ifndef ITC_GRAPH_IO_HPP
#define ITC_GRAPH_IO_HPP

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>

#include "itc/graph.hpp"

namespace itc {

// Text format:
//   n=<count>
//   label <i> <name>
//   <i> -> <j>
//   <i> -- <j>
// '#' starts a comment; blank lines are ignored.

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::optional<std::size_t> parse_index(std::string_view s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace detail

inline MixedGraph parse_graph(std::istream& in, std::string_view source = "<graph>") {
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> n;
    std::vector<std::string> labels;
    std::vector<char> labelled;
    std::vector<std::tuple<Vertex, Vertex, bool, std::size_t>> edges;

    auto fail = [&](const std::string& msg) {
        throw InputError(std::string(source) + ":" + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body = line;
        if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = detail::trim(body);
        if (body.empty()) continue;

        if (!n) {
            if (body.substr(0, 2) != "n=") fail("expected header 'n=<count>'");
            n = detail::parse_index(detail::trim(body.substr(2)));
            if (!n) fail("invalid vertex count");
            labels.assign(*n, {});
            labelled.assign(*n, 0);
            continue;
        }

        auto tok = detail::split_ws(body);
        if (tok.size() == 3 && tok[0] == "label") {
            auto v = detail::parse_index(tok[1]);
            if (!v || *v >= *n) fail("label refers to unknown vertex");
            if (labelled[*v]) fail("duplicate label for vertex " + std::to_string(*v));
            labels[*v] = std::string(tok[2]);
            labelled[*v] = 1;
            continue;
        }
        if (tok.size() != 3 || (tok[1] != "->" && tok[1] != "--")) fail("expected '<i> -> <j>' or '<i> -- <j>'");
        auto a = detail::parse_index(tok[0]);
        auto b = detail::parse_index(tok[2]);
        if (!a || !b) fail("invalid vertex index");
        edges.emplace_back(*a, *b, tok[1] == "->", lineno);
    }
    if (!n) throw InputError(std::string(source) + ": missing header 'n=<count>'");

    bool any_label = std::any_of(labelled.begin(), labelled.end(), [](char c) { return c != 0; });
    if (any_label) {
        for (Vertex v = 0; v < *n; ++v) {
            if (!labelled[v]) labels[v] = std::to_string(v);
        }
    } else {
        labels.clear();
    }
    GraphBuilder b(*n, std::move(labels));
    for (auto [i, j, dir, at] : edges) {
        try {
            if (dir) {
                b.add_directed(i, j);
            } else {
                b.add_undirected(i, j);
            }
        } catch (const InputError& e) {
            throw InputError(std::string(source) + ":" + std::to_string(at) + ": " + e.what());
        }
    }
    return b.build();
}

inline MixedGraph parse_graph(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_graph(in);
}

inline MixedGraph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open graph file '" + path + "'");
    return parse_graph(in, path);
}

/// Canonical rendering: header, labels in vertex order, then one line per adjacent
/// pair (i < j) in lexicographic order.
inline std::string format_graph(const MixedGraph& g) {
    std::ostringstream out;
    out << "n=" << g.size() << '\n';
    if (g.has_labels()) {
        for (Vertex v = 0; v < g.size(); ++v) out << "label " << v << ' ' << g.labels()[v] << '\n';
    }
    for (Vertex i = 0; i < g.size(); ++i) {
        for (Vertex j = i + 1; j < g.size(); ++j) {
            switch (g.mark(i, j)) {
                case EdgeMark::Out: out << i << " -> " << j << '\n'; break;
                case EdgeMark::In: out << j << " -> " << i << '\n'; break;
                case EdgeMark::Undirected: out << i << " -- " << j << '\n'; break;
                case EdgeMark::None: break;
            }
        }
    }
    return out.str();
}

}  // namespace itc

#endif  // ITC_GRAPH_IO_HPP
