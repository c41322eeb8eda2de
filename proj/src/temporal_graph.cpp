#include "tdlg/temporal_graph.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace tdlg {

namespace {

std::runtime_error line_error(const std::string& path, std::size_t line, const std::string& what) {
    return std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

// Splits on the delimiter, trimming a trailing '\r'.
std::vector<std::string> split_row(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
    return out;
}

}  // namespace

bool TemporalGraph::has_labels() const {
    if (edges.empty()) return false;
    for (const auto& e : edges)
        if (e.label < 0) return false;
    return true;
}

TemporalGraph load_edge_list(const std::string& path, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list: " + path);

    TemporalGraph g;
    std::unordered_map<std::string, NodeId> ids;
    std::string line;
    std::size_t lineno = 0;
    const std::size_t want = opts.has_labels ? 4 : 3;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line[0] == '%') continue;
        if (line.size() == 1 && line[0] == '\r') continue;
        const auto cols = split_row(line, opts.delimiter);
        if (cols.size() < want)
            throw line_error(path, lineno,
                             "expected " + std::to_string(want) + " columns, got " +
                                 std::to_string(cols.size()));

        auto intern = [&](const std::string& raw) -> NodeId {
            auto [it, inserted] = ids.try_emplace(raw, static_cast<NodeId>(ids.size()));
            if (inserted) g.node_names.push_back(raw);
            return it->second;
        };
        if (cols[0].empty() || cols[1].empty())
            throw line_error(path, lineno, "empty node id");
        const NodeId u = intern(cols[0]);
        const NodeId v = intern(cols[1]);
        if (u == v) throw line_error(path, lineno, "self-loop edge '" + cols[0] + "'");

        char* endp = nullptr;
        const double t = std::strtod(cols[2].c_str(), &endp);
        if (endp == cols[2].c_str() || *endp != '\0')
            throw line_error(path, lineno, "unparsable time '" + cols[2] + "'");
        if (!std::isfinite(t)) throw line_error(path, lineno, "non-finite time");

        TemporalEdge e{u, v, t, -1};
        if (opts.has_labels) {
            const long raw = std::strtol(cols[3].c_str(), &endp, 10);
            if (endp == cols[3].c_str() || *endp != '\0')
                throw line_error(path, lineno, "unparsable label '" + cols[3] + "'");
            e.label = raw > opts.label_threshold ? 1 : 0;
        }
        g.edges.push_back(e);
        if (g.edges.size() > static_cast<std::size_t>(std::numeric_limits<EdgeId>::max()))
            throw std::runtime_error(path + ": too many edges for 32-bit edge ids");
    }
    g.n = static_cast<std::int64_t>(ids.size());
    return g;
}

void write_edge_list(const TemporalGraph& g, const std::string& path, char delimiter,
                     bool with_labels) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.precision(17);
    for (const auto& e : g.edges) {
        if (!g.node_names.empty())
            out << g.node_names[e.u] << delimiter << g.node_names[e.v];
        else
            out << e.u << delimiter << e.v;
        out << delimiter << e.t;
        if (with_labels) out << delimiter << int(e.label);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

IncidenceView build_incidence(const TemporalGraph& g) {
    IncidenceView inc;
    inc.node_ptr.assign(static_cast<std::size_t>(g.n) + 1, 0);
    for (const auto& e : g.edges) {
        ++inc.node_ptr[static_cast<std::size_t>(e.u) + 1];
        ++inc.node_ptr[static_cast<std::size_t>(e.v) + 1];
    }
    for (std::size_t i = 1; i < inc.node_ptr.size(); ++i) inc.node_ptr[i] += inc.node_ptr[i - 1];
    inc.edge_idx.resize(static_cast<std::size_t>(2) * g.edges.size());
    std::vector<std::int64_t> cursor(inc.node_ptr.begin(), inc.node_ptr.end() - 1);
    // Edge order is ascending, so each per-node list comes out sorted.
    for (EdgeId i = 0; i < static_cast<EdgeId>(g.edges.size()); ++i) {
        const auto& e = g.edges[i];
        inc.edge_idx[cursor[e.u]++] = i;
        inc.edge_idx[cursor[e.v]++] = i;
    }
    return inc;
}

double time_std(const TemporalGraph& g) {
    const std::int64_t m = g.m();
    if (m < 2) throw std::invalid_argument("time_std requires at least 2 edges");
    double mean = 0.0;
    for (const auto& e : g.edges) mean += e.t;
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (const auto& e : g.edges) {
        const double d = e.t - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(m));
}

}  // namespace tdlg
