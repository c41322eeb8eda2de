#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tdlg {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;

// One timestamped interaction. label is -1 when the dataset carries no
// classes, otherwise 0 or 1.
struct TemporalEdge {
    NodeId u = 0;
    NodeId v = 0;
    double t = 0.0;
    std::int8_t label = -1;
};

// Node ids are dense [0, n); edge index i is the i-th ingested edge and never
// changes. Immutable after construction.
struct TemporalGraph {
    std::int64_t n = 0;
    std::vector<TemporalEdge> edges;
    // Raw ids in first-appearance order; empty for synthetic graphs whose ids
    // are already dense integers.
    std::vector<std::string> node_names;

    std::int64_t m() const { return static_cast<std::int64_t>(edges.size()); }
    bool has_labels() const;
};

// Per-node lists of incident edge indices, CSR layout, each list ascending.
class IncidenceView {
public:
    std::span<const EdgeId> incident(NodeId v) const {
        return {edge_idx.data() + node_ptr[v], edge_idx.data() + node_ptr[v + 1]};
    }
    std::int64_t degree(NodeId v) const { return node_ptr[v + 1] - node_ptr[v]; }
    std::int64_t nodes() const { return static_cast<std::int64_t>(node_ptr.size()) - 1; }

    std::vector<std::int64_t> node_ptr;  // size n+1
    std::vector<EdgeId> edge_idx;        // size 2m
};

struct LoadOptions {
    char delimiter = ',';
    bool has_labels = false;
    // Raw integer ratings are binarized as (rating > threshold).
    long label_threshold = 0;
};

// Reads `u,v,t[,label]` rows. Raw node ids may be arbitrary tokens and are
// mapped to dense indices in first-appearance order. Blank lines and lines
// starting with '#' or '%' are skipped. Throws on malformed rows, self-loops
// and non-finite times, naming the line.
TemporalGraph load_edge_list(const std::string& path, const LoadOptions& opts = {});

void write_edge_list(const TemporalGraph& g, const std::string& path, char delimiter = ',',
                     bool with_labels = false);

IncidenceView build_incidence(const TemporalGraph& g);

// Population standard deviation of the edge times. Requires m >= 2; returns 0
// when all times coincide.
double time_std(const TemporalGraph& g);

}  // namespace tdlg
