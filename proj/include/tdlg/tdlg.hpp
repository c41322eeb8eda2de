#pragma once

#include <optional>
#include <span>

#include "tdlg/sparse.hpp"
#include "tdlg/temporal_graph.hpp"

namespace tdlg {

// Gaussian decay exp(-dt^2 / (2 sigma^2)) is the evaluated default;
// laplacian decay exp(-|dt| / sigma) is available as an untuned alternative.
enum class DecayKind { gaussian, laplacian };

// Time-decay configuration. Exactly one of sigma_t (absolute scale) and
// sigma_ratio (scale as a fraction of the edge-time standard deviation) may
// be set; the default is sigma_ratio = 0.1.
struct TdlgConfig {
    std::optional<double> sigma_t;
    std::optional<double> sigma_ratio;
    DecayKind decay = DecayKind::gaussian;
    Normalization normalization = Normalization::none;
    // Entries with weight <= weight_cutoff are dropped when set. Performance
    // lever only; off by default. Valid range [0, 2).
    std::optional<double> weight_cutoff;
    bool keep_diagonal = true;
    // Fail fast when the per-node clique expansion would exceed this many
    // entries (hub blowup guard).
    std::int64_t max_entries = 400'000'000;

    double resolved_ratio_or_default() const { return sigma_ratio.value_or(0.1); }
};

// Resolves the absolute decay scale for a config against the reference edge
// set (the training edges, for cross matrices). Throws when the config is
// contradictory, sigma_t <= 0, or ratio mode meets zero time variance.
double resolve_sigma_t(const TdlgConfig& cfg, const TemporalGraph& reference);

// Weighted line-graph adjacency: entry (i, j) is the number of endpoints the
// two edges share times exp(-(t_i - t_j)^2 / (2 sigma_t^2)). Diagonal entries
// are 2 unless keep_diagonal is off. Output is symmetric, rows sorted.
// cfg.normalization is not applied here; callers use normalize().
SparseMatrix build_tdlg(const TemporalGraph& g, const IncidenceView& inc, const TdlgConfig& cfg);

// Cross matrix between test edges (rows) and training edges (columns), with
// sigma_t resolved from the training edges only. Rows of the result are the
// feature vectors of the test edges.
SparseMatrix build_cross_tdlg(const TemporalGraph& train, const TemporalGraph& test,
                              const TdlgConfig& cfg);

}  // namespace tdlg
