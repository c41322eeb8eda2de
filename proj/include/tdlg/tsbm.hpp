#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tdlg/temporal_graph.hpp"

namespace tdlg {

// Two equal communities U = [0, n/2), V = [n/2, n); two time periods with
// delta*n/2 edges each. Fraction alpha_p of period-p edges is intra-community
// (half U-U, half V-V), the rest inter-community. Period-p times are
// Normal(mu_p, sigma_p^2).
struct TsbmParams {
    std::int64_t n = 100;  // must be even
    int delta = 40;
    double alpha1 = 0.9;
    double alpha2 = 0.1;
    double mu1 = -1.0;
    double mu2 = 1.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    std::uint64_t seed = 12345;
};

// Edge-set identity, period-major. Matches the order of block_sizes below.
enum class BlockTag : int { UU1 = 0, VV1 = 1, UV1 = 2, UU2 = 3, VV2 = 4, UV2 = 5 };

struct TsbmSample {
    TemporalGraph graph;
    std::vector<BlockTag> tags;  // one per edge
    std::int64_t community_size = 0;

    bool in_u(NodeId v) const { return v < community_size; }
};

TsbmSample generate_tsbm(const TsbmParams& p);

// Columns of the expected node-embedding block matrix, topology-major.
enum class NodeEmbCol : int { UU1 = 0, UU2 = 1, VV1 = 2, VV2 = 3, UV1 = 4, UV2 = 5 };
NodeEmbCol node_emb_col(BlockTag t);

// Analytic large-n expectations for zero within-period time variance.
struct TsbmTheory {
    double gamma = 1.0;  // exp(-(mu1-mu2)^2 / (2 sigma_t^2))
    // Expected adjacency value for an entry between distinct edges of the two
    // blocks; indexed [BlockTag][BlockTag].
    std::array<std::array<double, 6>, 6> adj_blocks{};
    std::array<std::int64_t, 6> block_sizes{};
    // Expected node-embedding entry, rows {u in U, v in V}, columns ordered
    // by NodeEmbCol.
    std::array<std::array<double, 6>, 2> node_emb_blocks{};
};

double tsbm_gamma(const TsbmParams& p, double sigma_t);
TsbmTheory expected_tsbm_theory(const TsbmParams& p, double sigma_t);

// One cell of the Monte Carlo vs analytic comparison. `defined` is false for
// empty blocks (reported as n/a, never an error).
struct TheoryCell {
    int row = 0;
    int col = 0;
    double empirical = 0.0;
    double analytic = 0.0;
    double rel_dev = 0.0;
    std::int64_t count = 0;
    bool defined = false;
};

struct TheoryReport {
    TsbmTheory theory;
    std::vector<TheoryCell> adj_cells;   // 36, row/col are BlockTag values
    std::vector<TheoryCell> node_cells;  // 12, row in {0=U,1=V}, col a NodeEmbCol
    int trials = 0;
};

// Generates `trials` graphs (seed = base seed + trial), builds each TDLG with
// the given absolute sigma_t and compares block means against the analytic
// values. Requires sigma1 = sigma2 = 0. Diagonal entries are excluded from
// the adjacency cells; absent entries count as zeros.
TheoryReport verify_theory(const TsbmParams& p, double sigma_t, int trials);

}  // namespace tdlg
