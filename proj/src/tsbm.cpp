#include "tdlg/tsbm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tdlg/rng.hpp"
#include "tdlg/sparse.hpp"
#include "tdlg/tdlg.hpp"

namespace tdlg {

namespace {

struct PeriodCounts {
    std::int64_t intra_per_community = 0;  // edges in each of U-U and V-V
    std::int64_t inter = 0;
};

// Nearest-integer counts for one period with the residual check.
PeriodCounts period_counts(const TsbmParams& p, double alpha) {
    const double per_period = 0.5 * static_cast<double>(p.delta) * static_cast<double>(p.n);
    const double intra_exact = alpha * per_period / 2.0;
    const double inter_exact = (1.0 - alpha) * per_period;
    PeriodCounts c;
    c.intra_per_community = std::llround(intra_exact);
    c.inter = std::llround(inter_exact);
    const double residual = 2.0 * std::abs(static_cast<double>(c.intra_per_community) - intra_exact) +
                            std::abs(static_cast<double>(c.inter) - inter_exact);
    if (residual > 0.5)
        throw std::invalid_argument("TSBM block counts do not round cleanly (residual " +
                                    std::to_string(residual) + ")");
    if (2 * c.intra_per_community + c.inter != static_cast<std::int64_t>(per_period))
        throw std::invalid_argument("TSBM block counts do not sum to delta*n/2 after rounding");
    return c;
}

void validate(const TsbmParams& p) {
    if (p.n < 4 || p.n % 2 != 0) throw std::invalid_argument("TSBM requires even n >= 4");
    if (p.delta <= 0) throw std::invalid_argument("TSBM requires delta > 0");
    for (const double a : {p.alpha1, p.alpha2})
        if (a < 0.0 || a > 1.0) throw std::invalid_argument("TSBM alphas must lie in [0, 1]");
    if (p.sigma1 < 0.0 || p.sigma2 < 0.0)
        throw std::invalid_argument("TSBM time standard deviations must be >= 0");
}

}  // namespace

NodeEmbCol node_emb_col(BlockTag t) {
    switch (t) {
        case BlockTag::UU1: return NodeEmbCol::UU1;
        case BlockTag::UU2: return NodeEmbCol::UU2;
        case BlockTag::VV1: return NodeEmbCol::VV1;
        case BlockTag::VV2: return NodeEmbCol::VV2;
        case BlockTag::UV1: return NodeEmbCol::UV1;
        default: return NodeEmbCol::UV2;
    }
}

TsbmSample generate_tsbm(const TsbmParams& p) {
    validate(p);
    const PeriodCounts c1 = period_counts(p, p.alpha1);
    const PeriodCounts c2 = period_counts(p, p.alpha2);

    TsbmSample s;
    s.community_size = p.n / 2;
    s.graph.n = p.n;
    const std::int64_t per_period = static_cast<std::int64_t>(p.delta) * p.n / 2;
    s.graph.edges.reserve(static_cast<std::size_t>(2 * per_period));
    s.tags.reserve(static_cast<std::size_t>(2 * per_period));

    Rng rng(p.seed);
    const auto half = static_cast<std::uint64_t>(s.community_size);

    auto add_intra = [&](std::int64_t count, NodeId base, double mu, double sigma, BlockTag tag) {
        for (std::int64_t i = 0; i < count; ++i) {
            const auto a = static_cast<NodeId>(rng.below(half));
            NodeId b;
            do {
                b = static_cast<NodeId>(rng.below(half));
            } while (b == a);
            s.graph.edges.push_back({static_cast<NodeId>(base + a), static_cast<NodeId>(base + b),
                                     rng.normal(mu, sigma), -1});
            s.tags.push_back(tag);
        }
    };
    auto add_inter = [&](std::int64_t count, double mu, double sigma, BlockTag tag) {
        for (std::int64_t i = 0; i < count; ++i) {
            const auto a = static_cast<NodeId>(rng.below(half));
            const auto b = static_cast<NodeId>(half + rng.below(half));
            s.graph.edges.push_back({a, b, rng.normal(mu, sigma), -1});
            s.tags.push_back(tag);
        }
    };

    add_intra(c1.intra_per_community, 0, p.mu1, p.sigma1, BlockTag::UU1);
    add_intra(c1.intra_per_community, static_cast<NodeId>(half), p.mu1, p.sigma1, BlockTag::VV1);
    add_inter(c1.inter, p.mu1, p.sigma1, BlockTag::UV1);
    add_intra(c2.intra_per_community, 0, p.mu2, p.sigma2, BlockTag::UU2);
    add_intra(c2.intra_per_community, static_cast<NodeId>(half), p.mu2, p.sigma2, BlockTag::VV2);
    add_inter(c2.inter, p.mu2, p.sigma2, BlockTag::UV2);
    return s;
}

double tsbm_gamma(const TsbmParams& p, double sigma_t) {
    if (!(sigma_t > 0.0)) throw std::invalid_argument("sigma_t must be positive");
    const double d = p.mu1 - p.mu2;
    return std::exp(-(d * d) / (2.0 * sigma_t * sigma_t));
}

TsbmTheory expected_tsbm_theory(const TsbmParams& p, double sigma_t) {
    validate(p);
    TsbmTheory th;
    th.gamma = tsbm_gamma(p, sigma_t);
    const double n = static_cast<double>(p.n);

    // Shared-endpoint expectation by topology: 8/n for same intra block, 0
    // for opposite intra blocks, 4/n for every pairing that involves an
    // inter-community edge or mixes intra with inter.
    auto topo = [](BlockTag t) {
        switch (t) {
            case BlockTag::UU1: case BlockTag::UU2: return 0;
            case BlockTag::VV1: case BlockTag::VV2: return 1;
            default: return 2;
        }
    };
    auto period = [](BlockTag t) { return (static_cast<int>(t) < 3) ? 1 : 2; };
    const double k[3][3] = {{8.0 / n, 0.0, 4.0 / n},
                            {0.0, 8.0 / n, 4.0 / n},
                            {4.0 / n, 4.0 / n, 4.0 / n}};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            const auto a = static_cast<BlockTag>(i);
            const auto b = static_cast<BlockTag>(j);
            const double decay = period(a) == period(b) ? 1.0 : th.gamma;
            th.adj_blocks[i][j] = k[topo(a)][topo(b)] * decay;
        }

    const PeriodCounts c1 = period_counts(p, p.alpha1);
    const PeriodCounts c2 = period_counts(p, p.alpha2);
    th.block_sizes = {c1.intra_per_community, c1.intra_per_community, c1.inter,
                      c2.intra_per_community, c2.intra_per_community, c2.inter};

    // Rows {u in U, v in V}; columns (UU1, UU2, VV1, VV2, UV1, UV2).
    const double g = th.gamma;
    const double a1 = p.alpha1, a2 = p.alpha2;
    const double scale = 2.0 / n;
    const double same1 = a1 + g * a2;
    const double same2 = a2 + g * a1;
    const double opp1 = (1.0 - a1) + g * (1.0 - a2);
    const double opp2 = (1.0 - a2) + g * (1.0 - a1);
    const double mix = 0.5 * (1.0 + g);
    th.node_emb_blocks[0] = {scale * same1, scale * same2, scale * opp1,
                             scale * opp2, scale * mix, scale * mix};
    th.node_emb_blocks[1] = {scale * opp1, scale * opp2, scale * same1,
                             scale * same2, scale * mix, scale * mix};
    return th;
}

TheoryReport verify_theory(const TsbmParams& p, double sigma_t, int trials) {
    validate(p);
    if (p.sigma1 != 0.0 || p.sigma2 != 0.0)
        throw std::invalid_argument("verify_theory assumes zero within-period time variance");
    if (trials < 1) throw std::invalid_argument("verify_theory requires trials >= 1");

    TheoryReport rep;
    rep.trials = trials;
    rep.theory = expected_tsbm_theory(p, sigma_t);

    double adj_sum[6][6] = {};
    double adj_cnt[6][6] = {};
    double node_sum[2][6] = {};
    double node_cnt[2][6] = {};

    TdlgConfig cfg;
    cfg.sigma_ratio.reset();
    cfg.sigma_t = sigma_t;

    for (int trial = 0; trial < trials; ++trial) {
        TsbmParams pt = p;
        pt.seed = p.seed + static_cast<std::uint64_t>(trial);
        const TsbmSample sample = generate_tsbm(pt);
        const auto& tags = sample.tags;
        const IncidenceView inc = build_incidence(sample.graph);
        const SparseMatrix a = build_tdlg(sample.graph, inc, cfg);
        const std::int64_t m = sample.graph.m();

        // adjacency cells: mean over distinct ordered pairs, zeros included
        for (std::int64_t i = 0; i < m; ++i) {
            const int bi = static_cast<int>(tags[i]);
            for (std::int64_t kk = a.row_ptr[i]; kk < a.row_ptr[i + 1]; ++kk) {
                const std::int64_t j = a.col[kk];
                if (j == i) continue;
                adj_sum[bi][static_cast<int>(tags[j])] += a.val[kk];
            }
        }
        for (int bi = 0; bi < 6; ++bi)
            for (int bj = 0; bj < 6; ++bj) {
                const double si = static_cast<double>(rep.theory.block_sizes[bi]);
                const double sj = static_cast<double>(rep.theory.block_sizes[bj]);
                adj_cnt[bi][bj] += bi == bj ? si * (si - 1.0) : si * sj;
            }

        // node-embedding cells with the per-node exclusion of incident edges:
        // X[v][j] = (1/deg v) * sum_{i inc v} A[i][j], averaged over columns j
        // in the block that are not themselves incident to v.
        std::vector<std::array<double, 6>> row_block_sum(static_cast<std::size_t>(m));
        for (std::int64_t i = 0; i < m; ++i) {
            auto& acc = row_block_sum[i];
            acc.fill(0.0);
            for (std::int64_t kk = a.row_ptr[i]; kk < a.row_ptr[i + 1]; ++kk)
                acc[static_cast<int>(tags[a.col[kk]])] += a.val[kk];
        }
        std::array<std::int64_t, 6> block_total{};
        for (std::int64_t i = 0; i < m; ++i) ++block_total[static_cast<int>(tags[i])];
        for (NodeId v = 0; v < p.n; ++v) {
            const auto edges = inc.incident(v);
            if (edges.empty()) continue;
            const int group = sample.in_u(v) ? 0 : 1;
            const double inv_deg = 1.0 / static_cast<double>(edges.size());
            std::array<double, 6> sum{};
            std::array<std::int64_t, 6> inc_in_block{};
            for (const EdgeId i : edges) {
                for (int b = 0; b < 6; ++b) sum[b] += row_block_sum[i][b];
                ++inc_in_block[static_cast<int>(tags[i])];
            }
            // remove columns incident to v (they are outside the U'/V' blocks)
            for (const EdgeId i : edges)
                for (const EdgeId j : edges) sum[static_cast<int>(tags[j])] -= a.at(i, j);
            for (int b = 0; b < 6; ++b) {
                const int col = static_cast<int>(node_emb_col(static_cast<BlockTag>(b)));
                node_sum[group][col] += sum[b] * inv_deg;
                node_cnt[group][col] +=
                    static_cast<double>(block_total[b] - inc_in_block[b]);
            }
        }
    }

    for (int bi = 0; bi < 6; ++bi)
        for (int bj = 0; bj < 6; ++bj) {
            TheoryCell cell;
            cell.row = bi;
            cell.col = bj;
            cell.analytic = rep.theory.adj_blocks[bi][bj];
            cell.count = static_cast<std::int64_t>(adj_cnt[bi][bj]);
            cell.defined = cell.count > 0;
            if (cell.defined) {
                cell.empirical = adj_sum[bi][bj] / adj_cnt[bi][bj];
                cell.rel_dev = cell.analytic != 0.0
                                   ? std::abs(cell.empirical - cell.analytic) / std::abs(cell.analytic)
                                   : std::abs(cell.empirical);
            }
            rep.adj_cells.push_back(cell);
        }
    for (int group = 0; group < 2; ++group)
        for (int col = 0; col < 6; ++col) {
            TheoryCell cell;
            cell.row = group;
            cell.col = col;
            cell.analytic = rep.theory.node_emb_blocks[group][col];
            cell.count = static_cast<std::int64_t>(node_cnt[group][col]);
            cell.defined = cell.count > 0;
            if (cell.defined) {
                cell.empirical = node_sum[group][col] / node_cnt[group][col];
                cell.rel_dev = cell.analytic != 0.0
                                   ? std::abs(cell.empirical - cell.analytic) / std::abs(cell.analytic)
                                   : std::abs(cell.empirical);
            }
            rep.node_cells.push_back(cell);
        }
    return rep;
}

}  // namespace tdlg
