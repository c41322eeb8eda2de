#include "tdlg/tdlg.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tdlg/kernels.hpp"
#include "tdlg/parallel.hpp"

namespace tdlg {

namespace {

void validate(const TdlgConfig& cfg) {
    if (cfg.sigma_t && cfg.sigma_ratio)
        throw std::invalid_argument("set either sigma_t or sigma_ratio, not both");
    if (cfg.weight_cutoff && (*cfg.weight_cutoff < 0.0 || *cfg.weight_cutoff >= 2.0))
        throw std::invalid_argument("weight_cutoff must lie in [0, 2)");
}

// Shared row builder. Rows come from `row_edges`; columns are the edges of
// the graph behind `col_inc`/`col_edges`. For the square case both views are
// the same graph and `skip_diagonal` optionally removes the (i, i) entry.
SparseMatrix build_rows(std::span<const TemporalEdge> row_edges,
                        const IncidenceView& col_inc,
                        std::span<const TemporalEdge> col_edges, std::int64_t col_count,
                        double sigma_t, DecayKind decay, std::optional<double> cutoff,
                        bool same_graph, bool skip_diagonal, std::int64_t max_entries) {
    const auto n_rows = static_cast<std::int64_t>(row_edges.size());
    const double decay_scale = decay == DecayKind::gaussian
                                   ? -1.0 / (2.0 * sigma_t * sigma_t)
                                   : -1.0 / sigma_t;

    // Fail fast before committing memory: sum of incident-list lengths is an
    // upper bound on the entry count.
    std::int64_t estimate = 0;
    for (const auto& e : row_edges)
        estimate += col_inc.degree(e.u) + col_inc.degree(e.v);
    if (estimate > max_entries)
        throw std::runtime_error("line-graph entry estimate " + std::to_string(estimate) +
                                 " exceeds the budget of " + std::to_string(max_entries) +
                                 "; raise max_entries or set a weight cutoff");

    SparseMatrix a;
    a.rows = n_rows;
    a.cols = col_count;
    a.row_ptr.assign(static_cast<std::size_t>(n_rows) + 1, 0);

    // Pass 1: exact merged length per row (distinct incident edges).
    parallel_for(static_cast<std::size_t>(n_rows), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const auto lu = col_inc.incident(row_edges[i].u);
            const auto lv = col_inc.incident(row_edges[i].v);
            std::size_t pu = 0, pv = 0;
            std::int64_t len = 0;
            while (pu < lu.size() && pv < lv.size()) {
                if (lu[pu] == lv[pv]) { ++pu; ++pv; } else if (lu[pu] < lv[pv]) ++pu; else ++pv;
                ++len;
            }
            len += static_cast<std::int64_t>(lu.size() - pu) +
                   static_cast<std::int64_t>(lv.size() - pv);
            if (same_graph && skip_diagonal) --len;
            a.row_ptr[i + 1] = len;
        }
    });
    for (std::int64_t i = 0; i < n_rows; ++i) a.row_ptr[i + 1] += a.row_ptr[i];

    const std::int64_t total = a.row_ptr[n_rows];
    a.col.resize(static_cast<std::size_t>(total));
    a.val.resize(static_cast<std::size_t>(total));

    // Pass 2: merge incident lists into (column, shared-endpoint count)
    // pairs, then apply the decay kernel over the row slice.
    std::vector<std::int64_t> written(static_cast<std::size_t>(n_rows));
    parallel_for(static_cast<std::size_t>(n_rows), [&](std::size_t b, std::size_t e) {
        std::vector<double> dt, cnt;
        for (std::size_t i = b; i < e; ++i) {
            const auto& re = row_edges[i];
            const auto lu = col_inc.incident(re.u);
            const auto lv = col_inc.incident(re.v);
            const std::int64_t base = a.row_ptr[i];
            std::int64_t len = 0;
            dt.clear();
            cnt.clear();
            auto emit = [&](std::int32_t c, double shared) {
                if (same_graph && skip_diagonal && c == static_cast<std::int32_t>(i)) return;
                a.col[base + len] = c;
                dt.push_back(re.t - col_edges[c].t);
                cnt.push_back(shared);
                ++len;
            };
            std::size_t pu = 0, pv = 0;
            while (pu < lu.size() && pv < lv.size()) {
                if (lu[pu] == lv[pv]) {
                    emit(lu[pu], 2.0);
                    ++pu; ++pv;
                } else if (lu[pu] < lv[pv]) {
                    emit(lu[pu], 1.0);
                    ++pu;
                } else {
                    emit(lv[pv], 1.0);
                    ++pv;
                }
            }
            for (; pu < lu.size(); ++pu) emit(lu[pu], 1.0);
            for (; pv < lv.size(); ++pv) emit(lv[pv], 1.0);

            if (decay == DecayKind::gaussian)
                kern::gaussian_decay(a.val.data() + base, dt.data(), cnt.data(), decay_scale,
                                     static_cast<std::size_t>(len));
            else
                kern::laplacian_decay(a.val.data() + base, dt.data(), cnt.data(), decay_scale,
                                      static_cast<std::size_t>(len));
            if (cutoff) {
                std::int64_t keep = 0;
                for (std::int64_t k = 0; k < len; ++k) {
                    if (a.val[base + k] > *cutoff) {
                        a.col[base + keep] = a.col[base + k];
                        a.val[base + keep] = a.val[base + k];
                        ++keep;
                    }
                }
                len = keep;
            }
            written[i] = len;
        }
    });

    // Compact rows that dropped entries.
    std::int64_t out_pos = 0;
    bool shrunk = false;
    for (std::int64_t i = 0; i < n_rows; ++i)
        if (written[i] != a.row_ptr[i + 1] - a.row_ptr[i]) { shrunk = true; break; }
    if (shrunk) {
        for (std::int64_t i = 0; i < n_rows; ++i) {
            const std::int64_t base = a.row_ptr[i];
            for (std::int64_t k = 0; k < written[i]; ++k) {
                a.col[out_pos + k] = a.col[base + k];
                a.val[out_pos + k] = a.val[base + k];
            }
            a.row_ptr[i] = out_pos;
            out_pos += written[i];
        }
        a.row_ptr[n_rows] = out_pos;
        a.col.resize(static_cast<std::size_t>(out_pos));
        a.val.resize(static_cast<std::size_t>(out_pos));
    }
    return a;
}

}  // namespace

double resolve_sigma_t(const TdlgConfig& cfg, const TemporalGraph& reference) {
    validate(cfg);
    if (cfg.sigma_t) {
        if (!(*cfg.sigma_t > 0.0)) throw std::invalid_argument("sigma_t must be positive");
        return *cfg.sigma_t;
    }
    const double ratio = cfg.resolved_ratio_or_default();
    if (!(ratio > 0.0)) throw std::invalid_argument("sigma_ratio must be positive");
    const double st = time_std(reference);
    if (st == 0.0)
        throw std::runtime_error(
            "edge times have zero variance; an absolute sigma_t is required");
    return ratio * st;
}

SparseMatrix build_tdlg(const TemporalGraph& g, const IncidenceView& inc, const TdlgConfig& cfg) {
    validate(cfg);
    if (inc.nodes() != g.n) throw std::invalid_argument("incidence does not match graph");
    const double sigma = resolve_sigma_t(cfg, g);
    return build_rows(g.edges, inc, g.edges, g.m(), sigma, cfg.decay, cfg.weight_cutoff,
                      /*same_graph=*/true, /*skip_diagonal=*/!cfg.keep_diagonal,
                      cfg.max_entries);
}

SparseMatrix build_cross_tdlg(const TemporalGraph& train, const TemporalGraph& test,
                              const TdlgConfig& cfg) {
    validate(cfg);
    if (train.n != test.n)
        throw std::invalid_argument("train and test slices must share the node-id space");
    const double sigma = resolve_sigma_t(cfg, train);
    const IncidenceView train_inc = build_incidence(train);
    return build_rows(test.edges, train_inc, train.edges, train.m(), sigma, cfg.decay,
                      cfg.weight_cutoff, /*same_graph=*/false, /*skip_diagonal=*/false,
                      cfg.max_entries);
}

}  // namespace tdlg
