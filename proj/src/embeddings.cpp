#include "tdlg/embeddings.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "tdlg/parallel.hpp"

namespace tdlg {

EmbeddingMatrix EmbeddingMatrix::dense(RowRole role, std::int64_t rows, std::int64_t dim,
                                       std::vector<double> data) {
    if (static_cast<std::int64_t>(data.size()) != rows * dim)
        throw std::invalid_argument("dense embedding size mismatch");
    EmbeddingMatrix x;
    x.role_ = role;
    x.rows_ = rows;
    x.dim_ = dim;
    x.dense_ = std::move(data);
    return x;
}

EmbeddingMatrix EmbeddingMatrix::sparse(RowRole role, std::shared_ptr<const SparseMatrix> m) {
    EmbeddingMatrix x;
    x.role_ = role;
    x.rows_ = m->rows;
    x.dim_ = m->cols;
    x.sparse_ = std::move(m);
    return x;
}

EmbeddingMatrix edge_embeddings(std::shared_ptr<const SparseMatrix> a) {
    return EmbeddingMatrix::sparse(RowRole::edge, std::move(a));
}

EmbeddingMatrix mean_edge_node_embeddings(const IncidenceView& inc, const EmbeddingMatrix& y) {
    const std::int64_t n = inc.nodes();
    const std::int64_t dim = y.dim();

    if (y.is_dense()) {
        std::vector<double> out(static_cast<std::size_t>(n * dim), 0.0);
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
            for (std::size_t v = b; v < e; ++v) {
                const auto edges = inc.incident(static_cast<NodeId>(v));
                if (edges.empty()) continue;
                double* row = out.data() + v * dim;
                for (const EdgeId i : edges) {
                    const auto src = y.dense_row(i);
                    for (std::int64_t c = 0; c < dim; ++c) row[c] += src[c];
                }
                const double inv = 1.0 / static_cast<double>(edges.size());
                for (std::int64_t c = 0; c < dim; ++c) row[c] *= inv;
            }
        });
        return EmbeddingMatrix::dense(RowRole::node, n, dim, std::move(out));
    }

    // Sparse accumulation: dense scratch plus a touched-column list per row.
    const SparseMatrix& ym = y.sparse_matrix();
    auto out = std::make_shared<SparseMatrix>();
    out->rows = n;
    out->cols = dim;
    out->row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);

    std::vector<std::vector<std::int32_t>> row_cols(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> row_vals(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
        std::vector<double> scratch(static_cast<std::size_t>(dim), 0.0);
        std::vector<char> seen(static_cast<std::size_t>(dim), 0);
        std::vector<std::int32_t> touched;
        for (std::size_t v = b; v < e; ++v) {
            const auto edges = inc.incident(static_cast<NodeId>(v));
            if (edges.empty()) continue;
            touched.clear();
            for (const EdgeId i : edges) {
                for (std::int64_t k = ym.row_ptr[i]; k < ym.row_ptr[i + 1]; ++k) {
                    const std::int32_t c = ym.col[k];
                    if (!seen[c]) {
                        seen[c] = 1;
                        touched.push_back(c);
                    }
                    scratch[c] += ym.val[k];
                }
            }
            std::sort(touched.begin(), touched.end());
            const double inv = 1.0 / static_cast<double>(edges.size());
            auto& rc = row_cols[v];
            auto& rv = row_vals[v];
            rc.reserve(touched.size());
            rv.reserve(touched.size());
            for (const std::int32_t c : touched) {
                const double m = scratch[c] * inv;
                scratch[c] = 0.0;
                seen[c] = 0;
                if (m != 0.0) {
                    rc.push_back(c);
                    rv.push_back(m);
                }
            }
        }
    });
    for (std::int64_t v = 0; v < n; ++v)
        out->row_ptr[v + 1] = out->row_ptr[v] + static_cast<std::int64_t>(row_cols[v].size());
    out->col.reserve(static_cast<std::size_t>(out->row_ptr[n]));
    out->val.reserve(static_cast<std::size_t>(out->row_ptr[n]));
    for (std::int64_t v = 0; v < n; ++v) {
        out->col.insert(out->col.end(), row_cols[v].begin(), row_cols[v].end());
        out->val.insert(out->val.end(), row_vals[v].begin(), row_vals[v].end());
    }
    return EmbeddingMatrix::sparse(RowRole::node, std::move(out));
}

EmbeddingMatrix take_rows(const EmbeddingMatrix& x, std::span<const std::int64_t> idx) {
    if (x.is_dense()) {
        std::vector<double> data;
        data.reserve(idx.size() * static_cast<std::size_t>(x.dim()));
        for (const std::int64_t r : idx) {
            const auto row = x.dense_row(r);
            data.insert(data.end(), row.begin(), row.end());
        }
        return EmbeddingMatrix::dense(x.role(), static_cast<std::int64_t>(idx.size()), x.dim(),
                                      std::move(data));
    }
    const SparseMatrix& src = x.sparse_matrix();
    auto out = std::make_shared<SparseMatrix>();
    out->rows = static_cast<std::int64_t>(idx.size());
    out->cols = src.cols;
    out->row_ptr.assign(idx.size() + 1, 0);
    for (std::size_t i = 0; i < idx.size(); ++i)
        out->row_ptr[i + 1] = out->row_ptr[i] + (src.row_ptr[idx[i] + 1] - src.row_ptr[idx[i]]);
    out->col.resize(static_cast<std::size_t>(out->row_ptr[idx.size()]));
    out->val.resize(out->col.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const std::int64_t base = src.row_ptr[idx[i]];
        const std::int64_t len = src.row_ptr[idx[i] + 1] - base;
        std::copy_n(src.col.begin() + base, len, out->col.begin() + out->row_ptr[i]);
        std::copy_n(src.val.begin() + base, len, out->val.begin() + out->row_ptr[i]);
    }
    return EmbeddingMatrix::sparse(x.role(), std::move(out));
}

void write_embeddings(const EmbeddingMatrix& x, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.precision(17);
    if (x.is_dense()) {
        for (std::int64_t r = 0; r < x.rows(); ++r) {
            const auto row = x.dense_row(r);
            for (std::int64_t c = 0; c < x.dim(); ++c) {
                if (c) out << ',';
                out << row[c];
            }
            out << '\n';
        }
    } else {
        const SparseMatrix& m = x.sparse_matrix();
        for (std::int64_t r = 0; r < m.rows; ++r)
            for (std::int64_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
                out << r << ' ' << m.col[k] << ' ' << m.val[k] << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace tdlg
