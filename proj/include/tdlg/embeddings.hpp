#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tdlg/sparse.hpp"
#include "tdlg/temporal_graph.hpp"

namespace tdlg {

enum class RowRole { edge, node };

// Rows are per-edge or per-node feature vectors, stored dense (row-major) or
// as a shared sparse matrix view.
class EmbeddingMatrix {
public:
    static EmbeddingMatrix dense(RowRole role, std::int64_t rows, std::int64_t dim,
                                 std::vector<double> data);
    static EmbeddingMatrix sparse(RowRole role, std::shared_ptr<const SparseMatrix> m);

    bool is_dense() const { return sparse_ == nullptr; }
    RowRole role() const { return role_; }
    std::int64_t rows() const { return rows_; }
    std::int64_t dim() const { return dim_; }

    std::span<const double> dense_row(std::int64_t r) const {
        return {dense_.data() + r * dim_, static_cast<std::size_t>(dim_)};
    }
    std::span<const double> dense_data() const { return dense_; }
    const SparseMatrix& sparse_matrix() const { return *sparse_; }
    std::shared_ptr<const SparseMatrix> sparse_handle() const { return sparse_; }

private:
    RowRole role_ = RowRole::edge;
    std::int64_t rows_ = 0;
    std::int64_t dim_ = 0;
    std::vector<double> dense_;
    std::shared_ptr<const SparseMatrix> sparse_;
};

// The i-th edge embedding is the i-th row of the TDLG adjacency (or cross)
// matrix. Zero-copy view.
EmbeddingMatrix edge_embeddings(std::shared_ptr<const SparseMatrix> a);

// Node embedding = mean of the incident edges' embeddings; isolated nodes get
// zero rows. Output is dense when the input is dense, sparse otherwise.
EmbeddingMatrix mean_edge_node_embeddings(const IncidenceView& inc, const EmbeddingMatrix& y);

// Row subset, preserving order of `idx`.
EmbeddingMatrix take_rows(const EmbeddingMatrix& x, std::span<const std::int64_t> idx);

// Dense rows as CSV; sparse rows as `row col value` triplets.
void write_embeddings(const EmbeddingMatrix& x, const std::string& path);

}  // namespace tdlg
