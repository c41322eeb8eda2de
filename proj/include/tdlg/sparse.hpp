#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tdlg {

// CSR matrix with strictly positive stored weights and columns sorted within
// each row. Square instances produced by build_tdlg are symmetric; the
// train/test cross matrix is rectangular.
struct SparseMatrix {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<std::int64_t> row_ptr;  // size rows+1
    std::vector<std::int32_t> col;
    std::vector<double> val;

    std::int64_t nnz() const { return static_cast<std::int64_t>(val.size()); }

    std::span<const std::int32_t> row_cols(std::int64_t r) const {
        return {col.data() + row_ptr[r], col.data() + row_ptr[r + 1]};
    }
    std::span<const double> row_vals(std::int64_t r) const {
        return {val.data() + row_ptr[r], val.data() + row_ptr[r + 1]};
    }

    // Value at (r, c), zero when the entry is absent. Binary search.
    double at(std::int64_t r, std::int64_t c) const;

    // y = A x (row-parallel)
    void multiply(std::span<const double> x, std::span<double> y) const;

    std::vector<double> row_sums() const;

    bool structurally_equal(const SparseMatrix& other) const;
};

enum class Normalization { none, spectral, edge };

// spectral: D^-1/2 A D^-1/2; edge: (D^-1 A + A D^-1) / 2. Degrees are row
// sums. Throws if any row sum is <= 0, naming the row.
SparseMatrix normalize(const SparseMatrix& a, Normalization scheme);

// Text export: one `i j w` triplet per line, 0-based, row-major sorted.
void write_coordinate_text(const SparseMatrix& a, const std::string& path);

// Binary CSR dump. Layout, all little-endian:
//   magic "TDLGCSR1" (8 bytes)
//   int64 rows, int64 cols, int64 nnz
//   int64 row_ptr[rows+1]
//   int64 col[nnz]
//   double val[nnz]
void write_csr_binary(const SparseMatrix& a, const std::string& path);
SparseMatrix read_csr_binary(const std::string& path);

}  // namespace tdlg
