#pragma once

#include <cstdint>
#include <vector>

#include "tdlg/embeddings.hpp"
#include "tdlg/sparse.hpp"

namespace tdlg {

struct EigsOptions {
    double tol = 1e-6;        // residual bound relative to the norm estimate
    int basis_cap = 0;        // 0 = automatic (min(m, max(3k, 48)))
    int max_restarts = 100;
    std::uint64_t seed = 12345;
};

// Eigenpairs ordered by |eigenvalue| descending.
struct EigPairs {
    std::vector<double> values;   // size k
    std::vector<double> vectors;  // column-major, m x k, unit columns
    double max_residual = 0.0;    // max ||A v - lambda v|| over returned pairs
    int matvecs = 0;

    const double* vector(std::int64_t m, int j) const { return vectors.data() + m * j; }
};

// Thick-restart Lanczos with full reorthogonalization for the k eigenpairs of
// a symmetric sparse matrix with largest |eigenvalue|. Each eigenvector's
// sign is fixed so its largest-magnitude entry is positive. Throws when the
// residual bound is still violated after max_restarts, reporting the achieved
// residual.
EigPairs eigs_sym_topk(const SparseMatrix& a, int k, const EigsOptions& opt = {});

// Spectral embedding: row i holds eigenvector entries for edge i, each column
// scaled by its eigenvalue (raw eigenvectors with scale_by_eigenvalue=false).
EmbeddingMatrix dense_embed(const SparseMatrix& a, int k, bool scale_by_eigenvalue = true,
                            const EigsOptions& opt = {});

}  // namespace tdlg
