// Scalar reference kernels. Compiled with -ffp-contract=off so that the
// compiler cannot fuse multiplies and adds behind our back; every fused
// operation is an explicit std::fma and mirrors one _mm256_fmadd_pd in the
// AVX2 variant.

#include "tdlg/kernels.hpp"

#include <bit>
#include <cmath>

#include "exp_constants.hpp"

namespace tdlg::kern {

using namespace detail;

double exp_saturating(double x) {
    if (x < kExpLo) x = kExpLo;
    if (x > kExpHi) x = kExpHi;
    const double nd = std::floor(std::fma(kLog2E, x, 0.5));
    double r = std::fma(-nd, kLn2Hi, x);
    r = std::fma(-nd, kLn2Lo, r);
    const double rr = r * r;
    const double p = r * std::fma(std::fma(kExpP0, rr, kExpP1), rr, kExpP2);
    const double q = std::fma(std::fma(std::fma(kExpQ0, rr, kExpQ1), rr, kExpQ2), rr, kExpQ3);
    const double e = std::fma(2.0, p / (q - p), 1.0);
    // 2^n assembled directly in the exponent field; n is in [-1021, 1023]
    const auto n = static_cast<std::int64_t>(nd);
    const double scale = std::bit_cast<double>((n + 1023) << 52);
    return e * scale;
}

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double nrm2_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return std::sqrt(s);
}

void axpy_scalar(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void scal_scalar(double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void gaussian_decay_scalar(double* w, const double* dt, const double* count,
                           double neg_inv_two_sigma_sq, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double sq = dt[i] * dt[i];
        w[i] = count[i] * exp_saturating(sq * neg_inv_two_sigma_sq);
    }
}

void laplacian_decay_scalar(double* w, const double* dt, const double* count,
                            double neg_inv_sigma, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        w[i] = count[i] * exp_saturating(std::abs(dt[i]) * neg_inv_sigma);
}

void sigmoid_scalar(double* p, const double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double e = exp_saturating(-z[i]);
        p[i] = 1.0 / (1.0 + e);
    }
}

void csr_spmv_scalar(const std::int64_t* row_ptr, const std::int32_t* col, const double* val,
                     std::size_t rows_begin, std::size_t rows_end, const double* x, double* y) {
    for (std::size_t r = rows_begin; r < rows_end; ++r) {
        double s = 0.0;
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
        y[r] = s;
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{
        "scalar",       dot_scalar,     nrm2_scalar,    axpy_scalar,
        scal_scalar,    gaussian_decay_scalar,          laplacian_decay_scalar,
        sigmoid_scalar, csr_spmv_scalar,
    };
    return k;
}

}  // namespace tdlg::kern
