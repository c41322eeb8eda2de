#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace tdlg::kern {

// Numeric inner loops, implemented once as scalar reference code and once
// with AVX2 intrinsics. The active table is picked at startup from CPUID and
// can be forced with TDLG_SIMD={auto,scalar,avx2}.
//
// Elementwise kernels (axpy, scal, gaussian_decay, sigmoid) are bit-identical
// across variants: the scalar reference uses std::fma wherever the vector
// code uses a fused multiply-add, and both share the same exp algorithm.
// Reduction kernels (dot, nrm2, csr_spmv) use different summation orders per
// variant and agree only to rounding error.
struct Kernels {
    const char* name;

    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*nrm2)(const double* x, std::size_t n);
    // y[i] += a * x[i], fused per element
    void (*axpy)(double* y, double a, const double* x, std::size_t n);
    void (*scal)(double* x, double a, std::size_t n);
    // w[i] = count[i] * exp(dt[i]*dt[i] * neg_inv_two_sigma_sq)
    void (*gaussian_decay)(double* w, const double* dt, const double* count,
                           double neg_inv_two_sigma_sq, std::size_t n);
    // w[i] = count[i] * exp(|dt[i]| * neg_inv_sigma)
    void (*laplacian_decay)(double* w, const double* dt, const double* count,
                            double neg_inv_sigma, std::size_t n);
    // p[i] = 1 / (1 + exp(-z[i]))
    void (*sigmoid)(double* p, const double* z, std::size_t n);
    // y[r] = sum_k val[k] * x[col[k]] over row r of a CSR matrix
    void (*csr_spmv)(const std::int64_t* row_ptr, const std::int32_t* col,
                     const double* val, std::size_t rows_begin,
                     std::size_t rows_end, const double* x, double* y);
};

const Kernels& scalar_kernels();
// nullptr when the binary was built without AVX2 support or the CPU lacks it
const Kernels* avx2_kernels();

// Table selected from CPUID and the TDLG_SIMD environment variable.
const Kernels& active();

// Exponential used by gaussian_decay and sigmoid in both variants.
// Saturates: returns exp(-708) below -708 and exp(709) above 709.
// Accuracy vs std::exp is a few ulp; see the kernel tests for the bound.
double exp_saturating(double x);

std::string variant_name();

// Convenience wrappers through the active table.
inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline double nrm2(const double* x, std::size_t n) { return active().nrm2(x, n); }
inline void axpy(double* y, double a, const double* x, std::size_t n) { active().axpy(y, a, x, n); }
inline void scal(double* x, double a, std::size_t n) { active().scal(x, a, n); }
inline void gaussian_decay(double* w, const double* dt, const double* count,
                           double neg_inv_two_sigma_sq, std::size_t n) {
    active().gaussian_decay(w, dt, count, neg_inv_two_sigma_sq, n);
}
inline void laplacian_decay(double* w, const double* dt, const double* count,
                            double neg_inv_sigma, std::size_t n) {
    active().laplacian_decay(w, dt, count, neg_inv_sigma, n);
}
inline void sigmoid(double* p, const double* z, std::size_t n) { active().sigmoid(p, z, n); }
inline void csr_spmv(const std::int64_t* row_ptr, const std::int32_t* col, const double* val,
                     std::size_t rows_begin, std::size_t rows_end, const double* x, double* y) {
    active().csr_spmv(row_ptr, col, val, rows_begin, rows_end, x, y);
}

}  // namespace tdlg::kern
