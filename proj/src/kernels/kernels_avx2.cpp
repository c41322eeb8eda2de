// AVX2 + FMA kernel variants. This translation unit is the only one compiled
// with -mavx2 -mfma; it must not be entered on CPUs without those features
// (dispatch.cpp checks CPUID before handing out this table).

#include "tdlg/kernels.hpp"

#ifdef TDLG_HAVE_AVX2

#include <immintrin.h>

#include <cmath>

#include "exp_constants.hpp"

namespace tdlg::kern {

using namespace detail;

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// Mirrors exp_saturating lane by lane; see exp_constants.hpp for the scheme.
inline __m256d exp4(__m256d x) {
    x = _mm256_max_pd(_mm256_set1_pd(kExpLo), _mm256_min_pd(_mm256_set1_pd(kExpHi), x));
    const __m256d nd =
        _mm256_floor_pd(_mm256_fmadd_pd(_mm256_set1_pd(kLog2E), x, _mm256_set1_pd(0.5)));
    __m256d r = _mm256_fnmadd_pd(nd, _mm256_set1_pd(kLn2Hi), x);
    r = _mm256_fnmadd_pd(nd, _mm256_set1_pd(kLn2Lo), r);
    const __m256d rr = _mm256_mul_pd(r, r);
    __m256d p = _mm256_fmadd_pd(_mm256_set1_pd(kExpP0), rr, _mm256_set1_pd(kExpP1));
    p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(kExpP2));
    p = _mm256_mul_pd(r, p);
    __m256d q = _mm256_fmadd_pd(_mm256_set1_pd(kExpQ0), rr, _mm256_set1_pd(kExpQ1));
    q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(kExpQ2));
    q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(kExpQ3));
    const __m256d frac = _mm256_div_pd(p, _mm256_sub_pd(q, p));
    const __m256d e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), frac, _mm256_set1_pd(1.0));
    // 2^n via the exponent field, n in [-1021, 1023]
    const __m128i n32 = _mm256_cvtpd_epi32(nd);
    const __m256i n64 = _mm256_cvtepi32_epi64(n32);
    const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double nrm2_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * x[i];
    return std::sqrt(s);
}

void axpy_avx2(double* y, double a, const double* x, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void scal_avx2(double* x, double a, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void gaussian_decay_avx2(double* w, const double* dt, const double* count,
                         double neg_inv_two_sigma_sq, std::size_t n) {
    const __m256d csig = _mm256_set1_pd(neg_inv_two_sigma_sq);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_loadu_pd(dt + i);
        const __m256d sq = _mm256_mul_pd(d, d);
        const __m256d e = exp4(_mm256_mul_pd(sq, csig));
        _mm256_storeu_pd(w + i, _mm256_mul_pd(_mm256_loadu_pd(count + i), e));
    }
    for (; i < n; ++i) {
        const double sq = dt[i] * dt[i];
        w[i] = count[i] * exp_saturating(sq * neg_inv_two_sigma_sq);
    }
}

void laplacian_decay_avx2(double* w, const double* dt, const double* count,
                          double neg_inv_sigma, std::size_t n) {
    const __m256d csig = _mm256_set1_pd(neg_inv_sigma);
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ad = _mm256_and_pd(_mm256_loadu_pd(dt + i), absmask);
        const __m256d e = exp4(_mm256_mul_pd(ad, csig));
        _mm256_storeu_pd(w + i, _mm256_mul_pd(_mm256_loadu_pd(count + i), e));
    }
    for (; i < n; ++i)
        w[i] = count[i] * exp_saturating(std::abs(dt[i]) * neg_inv_sigma);
}

void sigmoid_avx2(double* p, const double* z, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d zn = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_loadu_pd(z + i));
        const __m256d e = exp4(zn);
        _mm256_storeu_pd(p + i, _mm256_div_pd(one, _mm256_add_pd(one, e)));
    }
    for (; i < n; ++i) {
        const double e = exp_saturating(-z[i]);
        p[i] = 1.0 / (1.0 + e);
    }
}

void csr_spmv_avx2(const std::int64_t* row_ptr, const std::int32_t* col, const double* val,
                   std::size_t rows_begin, std::size_t rows_end, const double* x, double* y) {
    for (std::size_t r = rows_begin; r < rows_end; ++r) {
        const std::int64_t lo = row_ptr[r], hi = row_ptr[r + 1];
        __m256d acc = _mm256_setzero_pd();
        std::int64_t k = lo;
        for (; k + 4 <= hi; k += 4) {
            const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + k));
            const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + k), xv, acc);
        }
        double s = hsum(acc);
        for (; k < hi; ++k) s += val[k] * x[col[k]];
        y[r] = s;
    }
}

}  // namespace

const Kernels* avx2_kernels() {
    static const Kernels k{
        "avx2",       dot_avx2,     nrm2_avx2,    axpy_avx2,
        scal_avx2,    gaussian_decay_avx2,        laplacian_decay_avx2,
        sigmoid_avx2, csr_spmv_avx2,
    };
    return &k;
}

}  // namespace tdlg::kern

#else

namespace tdlg::kern {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace tdlg::kern

#endif  // TDLG_HAVE_AVX2
