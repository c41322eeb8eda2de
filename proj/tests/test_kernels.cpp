#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "tdlg/kernels.hpp"

using namespace tdlg;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        x = lo + (hi - lo) * u;
    }
    return v;
}

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 64, 100, 333, 1024};

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("exp_saturating tracks std::exp to a few ulp") {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        // log-uniform magnitudes over the full useful range, both signs
        const double mag = std::exp(u * std::log(700.0 / 1e-8)) * 1e-8;
        const double x = (i % 2 == 0) ? -mag : mag;
        if (x < -708.0 || x > 709.0) continue;
        const double got = kern::exp_saturating(x);
        const double want = std::exp(x);
        const double rel = std::abs(got - want) / want;
        worst = std::max(worst, rel);
    }
    CHECK(worst < 1e-14);
    // saturation behavior
    CHECK(kern::exp_saturating(-1e9) == doctest::Approx(std::exp(-708.0)).epsilon(1e-13));
    CHECK(kern::exp_saturating(1e9) == doctest::Approx(std::exp(709.0)).epsilon(1e-13));
    CHECK(kern::exp_saturating(0.0) == 1.0);
}

TEST_CASE("scalar and avx2 elementwise kernels match bitwise") {
    const kern::Kernels& sc = kern::scalar_kernels();
    const kern::Kernels* vx = kern::avx2_kernels();
    if (!vx) {
        MESSAGE("avx2 variant not built; skipping");
        return;
    }
    std::mt19937_64 rng(11);
    for (const std::size_t n : kSizes) {
        auto x = random_vec(rng, n, -50.0, 50.0);
        auto y0 = random_vec(rng, n, -5.0, 5.0);
        auto y1 = y0;
        sc.axpy(y0.data(), 1.7, x.data(), n);
        vx->axpy(y1.data(), 1.7, x.data(), n);
        CHECK(bits_equal(y0, y1));

        auto s0 = x;
        auto s1 = x;
        sc.scal(s0.data(), -0.3123, n);
        vx->scal(s1.data(), -0.3123, n);
        CHECK(bits_equal(s0, s1));

        auto dt = random_vec(rng, n, -80.0, 80.0);
        auto cnt = random_vec(rng, n, 1.0, 2.0);
        std::vector<double> w0(n), w1(n);
        sc.gaussian_decay(w0.data(), dt.data(), cnt.data(), -0.5, n);
        vx->gaussian_decay(w1.data(), dt.data(), cnt.data(), -0.5, n);
        CHECK(bits_equal(w0, w1));

        sc.laplacian_decay(w0.data(), dt.data(), cnt.data(), -2.0, n);
        vx->laplacian_decay(w1.data(), dt.data(), cnt.data(), -2.0, n);
        CHECK(bits_equal(w0, w1));

        auto z = random_vec(rng, n, -800.0, 800.0);
        std::vector<double> p0(n), p1(n);
        sc.sigmoid(p0.data(), z.data(), n);
        vx->sigmoid(p1.data(), z.data(), n);
        CHECK(bits_equal(p0, p1));
    }
}

TEST_CASE("scalar and avx2 reductions agree to rounding error") {
    const kern::Kernels& sc = kern::scalar_kernels();
    const kern::Kernels* vx = kern::avx2_kernels();
    if (!vx) {
        MESSAGE("avx2 variant not built; skipping");
        return;
    }
    std::mt19937_64 rng(13);
    for (const std::size_t n : kSizes) {
        auto a = random_vec(rng, n, -1.0, 1.0);
        auto b = random_vec(rng, n, -1.0, 1.0);
        const double d0 = sc.dot(a.data(), b.data(), n);
        const double d1 = vx->dot(a.data(), b.data(), n);
        CHECK(std::abs(d0 - d1) <= 1e-13 * (1.0 + static_cast<double>(n)));
        const double n0 = sc.nrm2(a.data(), n);
        const double n1 = vx->nrm2(a.data(), n);
        CHECK(n0 == doctest::Approx(n1).epsilon(1e-13));
    }
}

TEST_CASE("csr_spmv variants agree on random sparse matrices") {
    const kern::Kernels& sc = kern::scalar_kernels();
    const kern::Kernels* vx = kern::avx2_kernels();
    if (!vx) {
        MESSAGE("avx2 variant not built; skipping");
        return;
    }
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t rows = 1 + rng() % 50;
        const std::size_t cols = 1 + rng() % 50;
        std::vector<std::int64_t> row_ptr{0};
        std::vector<std::int32_t> col;
        std::vector<double> val;
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t len = rng() % 12;
            for (std::size_t k = 0; k < len; ++k) {
                col.push_back(static_cast<std::int32_t>(rng() % cols));
                val.push_back(static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5);
            }
            row_ptr.push_back(static_cast<std::int64_t>(col.size()));
        }
        const auto x = random_vec(rng, cols, -2.0, 2.0);
        std::vector<double> y0(rows), y1(rows);
        sc.csr_spmv(row_ptr.data(), col.data(), val.data(), 0, rows, x.data(), y0.data());
        vx->csr_spmv(row_ptr.data(), col.data(), val.data(), 0, rows, x.data(), y1.data());
        for (std::size_t r = 0; r < rows; ++r)
            CHECK(std::abs(y0[r] - y1[r]) <= 1e-13 * (1.0 + std::abs(y0[r])));
    }
}

TEST_CASE("dispatch selects a valid table") {
    const std::string name = kern::variant_name();
    CHECK((name == "scalar" || name == "avx2"));
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") && kern::avx2_kernels()) {
        const char* env = std::getenv("TDLG_SIMD");
        if (!env || std::string(env) == "auto") CHECK(name == "avx2");
    }
#endif
}
