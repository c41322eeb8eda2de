#include "tdlg/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "tdlg/kernels.hpp"
#include "tdlg/parallel.hpp"

namespace tdlg {

namespace {

// ---- dense symmetric eigensolver for the projected problem ----
// Householder reduction to tridiagonal form followed by implicit-shift QL
// with accumulated transforms (EISPACK tred2/tql2 lineage). a is row-major
// n*n and becomes the eigenvector matrix (columns); d receives eigenvalues.

void householder_tridiag(std::vector<double>& a, int n, std::vector<double>& d,
                         std::vector<double>& e) {
    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(a[i * n + k]);
            if (scale == 0.0) {
                e[i] = a[i * n + l];
            } else {
                for (int k = 0; k <= l; ++k) {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                double f = a[i * n + l];
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    a[j * n + i] = a[i * n + j] / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += a[j * n + k] * a[i * n + k];
                    for (int k = j + 1; k <= l; ++k) g += a[k * n + j] * a[i * n + k];
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = a[i * n + j];
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k)
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        if (d[i] != 0.0) {
            for (int j = 0; j <= l; ++j) {
                double g = 0.0;
                for (int k = 0; k <= l; ++k) g += a[i * n + k] * a[k * n + j];
                for (int k = 0; k <= l; ++k) a[k * n + j] -= g * a[k * n + i];
            }
        }
        d[i] = a[i * n + i];
        a[i * n + i] = 1.0;
        for (int j = 0; j <= l; ++j) a[j * n + i] = a[i * n + j] = 0.0;
    }
}

void tridiag_ql(std::vector<double>& d, std::vector<double>& e, int n, std::vector<double>& z) {
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int mm;
        do {
            for (mm = l; mm < n - 1; ++mm) {
                const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
                if (std::abs(e[mm]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (mm != l) {
                if (iter++ == 60) throw std::runtime_error("tridiag_ql: no convergence");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i = mm - 1;
                for (; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    e[i + 1] = r = std::hypot(f, g);
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[mm] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[mm] = 0.0;
            }
        } while (mm != l);
    }
}

// Eigenpairs of a dense symmetric matrix, ordered by |value| descending.
void sym_eig_dense(std::vector<double> a, int n, std::vector<double>& values,
                   std::vector<double>& vectors) {
    std::vector<double> d(n), e(n);
    householder_tridiag(a, n, d, e);
    tridiag_ql(d, e, n, a);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        const double ax = std::abs(d[x]), ay = std::abs(d[y]);
        if (ax != ay) return ax > ay;
        if (d[x] != d[y]) return d[x] > d[y];
        return x < y;
    });
    values.resize(n);
    vectors.resize(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        values[j] = d[order[j]];
        for (int i = 0; i < n; ++i) vectors[static_cast<std::size_t>(j) * n + i] = a[i * n + order[j]];
    }
}

void fill_random_unit(std::mt19937_64& rng, double* v, std::size_t m) {
    for (std::size_t i = 0; i < m; ++i)
        v[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    const double nrm = kern::nrm2(v, m);
    kern::scal(v, 1.0 / nrm, m);
}

}  // namespace

EigPairs eigs_sym_topk(const SparseMatrix& a, int k, const EigsOptions& opt) {
    if (a.rows != a.cols) throw std::invalid_argument("eigs_sym_topk: matrix not square");
    const std::int64_t m = a.rows;
    if (k < 1 || k > m) throw std::invalid_argument("eigs_sym_topk: bad k");

    const int cap = opt.basis_cap > 0
                        ? static_cast<int>(std::min<std::int64_t>(opt.basis_cap, m))
                        : static_cast<int>(std::min<std::int64_t>(m, std::max(3 * k, 48)));
    const int cap_eff = std::max(cap, static_cast<int>(std::min<std::int64_t>(m, k + 2)));

    std::mt19937_64 rng(opt.seed);
    const auto mz = static_cast<std::size_t>(m);

    std::vector<double> basis(static_cast<std::size_t>(cap_eff + 1) * mz);
    auto vec = [&](int j) { return basis.data() + static_cast<std::size_t>(j) * mz; };
    std::vector<double> tmat(static_cast<std::size_t>(cap_eff + 1) * (cap_eff + 1), 0.0);
    auto tref = [&](int i, int j) -> double& { return tmat[static_cast<std::size_t>(i) * (cap_eff + 1) + j]; };
    std::vector<double> coupling;  // h: coupling of the residual vector to the basis
    std::vector<double> w(mz), theta, small_vecs;

    fill_random_unit(rng, vec(0), mz);
    int s = 0;
    int matvecs = 0;
    int restarts = 0;
    double norm_est = 0.0;
    const int check_every = std::max(8, k / 4);

    EigPairs out;
    out.values.resize(k);
    out.vectors.assign(static_cast<std::size_t>(k) * mz, 0.0);

    auto solve_projected = [&]() {
        std::vector<double> small(static_cast<std::size_t>(s) * s);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) small[static_cast<std::size_t>(i) * s + j] = tref(i, j);
        sym_eig_dense(std::move(small), s, theta, small_vecs);
        if (!theta.empty()) norm_est = std::max(norm_est, std::abs(theta[0]));
    };

    auto estimated_converged = [&]() {
        if (s < k) return false;
        solve_projected();
        const double bound = opt.tol * std::max(norm_est, 1e-300);
        for (int i = 0; i < k; ++i) {
            double r = 0.0;
            for (int j = 0; j < s; ++j)
                r += coupling[j] * small_vecs[static_cast<std::size_t>(i) * s + j];
            if (std::abs(r) > bound) return false;
        }
        return true;
    };

    // Ritz vectors for the current projected solution, columns scaled to unit
    // norm with the dominant entry positive.
    auto assemble = [&](int count, std::vector<double>& dst) {
        dst.assign(static_cast<std::size_t>(count) * mz, 0.0);
        parallel_for(static_cast<std::size_t>(count), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                double* x = dst.data() + i * mz;
                for (int j = 0; j < s; ++j)
                    kern::axpy(x, small_vecs[i * s + j], vec(j), mz);
            }
        });
    };

    auto expand = [&]() {
        double* vnew = vec(s);
        a.multiply({vnew, mz}, {w.data(), mz});
        ++matvecs;
        const double alpha = kern::dot(vnew, w.data(), mz);
        for (int i = 0; i < s; ++i) {
            tref(s, i) = coupling[i];
            tref(i, s) = coupling[i];
        }
        tref(s, s) = alpha;
        ++s;
        // full reorthogonalization, two classical Gram-Schmidt passes
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i < s; ++i) {
                const double c = kern::dot(vec(i), w.data(), mz);
                kern::axpy(w.data(), -c, vec(i), mz);
            }
        double beta = kern::nrm2(w.data(), mz);
        coupling.assign(s, 0.0);
        const double breakdown = 64.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(norm_est, std::abs(alpha));
        if (beta > breakdown) {
            coupling[s - 1] = beta;
            kern::scal(w.data(), 1.0 / beta, mz);
        } else if (s < m) {
            // invariant subspace hit: continue in a fresh random direction
            fill_random_unit(rng, w.data(), mz);
            for (int pass = 0; pass < 2; ++pass)
                for (int i = 0; i < s; ++i) {
                    const double c = kern::dot(vec(i), w.data(), mz);
                    kern::axpy(w.data(), -c, vec(i), mz);
                }
            const double nrm = kern::nrm2(w.data(), mz);
            kern::scal(w.data(), 1.0 / nrm, mz);
        }
        std::copy(w.begin(), w.end(), vec(s));
    };

    coupling.clear();
    while (true) {
        bool maybe_done = false;
        while (s < cap_eff && s < m && !maybe_done) {
            expand();
            if (s % check_every == 0 || s >= std::min<std::int64_t>(cap_eff, m))
                maybe_done = estimated_converged();
        }
        if (!maybe_done && s >= std::min<std::int64_t>(cap_eff, m))
            maybe_done = estimated_converged() || s >= m;

        if (maybe_done) {
            // verify with explicit residuals
            std::vector<double> cand;
            assemble(k, cand);
            double max_resid = 0.0;
            for (int i = 0; i < k; ++i) {
                double* x = cand.data() + static_cast<std::size_t>(i) * mz;
                const double nrm = kern::nrm2(x, mz);
                kern::scal(x, 1.0 / nrm, mz);
                a.multiply({x, mz}, {w.data(), mz});
                kern::axpy(w.data(), -theta[i], x, mz);
                max_resid = std::max(max_resid, kern::nrm2(w.data(), mz));
            }
            const double bound = opt.tol * std::max(norm_est, 1e-300);
            if (max_resid <= bound || s >= m) {
                if (max_resid > bound)
                    throw std::runtime_error(
                        "eigs_sym_topk: basis exhausted with residual " +
                        std::to_string(max_resid) + " above bound " + std::to_string(bound));
                for (int i = 0; i < k; ++i) {
                    double* x = cand.data() + static_cast<std::size_t>(i) * mz;
                    // sign convention: dominant entry positive
                    std::size_t arg = 0;
                    double best = 0.0;
                    for (std::size_t r = 0; r < mz; ++r)
                        if (std::abs(x[r]) > best) {
                            best = std::abs(x[r]);
                            arg = r;
                        }
                    if (x[arg] < 0.0) kern::scal(x, -1.0, mz);
                    out.values[i] = theta[i];
                    std::copy_n(x, mz, out.vectors.begin() + static_cast<std::size_t>(i) * mz);
                }
                out.max_residual = max_resid;
                out.matvecs = matvecs;
                return out;
            }
        }

        if (s >= std::min<std::int64_t>(cap_eff, m)) {
            if (++restarts > opt.max_restarts) {
                solve_projected();
                double worst = 0.0;
                for (int i = 0; i < std::min(k, s); ++i) {
                    double r = 0.0;
                    for (int j = 0; j < s; ++j)
                        r += coupling[j] * small_vecs[static_cast<std::size_t>(i) * s + j];
                    worst = std::max(worst, std::abs(r));
                }
                throw std::runtime_error("eigs_sym_topk: no convergence after " +
                                         std::to_string(opt.max_restarts) +
                                         " restarts; residual estimate " + std::to_string(worst));
            }
            // thick restart: keep the leading Ritz pairs plus the residual vector
            solve_projected();
            const int keep = std::min(s - 1, k + std::max(8, k / 2));
            std::vector<double> kept;
            assemble(keep, kept);
            std::vector<double> new_coupling(keep);
            for (int i = 0; i < keep; ++i) {
                double h = 0.0;
                for (int j = 0; j < s; ++j)
                    h += coupling[j] * small_vecs[static_cast<std::size_t>(i) * s + j];
                new_coupling[i] = h;
            }
            std::copy(vec(s), vec(s) + mz, w.begin());  // residual vector survives
            std::copy(kept.begin(), kept.end(), basis.begin());
            std::copy(w.begin(), w.end(), vec(keep));
            std::fill(tmat.begin(), tmat.end(), 0.0);
            for (int i = 0; i < keep; ++i) tref(i, i) = theta[i];
            coupling = std::move(new_coupling);
            s = keep;
        }
    }
}

EmbeddingMatrix dense_embed(const SparseMatrix& a, int k, bool scale_by_eigenvalue,
                            const EigsOptions& opt) {
    const EigPairs pairs = eigs_sym_topk(a, k, opt);
    const std::int64_t m = a.rows;
    std::vector<double> data(static_cast<std::size_t>(m) * k);
    for (std::int64_t r = 0; r < m; ++r)
        for (int j = 0; j < k; ++j) {
            const double scale = scale_by_eigenvalue ? pairs.values[j] : 1.0;
            data[static_cast<std::size_t>(r) * k + j] = scale * pairs.vector(m, j)[r];
        }
    return EmbeddingMatrix::dense(RowRole::edge, m, k, std::move(data));
}

}  // namespace tdlg
