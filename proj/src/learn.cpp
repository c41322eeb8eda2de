#include "tdlg/learn.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "tdlg/kernels.hpp"
#include "tdlg/parallel.hpp"

namespace tdlg {

namespace {

// log(1 + exp(t)) without overflow
double softplus(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

// Fixed strip partition for gradient reductions so the result is bit-stable
// no matter how many workers run.
constexpr std::size_t kGradStrips = 16;

struct Problem {
    const EmbeddingMatrix& x;
    std::span<const std::int8_t> y;
    std::vector<double> sample_weight;
    double l2;
    std::int64_t rows;
    std::int64_t dim;

    // z = X beta + b
    void scores(std::span<const double> theta, std::vector<double>& z) const {
        const double* beta = theta.data();
        const double b = theta[static_cast<std::size_t>(dim)];
        z.resize(static_cast<std::size_t>(rows));
        if (x.is_dense()) {
            parallel_for(static_cast<std::size_t>(rows), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t r = lo; r < hi; ++r)
                    z[r] = kern::dot(x.dense_row(static_cast<std::int64_t>(r)).data(), beta,
                                     static_cast<std::size_t>(dim)) + b;
            });
        } else {
            const SparseMatrix& sm = x.sparse_matrix();
            parallel_for(static_cast<std::size_t>(rows), [&](std::size_t lo, std::size_t hi) {
                kern::csr_spmv(sm.row_ptr.data(), sm.col.data(), sm.val.data(), lo, hi, beta,
                               z.data());
            });
            for (auto& v : z) v += b;
        }
    }

    // loss at theta = [beta, b]; z is cached for a later gradient call
    double loss_at(std::span<const double> theta, std::vector<double>& z) const {
        scores(theta, z);
        double loss = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double yt = y[i] > 0 ? 1.0 : -1.0;
            loss += sample_weight[i] * softplus(-yt * z[i]);
        }
        const double* beta = theta.data();
        double reg = 0.0;
        for (std::int64_t j = 0; j < dim; ++j) reg += beta[j] * beta[j];
        return loss + 0.5 * l2 * reg;
    }

    // gradient using the scores cached by loss_at for the same theta
    void gradient_at(std::span<const double> theta, const std::vector<double>& z,
                     std::vector<double>& grad, std::vector<double>& p,
                     std::vector<double>& strip_partials) const {
        p.resize(z.size());
        kern::sigmoid(p.data(), z.data(), z.size());
        // residual r_i = w_i (p_i - y_i)
        std::vector<double>& r = p;
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = sample_weight[i] * (p[i] - (y[i] > 0 ? 1.0 : 0.0));
        const double* beta = theta.data();

        grad.assign(static_cast<std::size_t>(dim) + 1, 0.0);
        const std::size_t strips = std::min<std::size_t>(kGradStrips, std::max<std::int64_t>(rows, 1));
        const std::size_t strip_len =
            (static_cast<std::size_t>(rows) + strips - 1) / std::max<std::size_t>(strips, 1);
        strip_partials.assign(strips * static_cast<std::size_t>(dim), 0.0);
        std::vector<double> strip_bias(strips, 0.0);

        parallel_for(strips, [&](std::size_t slo, std::size_t shi) {
            for (std::size_t s = slo; s < shi; ++s) {
                const std::size_t lo = s * strip_len;
                const std::size_t hi =
                    std::min<std::size_t>(static_cast<std::size_t>(rows), lo + strip_len);
                double* part = strip_partials.data() + s * static_cast<std::size_t>(dim);
                double bsum = 0.0;
                if (x.is_dense()) {
                    for (std::size_t i = lo; i < hi; ++i) {
                        kern::axpy(part, r[i], x.dense_row(static_cast<std::int64_t>(i)).data(),
                                   static_cast<std::size_t>(dim));
                        bsum += r[i];
                    }
                } else {
                    const SparseMatrix& sm = x.sparse_matrix();
                    for (std::size_t i = lo; i < hi; ++i) {
                        for (std::int64_t k = sm.row_ptr[i]; k < sm.row_ptr[i + 1]; ++k)
                            part[sm.col[k]] = std::fma(r[i], sm.val[k], part[sm.col[k]]);
                        bsum += r[i];
                    }
                }
                strip_bias[s] = bsum;
            }
        });
        for (std::size_t s = 0; s < strips; ++s) {
            kern::axpy(grad.data(), 1.0, strip_partials.data() + s * static_cast<std::size_t>(dim),
                       static_cast<std::size_t>(dim));
            grad[static_cast<std::size_t>(dim)] += strip_bias[s];
        }
        kern::axpy(grad.data(), l2, beta, static_cast<std::size_t>(dim));
    }

    double eval(std::span<const double> theta, std::vector<double>& grad, std::vector<double>& z,
                std::vector<double>& p, std::vector<double>& strip_partials) const {
        const double loss = loss_at(theta, z);
        gradient_at(theta, z, grad, p, strip_partials);
        return loss;
    }
};

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (const double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> make_sample_weights(std::span<const std::int8_t> y, ClassWeight cw) {
    std::vector<double> w(y.size(), 1.0);
    if (cw == ClassWeight::balanced) {
        const auto [w0, w1] = balanced_class_weights(y);
        for (std::size_t i = 0; i < y.size(); ++i) w[i] = y[i] > 0 ? w1 : w0;
    }
    return w;
}

}  // namespace

std::pair<double, double> balanced_class_weights(std::span<const std::int8_t> y) {
    std::int64_t pos = 0;
    for (const auto v : y) pos += v > 0 ? 1 : 0;
    const auto n = static_cast<double>(y.size());
    return {n / (2.0 * (n - static_cast<double>(pos))), n / (2.0 * static_cast<double>(pos))};
}

double logreg_value_and_gradient(const EmbeddingMatrix& x, std::span<const std::int8_t> y,
                                 const LogRegConfig& cfg, std::span<const double> theta,
                                 std::span<double> grad) {
    if (theta.size() != static_cast<std::size_t>(x.dim()) + 1 || grad.size() != theta.size())
        throw std::invalid_argument("logreg_value_and_gradient: theta/grad size mismatch");
    Problem prob{x, y, make_sample_weights(y, cfg.class_weight), cfg.l2, x.rows(), x.dim()};
    std::vector<double> g, z, p, strips;
    const double loss = prob.eval(theta, g, z, p, strips);
    std::copy(g.begin(), g.end(), grad.begin());
    return loss;
}

LogRegModel train_logreg(const EmbeddingMatrix& x, std::span<const std::int8_t> y,
                         const LogRegConfig& cfg) {
    const std::int64_t rows = x.rows();
    if (static_cast<std::int64_t>(y.size()) != rows)
        throw std::invalid_argument("train_logreg: label count mismatch");
    std::int64_t pos = 0;
    for (const auto label : y) {
        if (label != 0 && label != 1)
            throw std::invalid_argument("train_logreg: labels must be 0 or 1");
        pos += label;
    }
    if (pos == 0 || pos == rows)
        throw std::invalid_argument("train_logreg: both classes must be present");

    Problem prob{x, y, make_sample_weights(y, cfg.class_weight), cfg.l2, rows, x.dim()};

    const std::size_t nvar = static_cast<std::size_t>(prob.dim) + 1;
    std::vector<double> theta(nvar, 0.0), grad, z, p, strips;
    std::vector<double> theta_new(nvar), grad_new;

    double loss = prob.eval(theta, grad, z, p, strips);
    if (!std::isfinite(loss)) throw std::runtime_error("train_logreg: non-finite loss at start");

    // L-BFGS memory
    constexpr std::size_t kMem = 10;
    std::deque<std::vector<double>> mem_s, mem_y;
    std::deque<double> mem_rho;

    LogRegModel model;
    model.config = cfg;
    model.loss_history.push_back(loss);

    std::vector<double> dir(nvar), q(nvar);
    int it = 0;
    model.stop_reason = "max_iter";
    for (; it < cfg.max_iter; ++it) {
        const double gnorm = inf_norm(grad);
        if (gnorm <= cfg.tol) {
            model.converged = true;
            model.stop_reason = "gtol";
            break;
        }
        // two-loop recursion
        std::copy(grad.begin(), grad.end(), q.begin());
        std::vector<double> alpha(mem_s.size());
        for (std::size_t i = mem_s.size(); i-- > 0;) {
            alpha[i] = mem_rho[i] * kern::dot(mem_s[i].data(), q.data(), nvar);
            kern::axpy(q.data(), -alpha[i], mem_y[i].data(), nvar);
        }
        double h0 = 1.0;
        if (!mem_s.empty()) {
            const auto& sv = mem_s.back();
            const auto& yv = mem_y.back();
            h0 = kern::dot(sv.data(), yv.data(), nvar) / kern::dot(yv.data(), yv.data(), nvar);
        }
        kern::scal(q.data(), h0, nvar);
        for (std::size_t i = 0; i < mem_s.size(); ++i) {
            const double b = mem_rho[i] * kern::dot(mem_y[i].data(), q.data(), nvar);
            kern::axpy(q.data(), alpha[i] - b, mem_s[i].data(), nvar);
        }
        for (std::size_t j = 0; j < nvar; ++j) dir[j] = -q[j];

        double slope = kern::dot(grad.data(), dir.data(), nvar);
        if (slope >= 0.0) {  // not a descent direction; fall back to steepest descent
            for (std::size_t j = 0; j < nvar; ++j) dir[j] = -grad[j];
            slope = -kern::dot(grad.data(), grad.data(), nvar);
            mem_s.clear();
            mem_y.clear();
            mem_rho.clear();
        }

        double step = 1.0;
        double loss_new = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            std::copy(theta.begin(), theta.end(), theta_new.begin());
            kern::axpy(theta_new.data(), step, dir.data(), nvar);
            loss_new = prob.loss_at(theta_new, z);
            if (!std::isfinite(loss_new))
                throw std::runtime_error("train_logreg: non-finite loss at iteration " +
                                         std::to_string(it));
            if (loss_new <= loss + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {  // stationary to machine precision
            model.stop_reason = "line_search";
            break;
        }
        prob.gradient_at(theta_new, z, grad_new, p, strips);

        std::vector<double> sv(nvar), yv(nvar);
        for (std::size_t j = 0; j < nvar; ++j) {
            sv[j] = theta_new[j] - theta[j];
            yv[j] = grad_new[j] - grad[j];
        }
        const double sy = kern::dot(sv.data(), yv.data(), nvar);
        if (sy > 1e-12 * kern::nrm2(sv.data(), nvar) * kern::nrm2(yv.data(), nvar)) {
            mem_s.push_back(std::move(sv));
            mem_y.push_back(std::move(yv));
            mem_rho.push_back(1.0 / sy);
            if (mem_s.size() > kMem) {
                mem_s.pop_front();
                mem_y.pop_front();
                mem_rho.pop_front();
            }
        }
        theta.swap(theta_new);
        grad.swap(grad_new);
        const double drop = loss - loss_new;
        loss = loss_new;
        model.loss_history.push_back(loss);
        if (cfg.ftol > 0.0 &&
            drop <= cfg.ftol * std::max({std::abs(loss), std::abs(loss_new), 1.0})) {
            ++it;
            model.stop_reason = "ftol";
            break;
        }
    }
    if (!model.converged && inf_norm(grad) <= cfg.tol) {
        model.converged = true;
        model.stop_reason = "gtol";
    }

    model.weights.assign(theta.begin(), theta.begin() + prob.dim);
    model.bias = theta[static_cast<std::size_t>(prob.dim)];
    model.iterations = it;
    model.final_grad_norm = inf_norm(grad);
    for (const double w : model.weights)
        if (!std::isfinite(w)) throw std::runtime_error("train_logreg: non-finite weights");
    return model;
}

std::vector<double> predict_scores(const LogRegModel& model, const EmbeddingMatrix& x) {
    if (x.dim() != static_cast<std::int64_t>(model.weights.size()))
        throw std::invalid_argument("predict_scores: feature dimension mismatch");
    std::vector<double> z(static_cast<std::size_t>(x.rows()));
    const double* beta = model.weights.data();
    if (x.is_dense()) {
        parallel_for(z.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t r = lo; r < hi; ++r)
                z[r] = kern::dot(x.dense_row(static_cast<std::int64_t>(r)).data(), beta,
                                 model.weights.size()) + model.bias;
        });
    } else {
        const SparseMatrix& sm = x.sparse_matrix();
        parallel_for(z.size(), [&](std::size_t lo, std::size_t hi) {
            kern::csr_spmv(sm.row_ptr.data(), sm.col.data(), sm.val.data(), lo, hi, beta, z.data());
        });
        for (auto& v : z) v += model.bias;
    }
    std::vector<double> scores(z.size());
    kern::sigmoid(scores.data(), z.data(), z.size());
    return scores;
}

double auc(std::span<const double> scores, std::span<const std::int8_t> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("auc: size mismatch");
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (const auto label : labels) pos += label > 0 ? 1 : 0;
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw std::invalid_argument("auc: both classes must be present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // midranks over tie groups
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t t = i; t <= j; ++t)
            if (labels[order[t]] > 0) rank_sum_pos += midrank;
        i = j + 1;
    }
    const double p = static_cast<double>(pos);
    return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

void save_model(const LogRegModel& model, const std::string& path) {
    nlohmann::json j;
    j["format"] = "tdlg-logreg";
    j["version"] = 1;
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["l2"] = model.config.l2;
    j["max_iter"] = model.config.max_iter;
    j["tol"] = model.config.tol;
    j["class_weight"] = model.config.class_weight == ClassWeight::balanced ? "balanced" : "uniform";
    j["converged"] = model.converged;
    j["iterations"] = model.iterations;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << j.dump(2) << '\n';
}

LogRegModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("format", "") != "tdlg-logreg" || j.value("version", 0) != 1)
        throw std::runtime_error(path + ": not a tdlg-logreg v1 model");
    LogRegModel model;
    model.weights = j.at("weights").get<std::vector<double>>();
    model.bias = j.at("bias").get<double>();
    model.config.l2 = j.at("l2").get<double>();
    model.config.max_iter = j.at("max_iter").get<int>();
    model.config.tol = j.at("tol").get<double>();
    model.config.class_weight =
        j.at("class_weight").get<std::string>() == "balanced" ? ClassWeight::balanced
                                                              : ClassWeight::uniform;
    model.converged = j.value("converged", false);
    model.iterations = j.value("iterations", 0);
    return model;
}

}  // namespace tdlg
