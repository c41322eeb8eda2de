#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tdlg/embeddings.hpp"

namespace tdlg {

enum class ClassWeight { uniform, balanced };

struct LogRegConfig {
    double l2 = 1.0;  // lambda on the summed (unnormalized) loss; bias exempt
    int max_iter = 1000;
    double tol = 1e-6;    // gradient infinity norm
    double ftol = 2.2e-9; // relative loss-plateau stop; 0 disables
    ClassWeight class_weight = ClassWeight::uniform;
};

// Weighted L2-regularized logistic regression fitted by full-batch L-BFGS
// with Armijo backtracking. Deterministic for a fixed sample order.
struct LogRegModel {
    std::vector<double> weights;
    double bias = 0.0;
    bool converged = false;  // gradient criterion met
    int iterations = 0;
    double final_grad_norm = 0.0;
    std::string stop_reason;           // gtol, ftol, max_iter or line_search
    std::vector<double> loss_history;  // loss after each accepted step
    LogRegConfig config;
};

// Requires both classes present and finite features; throws otherwise, and
// throws with the iteration index if the loss ever goes non-finite.
LogRegModel train_logreg(const EmbeddingMatrix& x, std::span<const std::int8_t> y,
                         const LogRegConfig& cfg = {});

// (w0, w1) with w_c = N / (2 * N_c).
std::pair<double, double> balanced_class_weights(std::span<const std::int8_t> y);

// Objective at theta = [weights..., bias]: sum_i w_i log(1 + exp(-yt_i z_i))
// plus (l2/2)|weights|^2, with the gradient written to grad. Used by training
// and exposed for verification.
double logreg_value_and_gradient(const EmbeddingMatrix& x, std::span<const std::int8_t> y,
                                 const LogRegConfig& cfg, std::span<const double> theta,
                                 std::span<double> grad);

// sigma(x . w + b) per row.
std::vector<double> predict_scores(const LogRegModel& model, const EmbeddingMatrix& x);

// Probability that a random positive outscores a random negative; ties count
// one half (midrank). O(N log N). Requires both classes.
double auc(std::span<const double> scores, std::span<const std::int8_t> labels);

// Versioned JSON dump of weights, bias and config.
void save_model(const LogRegModel& model, const std::string& path);
LogRegModel load_model(const std::string& path);

}  // namespace tdlg
