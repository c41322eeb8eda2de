#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdlg/lanczos.hpp"
#include "tdlg/learn.hpp"
#include "tdlg/tdlg.hpp"
#include "tdlg/tsbm.hpp"

namespace tdlg {

struct SplitSpec {
    double train_fraction = 0.70;
    int trials = 10;
    std::uint64_t seed = 12345;
};

struct TrialResult {
    double auc_pct = 0.0;  // AUC * 100
    double seconds = 0.0;
    int split_resamples = 0;      // single-class training splits redrawn
    std::int64_t neg_repairs = 0; // self-loops repaired in negative sampling
};

struct ExperimentReport {
    std::string task;
    std::vector<TrialResult> trials;
    double mean_auc_pct = 0.0;
    double ci95_half_width = 0.0;  // 1.96 * sample std / sqrt(trials)
    double mean_seconds = 0.0;
    bool degenerate_negatives = false;
    nlohmann::json config;

    nlohmann::json to_json() const;
    std::string to_table() const;
    std::string to_csv() const;
};

struct EdgeClassifyOptions {
    TdlgConfig tdlg;
    SplitSpec split;        // trials default 10
    int dense_k = 0;        // 0 = sparse rows of A; k > 0 = eigen embedding
    EigsOptions eigs;
};

// Builds A over all edges once per trial, splits the labels 70/30, trains a
// balanced logistic regression on the training rows and reports test AUC.
// Timing covers embedding + training + prediction.
ExperimentReport run_edge_classification(const TemporalGraph& g, const EdgeClassifyOptions& opt);

// Equal-sized negative edge set from independently permuting the u, v and t
// columns. Column marginals are preserved exactly; shuffle-induced self-loops
// are repaired by swapping v entries (count reported via repairs).
TemporalGraph sample_negative_edges(const TemporalGraph& g, std::uint64_t seed,
                                    std::int64_t* repairs = nullptr);

enum class LinkPredSetting { interpolative, extrapolative };

struct LinkPredOptions {
    TdlgConfig tdlg;
    SplitSpec split{0.70, 5, 12345};
    int intervals = 20;
    LinkPredSetting setting = LinkPredSetting::interpolative;
};

// Positives + fresh negatives per trial, partitioned into equal-width time
// intervals (last interval right-closed). Training uses 70% of the early
// intervals; interpolative tests the held-out 30%, extrapolative tests the
// last interval. Classifier weights are uniform. sigma_t comes from training
// edges only and test features are cross-matrix rows (dimension = training
// edge count).
ExperimentReport run_link_prediction(const TemporalGraph& g, const LinkPredOptions& opt);

struct SigmaSweepResult {
    std::vector<double> ratios;
    std::vector<double> mean_auc_pct;
    std::vector<double> proportion_of_best;  // mean AUC / best mean AUC
    std::vector<ExperimentReport> reports;

    nlohmann::json to_json() const;
};

// Edge classification per ratio; AUCs additionally reported relative to the
// best grid point.
SigmaSweepResult sweep_sigma(const TemporalGraph& g, std::span<const double> ratios,
                             const EdgeClassifyOptions& base);

// Community-recovery demonstration: TSBM sample, dense eigen embedding of the
// TDLG, mean-edge node embeddings, then a linear classifier on the node
// communities. One entry per seed.
struct DemoOptions {
    int dims = 3;
    int seeds = 10;
    double holdout_fraction = 0.0;  // 0 = evaluate on the training nodes
};

struct DemoResult {
    std::vector<double> accuracy;
    std::vector<double> auc;
    double mean_accuracy = 0.0;
    double mean_auc = 0.0;
};

DemoResult run_community_demo(const TsbmParams& params, double sigma_t, const DemoOptions& opt);

}  // namespace tdlg
