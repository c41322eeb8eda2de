#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "support/oracles.hpp"
#include "tdlg/pipelines.hpp"

using namespace tdlg;

namespace {

// Labels correlated with time so the TDLG features carry signal.
TemporalGraph labeled_graph(std::mt19937_64& rng, std::int64_t n, std::int64_t m) {
    TemporalGraph g = testing::random_graph(rng, n, m, 0.0, 10.0);
    for (auto& e : g.edges) e.label = e.t > 5.0 ? 1 : 0;
    return g;
}

template <typename T>
std::multiset<T> column_multiset(const TemporalGraph& g, T TemporalEdge::* field) {
    std::multiset<T> s;
    for (const auto& e : g.edges) s.insert(e.*field);
    return s;
}

EdgeClassifyOptions classify_opts(int trials = 3) {
    EdgeClassifyOptions opt;
    opt.tdlg.sigma_ratio = 0.1;
    opt.split.trials = trials;
    return opt;
}

}  // namespace

TEST_CASE("negative sampling preserves every column multiset") {
    std::mt19937_64 rng(191);
    for (int rep = 0; rep < 5; ++rep) {
        const TemporalGraph g = testing::random_graph(rng, 20, 1000);
        std::int64_t repairs = 0;
        const TemporalGraph neg = sample_negative_edges(g, 42 + rep, &repairs);
        REQUIRE(neg.m() == g.m());
        CHECK(column_multiset(neg, &TemporalEdge::u) == column_multiset(g, &TemporalEdge::u));
        CHECK(column_multiset(neg, &TemporalEdge::v) == column_multiset(g, &TemporalEdge::v));
        CHECK(column_multiset(neg, &TemporalEdge::t) == column_multiset(g, &TemporalEdge::t));
        for (const auto& e : neg.edges) CHECK(e.u != e.v);
        CHECK(repairs >= 0);
    }
}

TEST_CASE("negative sampling is deterministic per seed") {
    std::mt19937_64 rng(193);
    const TemporalGraph g = testing::random_graph(rng, 15, 200);
    const TemporalGraph a = sample_negative_edges(g, 7);
    const TemporalGraph b = sample_negative_edges(g, 7);
    for (std::int64_t i = 0; i < a.m(); ++i) {
        CHECK(a.edges[i].u == b.edges[i].u);
        CHECK(a.edges[i].v == b.edges[i].v);
        CHECK(a.edges[i].t == b.edges[i].t);
    }
}

TEST_CASE("single-edge negative set echoes the edge") {
    TemporalGraph g;
    g.n = 2;
    g.edges = {{0, 1, 3.0, -1}};
    const TemporalGraph neg = sample_negative_edges(g, 1);
    CHECK(neg.edges[0].u == 0);
    CHECK(neg.edges[0].v == 1);
    CHECK(neg.edges[0].t == 3.0);
}

TEST_CASE("edge classification learns a time-correlated label") {
    std::mt19937_64 rng(197);
    const TemporalGraph g = labeled_graph(rng, 25, 300);
    const ExperimentReport rep = run_edge_classification(g, classify_opts());
    CHECK(rep.trials.size() == 3);
    CHECK(rep.mean_auc_pct > 65.0);
    CHECK(rep.mean_auc_pct <= 100.0);
    CHECK(rep.config.contains("tdlg"));
    for (const auto& t : rep.trials) CHECK(t.seconds >= 0.0);
}

TEST_CASE("edge classification is deterministic for a fixed seed") {
    std::mt19937_64 rng(199);
    const TemporalGraph g = labeled_graph(rng, 20, 200);
    const ExperimentReport r1 = run_edge_classification(g, classify_opts());
    const ExperimentReport r2 = run_edge_classification(g, classify_opts());
    REQUIRE(r1.trials.size() == r2.trials.size());
    for (std::size_t i = 0; i < r1.trials.size(); ++i)
        CHECK(r1.trials[i].auc_pct == r2.trials[i].auc_pct);
    EdgeClassifyOptions other = classify_opts();
    other.split.seed += 1;
    const ExperimentReport r3 = run_edge_classification(g, other);
    bool differs = false;
    for (std::size_t i = 0; i < r1.trials.size(); ++i)
        differs = differs || r1.trials[i].auc_pct != r3.trials[i].auc_pct;
    CHECK(differs);
}

TEST_CASE("dense variant runs end to end") {
    std::mt19937_64 rng(211);
    const TemporalGraph g = labeled_graph(rng, 20, 150);
    EdgeClassifyOptions opt = classify_opts(2);
    opt.dense_k = 8;
    const ExperimentReport rep = run_edge_classification(g, opt);
    CHECK(rep.task == "classify-dense");
    CHECK(rep.mean_auc_pct >= 0.0);
}

TEST_CASE("classification rejects unlabeled or single-class graphs") {
    std::mt19937_64 rng(223);
    TemporalGraph g = testing::random_graph(rng, 10, 50);
    for (auto& e : g.edges) e.label = -1;
    CHECK_THROWS_AS(run_edge_classification(g, classify_opts()), std::invalid_argument);
    for (auto& e : g.edges) e.label = 1;
    CHECK_THROWS_AS(run_edge_classification(g, classify_opts()), std::invalid_argument);
}

TEST_CASE("link prediction runs both settings and stays deterministic") {
    std::mt19937_64 rng(227);
    const TemporalGraph g = testing::random_graph(rng, 30, 600, 0.0, 100.0);
    LinkPredOptions opt;
    opt.tdlg.sigma_ratio = 0.1;
    opt.split.trials = 3;
    opt.setting = LinkPredSetting::interpolative;
    const ExperimentReport ri = run_link_prediction(g, opt);
    CHECK(ri.task == "linkpred-interp");
    CHECK(ri.trials.size() == 3);
    CHECK(ri.mean_auc_pct >= 0.0);
    CHECK(ri.mean_auc_pct <= 100.0);

    opt.setting = LinkPredSetting::extrapolative;
    const ExperimentReport re = run_link_prediction(g, opt);
    CHECK(re.task == "linkpred-extrap");

    const ExperimentReport re2 = run_link_prediction(g, opt);
    for (std::size_t i = 0; i < re.trials.size(); ++i)
        CHECK(re.trials[i].auc_pct == re2.trials[i].auc_pct);
}

TEST_CASE("link prediction needs a positive time span and no normalization") {
    TemporalGraph g;
    g.n = 4;
    for (int i = 0; i < 10; ++i)
        g.edges.push_back({static_cast<NodeId>(i % 3), static_cast<NodeId>(3), 1.0, -1});
    LinkPredOptions opt;
    opt.tdlg.sigma_t = 1.0;
    opt.tdlg.sigma_ratio.reset();
    opt.split.trials = 1;
    CHECK_THROWS_WITH_AS(run_link_prediction(g, opt), doctest::Contains("span"),
                         std::runtime_error);
    opt.tdlg.normalization = Normalization::spectral;
    CHECK_THROWS_AS(run_link_prediction(g, opt), std::invalid_argument);
}

TEST_CASE("the maximum-time edge lands in the last interval") {
    // one positive at the exact max time; extrapolative test set must hold it
    std::mt19937_64 rng(229);
    TemporalGraph g = testing::random_graph(rng, 12, 80, 0.0, 1.0);
    g.edges.back().t = 1.0;
    for (auto& e : g.edges) e.t = std::min(e.t, 1.0);
    LinkPredOptions opt;
    opt.tdlg.sigma_ratio = 0.2;
    opt.split.trials = 1;
    opt.setting = LinkPredSetting::extrapolative;
    const ExperimentReport rep = run_link_prediction(g, opt);  // must not throw
    CHECK(rep.trials.size() == 1);
}

TEST_CASE("sigma sweep reports proportions of the best grid point") {
    std::mt19937_64 rng(233);
    const TemporalGraph g = labeled_graph(rng, 20, 200);
    SUBCASE("single point") {
        const std::vector<double> grid{0.1};
        const SigmaSweepResult res = sweep_sigma(g, grid, classify_opts(2));
        REQUIRE(res.proportion_of_best.size() == 1);
        CHECK(res.proportion_of_best[0] == doctest::Approx(1.0));
    }
    SUBCASE("grid") {
        const std::vector<double> grid{0.01, 0.1, 1.0};
        const SigmaSweepResult res = sweep_sigma(g, grid, classify_opts(2));
        REQUIRE(res.mean_auc_pct.size() == 3);
        const double best = *std::max_element(res.mean_auc_pct.begin(), res.mean_auc_pct.end());
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(res.proportion_of_best[i] == doctest::Approx(res.mean_auc_pct[i] / best));
            CHECK(res.proportion_of_best[i] <= 1.0);
        }
    }
}

TEST_CASE("reports serialize to json, table and csv") {
    std::mt19937_64 rng(239);
    const TemporalGraph g = labeled_graph(rng, 15, 120);
    const ExperimentReport rep = run_edge_classification(g, classify_opts(2));
    const nlohmann::json j = rep.to_json();
    CHECK(j.at("task") == "classify-sparse");
    CHECK(j.at("trials").size() == 2);
    CHECK(j.at("config").contains("seed"));
    CHECK(rep.to_table().find("mean AUC") != std::string::npos);
    CHECK(rep.to_csv().find("trial,auc_pct,seconds") == 0);
}

TEST_CASE("link prediction separates real edges on a window-structured graph") {
    // edges live inside a node window that slides with time, so shuffled
    // negatives rarely match topology and time at once
    std::mt19937_64 rng(241);
    TemporalGraph g;
    g.n = 300;
    for (int i = 0; i < 1500; ++i) {
        const double t = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 100.0;
        const auto base = static_cast<NodeId>(t / 100.0 * (300 - 50));
        const auto u = static_cast<NodeId>(base + rng() % 40);
        NodeId v;
        do {
            v = static_cast<NodeId>(base + rng() % 40);
        } while (v == u);
        g.edges.push_back({u, v, t, -1});
    }
    LinkPredOptions opt;
    opt.tdlg.sigma_ratio = 0.1;
    opt.split.trials = 2;
    const ExperimentReport ri = run_link_prediction(g, opt);
    CHECK(ri.mean_auc_pct > 80.0);
    opt.setting = LinkPredSetting::extrapolative;
    const ExperimentReport re = run_link_prediction(g, opt);
    CHECK(re.mean_auc_pct > 70.0);
}

TEST_CASE("community demo separates the demonstration TSBM") {
    TsbmParams p;  // n=100, delta=40, alphas 0.9/0.1, times N(-+1, 0.25)
    p.sigma1 = 0.5;
    p.sigma2 = 0.5;
    DemoOptions opt;
    opt.dims = 3;
    opt.seeds = 3;
    const DemoResult res = run_community_demo(p, 0.5, opt);
    REQUIRE(res.accuracy.size() == 3);
    CHECK(res.mean_accuracy >= 0.95);
    CHECK(res.mean_auc >= 0.95);
}
