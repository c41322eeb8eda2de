#include "tdlg/pipelines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tdlg/embeddings.hpp"
#include "tdlg/rng.hpp"

namespace tdlg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void finalize_stats(ExperimentReport& rep) {
    const auto n = static_cast<double>(rep.trials.size());
    if (rep.trials.empty()) return;
    double mean = 0.0, mean_sec = 0.0;
    for (const auto& t : rep.trials) {
        mean += t.auc_pct;
        mean_sec += t.seconds;
    }
    mean /= n;
    mean_sec /= n;
    rep.mean_auc_pct = mean;
    rep.mean_seconds = mean_sec;
    if (rep.trials.size() >= 2) {
        double ss = 0.0;
        for (const auto& t : rep.trials) ss += (t.auc_pct - mean) * (t.auc_pct - mean);
        const double sd = std::sqrt(ss / (n - 1.0));
        rep.ci95_half_width = 1.96 * sd / std::sqrt(n);
    }
}

std::vector<std::int64_t> shuffled_indices(std::int64_t n, Rng& rng) {
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    return idx;
}

bool both_classes(std::span<const std::int8_t> y) {
    bool has0 = false, has1 = false;
    for (const auto v : y) (v > 0 ? has1 : has0) = true;
    return has0 && has1;
}

nlohmann::json tdlg_config_json(const TdlgConfig& cfg) {
    nlohmann::json j;
    if (cfg.sigma_t) j["sigma_t"] = *cfg.sigma_t;
    if (cfg.sigma_ratio) j["sigma_ratio"] = *cfg.sigma_ratio;
    if (!cfg.sigma_t && !cfg.sigma_ratio) j["sigma_ratio"] = cfg.resolved_ratio_or_default();
    j["decay"] = cfg.decay == DecayKind::gaussian ? "gaussian" : "laplacian";
    switch (cfg.normalization) {
        case Normalization::none: j["normalization"] = "none"; break;
        case Normalization::spectral: j["normalization"] = "spectral"; break;
        case Normalization::edge: j["normalization"] = "edge"; break;
    }
    if (cfg.weight_cutoff) j["weight_cutoff"] = *cfg.weight_cutoff;
    j["keep_diagonal"] = cfg.keep_diagonal;
    j["max_entries"] = cfg.max_entries;
    return j;
}

}  // namespace

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["task"] = task;
    j["mean_auc_pct"] = mean_auc_pct;
    j["ci95_half_width"] = ci95_half_width;
    j["mean_seconds"] = mean_seconds;
    j["config"] = config;
    if (degenerate_negatives) j["degenerate_negatives"] = true;
    auto& arr = j["trials"] = nlohmann::json::array();
    for (const auto& t : trials) {
        nlohmann::json tj;
        tj["auc_pct"] = t.auc_pct;
        tj["seconds"] = t.seconds;
        if (t.split_resamples) tj["split_resamples"] = t.split_resamples;
        if (t.neg_repairs) tj["neg_repairs"] = t.neg_repairs;
        arr.push_back(tj);
    }
    return j;
}

std::string ExperimentReport::to_table() const {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << "task: " << task << "\n";
    os << "trial   auc%     seconds\n";
    for (std::size_t i = 0; i < trials.size(); ++i) {
        os.width(5);
        os << i << "   ";
        os.width(6);
        os << trials[i].auc_pct << "   ";
        os.precision(3);
        os.width(7);
        os << trials[i].seconds << "\n";
        os.precision(2);
    }
    os << "mean AUC " << mean_auc_pct << " +/- " << ci95_half_width << " (95% CI), mean "
       << mean_seconds << " s/trial\n";
    return os.str();
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    os.precision(10);
    os << "trial,auc_pct,seconds\n";
    for (std::size_t i = 0; i < trials.size(); ++i)
        os << i << ',' << trials[i].auc_pct << ',' << trials[i].seconds << '\n';
    return os.str();
}

ExperimentReport run_edge_classification(const TemporalGraph& g, const EdgeClassifyOptions& opt) {
    if (!g.has_labels())
        throw std::invalid_argument("edge classification requires a label per edge");
    std::vector<std::int8_t> labels(g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) labels[i] = g.edges[i].label;
    if (!both_classes(labels))
        throw std::invalid_argument("edge classification requires both classes in the labels");

    ExperimentReport rep;
    rep.task = opt.dense_k > 0 ? "classify-dense" : "classify-sparse";
    rep.config["tdlg"] = tdlg_config_json(opt.tdlg);
    rep.config["trials"] = opt.split.trials;
    rep.config["train_fraction"] = opt.split.train_fraction;
    rep.config["seed"] = opt.split.seed;
    if (opt.dense_k > 0) rep.config["dense_k"] = opt.dense_k;

    const std::int64_t m = g.m();
    const auto train_count = static_cast<std::int64_t>(
        std::llround(opt.split.train_fraction * static_cast<double>(m)));
    if (train_count <= 0 || train_count >= m)
        throw std::invalid_argument("train fraction leaves an empty split");

    for (int trial = 0; trial < opt.split.trials; ++trial) {
        const auto t0 = Clock::now();
        const IncidenceView inc = build_incidence(g);
        SparseMatrix a = build_tdlg(g, inc, opt.tdlg);
        if (opt.tdlg.normalization != Normalization::none)
            a = normalize(a, opt.tdlg.normalization);

        EmbeddingMatrix y = opt.dense_k > 0
                                ? dense_embed(a, opt.dense_k, true, opt.eigs)
                                : edge_embeddings(std::make_shared<SparseMatrix>(std::move(a)));

        TrialResult tr;
        Rng rng(opt.split.seed + static_cast<std::uint64_t>(trial));
        std::vector<std::int64_t> idx;
        std::vector<std::int8_t> ytr;
        while (true) {
            idx = shuffled_indices(m, rng);
            ytr.assign(static_cast<std::size_t>(train_count), 0);
            for (std::int64_t i = 0; i < train_count; ++i) ytr[i] = labels[idx[i]];
            if (both_classes(ytr)) break;
            ++tr.split_resamples;  // redraw with the advanced rng state
            if (tr.split_resamples > 1000)
                throw std::runtime_error("could not draw a two-class training split");
        }
        const std::span<const std::int64_t> train_idx(idx.data(), train_count);
        const std::span<const std::int64_t> test_idx(idx.data() + train_count,
                                                     static_cast<std::size_t>(m - train_count));
        LogRegConfig lcfg;
        lcfg.class_weight = ClassWeight::balanced;
        const LogRegModel model = train_logreg(take_rows(y, train_idx), ytr, lcfg);
        const std::vector<double> scores = predict_scores(model, take_rows(y, test_idx));
        std::vector<std::int8_t> yte(test_idx.size());
        for (std::size_t i = 0; i < test_idx.size(); ++i) yte[i] = labels[test_idx[i]];
        tr.auc_pct = 100.0 * auc(scores, yte);
        tr.seconds = seconds_since(t0);
        rep.trials.push_back(tr);
    }
    finalize_stats(rep);
    return rep;
}

TemporalGraph sample_negative_edges(const TemporalGraph& g, std::uint64_t seed,
                                    std::int64_t* repairs) {
    const std::int64_t m = g.m();
    if (m < 1) throw std::invalid_argument("negative sampling requires at least one edge");
    Rng rng(seed);
    const auto pu = shuffled_indices(m, rng);
    const auto pv = shuffled_indices(m, rng);
    const auto pt = shuffled_indices(m, rng);

    TemporalGraph neg;
    neg.n = g.n;
    neg.edges.resize(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) {
        neg.edges[i].u = g.edges[pu[i]].u;
        neg.edges[i].v = g.edges[pv[i]].v;
        neg.edges[i].t = g.edges[pt[i]].t;
        neg.edges[i].label = 0;
    }

    // Repair self-loops while preserving the v multiset: first reshuffle the
    // violating rows' v entries among themselves, then fix the stragglers by
    // swapping v with a random partner row when the swap creates no new
    // self-loop. Hub-heavy graphs defeat the first step (every violator can
    // hold the same hub id), so the swap pass does the real work there.
    std::int64_t repaired = 0;
    std::vector<std::int64_t> bad;
    for (std::int64_t i = 0; i < m; ++i)
        if (neg.edges[i].u == neg.edges[i].v) bad.push_back(i);
    if (!bad.empty() && bad.size() >= 2) {
        std::vector<NodeId> vs(bad.size());
        for (std::size_t i = 0; i < bad.size(); ++i) vs[i] = neg.edges[bad[i]].v;
        rng.shuffle(vs);
        for (std::size_t i = 0; i < bad.size(); ++i) neg.edges[bad[i]].v = vs[i];
    }
    for (const std::int64_t i : bad) {
        if (neg.edges[i].u != neg.edges[i].v) {
            ++repaired;
            continue;
        }
        bool fixed = false;
        for (int attempt = 0; attempt < 100000 && !fixed; ++attempt) {
            const auto j = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(m)));
            if (j == i) continue;
            if (neg.edges[j].v != neg.edges[i].u && neg.edges[i].v != neg.edges[j].u) {
                std::swap(neg.edges[i].v, neg.edges[j].v);
                fixed = true;
                ++repaired;
            }
        }
        if (!fixed)
            throw std::runtime_error(
                "negative sampling could not repair a self-loop; the u column is too "
                "concentrated on one node");
    }
    for (const auto& e : neg.edges)
        if (e.u == e.v) throw std::runtime_error("negative sampling left a self-loop");
    if (repairs) *repairs = repaired;
    return neg;
}

ExperimentReport run_link_prediction(const TemporalGraph& g, const LinkPredOptions& opt) {
    if (opt.tdlg.normalization != Normalization::none)
        throw std::invalid_argument("link prediction uses the unnormalized matrix");
    if (opt.intervals < 2) throw std::invalid_argument("need at least 2 time intervals");
    const std::int64_t m = g.m();
    if (m < 2) throw std::invalid_argument("link prediction needs at least 2 edges");

    ExperimentReport rep;
    rep.task = opt.setting == LinkPredSetting::interpolative ? "linkpred-interp"
                                                             : "linkpred-extrap";
    rep.config["tdlg"] = tdlg_config_json(opt.tdlg);
    rep.config["trials"] = opt.split.trials;
    rep.config["train_fraction"] = opt.split.train_fraction;
    rep.config["seed"] = opt.split.seed;
    rep.config["intervals"] = opt.intervals;
    rep.degenerate_negatives = m == 1;

    for (int trial = 0; trial < opt.split.trials; ++trial) {
        const auto t0 = Clock::now();
        TrialResult tr;
        Rng rng(opt.split.seed + static_cast<std::uint64_t>(trial));

        TemporalGraph neg = sample_negative_edges(g, rng.next(), &tr.neg_repairs);
        TemporalGraph all;
        all.n = g.n;
        all.edges = g.edges;
        for (auto& e : all.edges) e.label = 1;
        all.edges.insert(all.edges.end(), neg.edges.begin(), neg.edges.end());

        double tmin = all.edges.front().t, tmax = tmin;
        for (const auto& e : all.edges) {
            tmin = std::min(tmin, e.t);
            tmax = std::max(tmax, e.t);
        }
        if (!(tmax > tmin)) throw std::runtime_error("link prediction requires a time span > 0");
        const double width = (tmax - tmin) / static_cast<double>(opt.intervals);
        auto interval_of = [&](double t) {
            const auto k = static_cast<std::int64_t>((t - tmin) / width);
            return std::min<std::int64_t>(k, opt.intervals - 1);  // right-closed last interval
        };

        std::vector<std::int64_t> early, late;
        for (std::size_t i = 0; i < all.edges.size(); ++i) {
            if (interval_of(all.edges[i].t) == opt.intervals - 1)
                late.push_back(static_cast<std::int64_t>(i));
            else
                early.push_back(static_cast<std::int64_t>(i));
        }
        if (opt.setting == LinkPredSetting::extrapolative && late.empty())
            throw std::runtime_error("extrapolative setting: the last interval is empty");
        if (early.size() < 2) throw std::runtime_error("early intervals hold fewer than 2 edges");

        const auto train_count = static_cast<std::int64_t>(
            std::llround(opt.split.train_fraction * static_cast<double>(early.size())));
        if (train_count <= 0 || train_count >= static_cast<std::int64_t>(early.size()))
            throw std::runtime_error("train fraction leaves an empty early split");

        std::vector<std::int8_t> ytr;
        TemporalGraph train;
        while (true) {
            rng.shuffle(early);
            ytr.assign(static_cast<std::size_t>(train_count), 0);
            for (std::int64_t i = 0; i < train_count; ++i) ytr[i] = all.edges[early[i]].label;
            if (both_classes(ytr)) break;
            ++tr.split_resamples;
            if (tr.split_resamples > 1000)
                throw std::runtime_error("could not draw a two-class training split");
        }
        train.n = g.n;
        train.edges.reserve(static_cast<std::size_t>(train_count));
        for (std::int64_t i = 0; i < train_count; ++i) train.edges.push_back(all.edges[early[i]]);

        std::vector<std::int64_t> test_idx;
        if (opt.setting == LinkPredSetting::interpolative)
            test_idx.assign(early.begin() + train_count, early.end());
        else
            test_idx = late;
        TemporalGraph test;
        test.n = g.n;
        std::vector<std::int8_t> yte;
        test.edges.reserve(test_idx.size());
        for (const auto i : test_idx) {
            test.edges.push_back(all.edges[i]);
            yte.push_back(all.edges[i].label);
        }
        if (!both_classes(yte))
            throw std::runtime_error("test split contains a single class; cannot score AUC");

        const IncidenceView train_inc = build_incidence(train);
        SparseMatrix arr = build_tdlg(train, train_inc, opt.tdlg);
        const SparseMatrix aer = build_cross_tdlg(train, test, opt.tdlg);
        if (aer.cols != train.m())
            throw std::logic_error("cross-matrix feature dimension mismatch");

        const LogRegModel model = train_logreg(
            edge_embeddings(std::make_shared<SparseMatrix>(std::move(arr))), ytr, LogRegConfig{});
        const std::vector<double> scores =
            predict_scores(model, edge_embeddings(std::make_shared<SparseMatrix>(aer)));
        tr.auc_pct = 100.0 * auc(scores, yte);
        tr.seconds = seconds_since(t0);
        rep.trials.push_back(tr);
    }
    finalize_stats(rep);
    return rep;
}

nlohmann::json SigmaSweepResult::to_json() const {
    nlohmann::json j;
    j["ratios"] = ratios;
    j["mean_auc_pct"] = mean_auc_pct;
    j["proportion_of_best"] = proportion_of_best;
    auto& arr = j["reports"] = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    return j;
}

SigmaSweepResult sweep_sigma(const TemporalGraph& g, std::span<const double> ratios,
                             const EdgeClassifyOptions& base) {
    if (ratios.empty()) throw std::invalid_argument("sweep needs at least one ratio");
    SigmaSweepResult out;
    for (const double r : ratios) {
        EdgeClassifyOptions opt = base;
        opt.tdlg.sigma_t.reset();
        opt.tdlg.sigma_ratio = r;
        ExperimentReport rep = run_edge_classification(g, opt);
        out.ratios.push_back(r);
        out.mean_auc_pct.push_back(rep.mean_auc_pct);
        out.reports.push_back(std::move(rep));
    }
    const double best = *std::max_element(out.mean_auc_pct.begin(), out.mean_auc_pct.end());
    for (const double v : out.mean_auc_pct) out.proportion_of_best.push_back(v / best);
    return out;
}

DemoResult run_community_demo(const TsbmParams& params, double sigma_t, const DemoOptions& opt) {
    DemoResult res;
    for (int s = 0; s < opt.seeds; ++s) {
        TsbmParams p = params;
        p.seed = params.seed + static_cast<std::uint64_t>(s);
        const TsbmSample sample = generate_tsbm(p);
        const IncidenceView inc = build_incidence(sample.graph);
        TdlgConfig cfg;
        cfg.sigma_ratio.reset();
        cfg.sigma_t = sigma_t;
        const SparseMatrix a = build_tdlg(sample.graph, inc, cfg);
        EigsOptions eo;
        eo.seed = p.seed;
        const EmbeddingMatrix y = dense_embed(a, opt.dims, true, eo);
        const EmbeddingMatrix x = mean_edge_node_embeddings(inc, y);

        std::vector<std::int8_t> labels(static_cast<std::size_t>(p.n));
        for (NodeId v = 0; v < p.n; ++v) labels[v] = sample.in_u(v) ? 1 : 0;

        Rng rng(p.seed ^ 0x9e3779b97f4a7c15ULL);
        std::vector<std::int64_t> idx = shuffled_indices(p.n, rng);
        std::int64_t train_count = p.n;
        if (opt.holdout_fraction > 0.0)
            train_count = std::max<std::int64_t>(
                2, static_cast<std::int64_t>(std::llround((1.0 - opt.holdout_fraction) *
                                                          static_cast<double>(p.n))));
        const std::span<const std::int64_t> train_idx(idx.data(), train_count);
        const std::span<const std::int64_t> eval_idx =
            train_count < p.n ? std::span<const std::int64_t>(idx.data() + train_count,
                                                              static_cast<std::size_t>(p.n - train_count))
                              : std::span<const std::int64_t>(idx.data(), static_cast<std::size_t>(p.n));

        std::vector<std::int8_t> ytr(train_idx.size()), yev(eval_idx.size());
        for (std::size_t i = 0; i < train_idx.size(); ++i) ytr[i] = labels[train_idx[i]];
        for (std::size_t i = 0; i < eval_idx.size(); ++i) yev[i] = labels[eval_idx[i]];

        const LogRegModel model = train_logreg(take_rows(x, train_idx), ytr, LogRegConfig{});
        const std::vector<double> scores = predict_scores(model, take_rows(x, eval_idx));
        std::int64_t correct = 0;
        for (std::size_t i = 0; i < scores.size(); ++i)
            correct += (scores[i] > 0.5 ? 1 : 0) == yev[i] ? 1 : 0;
        res.accuracy.push_back(static_cast<double>(correct) / static_cast<double>(scores.size()));
        res.auc.push_back(auc(scores, yev));
    }
    for (const double a : res.accuracy) res.mean_accuracy += a;
    for (const double a : res.auc) res.mean_auc += a;
    res.mean_accuracy /= static_cast<double>(res.accuracy.size());
    res.mean_auc /= static_cast<double>(res.auc.size());
    return res;
}

}  // namespace tdlg
