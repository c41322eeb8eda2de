// Command-line driver: graph ingestion, TDLG construction and export,
// embeddings, the experiment pipelines and the TSBM theory check.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdlg/embeddings.hpp"
#include "tdlg/kernels.hpp"
#include "tdlg/lanczos.hpp"
#include "tdlg/pipelines.hpp"
#include "tdlg/tdlg.hpp"
#include "tdlg/tsbm.hpp"

namespace {

using nlohmann::json;

struct DataArgs {
    std::string data;
    std::string manifest;
    std::string delimiter = ",";
    long label_threshold = 0;
    bool has_labels = false;
};

struct TdlgArgs {
    double sigma_ratio = 0.1;
    double sigma_t = 0.0;  // 0 = unset, use the ratio
    std::string decay = "gaussian";
    std::string normalization = "none";
    double weight_cutoff = -1.0;  // negative = off
    bool no_diagonal = false;
    std::int64_t max_entries = 400'000'000;
};

struct OutArgs {
    std::string out;
    std::string format = "json";
};

void add_data_flags(CLI::App* cmd, DataArgs& a, bool labels_default) {
    a.has_labels = labels_default;
    cmd->add_option("--data", a.data, "edge-list path or manifest dataset name")->required();
    cmd->add_option("--manifest", a.manifest, "JSON manifest mapping names to dataset options");
    cmd->add_option("--delimiter", a.delimiter, "column delimiter (default ',')");
    cmd->add_option("--label-threshold", a.label_threshold,
                    "labels binarize as rating > threshold (default 0)");
    cmd->add_flag("--has-labels,!--no-labels", a.has_labels,
                  "parse a fourth label column");
}

void add_tdlg_flags(CLI::App* cmd, TdlgArgs& a) {
    auto* ratio = cmd->add_option("--sigma-ratio", a.sigma_ratio,
                                  "decay scale as a fraction of the edge-time std (default 0.1)");
    cmd->add_option("--sigma-t", a.sigma_t, "absolute decay scale")->excludes(ratio);
    cmd->add_option("--decay", a.decay, "gaussian or laplacian kernel")
        ->check(CLI::IsMember({"gaussian", "laplacian"}));
    cmd->add_option("--normalization", a.normalization, "none, spectral or edge")
        ->check(CLI::IsMember({"none", "spectral", "edge"}));
    cmd->add_option("--weight-cutoff", a.weight_cutoff, "drop entries with weight <= cutoff");
    cmd->add_flag("--no-diagonal", a.no_diagonal, "drop line-graph self-loops");
    cmd->add_option("--max-entries", a.max_entries, "line-graph entry budget");
}

void add_out_flags(CLI::App* cmd, OutArgs& a) {
    cmd->add_option("--out", a.out, "output path (default stdout)");
    cmd->add_option("--format", a.format, "json, table or csv")
        ->check(CLI::IsMember({"json", "table", "csv"}));
}

tdlg::TemporalGraph load_data(const DataArgs& a) {
    std::string path = a.data;
    tdlg::LoadOptions opts;
    opts.has_labels = a.has_labels;
    opts.label_threshold = a.label_threshold;
    opts.delimiter = a.delimiter.empty() ? ',' : a.delimiter[0];
    if (!a.manifest.empty()) {
        std::ifstream in(a.manifest);
        if (!in) throw std::runtime_error("cannot open manifest: " + a.manifest);
        json m;
        in >> m;
        if (m.contains(a.data)) {
            const json& e = m.at(a.data);
            path = e.at("path").get<std::string>();
            if (e.contains("delimiter"))
                opts.delimiter = e.at("delimiter").get<std::string>().at(0);
            if (e.contains("label_threshold"))
                opts.label_threshold = e.at("label_threshold").get<long>();
            if (e.contains("has_labels")) opts.has_labels = e.at("has_labels").get<bool>();
        }
    }
    return tdlg::load_edge_list(path, opts);
}

tdlg::TdlgConfig make_tdlg_config(const TdlgArgs& a) {
    tdlg::TdlgConfig cfg;
    if (a.sigma_t > 0.0) {
        cfg.sigma_t = a.sigma_t;
        cfg.sigma_ratio.reset();
    } else {
        cfg.sigma_ratio = a.sigma_ratio;
    }
    if (a.decay == "laplacian") cfg.decay = tdlg::DecayKind::laplacian;
    if (a.normalization == "spectral") cfg.normalization = tdlg::Normalization::spectral;
    else if (a.normalization == "edge") cfg.normalization = tdlg::Normalization::edge;
    if (a.weight_cutoff >= 0.0) cfg.weight_cutoff = a.weight_cutoff;
    cfg.keep_diagonal = !a.no_diagonal;
    cfg.max_entries = a.max_entries;
    return cfg;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open for write: " + out);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

void emit_report(const tdlg::ExperimentReport& rep, const OutArgs& out) {
    if (out.format == "table") emit(rep.to_table(), out.out);
    else if (out.format == "csv") emit(rep.to_csv(), out.out);
    else emit(rep.to_json().dump(2), out.out);
}

json data_echo(const DataArgs& a) {
    json j;
    j["data"] = a.data;
    if (!a.manifest.empty()) j["manifest"] = a.manifest;
    j["delimiter"] = a.delimiter;
    j["label_threshold"] = a.label_threshold;
    j["has_labels"] = a.has_labels;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-decayed line graph embeddings for temporal networks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read defaults from a config file");

    bool verbose = false;
    app.add_flag("--verbose", verbose, "print progress to stderr");

    // ---- build ----
    auto* build_cmd = app.add_subcommand("build", "construct the TDLG matrix and export it");
    DataArgs build_data;
    TdlgArgs build_tdlg_args;
    OutArgs build_out;
    std::string matrix_format = "coord";
    add_data_flags(build_cmd, build_data, false);
    add_tdlg_flags(build_cmd, build_tdlg_args);
    build_cmd->add_option("--out", build_out.out, "output path")->required();
    build_cmd->add_option("--matrix-format", matrix_format, "coord (text) or csr (binary)")
        ->check(CLI::IsMember({"coord", "csr"}));

    // ---- embed ----
    auto* embed_cmd = app.add_subcommand("embed", "emit edge (or node) embeddings");
    DataArgs embed_data;
    TdlgArgs embed_tdlg_args;
    OutArgs embed_out;
    int embed_dense_k = 0;
    bool embed_nodes = false;
    std::uint64_t embed_seed = 12345;
    add_data_flags(embed_cmd, embed_data, false);
    add_tdlg_flags(embed_cmd, embed_tdlg_args);
    embed_cmd->add_option("--dense-k", embed_dense_k, "dense eigen embedding dimension");
    embed_cmd->add_flag("--nodes", embed_nodes, "aggregate to mean-edge node embeddings");
    embed_cmd->add_option("--seed", embed_seed, "eigensolver seed");
    embed_cmd->add_option("--out", embed_out.out, "output path")->required();

    // ---- classify ----
    auto* cls_cmd = app.add_subcommand("classify", "edge classification experiment");
    DataArgs cls_data;
    TdlgArgs cls_tdlg_args;
    OutArgs cls_out;
    tdlg::SplitSpec cls_split;
    int cls_dense_k = 0;
    add_data_flags(cls_cmd, cls_data, true);
    add_tdlg_flags(cls_cmd, cls_tdlg_args);
    add_out_flags(cls_cmd, cls_out);
    cls_cmd->add_option("--trials", cls_split.trials, "number of random splits (default 10)");
    cls_cmd->add_option("--seed", cls_split.seed, "base seed (default 12345)");
    cls_cmd->add_option("--train-frac", cls_split.train_fraction, "training fraction (0.70)");
    cls_cmd->add_option("--dense-k", cls_dense_k, "use dense eigen embeddings of this dimension");

    // ---- linkpred ----
    auto* lp_cmd = app.add_subcommand("linkpred", "temporal link prediction experiment");
    DataArgs lp_data;
    TdlgArgs lp_tdlg_args;
    OutArgs lp_out;
    tdlg::SplitSpec lp_split{0.70, 5, 12345};
    int lp_intervals = 20;
    std::string lp_setting = "interp";
    add_data_flags(lp_cmd, lp_data, false);
    add_tdlg_flags(lp_cmd, lp_tdlg_args);
    add_out_flags(lp_cmd, lp_out);
    lp_cmd->add_option("--trials", lp_split.trials, "number of trials (default 5)");
    lp_cmd->add_option("--seed", lp_split.seed, "base seed");
    lp_cmd->add_option("--train-frac", lp_split.train_fraction, "training fraction (0.70)");
    lp_cmd->add_option("--intervals", lp_intervals, "time discretization (default 20)");
    lp_cmd->add_option("--setting", lp_setting, "interp or extrap")
        ->check(CLI::IsMember({"interp", "extrap"}));

    // ---- tsbm ----
    auto* tsbm_cmd = app.add_subcommand("tsbm", "generate a temporal SBM graph");
    tdlg::TsbmParams tsbm_params;
    std::string tsbm_out_path, tsbm_tags_path;
    tsbm_cmd->add_option("--n", tsbm_params.n, "node count (even)");
    tsbm_cmd->add_option("--delta", tsbm_params.delta, "expected per-period degree");
    tsbm_cmd->add_option("--alpha1", tsbm_params.alpha1, "period-1 intra-community fraction");
    tsbm_cmd->add_option("--alpha2", tsbm_params.alpha2, "period-2 intra-community fraction");
    tsbm_cmd->add_option("--mu1", tsbm_params.mu1, "period-1 time mean");
    tsbm_cmd->add_option("--mu2", tsbm_params.mu2, "period-2 time mean");
    tsbm_cmd->add_option("--sigma1", tsbm_params.sigma1, "period-1 time std");
    tsbm_cmd->add_option("--sigma2", tsbm_params.sigma2, "period-2 time std");
    tsbm_cmd->add_option("--seed", tsbm_params.seed, "generator seed");
    tsbm_cmd->add_option("--out", tsbm_out_path, "edge-list output path")->required();
    tsbm_cmd->add_option("--tags-out", tsbm_tags_path, "block-tag sidecar path");

    // ---- verify-theory ----
    auto* vt_cmd = app.add_subcommand("verify-theory",
                                      "Monte Carlo check of the expected TDLG block structure");
    tdlg::TsbmParams vt_params;
    vt_params.n = 2000;
    double vt_sigma_t = 0.5;
    int vt_trials = 20;
    OutArgs vt_out;
    vt_cmd->add_option("--n", vt_params.n, "node count (even)");
    vt_cmd->add_option("--delta", vt_params.delta, "expected per-period degree");
    vt_cmd->add_option("--alpha1", vt_params.alpha1, "period-1 intra fraction");
    vt_cmd->add_option("--alpha2", vt_params.alpha2, "period-2 intra fraction");
    vt_cmd->add_option("--mu1", vt_params.mu1, "period-1 time");
    vt_cmd->add_option("--mu2", vt_params.mu2, "period-2 time");
    vt_cmd->add_option("--sigma-t", vt_sigma_t, "decay scale")->required();
    vt_cmd->add_option("--trials", vt_trials, "number of sampled graphs (default 20)");
    vt_cmd->add_option("--seed", vt_params.seed, "base seed");
    vt_cmd->add_option("--out", vt_out.out, "output path (default stdout)");

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "edge classification over a sigma-ratio grid");
    DataArgs sweep_data;
    TdlgArgs sweep_tdlg_args;
    OutArgs sweep_out;
    tdlg::SplitSpec sweep_split{0.70, 5, 12345};
    std::vector<double> sweep_grid{1e-3, 1e-2, 1e-1, 1.0, 10.0};
    add_data_flags(sweep_cmd, sweep_data, true);
    add_tdlg_flags(sweep_cmd, sweep_tdlg_args);
    add_out_flags(sweep_cmd, sweep_out);
    sweep_cmd->add_option("--grid", sweep_grid, "sigma ratios to test");
    sweep_cmd->add_option("--trials", sweep_split.trials, "trials per grid point (default 5)");
    sweep_cmd->add_option("--seed", sweep_split.seed, "base seed");
    sweep_cmd->add_option("--train-frac", sweep_split.train_fraction, "training fraction");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();
    CLI11_PARSE(app, argc, argv);

    try {
        if (verbose) std::cerr << "simd variant: " << tdlg::kern::variant_name() << "\n";

        if (*build_cmd) {
            const tdlg::TemporalGraph g = load_data(build_data);
            const tdlg::TdlgConfig cfg = make_tdlg_config(build_tdlg_args);
            tdlg::SparseMatrix a = tdlg::build_tdlg(g, tdlg::build_incidence(g), cfg);
            if (cfg.normalization != tdlg::Normalization::none)
                a = tdlg::normalize(a, cfg.normalization);
            if (verbose)
                std::cerr << "matrix " << a.rows << "x" << a.cols << ", nnz " << a.nnz() << "\n";
            if (matrix_format == "csr") tdlg::write_csr_binary(a, build_out.out);
            else tdlg::write_coordinate_text(a, build_out.out);
        } else if (*embed_cmd) {
            const tdlg::TemporalGraph g = load_data(embed_data);
            const tdlg::TdlgConfig cfg = make_tdlg_config(embed_tdlg_args);
            const tdlg::IncidenceView inc = tdlg::build_incidence(g);
            tdlg::SparseMatrix a = tdlg::build_tdlg(g, inc, cfg);
            if (cfg.normalization != tdlg::Normalization::none)
                a = tdlg::normalize(a, cfg.normalization);
            tdlg::EmbeddingMatrix y =
                embed_dense_k > 0
                    ? tdlg::dense_embed(a, embed_dense_k, true,
                                        tdlg::EigsOptions{.seed = embed_seed})
                    : tdlg::edge_embeddings(std::make_shared<tdlg::SparseMatrix>(std::move(a)));
            if (embed_nodes) y = tdlg::mean_edge_node_embeddings(inc, y);
            tdlg::write_embeddings(y, embed_out.out);
        } else if (*cls_cmd) {
            const tdlg::TemporalGraph g = load_data(cls_data);
            tdlg::EdgeClassifyOptions opt;
            opt.tdlg = make_tdlg_config(cls_tdlg_args);
            opt.split = cls_split;
            opt.dense_k = cls_dense_k;
            opt.eigs.seed = cls_split.seed;
            tdlg::ExperimentReport rep = tdlg::run_edge_classification(g, opt);
            rep.config["dataset"] = data_echo(cls_data);
            emit_report(rep, cls_out);
        } else if (*lp_cmd) {
            const tdlg::TemporalGraph g = load_data(lp_data);
            tdlg::LinkPredOptions opt;
            opt.tdlg = make_tdlg_config(lp_tdlg_args);
            opt.split = lp_split;
            opt.intervals = lp_intervals;
            opt.setting = lp_setting == "extrap" ? tdlg::LinkPredSetting::extrapolative
                                                 : tdlg::LinkPredSetting::interpolative;
            tdlg::ExperimentReport rep = tdlg::run_link_prediction(g, opt);
            rep.config["dataset"] = data_echo(lp_data);
            emit_report(rep, lp_out);
        } else if (*tsbm_cmd) {
            const tdlg::TsbmSample sample = tdlg::generate_tsbm(tsbm_params);
            tdlg::write_edge_list(sample.graph, tsbm_out_path);
            if (!tsbm_tags_path.empty()) {
                std::ofstream tf(tsbm_tags_path);
                if (!tf) throw std::runtime_error("cannot open for write: " + tsbm_tags_path);
                static const char* names[6] = {"UU1", "VV1", "UV1", "UU2", "VV2", "UV2"};
                for (std::size_t i = 0; i < sample.tags.size(); ++i)
                    tf << i << ',' << names[static_cast<int>(sample.tags[i])] << '\n';
            }
            if (verbose)
                std::cerr << "wrote " << sample.graph.m() << " edges over " << sample.graph.n
                          << " nodes\n";
        } else if (*vt_cmd) {
            const tdlg::TheoryReport rep = tdlg::verify_theory(vt_params, vt_sigma_t, vt_trials);
            json j;
            j["gamma"] = rep.theory.gamma;
            j["trials"] = rep.trials;
            j["block_sizes"] = rep.theory.block_sizes;
            j["config"] = {{"n", vt_params.n},         {"delta", vt_params.delta},
                           {"alpha1", vt_params.alpha1}, {"alpha2", vt_params.alpha2},
                           {"mu1", vt_params.mu1},     {"mu2", vt_params.mu2},
                           {"sigma_t", vt_sigma_t},    {"seed", vt_params.seed}};
            static const char* tag_names[6] = {"UU1", "VV1", "UV1", "UU2", "VV2", "UV2"};
            static const char* col_names[6] = {"UU1", "UU2", "VV1", "VV2", "UV1", "UV2"};
            auto& cells = j["adjacency_cells"] = json::array();
            for (const auto& c : rep.adj_cells) {
                json cj;
                cj["row"] = tag_names[c.row];
                cj["col"] = tag_names[c.col];
                cj["analytic"] = c.analytic;
                if (c.defined) {
                    cj["empirical"] = c.empirical;
                    cj["rel_dev"] = c.rel_dev;
                } else {
                    cj["empirical"] = nullptr;
                }
                cells.push_back(cj);
            }
            auto& ncells = j["node_embedding_cells"] = json::array();
            for (const auto& c : rep.node_cells) {
                json cj;
                cj["row"] = c.row == 0 ? "U" : "V";
                cj["col"] = col_names[c.col];
                cj["analytic"] = c.analytic;
                if (c.defined) {
                    cj["empirical"] = c.empirical;
                    cj["rel_dev"] = c.rel_dev;
                } else {
                    cj["empirical"] = nullptr;
                }
                ncells.push_back(cj);
            }
            emit(j.dump(2), vt_out.out);
        } else if (*sweep_cmd) {
            const tdlg::TemporalGraph g = load_data(sweep_data);
            tdlg::EdgeClassifyOptions base;
            base.tdlg = make_tdlg_config(sweep_tdlg_args);
            base.split = sweep_split;
            tdlg::SigmaSweepResult res = tdlg::sweep_sigma(g, sweep_grid, base);
            if (sweep_out.format == "csv") {
                std::ostringstream os;
                os.precision(10);
                os << "sigma_ratio,mean_auc_pct,proportion_of_best\n";
                for (std::size_t i = 0; i < res.ratios.size(); ++i)
                    os << res.ratios[i] << ',' << res.mean_auc_pct[i] << ','
                       << res.proportion_of_best[i] << '\n';
                emit(os.str(), sweep_out.out);
            } else if (sweep_out.format == "table") {
                std::ostringstream os;
                os.setf(std::ios::fixed);
                os.precision(4);
                os << "sigma_ratio   mean_auc%   of_best\n";
                for (std::size_t i = 0; i < res.ratios.size(); ++i)
                    os << res.ratios[i] << "   " << res.mean_auc_pct[i] << "   "
                       << res.proportion_of_best[i] << '\n';
                emit(os.str(), sweep_out.out);
            } else {
                json j = res.to_json();
                j["dataset"] = data_echo(sweep_data);
                emit(j.dump(2), sweep_out.out);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
