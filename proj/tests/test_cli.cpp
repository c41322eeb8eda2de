#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "tdlg/sparse.hpp"

#ifndef TDLG_CLI_BIN
#error "TDLG_CLI_BIN must point at the tdlg binary"
#endif

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(TDLG_CLI_BIN) + " " + args;
    const int rc = std::system(cmd.c_str());
    return rc;
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    return j;
}

struct Cleanup {
    std::vector<std::string> files;
    ~Cleanup() {
        for (const auto& f : files) std::remove(f.c_str());
    }
};

void write_labeled_csv(const std::string& path) {
    std::ofstream out(path);
    for (int i = 0; i < 120; ++i) {
        const int u = i % 17;
        const int v = (i * 7 + 1) % 17 == u ? (u + 1) % 17 : (i * 7 + 1) % 17;
        const double t = (i * 37 % 100) / 10.0;
        out << "n" << u << ",n" << v << ',' << t << ',' << (t > 5.0 ? 3 : -2) << "\n";
    }
}

}  // namespace

TEST_CASE("no subcommand prints usage and fails") {
    CHECK(run("> cli_out.txt 2> cli_err.txt") != 0);
    std::remove("cli_out.txt");
    std::remove("cli_err.txt");
    CHECK(run("--help > /dev/null 2>&1") == 0);
    CHECK(run("frobnicate > /dev/null 2>&1") != 0);
    CHECK(run("classify > /dev/null 2>&1") != 0);  // missing --data
}

TEST_CASE("tsbm emits an edge list with a tag sidecar") {
    Cleanup c{{"cli_tsbm.csv", "cli_tags.csv"}};
    REQUIRE(run("tsbm --n 40 --delta 4 --alpha1 0.9 --alpha2 0.1 --out cli_tsbm.csv "
                "--tags-out cli_tags.csv > /dev/null 2>&1") == 0);
    std::ifstream in("cli_tsbm.csv");
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 160);  // delta * n / 2 per period, two periods
    std::ifstream tags("cli_tags.csv");
    std::getline(tags, line);
    CHECK(line == "0,UU1");
}

TEST_CASE("build exports both matrix formats") {
    Cleanup c{{"cli_graph.csv", "cli_mat.txt", "cli_mat.bin"}};
    write_labeled_csv("cli_graph.csv");
    REQUIRE(run("build --data cli_graph.csv --no-labels --sigma-t 1.0 --out cli_mat.txt "
                "> /dev/null 2>&1") == 0);
    std::ifstream txt("cli_mat.txt");
    std::string line;
    REQUIRE(std::getline(txt, line));
    CHECK(line.rfind("0 0 2", 0) == 0);  // diagonal of the first row
    REQUIRE(run("build --data cli_graph.csv --no-labels --sigma-t 1.0 --out cli_mat.bin "
                "--matrix-format csr > /dev/null 2>&1") == 0);
    const tdlg::SparseMatrix a = tdlg::read_csr_binary("cli_mat.bin");
    CHECK(a.rows == 120);
    CHECK(a.at(0, 0) == 2.0);
}

TEST_CASE("classify emits a self-describing reproducible report") {
    Cleanup c{{"cli_graph.csv", "cli_rep1.json", "cli_rep2.json"}};
    write_labeled_csv("cli_graph.csv");
    const std::string args =
        "classify --data cli_graph.csv --sigma-ratio 0.1 --trials 2 --seed 7 --out ";
    REQUIRE(run(args + "cli_rep1.json > /dev/null 2>&1") == 0);
    REQUIRE(run(args + "cli_rep2.json > /dev/null 2>&1") == 0);
    const auto r1 = read_json("cli_rep1.json");
    const auto r2 = read_json("cli_rep2.json");
    CHECK(r1.at("task") == "classify-sparse");
    CHECK(r1.at("config").at("seed") == 7);
    CHECK(r1.at("config").at("dataset").at("data") == "cli_graph.csv");
    CHECK(r1.at("mean_auc_pct").get<double>() > 50.0);
    // bit-for-bit reproducible modulo wall-clock fields
    REQUIRE(r1.at("trials").size() == r2.at("trials").size());
    for (std::size_t i = 0; i < r1.at("trials").size(); ++i)
        CHECK(r1.at("trials")[i].at("auc_pct") == r2.at("trials")[i].at("auc_pct"));
}

TEST_CASE("verify-theory reports the 36 + 12 cells as json") {
    Cleanup c{{"cli_vt.json"}};
    REQUIRE(run("verify-theory --n 200 --delta 8 --sigma-t 0.5 --trials 2 --out cli_vt.json "
                "> /dev/null 2>&1") == 0);
    const auto j = read_json("cli_vt.json");
    CHECK(j.at("adjacency_cells").size() == 36);
    CHECK(j.at("node_embedding_cells").size() == 12);
    CHECK(j.at("gamma").get<double>() == doctest::Approx(std::exp(-8.0)));
}

TEST_CASE("sweep reports proportions per grid point") {
    Cleanup c{{"cli_graph.csv", "cli_sweep.csv"}};
    write_labeled_csv("cli_graph.csv");
    REQUIRE(run("sweep --data cli_graph.csv --grid 0.05 0.5 --trials 2 --format csv "
                "--out cli_sweep.csv > /dev/null 2>&1") == 0);
    std::ifstream in("cli_sweep.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "sigma_ratio,mean_auc_pct,proportion_of_best");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("bad inputs produce diagnostics, not crashes") {
    CHECK(run("classify --data does_not_exist.csv > /dev/null 2>&1") != 0);
    Cleanup c{{"cli_selfloop.csv"}};
    std::ofstream bad("cli_selfloop.csv");
    bad << "a,a,0,1\n";
    bad.close();
    CHECK(run("classify --data cli_selfloop.csv > /dev/null 2>&1") != 0);
}
