#include <doctest.h>

#include <memory>
#include <random>

#include "support/oracles.hpp"
#include "tdlg/embeddings.hpp"
#include "tdlg/tdlg.hpp"

using namespace tdlg;

namespace {

TemporalGraph path3() {
    TemporalGraph g;
    g.n = 4;
    g.edges = {{0, 1, 0, -1}, {1, 2, 0, -1}, {2, 3, 1, -1}};
    return g;
}

EmbeddingMatrix dense_from(std::vector<double> rows, std::int64_t r, std::int64_t c,
                           RowRole role = RowRole::edge) {
    return EmbeddingMatrix::dense(role, r, c, std::move(rows));
}

}  // namespace

TEST_CASE("edge embeddings are the matrix rows") {
    const TemporalGraph g = path3();
    TdlgConfig cfg;
    cfg.sigma_ratio.reset();
    cfg.sigma_t = 1.0;
    auto a = std::make_shared<SparseMatrix>(build_tdlg(g, build_incidence(g), cfg));
    const EmbeddingMatrix y = edge_embeddings(a);
    CHECK(!y.is_dense());
    CHECK(y.rows() == 3);
    CHECK(y.dim() == 3);
    // row 1 = {0: 1, 1: 2, 2: exp(-1/2)}
    const auto cols = y.sparse_matrix().row_cols(1);
    const auto vals = y.sparse_matrix().row_vals(1);
    REQUIRE(cols.size() == 3);
    CHECK(vals[0] == doctest::Approx(1.0));
    CHECK(vals[1] == doctest::Approx(2.0));
    CHECK(vals[2] == doctest::Approx(0.6065306597126334));
    // zero copy: same object
    CHECK(&y.sparse_matrix() == a.get());
}

TEST_CASE("node embedding of a degree-1 node equals its edge row") {
    const TemporalGraph g = path3();
    const IncidenceView inc = build_incidence(g);
    const EmbeddingMatrix y =
        dense_from({1, 0, 0, /**/ 0, 1, 0, /**/ 0, 0, 1}, 3, 3);
    const EmbeddingMatrix x = mean_edge_node_embeddings(inc, y);
    CHECK(x.role() == RowRole::node);
    REQUIRE(x.rows() == 4);
    // node 0 is only on edge 0
    CHECK(x.dense_row(0)[0] == doctest::Approx(1.0));
    CHECK(x.dense_row(0)[1] == 0.0);
    // node 1 averages edges 0 and 1
    CHECK(x.dense_row(1)[0] == doctest::Approx(0.5));
    CHECK(x.dense_row(1)[1] == doctest::Approx(0.5));
    CHECK(x.dense_row(1)[2] == 0.0);
}

TEST_CASE("isolated nodes get zero rows, not errors") {
    TemporalGraph g;
    g.n = 4;  // node 3 is isolated
    g.edges = {{0, 1, 0, -1}, {1, 2, 1, -1}};
    const IncidenceView inc = build_incidence(g);
    const EmbeddingMatrix y = dense_from({2, 0, /**/ 0, 3}, 2, 2);
    const EmbeddingMatrix x = mean_edge_node_embeddings(inc, y);
    CHECK(x.dense_row(3)[0] == 0.0);
    CHECK(x.dense_row(3)[1] == 0.0);

    auto sp = std::make_shared<SparseMatrix>();
    sp->rows = 2;
    sp->cols = 2;
    sp->row_ptr = {0, 1, 2};
    sp->col = {0, 1};
    sp->val = {2.0, 3.0};
    const EmbeddingMatrix xs = mean_edge_node_embeddings(inc, edge_embeddings(sp));
    CHECK(!xs.is_dense());
    CHECK(xs.sparse_matrix().row_ptr[4] - xs.sparse_matrix().row_ptr[3] == 0);
}

TEST_CASE("sparse and dense node aggregation agree") {
    std::mt19937_64 rng(131);
    const auto g = testing::random_graph(rng, 10, 40);
    const IncidenceView inc = build_incidence(g);
    TdlgConfig cfg;
    cfg.sigma_ratio.reset();
    cfg.sigma_t = 0.8;
    auto a = std::make_shared<SparseMatrix>(build_tdlg(g, inc, cfg));

    const EmbeddingMatrix xs = mean_edge_node_embeddings(inc, edge_embeddings(a));
    std::vector<double> dense(static_cast<std::size_t>(a->rows * a->cols), 0.0);
    for (std::int64_t i = 0; i < a->rows; ++i)
        for (std::int64_t k = a->row_ptr[i]; k < a->row_ptr[i + 1]; ++k)
            dense[i * a->cols + a->col[k]] = a->val[k];
    const EmbeddingMatrix xd =
        mean_edge_node_embeddings(inc, dense_from(std::move(dense), a->rows, a->cols));
    for (NodeId v = 0; v < g.n; ++v)
        for (std::int64_t c = 0; c < a->cols; ++c)
            CHECK(xs.sparse_matrix().at(v, c) == doctest::Approx(xd.dense_row(v)[c]).epsilon(1e-12));
}

TEST_CASE("node coordinates stay within the contributing edge range") {
    std::mt19937_64 rng(137);
    const auto g = testing::random_graph(rng, 8, 30);
    const IncidenceView inc = build_incidence(g);
    const std::int64_t dim = 5;
    std::vector<double> rows(static_cast<std::size_t>(g.m() * dim));
    for (auto& v : rows) v = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 4.0 - 2.0;
    const EmbeddingMatrix y = dense_from(std::move(rows), g.m(), dim);
    const EmbeddingMatrix x = mean_edge_node_embeddings(inc, y);
    for (NodeId v = 0; v < g.n; ++v) {
        const auto edges = inc.incident(v);
        if (edges.empty()) continue;
        for (std::int64_t c = 0; c < dim; ++c) {
            double lo = 1e300, hi = -1e300;
            for (const EdgeId e : edges) {
                lo = std::min(lo, y.dense_row(e)[c]);
                hi = std::max(hi, y.dense_row(e)[c]);
            }
            CHECK(x.dense_row(v)[c] >= lo - 1e-12);
            CHECK(x.dense_row(v)[c] <= hi + 1e-12);
        }
    }
}

TEST_CASE("aggregation is linear in the edge embeddings") {
    std::mt19937_64 rng(139);
    const auto g = testing::random_graph(rng, 9, 25);
    const IncidenceView inc = build_incidence(g);
    const std::int64_t dim = 3;
    std::vector<double> r1(static_cast<std::size_t>(g.m() * dim)), r2 = r1;
    for (auto& v : r1) v = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    for (auto& v : r2) v = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    const double al = 1.75, be = -0.5;
    std::vector<double> mix(r1.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = al * r1[i] + be * r2[i];
    const EmbeddingMatrix x1 = mean_edge_node_embeddings(inc, dense_from(r1, g.m(), dim));
    const EmbeddingMatrix x2 = mean_edge_node_embeddings(inc, dense_from(r2, g.m(), dim));
    const EmbeddingMatrix xm = mean_edge_node_embeddings(inc, dense_from(mix, g.m(), dim));
    for (NodeId v = 0; v < g.n; ++v)
        for (std::int64_t c = 0; c < dim; ++c)
            CHECK(xm.dense_row(v)[c] ==
                  doctest::Approx(al * x1.dense_row(v)[c] + be * x2.dense_row(v)[c])
                      .epsilon(1e-12));
}

TEST_CASE("take_rows selects and reorders") {
    const EmbeddingMatrix y = dense_from({1, 2, /**/ 3, 4, /**/ 5, 6}, 3, 2);
    const std::vector<std::int64_t> idx{2, 0};
    const EmbeddingMatrix s = take_rows(y, idx);
    CHECK(s.rows() == 2);
    CHECK(s.dense_row(0)[0] == 5.0);
    CHECK(s.dense_row(1)[1] == 2.0);

    auto sp = std::make_shared<SparseMatrix>();
    sp->rows = 3;
    sp->cols = 4;
    sp->row_ptr = {0, 2, 2, 3};
    sp->col = {0, 3, 1};
    sp->val = {1.0, 2.0, 3.0};
    const EmbeddingMatrix ss = take_rows(edge_embeddings(sp), idx);
    CHECK(ss.sparse_matrix().at(0, 1) == 3.0);
    CHECK(ss.sparse_matrix().at(1, 0) == 1.0);
    CHECK(ss.sparse_matrix().at(1, 3) == 2.0);
    CHECK(ss.sparse_matrix().row_ptr[1] - ss.sparse_matrix().row_ptr[0] == 1);
}
