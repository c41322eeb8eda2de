#include <doctest.h>

#include <array>
#include <cmath>
#include <stdexcept>

#include "tdlg/tsbm.hpp"

using namespace tdlg;

namespace {

std::array<std::int64_t, 6> tag_counts(const TsbmSample& s) {
    std::array<std::int64_t, 6> c{};
    for (const auto t : s.tags) ++c[static_cast<int>(t)];
    return c;
}

}  // namespace

TEST_CASE("demonstration parameters produce the stated block counts") {
    TsbmParams p;  // n=100, delta=40, alpha1=0.9, alpha2=0.1
    const TsbmSample s = generate_tsbm(p);
    CHECK(s.graph.n == 100);
    CHECK(s.graph.m() == 4000);  // 2000 per period
    const auto c = tag_counts(s);
    CHECK(c[static_cast<int>(BlockTag::UU1)] == 900);
    CHECK(c[static_cast<int>(BlockTag::VV1)] == 900);
    CHECK(c[static_cast<int>(BlockTag::UV1)] == 200);
    CHECK(c[static_cast<int>(BlockTag::UU2)] == 100);
    CHECK(c[static_cast<int>(BlockTag::VV2)] == 100);
    CHECK(c[static_cast<int>(BlockTag::UV2)] == 1800);
    // tags are consistent with endpoints and period times
    for (std::size_t i = 0; i < s.tags.size(); ++i) {
        const auto& e = s.graph.edges[i];
        const bool uu = s.in_u(e.u) && s.in_u(e.v);
        const bool vv = !s.in_u(e.u) && !s.in_u(e.v);
        switch (s.tags[i]) {
            case BlockTag::UU1: case BlockTag::UU2: CHECK(uu); break;
            case BlockTag::VV1: case BlockTag::VV2: CHECK(vv); break;
            default: CHECK((!uu && !vv));
        }
        CHECK(e.u != e.v);
    }
}

TEST_CASE("alpha = 0 gives a bipartite graph in both periods") {
    TsbmParams p;
    p.n = 40;
    p.delta = 6;
    p.alpha1 = 0.0;
    p.alpha2 = 0.0;
    const TsbmSample s = generate_tsbm(p);
    for (const auto& e : s.graph.edges) CHECK(s.in_u(e.u) != s.in_u(e.v));
}

TEST_CASE("generation is deterministic per seed") {
    TsbmParams p;
    p.n = 60;
    p.delta = 8;
    const TsbmSample a = generate_tsbm(p);
    const TsbmSample b = generate_tsbm(p);
    REQUIRE(a.graph.m() == b.graph.m());
    for (std::int64_t i = 0; i < a.graph.m(); ++i) {
        CHECK(a.graph.edges[i].u == b.graph.edges[i].u);
        CHECK(a.graph.edges[i].v == b.graph.edges[i].v);
        CHECK(a.graph.edges[i].t == b.graph.edges[i].t);
    }
    p.seed += 1;
    const TsbmSample c = generate_tsbm(p);
    bool any_diff = false;
    for (std::int64_t i = 0; i < a.graph.m() && !any_diff; ++i)
        any_diff = a.graph.edges[i].u != c.graph.edges[i].u ||
                   a.graph.edges[i].t != c.graph.edges[i].t;
    CHECK(any_diff);
}

TEST_CASE("unroundable block counts are rejected") {
    TsbmParams p;
    p.n = 10;
    p.delta = 1;
    p.alpha1 = 0.33;
    p.alpha2 = 0.33;
    CHECK_THROWS_AS(generate_tsbm(p), std::invalid_argument);
    p.n = 9;
    CHECK_THROWS_AS(generate_tsbm(p), std::invalid_argument);  // odd n
}

TEST_CASE("gamma formula") {
    TsbmParams p;
    p.mu1 = -1.0;
    p.mu2 = 1.0;
    CHECK(tsbm_gamma(p, 0.5) == doctest::Approx(std::exp(-8.0)));
    CHECK(tsbm_gamma(p, 0.5) == doctest::Approx(3.3546262790251185e-4));
    p.mu2 = -1.0;
    CHECK(tsbm_gamma(p, 0.5) == 1.0);
}

TEST_CASE("expected adjacency blocks follow the Kronecker pattern") {
    TsbmParams p;
    p.n = 100;
    const double sigma_t = 0.5;
    const TsbmTheory th = expected_tsbm_theory(p, sigma_t);
    const double g = th.gamma;
    auto cell = [&](BlockTag a, BlockTag b) {
        return th.adj_blocks[static_cast<int>(a)][static_cast<int>(b)];
    };
    CHECK(cell(BlockTag::UU1, BlockTag::UU1) == doctest::Approx(8.0 / 100));
    CHECK(cell(BlockTag::UU1, BlockTag::UU2) == doctest::Approx(8.0 * g / 100));
    CHECK(cell(BlockTag::UU1, BlockTag::VV1) == 0.0);
    CHECK(cell(BlockTag::UU1, BlockTag::VV2) == 0.0);
    CHECK(cell(BlockTag::UU1, BlockTag::UV1) == doctest::Approx(4.0 / 100));
    CHECK(cell(BlockTag::UV1, BlockTag::UV2) == doctest::Approx(4.0 * g / 100));
    CHECK(cell(BlockTag::VV2, BlockTag::VV2) == doctest::Approx(8.0 / 100));
    // symmetry of the table
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) CHECK(th.adj_blocks[i][j] == th.adj_blocks[j][i]);
    // block sizes in tag order
    CHECK(th.block_sizes[0] == 900);
    CHECK(th.block_sizes[2] == 200);
    CHECK(th.block_sizes[5] == 1800);
}

TEST_CASE("expected node-embedding rows") {
    TsbmParams p;
    p.n = 100;
    SUBCASE("alpha1=0.9, alpha2=0.1, gamma ~ 0") {
        const TsbmTheory th = expected_tsbm_theory(p, 0.01);  // gamma underflows to 0
        const double s = 2.0 / 100.0;
        const std::array<double, 6> want{0.9 * s, 0.1 * s, 0.1 * s, 0.9 * s, 0.5 * s, 0.5 * s};
        for (int c = 0; c < 6; ++c)
            CHECK(th.node_emb_blocks[0][c] == doctest::Approx(want[c]).epsilon(1e-9));
        // v row swaps the UU and VV groups
        CHECK(th.node_emb_blocks[1][0] == doctest::Approx(0.1 * s));
        CHECK(th.node_emb_blocks[1][2] == doctest::Approx(0.9 * s));
        CHECK(th.node_emb_blocks[1][4] == doctest::Approx(0.5 * s));
    }
    SUBCASE("gamma = 1 with alpha1 + alpha2 = 1 collapses the rows") {
        p.mu1 = p.mu2 = 0.0;  // gamma = 1
        const TsbmTheory th = expected_tsbm_theory(p, 1.0);
        for (int c = 0; c < 6; ++c)
            CHECK(th.node_emb_blocks[0][c] == doctest::Approx(th.node_emb_blocks[1][c]));
    }
    SUBCASE("alpha1 = alpha2 = 1/2 collapses the rows for any gamma") {
        p.alpha1 = p.alpha2 = 0.5;
        const TsbmTheory th = expected_tsbm_theory(p, 0.3);
        CHECK(th.gamma < 1.0);
        for (int c = 0; c < 6; ++c)
            CHECK(th.node_emb_blocks[0][c] == doctest::Approx(th.node_emb_blocks[1][c]));
    }
    SUBCASE("distinguishable otherwise") {
        const TsbmTheory th = expected_tsbm_theory(p, 0.5);
        bool differs = false;
        for (int c = 0; c < 6; ++c)
            differs = differs || std::abs(th.node_emb_blocks[0][c] - th.node_emb_blocks[1][c]) > 1e-9;
        CHECK(differs);
    }
}

TEST_CASE("verify_theory converges to the analytic cells") {
    TsbmParams p;
    p.n = 600;
    p.delta = 20;
    const TheoryReport rep = verify_theory(p, 0.5, 6);
    REQUIRE(rep.adj_cells.size() == 36);
    REQUIRE(rep.node_cells.size() == 12);
    for (const auto& cell : rep.adj_cells) {
        REQUIRE(cell.defined);
        if (cell.analytic == 0.0) {
            CHECK(cell.empirical == 0.0);  // disjoint communities share no endpoint
        } else {
            CHECK(cell.rel_dev < 0.25);
        }
    }
    for (const auto& cell : rep.node_cells) {
        REQUIRE(cell.defined);
        CHECK(cell.rel_dev < 0.25);
    }
}

TEST_CASE("verify_theory handles empty blocks and the gamma = 1 symmetry") {
    TsbmParams p;
    p.n = 200;
    p.delta = 10;
    p.alpha2 = 0.0;  // period-2 intra blocks are empty
    p.mu1 = p.mu2 = 0.0;
    const TheoryReport rep = verify_theory(p, 0.5, 3);
    CHECK(rep.theory.gamma == 1.0);
    bool saw_na = false;
    for (const auto& cell : rep.adj_cells)
        if (!cell.defined) saw_na = true;
    CHECK(saw_na);
    // same-topology cells in the two periods should be statistically close
    const auto v = [&](BlockTag a, BlockTag b) {
        return rep.adj_cells[static_cast<int>(a) * 6 + static_cast<int>(b)];
    };
    const auto c1 = v(BlockTag::UV1, BlockTag::UV1);
    const auto c2 = v(BlockTag::UV2, BlockTag::UV2);
    REQUIRE(c1.defined);
    REQUIRE(c2.defined);
    CHECK(std::abs(c1.empirical - c2.empirical) <
          0.25 * std::max(c1.empirical, c2.empirical));
}

TEST_CASE("verify_theory validates its preconditions") {
    TsbmParams p;
    p.sigma1 = 0.5;
    CHECK_THROWS_AS(verify_theory(p, 0.5, 2), std::invalid_argument);
    p.sigma1 = 0.0;
    CHECK_THROWS_AS(verify_theory(p, 0.5, 0), std::invalid_argument);
}
