#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "oracles.hpp"
#include "segstat/error.hpp"
#include "segstat/nn_engine.hpp"
#include "segstat/nnct.hpp"

using namespace segstat;

namespace {

PointSet make(std::vector<Point> pts, Rect region = Rect::unit()) {
    std::vector<ClassId> labels(pts.size(), 0);
    for (std::size_t i = 0; i < labels.size(); i += 2) labels[i] = 1;
    return PointSet(std::move(pts), std::move(labels), region, 2);
}

PointSet make_bbox(std::vector<Point> pts) {
    std::vector<ClassId> labels(pts.size(), 0);
    return PointSet::with_bounding_box(std::move(pts), std::move(labels));
}

void check_invariants(const NNGraph& g) {
    std::size_t into_bases = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        REQUIRE(g.nn_index[k] < g.size());
        into_bases += g.base_mask[g.nn_index[k]] ? 1 : 0;
        CHECK(g.dest_mask[g.nn_index[k]]);
        CHECK(g.nn_index[k] != k);
    }
    const QRStats qr = compute_qr(g);
    std::size_t weighted = 0;
    for (std::size_t k = 0; k < qr.Qk.size(); ++k) weighted += k * qr.Qk[k];
    CHECK(weighted == into_bases);
    CHECK(std::fmod(qr.R, 2.0) == 0.0);
    CHECK(qr.R >= 0.0);
    CHECK(qr.R <= 2.0 * static_cast<double>(g.num_bases()));
    REQUIRE(qr.Q_tilde.has_value());
    if (qr.Qk.size() <= 7) CHECK(*qr.Q_tilde == qr.Q);
}

}  // namespace

TEST_CASE("collinear example") {
    const auto g = build_nn_graph(make_bbox({{0, 0}, {1, 0}, {3, 0}}));
    CHECK(g.nn_index == std::vector<std::size_t>{1, 0, 1});
    CHECK(g.distances == std::vector<double>{1, 1, 2});
    const auto qr = compute_qr(g);
    CHECK(qr.Q == 2.0);
    CHECK(qr.R == 2.0);
    REQUIRE(qr.Qk.size() >= 3);
    CHECK(qr.Qk[2] == 1);
}

TEST_CASE("rectangle corners") {
    const auto g = build_nn_graph(make_bbox({{0, 0}, {1, 0}, {0, 2}, {1, 2}}));
    CHECK(g.nn_index == std::vector<std::size_t>{1, 0, 3, 2});
    const auto qr = compute_qr(g);
    CHECK(qr.Q == 0.0);
    CHECK(qr.R == 4.0);
}

TEST_CASE("equilateral ties go to the lowest index") {
    const auto g = build_nn_graph(make_bbox({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}}));
    CHECK(g.nn_index == std::vector<std::size_t>{1, 0, 0});
    const auto exact = build_nn_graph(make_bbox({{0, 0}, {-1, 0}, {1, 0}, {0, 5}}));
    CHECK(exact.nn_index[0] == 1);
}

TEST_CASE("too few points and duplicates are rejected") {
    CHECK_THROWS_AS(make_bbox({{0, 0}}), ValidationError);
    CHECK_THROWS_AS(make_bbox({{0, 0}, {1, 1}, {0, 0}}), ValidationError);
}

TEST_CASE("grid search matches the naive scan") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const std::size_t n = 2 + (seed * 37) % 199;
        auto pts = oracle::uniform_points(n, seed);
        // Some clustered and some collinear inputs to stress the grid.
        if (seed % 3 == 0) {
            for (auto& p : pts) p.x = 0.5 + 0.01 * p.x;
        }
        if (seed % 5 == 0) {
            for (std::size_t i = 0; i < n; ++i) pts[i] = {static_cast<double>(i % 17) / 17.0, pts[i].y};
        }
        const PointSet ps = make(pts);
        const NNGraph g = build_nn_graph(ps);
        const auto ref = oracle::naive_nn(pts, std::vector<bool>(n, true), std::vector<bool>(n, true));
        for (std::size_t k = 0; k < n; ++k) {
            REQUIRE(g.nn_index[k] == ref[k].index);
            REQUIRE(g.distances[k] == std::sqrt(ref[k].dist2));
        }
        check_invariants(g);
    }
}

TEST_CASE("integer lattice ties resolve like the naive scan") {
    std::vector<Point> pts;
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 9; ++j) pts.push_back({static_cast<double>(i), static_cast<double>(j)});
    }
    const std::size_t n = pts.size();
    const NNGraph g = build_nn_graph(make_bbox(pts));
    const auto ref = oracle::naive_nn(pts, std::vector<bool>(n, true), std::vector<bool>(n, true));
    for (std::size_t k = 0; k < n; ++k) CHECK(g.nn_index[k] == ref[k].index);
}

TEST_CASE("toroidal graph matches explicit replication bit for bit") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const std::size_t n = 2 + (seed * 29) % 150;
        const Rect region{0.0, 0.0, 1.0 + 0.25 * static_cast<double>(seed % 3), 1.0};
        const auto pts = oracle::uniform_points(n, 1000 + seed, region);
        const NNGraph g = apply_toroidal(make(pts, region));
        const auto ref = oracle::replicated_torus_nn(pts, region);
        for (std::size_t k = 0; k < n; ++k) {
            REQUIRE(g.nn_index[k] == ref[k].index);
            REQUIRE(g.distances[k] == std::sqrt(ref[k].dist2));
            const int slot = (g.offsets[k].y + 1) * 3 + (g.offsets[k].x + 1);
            REQUIRE(slot == ref[k].slot);
        }
        check_invariants(g);
    }
}

TEST_CASE("toroidal examples") {
    const NNGraph g = apply_toroidal(make({{0.1, 0.5}, {0.9, 0.5}}));
    CHECK(g.nn_index[0] == 1);
    CHECK(g.distances[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(g.offsets[0].x == -1);

    const PointSet inner = make({{0.5, 0.5}, {0.5, 0.6}});
    const NNGraph t = apply_toroidal(inner);
    const NNGraph u = build_nn_graph(inner);
    CHECK(t.nn_index == u.nn_index);
    CHECK(t.distances == u.distances);

    // Single class: row sums still equal the class size.
    const auto pts = oracle::uniform_points(40, 77);
    const PointSet one(pts, std::vector<ClassId>(40, 0), Rect::unit());
    const NNCT table = build_nnct(apply_toroidal(one), one);
    CHECK(table.q() == 1);
    CHECK(table.row_sums()[0] == 40);
}

TEST_CASE("toroidal NN multiset is translation invariant") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto pts = oracle::uniform_points(120, 500 + seed);
        const auto labels = oracle::alternating_labels(120, 50);
        const PointSet a(pts, labels, Rect::unit(), 2);
        std::vector<Point> shifted;
        for (const Point& p : pts) shifted.push_back({std::fmod(p.x + 0.37, 1.0), std::fmod(p.y + 0.81, 1.0)});
        const PointSet b(shifted, labels, Rect::unit(), 2);
        CHECK(build_nnct(apply_toroidal(a), a) == build_nnct(apply_toroidal(b), b));
    }
}

TEST_CASE("outer buffer") {
    SUBCASE("all points inside the core equals the plain graph") {
        const auto pts = oracle::uniform_points(80, 3);
        const PointSet ps = make(pts);
        const NNGraph a = apply_outer_buffer(ps, Rect::unit());
        const NNGraph b = build_nn_graph(ps);
        CHECK(a.nn_index == b.nn_index);
        CHECK(a.distances == b.distances);
        CHECK(compute_qr(a).Q == compute_qr(b).Q);
        CHECK(compute_qr(a).R == compute_qr(b).R);
    }
    SUBCASE("base with a buffer neighbor") {
        const PointSet ps = make({{0.5, 0.5}, {0.5, 1.1}}, Rect{0, 0, 1, 2});
        const NNGraph g = apply_outer_buffer(ps, Rect::unit());
        CHECK(g.base_mask == std::vector<bool>{true, false});
        CHECK(g.nn_index[0] == 1);
        CHECK(g.nn_index[1] == 0);
        // The pair has a base member, so it stays reflexive.
        CHECK(compute_qr(g).R == 2.0);
        CHECK(compute_qr(g).Q == 0.0);
        CHECK(build_nnct(g, ps).n() == 1);
    }
    SUBCASE("guard points share a base neighbor") {
        // Both guard points near the core point at the single base; the far
        // guard pair is reflexive entirely inside the guard area.
        const PointSet ps = make({{0.5, 0.95}, {0.4, 1.05}, {0.6, 1.05}, {0.5, 1.9}, {0.5, 1.95}},
                                 Rect{0, 0, 1, 2});
        const NNGraph g = apply_outer_buffer(ps, Rect::unit());
        CHECK(g.nn_index == std::vector<std::size_t>{1, 0, 0, 4, 3});
        const QRStats qr = compute_qr(g);
        CHECK(qr.R == 2.0);
        CHECK(qr.Q == 2.0);
        CHECK(qr.Qk == std::vector<std::size_t>{0, 0, 1});
    }
    SUBCASE("no bases") {
        const PointSet ps = make({{2.5, 2.5}, {2.5, 2.6}}, Rect{2, 2, 3, 3});
        CHECK_THROWS_AS(apply_outer_buffer(ps, Rect::unit()), ValidationError);
    }
}

TEST_CASE("inner buffer") {
    const PointSet ps = make({{0.5, 0.5}, {0.05, 0.5}});
    const NNGraph g = apply_inner_buffer(ps, 0.1);
    CHECK(g.base_mask == std::vector<bool>{true, false});
    CHECK(g.nn_index[0] == 1);

    const auto pts = oracle::uniform_points(60, 11);
    const PointSet many = make(pts);
    const NNGraph zero = apply_inner_buffer(many, 0.0);
    const NNGraph plain = build_nn_graph(many);
    CHECK(zero.nn_index == plain.nn_index);
    CHECK(zero.distances == plain.distances);

    CHECK_THROWS_AS(apply_inner_buffer(many, 0.5), ValidationError);
    CHECK_THROWS_AS(apply_inner_buffer(many, -0.1), ValidationError);
    CHECK_THROWS_AS(apply_inner_buffer(make({{0.01, 0.5}, {0.02, 0.5}}), 0.2), ValidationError);
}

TEST_CASE("Q and R equal brute-force sums in every correction mode") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const std::size_t n = 10 + seed * 7;
        const auto pts = oracle::uniform_points(n, 900 + seed, Rect{-0.5, -0.5, 1.5, 1.5});
        const PointSet ps = make(pts, Rect{-0.5, -0.5, 1.5, 1.5});
        std::vector<NNGraph> graphs;
        graphs.push_back(build_nn_graph(ps));
        graphs.push_back(apply_toroidal(ps));
        graphs.push_back(apply_outer_buffer(ps, Rect::unit()));
        graphs.push_back(apply_inner_buffer(ps, 0.3));
        for (const NNGraph& g : graphs) {
            const QRStats qr = compute_qr(g);
            const auto ref = oracle::brute_qr(g);
            CHECK(qr.Q == ref.Q);
            CHECK(*qr.Q_tilde == ref.Q);
            CHECK(qr.R == ref.R);
            check_invariants(g);
        }
    }
}

TEST_CASE("no destination is shared by six or more planar bases") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto g = build_nn_graph(make(oracle::uniform_points(500, 40 + seed)));
        const auto qr = compute_qr(g);
        CHECK(qr.Qk.size() <= 6);
    }
}

TEST_CASE("Q_tilde counts every shared neighbor beyond the planar bound") {
    // Non-planar relation: six bases all pointing at one destination.
    NNGraph g;
    g.nn_index = {6, 6, 6, 6, 6, 6, 0};
    g.distances.assign(7, 1.0);
    g.base_mask.assign(7, true);
    g.dest_mask.assign(7, true);
    g.offsets.assign(7, WrapOffset{});
    const auto qr = compute_qr(g);
    CHECK(qr.Qk[6] == 1);
    CHECK(*qr.Q_tilde == 30.0);
    CHECK(qr.Q == 30.0);
    CHECK(qr.R == 2.0);
}

TEST_CASE("inner buffer width") {
    CHECK(inner_buffer_width(100, 0) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(inner_buffer_width(100, 1) == doctest::Approx(0.07614).epsilon(1e-4));
    CHECK(inner_buffer_width(25, 2) == doctest::Approx(0.20457).epsilon(1e-4));
    const double lambda = 37.0;
    const double sd = std::sqrt((4.0 - std::numbers::pi) / (4.0 * std::numbers::pi * lambda));
    CHECK(inner_buffer_width(lambda, 3) == doctest::Approx(0.5 / std::sqrt(lambda) + 3 * sd));
    CHECK_THROWS_AS(inner_buffer_width(0.0, 1), ValidationError);
    CHECK_THROWS_AS(inner_buffer_width(-2.0, 1), ValidationError);
}

TEST_CASE("edge correction names") {
    CHECK(parse_edge_correction("outer-buffer") == EdgeCorrection::outer_buffer);
    CHECK(parse_edge_correction("inner_buffer") == EdgeCorrection::inner_buffer);
    CHECK(to_string(EdgeCorrection::toroidal) == "toroidal");
    CHECK_THROWS_AS(parse_edge_correction("mirror"), ValidationError);
}
