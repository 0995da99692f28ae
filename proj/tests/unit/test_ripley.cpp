#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "segstat/error.hpp"
#include "segstat/ripley.hpp"

using namespace segstat;

namespace {

double pair_weight(const Point& a, const Point& b, const Rect& r, RipleyEdge edge) {
    if (edge == RipleyEdge::none) return 1.0;
    return r.area() / ((r.width() - std::abs(a.x - b.x)) * (r.height() - std::abs(a.y - b.y)));
}

// Direct ordered-pair double loop at every grid value.
std::vector<double> naive_l_minus_t(const std::vector<Point>& a, const std::vector<Point>* b,
                                    const Rect& r, double t_max, std::size_t steps, RipleyEdge edge) {
    std::vector<double> out;
    for (std::size_t s = 1; s <= steps; ++s) {
        const double t = t_max * static_cast<double>(s) / static_cast<double>(steps);
        double sum = 0.0;
        const auto& other = b ? *b : a;
        for (std::size_t k = 0; k < a.size(); ++k)
            for (std::size_t l = 0; l < other.size(); ++l) {
                if (!b && k == l) continue;
                if (std::hypot(a[k].x - other[l].x, a[k].y - other[l].y) <= t)
                    sum += pair_weight(a[k], other[l], r, edge);
            }
        const double denom = b ? static_cast<double>(a.size() * b->size())
                               : static_cast<double>(a.size() * (a.size() - 1));
        out.push_back(std::sqrt(r.area() * sum / denom / std::numbers::pi) - t);
    }
    return out;
}

}  // namespace

TEST_CASE("grid") {
    const auto g = l_grid(0.25, 50);
    CHECK(g.size() == 50);
    CHECK(g.front() == doctest::Approx(0.005));
    CHECK(g.back() == 0.25);
}

TEST_CASE("univariate and bivariate match the double loop") {
    const Rect r{0, 0, 2, 1};
    for (RipleyEdge edge : {RipleyEdge::none, RipleyEdge::translation}) {
        for (std::size_t n : {2u, 17u, 120u, 300u}) {
            const auto a = oracle::uniform_points(n, n + 1, r);
            const auto b = oracle::uniform_points(n / 2 + 3, n + 2, r);
            const LCurve u = l_univariate(a, r, 0.4, 40, edge);
            const auto nu = naive_l_minus_t(a, nullptr, r, 0.4, 40, edge);
            const LCurve c = l_bivariate(a, b, r, 0.4, 40, edge);
            const auto nc = naive_l_minus_t(a, &b, r, 0.4, 40, edge);
            for (std::size_t s = 0; s < 40; ++s) {
                CHECK(u.l_minus_t[s] == doctest::Approx(nu[s]).epsilon(1e-10));
                CHECK(c.l_minus_t[s] == doctest::Approx(nc[s]).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("two points") {
    const std::vector<Point> pts{{0.2, 0.5}, {0.5, 0.5}};
    const LCurve c = l_univariate(pts, Rect::unit(), 0.25, 5);
    for (std::size_t s = 0; s < 5; ++s) CHECK(c.l_minus_t[s] == doctest::Approx(-c.t_grid[s]));
}

TEST_CASE("L is nondecreasing and nonnegative") {
    const auto pts = oracle::uniform_points(200, 3);
    for (RipleyEdge edge : {RipleyEdge::none, RipleyEdge::translation}) {
        const LCurve c = l_univariate(pts, Rect::unit(), 0.3, 60, edge);
        double prev = 0.0;
        for (std::size_t s = 0; s < c.t_grid.size(); ++s) {
            const double l = c.l_minus_t[s] + c.t_grid[s];
            CHECK(l >= 0.0);
            CHECK(l >= prev - 1e-15);
            prev = l;
        }
    }
}

TEST_CASE("bivariate is symmetric bit for bit") {
    const auto a = oracle::uniform_points(137, 7);
    const auto b = oracle::uniform_points(64, 8);
    for (RipleyEdge edge : {RipleyEdge::none, RipleyEdge::translation}) {
        CHECK(l_bivariate(a, b, Rect::unit(), 0.25, 50, edge).l_minus_t ==
              l_bivariate(b, a, Rect::unit(), 0.25, 50, edge).l_minus_t);
    }
}

TEST_CASE("separated classes give no cross pairs") {
    const Rect r{0, 0, 3, 1};
    const auto a = oracle::uniform_points(30, 1, Rect{0, 0, 1, 1});
    const auto b = oracle::uniform_points(30, 2, Rect{2, 0, 3, 1});
    const LCurve c = l_bivariate(a, b, r, 0.9, 9);
    for (std::size_t s = 0; s < 9; ++s) CHECK(c.l_minus_t[s] == doctest::Approx(-c.t_grid[s]));
}

TEST_CASE("envelopes") {
    CHECK(envelope_rank(39) == 1);
    CHECK(envelope_rank(99) == 2);
    CHECK(envelope_rank(999) == 25);

    EnvelopeConfig cfg;
    cfg.n1 = 40;
    cfg.n2 = 60;
    cfg.n_sim = 39;
    cfg.seed = 5;
    const Envelope e = l_envelope(cfg);
    CHECK(e.low.size() == 50);
    for (std::size_t s = 0; s < 50; ++s) CHECK(e.low[s] <= e.high[s]);
    CHECK(l_envelope(cfg).low == e.low);
    EnvelopeConfig threaded = cfg;
    threaded.threads = 3;
    CHECK(l_envelope(threaded).high == e.high);

    SUBCASE("rank 1 of 39 is the pointwise min and max") {
        const auto grid = l_grid(cfg.t_max, cfg.n_steps);
        std::vector<double> lo(50, INFINITY), hi(50, -INFINITY);
        for (std::size_t s = 0; s < 39; ++s) {
            // Larger class first, one stream per simulation.
            Rng rng(derive_seed(cfg.seed, s));
            std::vector<Point> big, small;
            for (int i = 0; i < 60; ++i) big.push_back({rng.uniform(), rng.uniform()});
            for (int i = 0; i < 40; ++i) small.push_back({rng.uniform(), rng.uniform()});
            const LCurve c = l_bivariate(small, big, Rect::unit(), cfg.t_max, cfg.n_steps);
            for (std::size_t k = 0; k < 50; ++k) {
                lo[k] = std::min(lo[k], c.l_minus_t[k]);
                hi[k] = std::max(hi[k], c.l_minus_t[k]);
            }
        }
        for (std::size_t k = 0; k < 50; ++k) {
            CHECK(e.low[k] == doctest::Approx(lo[k]).epsilon(1e-12));
            CHECK(e.high[k] == doctest::Approx(hi[k]).epsilon(1e-12));
        }
    }
    SUBCASE("class swap gives identical bounds") {
        EnvelopeConfig swapped = cfg;
        std::swap(swapped.n1, swapped.n2);
        CHECK(l_envelope(swapped).low == e.low);
        cfg.statistic = LStatistic::univariate_first;
        swapped.statistic = LStatistic::univariate_second;
        CHECK(l_envelope(swapped).high == l_envelope(cfg).high);
    }
}

TEST_CASE("clustered pattern leaves the envelope, CSR mostly stays inside") {
    EnvelopeConfig cfg;
    cfg.statistic = LStatistic::univariate_first;
    cfg.n1 = 100;
    cfg.n2 = 0;
    cfg.n_sim = 99;
    const Envelope e = l_envelope(cfg);

    Rng rng(12);
    std::vector<Point> clustered;
    for (int c = 0; c < 5; ++c) {
        const double cx = rng.uniform(0.1, 0.9), cy = rng.uniform(0.1, 0.9);
        for (int i = 0; i < 20; ++i)
            clustered.push_back({cx + rng.uniform(-0.03, 0.03), cy + rng.uniform(-0.03, 0.03)});
    }
    const LCurve c = l_univariate(clustered, Rect::unit(), cfg.t_max, cfg.n_steps);
    CHECK(c.l_minus_t[10] > e.high[10]);

    const LCurve csr = l_univariate(oracle::uniform_points(100, 99), Rect::unit(), cfg.t_max, cfg.n_steps);
    std::size_t inside = 0;
    for (std::size_t s = 0; s < 50; ++s)
        if (csr.l_minus_t[s] >= e.low[s] && csr.l_minus_t[s] <= e.high[s]) ++inside;
    CHECK(inside >= 45);
}

TEST_CASE("errors") {
    const std::vector<Point> one{{0.5, 0.5}};
    CHECK_THROWS_AS(l_univariate(one, Rect::unit(), 0.25, 10), ValidationError);
    const auto pts = oracle::uniform_points(10, 1);
    CHECK_THROWS_AS(l_univariate(pts, Rect::unit(), 0.0, 10), ValidationError);
    CHECK_THROWS_AS(l_univariate(pts, Rect::unit(), 0.25, 0), ValidationError);
    CHECK_THROWS_AS(l_bivariate(pts, {}, Rect::unit(), 0.25, 10), ValidationError);
    EnvelopeConfig cfg;
    cfg.n1 = cfg.n2 = 10;
    cfg.n_sim = 38;
    CHECK_THROWS_AS(l_envelope(cfg), ValidationError);
    CHECK(parse_ripley_edge("translation") == RipleyEdge::translation);
    CHECK_THROWS_AS(parse_ripley_edge("border"), ValidationError);
}
