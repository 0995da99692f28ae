#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "segstat/dixon.hpp"
#include "segstat/error.hpp"
#include "segstat/nn_engine.hpp"
#include "segstat/nnct.hpp"

using namespace segstat;

namespace {

const NNCT kSwamp = NNCT::from_counts({{149, 33}, {43, 48}});
const QRStats kSwampQR{178, 156, {}, std::nullopt};

void compare_with_enumeration(const std::vector<Point>& pts, const std::vector<std::size_t>& sizes) {
    const std::size_t q = sizes.size();
    std::vector<ClassId> labels;
    for (std::size_t c = 0; c < q; ++c) labels.insert(labels.end(), sizes[c], static_cast<ClassId>(c));
    const PointSet ps = PointSet::with_bounding_box(pts, labels, q);
    const NNGraph g = build_nn_graph(ps);
    const QRStats qr = compute_qr(g);
    std::vector<std::uint64_t> rows(sizes.begin(), sizes.end());
    const DixonMoments m = dixon_moments(rows, pts.size(), qr);
    const auto ref = oracle::enumerate_rl(g, sizes);
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t j = 0; j < q; ++j) {
            CHECK(std::abs(m.mean(i, j) - ref.mean[i * q + j]) < 1e-9);
            CHECK(std::abs(m.var(i, j) - ref.var[i * q + j]) < 1e-9);
        }
    }
    if (q == 2) {
        REQUIRE(m.cov_diag.has_value());
        CHECK(std::abs(*m.cov_diag - ref.cov_11_22) < 1e-9);
    } else {
        CHECK_FALSE(m.cov_diag.has_value());
    }
}

}  // namespace

TEST_CASE("swamp moments and statistics") {
    const DixonMoments m = dixon_moments(kSwamp, kSwampQR);
    CHECK(m.mean(0, 0) == doctest::Approx(121.110).epsilon(1e-5));
    CHECK(m.mean(0, 1) == doctest::Approx(60.890).epsilon(1e-5));
    CHECK(m.mean(1, 0) == doctest::Approx(60.890).epsilon(1e-5));
    CHECK(m.mean(1, 1) == doctest::Approx(30.110).epsilon(1e-4));
    CHECK(m.var(0, 0) == doctest::Approx(38.880).epsilon(1e-4));
    CHECK(m.var(1, 1) == doctest::Approx(25.549).epsilon(1e-4));
    CHECK(*m.cov_diag == doctest::Approx(12.364).epsilon(1e-4));
    CHECK(m.mean(0, 0) + m.mean(0, 1) == doctest::Approx(182));

    const TestResult z11 = dixon_cell_test(kSwamp, m, 0, 0);
    const TestResult z22 = dixon_cell_test(kSwamp, m, 1, 1);
    CHECK(std::abs(z11.statistic - 4.47) < 0.01);
    CHECK(std::abs(z22.statistic - 3.54) < 0.01);
    CHECK(z11.p_two_sided < 1e-4);
    CHECK(std::abs(z22.p_two_sided - 0.0004) < 0.00005);
    CHECK(z11.direction_hint == Direction::segregation);
    CHECK(dixon_cell_test(kSwamp, m, 0, 1).direction_hint == Direction::segregation);

    const TestResult x = dixon_overall_test(kSwamp, m);
    CHECK(std::abs(x.statistic - 23.77) < 0.01);
    CHECK(x.df == 2);
    CHECK(x.p_two_sided < 1e-4);
}

TEST_CASE("expected counts add up to the class sizes") {
    for (std::uint64_t n1 : {2u, 5u, 13u, 100u}) {
        for (std::uint64_t n2 : {2u, 9u, 40u}) {
            const std::vector<std::uint64_t> rows{n1, n2};
            const DixonMoments m = dixon_moments(rows, n1 + n2, qr_adjust(n1 + n2));
            double total = 0.0;
            for (std::size_t i = 0; i < 2; ++i) {
                CHECK(m.mean(i, 0) + m.mean(i, 1) == doctest::Approx(static_cast<double>(rows[i])));
                total += m.mean(i, 0) + m.mean(i, 1);
            }
            CHECK(total == doctest::Approx(static_cast<double>(n1 + n2)));
        }
    }
    const std::vector<std::uint64_t> three{4, 7, 11};
    const DixonMoments m = dixon_moments(three, 22, qr_adjust(22));
    double total = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) total += m.mean(i, j);
    }
    CHECK(total == doctest::Approx(22.0));
}

TEST_CASE("symmetric classes") {
    const std::vector<std::uint64_t> rows{30, 30};
    const DixonMoments m = dixon_moments(rows, 60, QRStats{40, 36, {}, std::nullopt});
    CHECK(m.mean(0, 1) == m.mean(1, 0));
    CHECK(m.var(0, 1) == doctest::Approx(m.var(1, 0)).epsilon(1e-14));
}

TEST_CASE("moments match exhaustive relabeling") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const std::size_t n = 4 + seed % 7;  // 4..10
        const auto pts = oracle::uniform_points(n, 4000 + seed);
        for (std::size_t n1 = 1; n1 < n; ++n1) compare_with_enumeration(pts, {n1, n - n1});
    }
}

TEST_CASE("three-class moments match exhaustive relabeling") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto pts = oracle::uniform_points(9, 7000 + seed);
        compare_with_enumeration(pts, {3, 3, 3});
        compare_with_enumeration(pts, {2, 3, 4});
        compare_with_enumeration(pts, {1, 1, 7});
    }
}

TEST_CASE("moments match enumeration on the torus") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto pts = oracle::uniform_points(10, 9100 + seed);
        const PointSet ps(pts, std::vector<ClassId>(10, 0), Rect::unit(), 1);
        const NNGraph g = apply_toroidal(ps);
        const QRStats qr = compute_qr(g);
        const std::vector<std::uint64_t> rows{4, 6};
        const DixonMoments m = dixon_moments(rows, 10, qr);
        const auto ref = oracle::enumerate_rl(g, {4, 6});
        for (std::size_t c = 0; c < 4; ++c) {
            CHECK(std::abs(m.mean(c / 2, c % 2) - ref.mean[c]) < 1e-9);
            CHECK(std::abs(m.var(c / 2, c % 2) - ref.var[c]) < 1e-9);
        }
        CHECK(std::abs(*m.cov_diag - ref.cov_11_22) < 1e-9);
    }
}

TEST_CASE("table equal to its expectation") {
    const NNCT t = NNCT::from_counts({{2, 3}, {3, 3}});
    const DixonMoments m = dixon_moments(t, QRStats{6, 6, {}, std::nullopt});
    CHECK(m.mean(0, 0) == doctest::Approx(2.0));
    CHECK(m.mean(1, 1) == doctest::Approx(3.0));
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(std::abs(dixon_cell_test(t, m, i, j).statistic) < 1e-12);
        }
    }
    const TestResult x = dixon_overall_test(t, m);
    CHECK(std::abs(x.statistic) < 1e-12);
    CHECK(x.p_two_sided == doctest::Approx(1.0));
}

TEST_CASE("QR adjustment") {
    const QRStats a = qr_adjust(100);
    CHECK(a.Q == doctest::Approx(63.0));
    CHECK(a.R == doctest::Approx(62.0));
    CHECK(a.Qk.empty());
    CHECK_FALSE(a.Q_tilde.has_value());
    const QRStats b = qr_adjust(273);
    CHECK(b.Q == doctest::Approx(171.99));
    CHECK(b.R == doctest::Approx(169.26));
    CHECK_THROWS_AS(qr_adjust(3), ValidationError);
    // Only the variances move; the expectations do not depend on Q and R.
    const DixonMoments adj = dixon_moments(kSwamp, b);
    const DixonMoments obs = dixon_moments(kSwamp, kSwampQR);
    CHECK(adj.mean(0, 0) == obs.mean(0, 0));
    CHECK(adj.var(0, 0) != obs.var(0, 0));
}

TEST_CASE("errors") {
    const std::vector<std::uint64_t> small{1, 2};
    CHECK_THROWS_AS(dixon_moments(small, 3, qr_adjust(4)), ValidationError);
    const std::vector<std::uint64_t> wrong{3, 3};
    CHECK_THROWS_AS(dixon_moments(wrong, 7, qr_adjust(7)), ValidationError);

    const NNCT one = NNCT::from_counts({{0, 1}, {1, 9}});
    const DixonMoments m = dixon_moments(one, QRStats{4, 6, {}, std::nullopt});
    CHECK_THROWS_AS(dixon_cell_test(one, m, 0, 0), DegenerateError);
    CHECK_THROWS_AS(dixon_overall_test(one, m), DegenerateError);
    CHECK_THROWS_AS(dixon_cell_test(kSwamp, m, 0, 0), ValidationError);
    CHECK_THROWS_AS(dixon_cell_test(one, m, 2, 0), ValidationError);

    const NNCT three = NNCT::from_counts({{3, 1, 1}, {1, 3, 1}, {1, 1, 3}});
    const DixonMoments m3 = dixon_moments(three, qr_adjust(15));
    CHECK_NOTHROW(dixon_cell_test(three, m3, 2, 1));
    CHECK_THROWS_AS(dixon_overall_test(three, m3), ValidationError);
}
