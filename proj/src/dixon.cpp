#include "segstat/dixon.hpp"

#include <cmath>
#include <numeric>

#include "segstat/error.hpp"

namespace segstat {

namespace {

// (a)_k / (n)_k as a product of ratios.
double falling_ratio(double a, double n, int k) {
    double p = 1.0;
    for (int t = 0; t < k; ++t) {
        const double num = a - t;
        if (num <= 0.0) return 0.0;
        p *= num / (n - t);
    }
    return p;
}

void check_compatible(const NNCT& table, const DixonMoments& m) {
    if (table.q() != m.q) throw ValidationError("table and moments have different class counts");
    for (std::size_t i = 0; i < m.q; ++i) {
        if (table.row_sums()[i] != m.row_sums[i]) {
            throw ValidationError("table row sums differ from the moments' class sizes");
        }
    }
}

}  // namespace

DixonMoments dixon_moments(std::span<const std::uint64_t> row_sums, std::uint64_t n,
                           const QRStats& qr) {
    if (n < 4) throw ValidationError("Dixon's moments need n >= 4");
    if (row_sums.empty()) throw ValidationError("no classes");
    const std::uint64_t total = std::accumulate(row_sums.begin(), row_sums.end(), std::uint64_t{0});
    if (total != n) throw ValidationError("row sums do not add up to n");

    DixonMoments m;
    m.q = row_sums.size();
    m.n = static_cast<double>(n);
    m.row_sums.assign(row_sums.begin(), row_sums.end());
    m.expected.resize(m.q * m.q);
    m.variance.resize(m.q * m.q);
    m.kernel.resize(m.q * m.q);

    const double nn = m.n;
    const double Q = qr.Q;
    const double R = qr.R;
    const double rest = nn * nn - 3.0 * nn - Q + R;  // ordered pairs with four distinct points

    for (std::size_t i = 0; i < m.q; ++i) {
        const double ni = static_cast<double>(row_sums[i]);
        for (std::size_t j = 0; j < m.q; ++j) {
            const double nj = static_cast<double>(row_sums[j]);
            CellKernel kern;
            double mean = 0.0;
            double var = 0.0;
            if (i == j) {
                kern.pair = falling_ratio(ni, nn, 2);
                kern.triple = falling_ratio(ni, nn, 3);
                kern.quartet = falling_ratio(ni, nn, 4);
                mean = ni * (ni - 1.0) / (nn - 1.0);
                var = (nn + R) * kern.pair + (2.0 * nn - 2.0 * R + Q) * kern.triple +
                      rest * kern.quartet - (nn * kern.pair) * (nn * kern.pair);
            } else {
                kern.pair = ni * nj / (nn * (nn - 1.0));
                kern.triple = falling_ratio(ni, nn, 2) * nj / (nn - 2.0);
                kern.quartet = falling_ratio(ni, nn, 2) * falling_ratio(nj, nn - 2.0, 2);
                mean = ni * nj / (nn - 1.0);
                var = nn * kern.pair + Q * kern.triple + rest * kern.quartet -
                      (nn * kern.pair) * (nn * kern.pair);
            }
            // Rounding residue where the exact variance is zero (empty or full class).
            if (var < 0.0 && var > -1e-9 * nn * nn) var = 0.0;
            m.kernel[i * m.q + j] = kern;
            m.expected[i * m.q + j] = mean;
            m.variance[i * m.q + j] = var;
        }
    }

    if (m.q == 2) {
        const double n1 = static_cast<double>(row_sums[0]);
        const double n2 = static_cast<double>(row_sums[1]);
        const double p1122 = falling_ratio(n1, nn, 2) * falling_ratio(n2, nn - 2.0, 2);
        const double p11 = m.kernel[0].pair;
        const double p22 = m.kernel[3].pair;
        m.cov_diag = rest * p1122 - nn * nn * p11 * p22;
    }
    return m;
}

TestResult dixon_cell_test(const NNCT& table, const DixonMoments& moments, std::size_t i,
                           std::size_t j) {
    check_compatible(table, moments);
    if (i >= moments.q || j >= moments.q) throw ValidationError("cell index out of range");
    const double var = moments.var(i, j);
    if (!(var > 0.0)) throw DegenerateError("cell variance is zero");
    const double z = (static_cast<double>(table(i, j)) - moments.mean(i, j)) / std::sqrt(var);
    Direction dir = Direction::none;
    if (z != 0.0) {
        const bool excess = z > 0.0;
        dir = (excess == (i == j)) ? Direction::segregation : Direction::association;
    }
    return TestResult::normal(z, dir);
}

TestResult dixon_overall_test(const NNCT& table, const DixonMoments& moments) {
    check_compatible(table, moments);
    if (moments.q != 2 || !moments.cov_diag) {
        throw ValidationError("Dixon's overall test is implemented for two classes only");
    }
    const double v11 = moments.var(0, 0);
    const double v22 = moments.var(1, 1);
    const double c = *moments.cov_diag;
    const double det = v11 * v22 - c * c;
    const double scale = std::max(std::abs(v11), std::abs(v22));
    if (!(std::abs(det) >= 1e-12 * scale * scale) || scale == 0.0) {
        throw DegenerateError("covariance matrix of (N11, N22) is singular");
    }
    const double y1 = static_cast<double>(table(0, 0)) - moments.mean(0, 0);
    const double y2 = static_cast<double>(table(1, 1)) - moments.mean(1, 1);
    const double stat = (y1 * y1 * v22 - 2.0 * y1 * y2 * c + y2 * y2 * v11) / det;

    const double lean = y1 / std::sqrt(v11) + y2 / std::sqrt(v22);
    Direction dir = Direction::none;
    if (lean > 0.0) dir = Direction::segregation;
    if (lean < 0.0) dir = Direction::association;
    return TestResult::chi_square(std::max(0.0, stat), 2, dir);
}

QRStats qr_adjust(std::uint64_t n) {
    if (n < 4) throw ValidationError("QR-adjustment needs n >= 4");
    QRStats qr;
    qr.Q = 0.63 * static_cast<double>(n);
    qr.R = 0.62 * static_cast<double>(n);
    return qr;
}

}  // namespace segstat
