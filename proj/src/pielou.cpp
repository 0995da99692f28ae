#include "segstat/pielou.hpp"

#include <cmath>

#include "segstat/error.hpp"

namespace segstat {

namespace {

struct Margins {
    double n1, n2, c1, c2, n;
};

Margins margins_2x2(const NNCT& table) {
    if (table.q() != 2) throw ValidationError("Pielou's tests are defined for two classes only");
    const Margins m{static_cast<double>(table.row_sums()[0]), static_cast<double>(table.row_sums()[1]),
                    static_cast<double>(table.col_sums()[0]), static_cast<double>(table.col_sums()[1]),
                    static_cast<double>(table.n())};
    if (m.n1 <= 0 || m.n2 <= 0 || m.c1 <= 0 || m.c2 <= 0) {
        throw DegenerateError("Pielou's tests need positive row and column sums");
    }
    return m;
}

Direction sign_direction(double v) {
    if (v > 0) return Direction::segregation;
    if (v < 0) return Direction::association;
    return Direction::none;
}

}  // namespace

TestResult pielou_chisq(const NNCT& table, bool yates) {
    const Margins m = margins_2x2(table);
    const double rows[2] = {m.n1, m.n2};
    const double cols[2] = {m.c1, m.c2};
    double stat = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            const double expected = rows[i] * cols[j] / m.n;
            double dev = std::abs(static_cast<double>(table(i, j)) - expected);
            if (yates) dev = std::max(0.0, dev - 0.5);
            stat += dev * dev / expected;
        }
    }
    const double diag_excess = static_cast<double>(table(0, 0)) - m.n1 * m.c1 / m.n;
    return TestResult::chi_square(stat, 1, sign_direction(diag_excess));
}

TestResult pielou_z_rowwise(const NNCT& table) {
    const Margins m = margins_2x2(table);
    const double diff = static_cast<double>(table(0, 0)) / m.n1 - static_cast<double>(table(1, 0)) / m.n2;
    const double z = diff * std::sqrt(m.n1 * m.n2 * m.n / (m.c1 * m.c2));
    return TestResult::normal(z, sign_direction(z));
}

TestResult pielou_z_multinomial(const NNCT& table) {
    const Margins m = margins_2x2(table);
    const double excess = static_cast<double>(table(0, 0)) - m.n1 * m.c1 / m.n;
    const double z = excess * std::sqrt(m.n * m.n * m.n / (m.n1 * m.n2 * m.c1 * m.c2));
    return TestResult::normal(z, sign_direction(z));
}

}  // namespace segstat
