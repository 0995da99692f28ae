#pragma once

#include "segstat/nnct.hpp"
#include "segstat/test_result.hpp"

namespace segstat {

// Pielou's tests treat the NNCT as an ordinary 2x2 table with expected counts
// n_i C_j / n. They are defined for two classes only; every function throws
// ValidationError when q != 2 and DegenerateError when a row or column sum
// is zero.

/// Pearson chi-square on 1 df; with `yates` each |N - E| is reduced by 1/2
/// (clamped at zero) before squaring.
TestResult pielou_chisq(const NNCT& table, bool yates);

/// Row-wise binomial Z: (N11/n1 - N21/n2) sqrt(n1 n2 n / (C1 C2)).
/// p_right tests segregation, p_left association.
TestResult pielou_z_rowwise(const NNCT& table);

/// Overall multinomial Z: (N11 - n1 C1 / n) sqrt(n^3 / (n1 n2 C1 C2)).
TestResult pielou_z_multinomial(const NNCT& table);

}  // namespace segstat
