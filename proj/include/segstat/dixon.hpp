#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "segstat/nn_engine.hpp"
#include "segstat/nnct.hpp"
#include "segstat/test_result.hpp"

namespace segstat {

/// Probabilities that a random pair, triplet and quartet of distinct points
/// carry the class pattern of cell (i, j): (p_ii, p_iii, p_iiii) on the
/// diagonal, (p_ij, p_iij, p_iijj) off it.
struct CellKernel {
    double pair = 0.0;
    double triple = 0.0;
    double quartet = 0.0;
};

/// Moments of the NNCT cell counts under random labeling, conditional on the
/// class sizes and on Q and R.
struct DixonMoments {
    std::size_t q = 0;
    double n = 0.0;
    std::vector<std::uint64_t> row_sums;
    std::vector<double> expected;  // q*q, row-major
    std::vector<double> variance;  // q*q, row-major
    std::vector<CellKernel> kernel;  // q*q, row-major
    /// Cov[N11, N22]; present for two classes only.
    std::optional<double> cov_diag;

    double mean(std::size_t i, std::size_t j) const { return expected[i * q + j]; }
    double var(std::size_t i, std::size_t j) const { return variance[i * q + j]; }
    const CellKernel& probs(std::size_t i, std::size_t j) const { return kernel[i * q + j]; }
};

/// Throws ValidationError when n < 4 or the row sums do not add up to n.
DixonMoments dixon_moments(std::span<const std::uint64_t> row_sums, std::uint64_t n,
                           const QRStats& qr);

inline DixonMoments dixon_moments(const NNCT& table, const QRStats& qr) {
    return dixon_moments(table.row_sums(), table.n(), qr);
}

/// Cell-specific Z = (N_ij - E[N_ij]) / sqrt(Var[N_ij]). A positive value
/// points to segregation on the diagonal and to association off it.
/// Throws DegenerateError when the variance is not positive.
TestResult dixon_cell_test(const NNCT& table, const DixonMoments& moments, std::size_t i,
                           std::size_t j);

/// Two-class overall test Y' Sigma^-1 Y on (N11 - E11, N22 - E22), chi-square
/// with 2 df. Throws DegenerateError for a singular covariance matrix.
TestResult dixon_overall_test(const NNCT& table, const DixonMoments& moments);

/// Unconditional surrogate for Q and R under CSR: Q = 0.63 n, R = 0.62 n.
QRStats qr_adjust(std::uint64_t n);

}  // namespace segstat
