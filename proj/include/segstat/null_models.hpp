#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "segstat/geometry.hpp"
#include "segstat/nn_engine.hpp"
#include "segstat/nnct.hpp"
#include "segstat/point_set.hpp"
#include "segstat/test_selector.hpp"

namespace segstat {

enum class NullKind {
    rl_fixed_locations,    // user-supplied locations, labels permuted
    rl_case2_uniform,      // n1 + n2 uniform on the unit square, then labeled
    rl_case3_overlapping,  // class 1 on (0,2/3)^2, class 2 on (1/3,1)^2
    rl_case4_disjoint,     // class 1 on (0,1)^2, class 2 on (2,3)x(0,1)
    csr_independence,      // two independent uniform samples on the region
    rowwise_binomial,      // synthetic table, rows independent binomials
    overall_multinomial,   // synthetic table, one multinomial over all cells
};

/// CLI spelling: rl-file, rl-case2, rl-case3, rl-case4, csr,
/// rowwise-binomial, overall-multinomial.
std::string_view to_string(NullKind kind);
NullKind parse_null_kind(std::string_view name);

bool is_random_labeling(NullKind kind);
bool is_synthetic_table(NullKind kind);

struct NullSpec {
    NullKind kind = NullKind::csr_independence;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    /// Study region for CSR (and the core region for outer-buffer CSR).
    Rect region = Rect::unit();
    /// Fixed locations for rl_fixed_locations; n1 + n2 must match.
    std::vector<Point> locations;
    /// Edge correction for CSR studies: none, toroidal or outer_buffer.
    EdgeCorrection edge = EdgeCorrection::none;
    /// Sampling window for outer-buffer CSR; must contain `region`.
    Rect outer_region{-0.5, -0.5, 1.5, 1.5};

    /// Throws ValidationError on an ill-formed specification.
    void validate() const;
};

/// One draw from a null model: a labeled pattern, or a bare table for the
/// synthetic kinds. For outer-buffer CSR the pattern holds guard points too;
/// pair it with `core_region` = spec.region.
using NullSample = std::variant<PointSet, NNCT>;

NullSample generate(const NullSpec& spec, std::uint64_t seed);

/// Uniformly random assignment of n1 labels 0 and n2 labels 1 to
/// `num_locations` positions.
std::vector<ClassId> random_labeling(std::size_t num_locations, std::size_t n1, std::size_t n2,
                                     std::uint64_t seed);

/// Uniform random permutation of `labels` (class sizes preserved).
std::vector<ClassId> permute_labels(std::span<const ClassId> labels, std::uint64_t seed);

/// Monte Carlo randomization p-value (1 + #{score >= observed}) / (n_mc + 1)
/// over n_mc random relabelings of the fixed locations in `graph`.
/// Throws ValidationError when n_mc < 99 and DegenerateError when the
/// statistic is undefined for the data or constant over relabelings.
double mc_randomization_test(const PointSet& points, const NNGraph& graph, TestKind test,
                             std::size_t n_mc, std::uint64_t seed, unsigned threads = 1);

enum class SizeVerdict { conservative, nominal, liberal };
std::string_view to_string(SizeVerdict v);

struct SizeEstimate {
    double alpha_hat = 0.0;
    std::size_t n_mc = 0;
    std::size_t rejections = 0;
    double ci_low = 0.0;   // alpha_hat -/+ 1.96 binomial SE, clipped to [0, 1]
    double ci_high = 0.0;
    SizeVerdict verdict = SizeVerdict::nominal;
};

/// alpha -/+ z_.95 sqrt(alpha (1 - alpha) / n_mc): sizes below (above) the
/// band are conservative (liberal). About [.0464, .0536] at alpha = .05 and
/// n_mc = 10000.
std::pair<double, double> nominal_band(double alpha, std::size_t n_mc);

/// Builds the estimate from a rejection count. The verdict compares
/// alpha_hat with alpha -/+ z_.95 sqrt(alpha (1 - alpha) / n_mc), which gives
/// .0464 / .0536 at alpha = .05 and n_mc = 10000.
SizeEstimate size_estimate(std::size_t rejections, std::size_t n_mc, double alpha);

struct StudyConfig {
    NullSpec spec;
    std::vector<TestKind> tests;
    std::size_t n_mc = 10000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    unsigned threads = 1;  // 0 = all hardware threads
};

/// rejected[t][r] is true when test t rejects at alpha on replication r.
struct StudyOutcome {
    std::vector<TestKind> tests;
    std::vector<std::vector<bool>> rejected;
    std::vector<SizeEstimate> sizes;
    double alpha = 0.05;

    /// Proportion of replications where both tests reject.
    double agreement(TestKind a, TestKind b) const;
};

/// Runs every test on each of n_mc null replications drawn from the same
/// stream. Throws ValidationError for n_mc < 100, alpha outside (0, 1], or
/// Dixon's tests on a synthetic-table null.
StudyOutcome run_study(const StudyConfig& config);

SizeEstimate empirical_size(const NullSpec& spec, TestKind test, std::size_t n_mc, double alpha,
                            std::uint64_t seed, unsigned threads = 1);

double agreement_proportion(const NullSpec& spec, TestKind a, TestKind b, std::size_t n_mc,
                            double alpha, std::uint64_t seed, unsigned threads = 1);

}  // namespace segstat
