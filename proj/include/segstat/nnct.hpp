#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "segstat/nn_engine.hpp"
#include "segstat/point_set.hpp"

namespace segstat {

/// Nearest-neighbor contingency table: counts(i, j) is the number of base
/// points of class i whose nearest neighbor is of class j.
class NNCT {
public:
    /// Builds from explicit counts (e.g. a table from a report). Rows must be
    /// square and non-empty.
    static NNCT from_counts(const std::vector<std::vector<std::uint64_t>>& counts);

    std::size_t q() const { return q_; }
    std::uint64_t n() const { return n_; }
    std::uint64_t operator()(std::size_t i, std::size_t j) const { return counts_[i * q_ + j]; }
    std::span<const std::uint64_t> row_sums() const { return row_sums_; }
    std::span<const std::uint64_t> col_sums() const { return col_sums_; }

    std::vector<std::vector<std::uint64_t>> to_rows() const;

    /// Cell percentage relative to the row (class) size; 0 for empty rows.
    double row_percent(std::size_t i, std::size_t j) const;
    /// Marginal percentages relative to the total n.
    double row_sum_percent(std::size_t i) const;
    double col_sum_percent(std::size_t j) const;

    friend bool operator==(const NNCT&, const NNCT&) = default;

private:
    friend NNCT build_nnct(const NNGraph&, std::span<const ClassId>, std::size_t);
    NNCT(std::size_t q, std::vector<std::uint64_t> counts);

    std::size_t q_ = 0;
    std::uint64_t n_ = 0;
    std::vector<std::uint64_t> counts_;
    std::vector<std::uint64_t> row_sums_;
    std::vector<std::uint64_t> col_sums_;
};

/// Cross-tabulates (base class, neighbor class) over the base points of
/// `graph`. Classes without base points stay as zero rows.
NNCT build_nnct(const NNGraph& graph, std::span<const ClassId> labels, std::size_t q);

inline NNCT build_nnct(const NNGraph& graph, const PointSet& points) {
    return build_nnct(graph, points.labels(), points.num_classes());
}

}  // namespace segstat
