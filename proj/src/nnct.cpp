#include "segstat/nnct.hpp"

#include "segstat/error.hpp"

namespace segstat {

NNCT::NNCT(std::size_t q, std::vector<std::uint64_t> counts)
    : q_(q), counts_(std::move(counts)), row_sums_(q, 0), col_sums_(q, 0) {
    for (std::size_t i = 0; i < q_; ++i) {
        for (std::size_t j = 0; j < q_; ++j) {
            const std::uint64_t c = counts_[i * q_ + j];
            row_sums_[i] += c;
            col_sums_[j] += c;
            n_ += c;
        }
    }
}

NNCT NNCT::from_counts(const std::vector<std::vector<std::uint64_t>>& counts) {
    const std::size_t q = counts.size();
    if (q == 0) throw ValidationError("empty contingency table");
    std::vector<std::uint64_t> flat;
    flat.reserve(q * q);
    for (const auto& row : counts) {
        if (row.size() != q) throw ValidationError("contingency table must be square");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return NNCT(q, std::move(flat));
}

std::vector<std::vector<std::uint64_t>> NNCT::to_rows() const {
    std::vector<std::vector<std::uint64_t>> rows(q_);
    for (std::size_t i = 0; i < q_; ++i) {
        rows[i].assign(counts_.begin() + static_cast<std::ptrdiff_t>(i * q_),
                       counts_.begin() + static_cast<std::ptrdiff_t>((i + 1) * q_));
    }
    return rows;
}

double NNCT::row_percent(std::size_t i, std::size_t j) const {
    if (row_sums_[i] == 0) return 0.0;
    return 100.0 * static_cast<double>((*this)(i, j)) / static_cast<double>(row_sums_[i]);
}

double NNCT::row_sum_percent(std::size_t i) const {
    return n_ == 0 ? 0.0 : 100.0 * static_cast<double>(row_sums_[i]) / static_cast<double>(n_);
}

double NNCT::col_sum_percent(std::size_t j) const {
    return n_ == 0 ? 0.0 : 100.0 * static_cast<double>(col_sums_[j]) / static_cast<double>(n_);
}

NNCT build_nnct(const NNGraph& graph, std::span<const ClassId> labels, std::size_t q) {
    if (labels.size() != graph.size()) throw ValidationError("label count does not match graph");
    if (q == 0) throw ValidationError("class count must be positive");
    std::vector<std::uint64_t> counts(q * q, 0);
    for (std::size_t k = 0; k < graph.size(); ++k) {
        if (!graph.base_mask[k]) continue;
        const ClassId base = labels[k];
        const ClassId nn = labels[graph.nn_index[k]];
        if (base >= q || nn >= q) throw ValidationError("label out of range");
        ++counts[base * q + nn];
    }
    return NNCT(q, std::move(counts));
}

}  // namespace segstat
