#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "segstat/geometry.hpp"
#include "segstat/point_set.hpp"

namespace segstat {

enum class EdgeCorrection { none, toroidal, outer_buffer, inner_buffer };

std::string_view to_string(EdgeCorrection c);
/// Accepts "none", "toroidal", "outer-buffer"/"outer_buffer", "inner-buffer"/"inner_buffer".
EdgeCorrection parse_edge_correction(std::string_view name);

/// Image of a destination point on the torus, in units of the region size.
struct WrapOffset {
    std::int8_t x = 0;
    std::int8_t y = 0;

    friend bool operator==(const WrapOffset&, const WrapOffset&) = default;
};

/// Relative band on squared distance within which two candidates count as
/// tied; the tie then goes to the lower index. Absorbs rounding in
/// constructions such as an equilateral triangle with a sqrt(3)/2 vertex.
inline constexpr double kTieTolerance = 1e-12;

inline constexpr std::size_t kNoNeighbor = std::numeric_limits<std::size_t>::max();

/// Directed nearest-neighbor relation (base -> destination).
///
/// Every point carries a neighbor; only base points enter the NNCT, while
/// guard-area points still take part in Q and R. Under toroidal correction
/// the neighbor is reported by original index together with the image offset.
struct NNGraph {
    std::vector<std::size_t> nn_index;
    std::vector<double> distances;
    std::vector<bool> base_mask;
    std::vector<bool> dest_mask;
    std::vector<WrapOffset> offsets;  // all zero unless toroidal
    EdgeCorrection correction = EdgeCorrection::none;

    std::size_t size() const { return nn_index.size(); }
    std::size_t num_bases() const;
};

/// Reflexivity and shared-neighbor statistics of a graph.
///
/// `Q` and `R` are real-valued so QR-adjusted (fractional) values share the
/// same type; values from compute_qr are always integral.
struct QRStats {
    /// Planar shared-neighbor count 2(Q2 + 3Q3 + 6Q4 + 10Q5 + 15Q6).
    double Q = 0.0;
    /// Twice the number of reflexive pairs with at least one base member.
    double R = 0.0;
    /// Qk[k] = number of base points that are the NN of exactly k points.
    /// Empty for QR-adjusted values.
    std::vector<std::size_t> Qk;
    /// 2 * sum_k C(k,2) Qk over every k (no planar truncation).
    std::optional<double> Q_tilde;
};

/// Mean of Q/n and R/n for a homogeneous planar Poisson pattern.
inline constexpr double kExpectedQPerPoint = 0.632786;
inline constexpr double kExpectedRPerPoint = 0.621120;

/// Uncorrected graph: every point is a base and a destination. Ties (within
/// kTieTolerance) go to the lowest index. Throws ValidationError for fewer than 2 points.
NNGraph build_nn_graph(const PointSet& points);

/// Toroidal correction: neighbors are searched among the points and their
/// eight translated copies (copies are destinations only). A point's own
/// copies are never its neighbor. Ties are broken by the lowest original
/// index, then by the lowest image slot (y offset first, then x offset).
NNGraph apply_toroidal(const PointSet& points);

/// Outer buffer: bases are the points inside `core_region`, every point
/// (core and guard area) is a destination and has its own neighbor.
NNGraph apply_outer_buffer(const PointSet& points_extended, const Rect& core_region);

/// Inner buffer: bases are points at distance >= width from the region
/// boundary; every point is a destination.
NNGraph apply_inner_buffer(const PointSet& points, double width);

/// Dispatches on `correction`. `core_region` is required for outer_buffer and
/// `buffer_width` for inner_buffer.
NNGraph build_corrected_graph(const PointSet& points, EdgeCorrection correction,
                              std::optional<Rect> core_region = std::nullopt,
                              std::optional<double> buffer_width = std::nullopt);

/// Shared-neighbor and reflexivity counts under the buffer sums: Q counts
/// ordered pairs of distinct points (base or guard) whose common NN is a
/// base point, and R counts reflexive pairs unless both members lie in the
/// guard area. Without correction this is the plain count over all points.
QRStats compute_qr(const NNGraph& graph);

/// E[W] + k * sd[W] for the CSR nearest-neighbor distance W at intensity
/// `lambda_hat`.
double inner_buffer_width(double lambda_hat, unsigned k);

}  // namespace segstat
