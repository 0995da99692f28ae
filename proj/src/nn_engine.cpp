#include "segstat/nn_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nn_search.hpp"
#include "segstat/error.hpp"

namespace segstat {

std::string_view to_string(EdgeCorrection c) {
    switch (c) {
        case EdgeCorrection::none: return "none";
        case EdgeCorrection::toroidal: return "toroidal";
        case EdgeCorrection::outer_buffer: return "outer-buffer";
        case EdgeCorrection::inner_buffer: return "inner-buffer";
    }
    return "none";
}

EdgeCorrection parse_edge_correction(std::string_view name) {
    if (name == "none") return EdgeCorrection::none;
    if (name == "toroidal") return EdgeCorrection::toroidal;
    if (name == "outer-buffer" || name == "outer_buffer") return EdgeCorrection::outer_buffer;
    if (name == "inner-buffer" || name == "inner_buffer") return EdgeCorrection::inner_buffer;
    throw ValidationError("unknown edge correction '" + std::string(name) + "'");
}

std::size_t NNGraph::num_bases() const {
    return static_cast<std::size_t>(std::count(base_mask.begin(), base_mask.end(), true));
}

namespace {

NNGraph search(const PointSet& points, std::vector<bool> base_mask, std::vector<bool> dest_mask,
               EdgeCorrection correction) {
    const std::size_t n = points.size();
    const bool periodic = correction == EdgeCorrection::toroidal;
    const Rect extent = periodic ? points.region() : bounding_box(points.coords());
    const detail::NeighborGrid grid(points.coords(), dest_mask, extent, periodic);

    NNGraph g;
    g.nn_index.assign(n, kNoNeighbor);
    g.distances.assign(n, std::nan(""));
    g.offsets.assign(n, WrapOffset{});
    g.correction = correction;

    for (std::size_t k = 0; k < n; ++k) {
        const detail::Neighbor nb = grid.nearest(k);
        if (nb.index == kNoNeighbor) {
            throw ValidationError("point " + std::to_string(k) + " has no eligible neighbor");
        }
        if (nb.dist2 == 0.0) {
            throw ValidationError("points " + std::to_string(k) + " and " +
                                  std::to_string(nb.index) + " coincide on the torus");
        }
        g.nn_index[k] = nb.index;
        g.distances[k] = std::sqrt(nb.dist2);
        g.offsets[k] = nb.offset;
    }
    g.base_mask = std::move(base_mask);
    g.dest_mask = std::move(dest_mask);
    return g;
}

}  // namespace

NNGraph build_nn_graph(const PointSet& points) {
    const std::size_t n = points.size();
    return search(points, std::vector<bool>(n, true), std::vector<bool>(n, true),
                  EdgeCorrection::none);
}

NNGraph apply_toroidal(const PointSet& points) {
    if (!points.region().proper()) throw ValidationError("toroidal correction needs a proper region");
    const std::size_t n = points.size();
    return search(points, std::vector<bool>(n, true), std::vector<bool>(n, true),
                  EdgeCorrection::toroidal);
}

NNGraph apply_outer_buffer(const PointSet& points_extended, const Rect& core_region) {
    if (!core_region.proper()) throw ValidationError("core region is degenerate");
    if (!points_extended.region().contains(core_region)) {
        throw ValidationError("core region is not inside the extended region");
    }
    const std::size_t n = points_extended.size();
    std::vector<bool> base(n);
    std::size_t n_base = 0;
    for (std::size_t i = 0; i < n; ++i) {
        base[i] = core_region.contains(points_extended[i]);
        n_base += base[i] ? 1 : 0;
    }
    if (n_base == 0) throw ValidationError("no points inside the core region");
    return search(points_extended, std::move(base), std::vector<bool>(n, true),
                  EdgeCorrection::outer_buffer);
}

NNGraph apply_inner_buffer(const PointSet& points, double width) {
    const Rect& region = points.region();
    if (!(width >= 0.0) || !(width < std::min(region.width(), region.height()) / 2.0)) {
        std::ostringstream msg;
        msg << "inner buffer width " << width << " must lie in [0, min(width, height)/2)";
        throw ValidationError(msg.str());
    }
    const std::size_t n = points.size();
    std::vector<bool> base(n);
    std::size_t n_base = 0;
    for (std::size_t i = 0; i < n; ++i) {
        base[i] = region.distance_to_boundary(points[i]) >= width;
        n_base += base[i] ? 1 : 0;
    }
    if (n_base == 0) throw ValidationError("inner buffer leaves no base points");
    return search(points, std::move(base), std::vector<bool>(n, true),
                  EdgeCorrection::inner_buffer);
}

NNGraph build_corrected_graph(const PointSet& points, EdgeCorrection correction,
                              std::optional<Rect> core_region, std::optional<double> buffer_width) {
    switch (correction) {
        case EdgeCorrection::none: return build_nn_graph(points);
        case EdgeCorrection::toroidal: return apply_toroidal(points);
        case EdgeCorrection::outer_buffer:
            if (!core_region) throw ValidationError("outer-buffer correction needs a core region");
            return apply_outer_buffer(points, *core_region);
        case EdgeCorrection::inner_buffer:
            if (!buffer_width) throw ValidationError("inner-buffer correction needs a width");
            return apply_inner_buffer(points, *buffer_width);
    }
    throw ValidationError("unknown edge correction");
}

QRStats compute_qr(const NNGraph& graph) {
    const std::size_t n = graph.size();
    std::vector<std::size_t> in_degree(n, 0);
    double reflexive = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t l = graph.nn_index[k];
        ++in_degree[l];
        if (graph.nn_index[l] == k && (graph.base_mask[k] || graph.base_mask[l])) reflexive += 1.0;
    }

    QRStats qr;
    std::size_t max_k = 0;
    for (std::size_t l = 0; l < n; ++l) {
        if (graph.base_mask[l]) max_k = std::max(max_k, in_degree[l]);
    }
    qr.Qk.assign(max_k + 1, 0);
    double pairs = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        if (!graph.base_mask[l]) continue;
        ++qr.Qk[in_degree[l]];
        const double c = static_cast<double>(in_degree[l]);
        pairs += c * (c - 1.0);
    }
    static constexpr double kPlanarWeights[] = {0, 0, 1, 3, 6, 10, 15};
    double planar = 0.0;
    for (std::size_t k = 2; k < qr.Qk.size() && k <= 6; ++k) {
        planar += kPlanarWeights[k] * static_cast<double>(qr.Qk[k]);
    }
    qr.Q = 2.0 * planar;
    qr.Q_tilde = pairs;
    qr.R = reflexive;
    return qr;
}

double inner_buffer_width(double lambda_hat, unsigned k) {
    if (!(lambda_hat > 0.0) || !std::isfinite(lambda_hat)) {
        throw ValidationError("intensity must be positive");
    }
    const double pi = std::numbers::pi;
    const double mean = 1.0 / (2.0 * std::sqrt(lambda_hat));
    const double sd = std::sqrt((4.0 - pi) / (4.0 * pi * lambda_hat));
    return mean + static_cast<double>(k) * sd;
}

}  // namespace segstat
