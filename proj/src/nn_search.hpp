#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "segstat/geometry.hpp"
#include "segstat/nn_engine.hpp"

namespace segstat::detail {

struct Neighbor {
    std::size_t index = kNoNeighbor;
    double dist2 = std::numeric_limits<double>::infinity();
    WrapOffset offset{};
};

// Exact nearest-neighbor search over a uniform bucket grid. The minimum
// squared distance is found exactly; among candidates within kTieTolerance of
// it the lowest (index, image slot) wins. Both steps are independent of the
// order cells are visited in, so the result equals a full scan.
class NeighborGrid {
public:
    // `extent` must contain every coordinate. With `periodic` the extent is
    // the torus fundamental domain.
    NeighborGrid(std::span<const Point> coords, const std::vector<bool>& dest_mask, Rect extent,
                 bool periodic);

    // Nearest destination-eligible neighbor of point k, excluding k itself
    // (and, when periodic, all of its images).
    Neighbor nearest(std::size_t k) const;

private:
    struct Search {
        double min_d2 = std::numeric_limits<double>::infinity();
        std::vector<Neighbor> near;
        void offer(const Neighbor& c);
        Neighbor pick() const;
    };

    std::size_t cell_of(double v, double lo, double size, std::size_t count) const;
    void scan_cell(std::size_t k, std::size_t cx, std::size_t cy, Search& s) const;
    void consider_planar(std::size_t k, std::size_t l, Search& s) const;
    void consider_periodic(std::size_t k, std::size_t l, Search& s) const;

    std::span<const Point> coords_;
    Rect extent_;
    bool periodic_;
    std::size_t gx_ = 1;
    std::size_t gy_ = 1;
    double cw_ = 0.0;
    double ch_ = 0.0;
    std::vector<std::size_t> cell_start_;
    std::vector<std::size_t> items_;
};

}  // namespace segstat::detail
