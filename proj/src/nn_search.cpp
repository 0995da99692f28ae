#include "nn_search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace segstat::detail {

namespace {

constexpr std::size_t kMaxCellsPerAxis = 2048;
constexpr double kTargetPerCell = 2.0;

int slot_of(WrapOffset o) { return (o.y + 1) * 3 + (o.x + 1); }

double tie_limit(double min_d2) { return min_d2 * (1.0 + kTieTolerance); }

}  // namespace

NeighborGrid::NeighborGrid(std::span<const Point> coords, const std::vector<bool>& dest_mask,
                           Rect extent, bool periodic)
    : coords_(coords), extent_(extent), periodic_(periodic) {
    std::size_t n_dest = 0;
    for (std::size_t i = 0; i < coords.size(); ++i) n_dest += dest_mask[i] ? 1 : 0;

    const double w = extent.width();
    const double h = extent.height();
    const double cells = std::max(1.0, static_cast<double>(n_dest) / kTargetPerCell);
    if (w > 0.0 && h > 0.0) {
        const double ax = std::sqrt(cells * w / h);
        gx_ = static_cast<std::size_t>(std::clamp(std::round(ax), 1.0, double(kMaxCellsPerAxis)));
        gy_ = static_cast<std::size_t>(
            std::clamp(std::round(cells / double(gx_)), 1.0, double(kMaxCellsPerAxis)));
    } else if (w > 0.0) {
        gx_ = static_cast<std::size_t>(std::clamp(std::round(cells), 1.0, double(kMaxCellsPerAxis)));
    } else if (h > 0.0) {
        gy_ = static_cast<std::size_t>(std::clamp(std::round(cells), 1.0, double(kMaxCellsPerAxis)));
    }
    cw_ = w / static_cast<double>(gx_);
    ch_ = h / static_cast<double>(gy_);

    // Counting sort of destination points into cells.
    std::vector<std::size_t> cell(coords.size());
    cell_start_.assign(gx_ * gy_ + 1, 0);
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (!dest_mask[i]) continue;
        const std::size_t cx = cell_of(coords[i].x, extent.xmin, cw_, gx_);
        const std::size_t cy = cell_of(coords[i].y, extent.ymin, ch_, gy_);
        cell[i] = cy * gx_ + cx;
        ++cell_start_[cell[i] + 1];
    }
    for (std::size_t c = 0; c < gx_ * gy_; ++c) cell_start_[c + 1] += cell_start_[c];
    items_.resize(n_dest);
    std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (dest_mask[i]) items_[fill[cell[i]]++] = i;
    }
}

std::size_t NeighborGrid::cell_of(double v, double lo, double size, std::size_t count) const {
    if (count == 1 || !(size > 0.0)) return 0;
    const double f = std::floor((v - lo) / size);
    if (f <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(f), count - 1);
}

void NeighborGrid::Search::offer(const Neighbor& c) {
    if (c.dist2 < min_d2) {
        min_d2 = c.dist2;
        const double limit = tie_limit(min_d2);
        std::erase_if(near, [&](const Neighbor& n) { return n.dist2 > limit; });
        near.push_back(c);
    } else if (c.dist2 <= tie_limit(min_d2)) {
        near.push_back(c);
    }
}

Neighbor NeighborGrid::Search::pick() const {
    Neighbor best;
    int best_slot = 9;
    for (const Neighbor& n : near) {
        const int slot = slot_of(n.offset);
        if (n.index < best.index || (n.index == best.index && slot < best_slot)) {
            best = n;
            best_slot = slot;
        }
    }
    return best;
}

void NeighborGrid::consider_planar(std::size_t k, std::size_t l, Search& s) const {
    if (l == k) return;
    const double d2 = squared_distance(coords_[k], coords_[l]);
    if (d2 <= tie_limit(s.min_d2)) s.offer({l, d2, {}});
}

void NeighborGrid::consider_periodic(std::size_t k, std::size_t l, Search& s) const {
    if (l == k) return;
    const double w = extent_.width();
    const double h = extent_.height();
    const Point& q = coords_[k];
    const Point& p = coords_[l];
    // Same arithmetic as materializing the copy (p.x + ox * w, p.y + oy * h).
    for (int oy = -1; oy <= 1; ++oy) {
        const double dy = (p.y + oy * h) - q.y;
        for (int ox = -1; ox <= 1; ++ox) {
            const double dx = (p.x + ox * w) - q.x;
            const double d2 = dx * dx + dy * dy;
            if (d2 <= tie_limit(s.min_d2)) {
                s.offer({l, d2, {static_cast<std::int8_t>(ox), static_cast<std::int8_t>(oy)}});
            }
        }
    }
}

void NeighborGrid::scan_cell(std::size_t k, std::size_t cx, std::size_t cy, Search& s) const {
    const std::size_t c = cy * gx_ + cx;
    for (std::size_t it = cell_start_[c]; it < cell_start_[c + 1]; ++it) {
        if (periodic_) {
            consider_periodic(k, items_[it], s);
        } else {
            consider_planar(k, items_[it], s);
        }
    }
}

Neighbor NeighborGrid::nearest(std::size_t k) const {
    Search search;
    const Point& q = coords_[k];
    const auto qx = static_cast<std::ptrdiff_t>(cell_of(q.x, extent_.xmin, cw_, gx_));
    const auto qy = static_cast<std::ptrdiff_t>(cell_of(q.y, extent_.ymin, ch_, gy_));
    const auto gx = static_cast<std::ptrdiff_t>(gx_);
    const auto gy = static_cast<std::ptrdiff_t>(gy_);

    // A cell first reached at ring r+1 holds points at least r cell widths
    // away along the axis where the ring offset is attained.
    double step = std::numeric_limits<double>::infinity();
    if (gx_ > 1) step = std::min(step, cw_);
    if (gy_ > 1) step = std::min(step, ch_);

    const std::ptrdiff_t max_ring =
        periodic_ ? (std::max(gx, gy) + 1) / 2 : std::max(gx, gy) - 1;

    auto visit = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
        if (periodic_) {
            i = ((i % gx) + gx) % gx;
            j = ((j % gy) + gy) % gy;
        } else if (i < 0 || j < 0 || i >= gx || j >= gy) {
            return;
        }
        scan_cell(k, static_cast<std::size_t>(i), static_cast<std::size_t>(j), search);
    };

    for (std::ptrdiff_t r = 0; r <= max_ring; ++r) {
        if (r == 0) {
            visit(qx, qy);
        } else {
            for (std::ptrdiff_t di = -r; di <= r; ++di) {
                visit(qx + di, qy - r);
                visit(qx + di, qy + r);
            }
            for (std::ptrdiff_t dj = -r + 1; dj <= r - 1; ++dj) {
                visit(qx - r, qy + dj);
                visit(qx + r, qy + dj);
            }
        }
        if (!search.near.empty() && std::isfinite(step)) {
            const double bound = static_cast<double>(r) * step * (1.0 - 1e-9);
            if (tie_limit(search.min_d2) < bound * bound) break;
        }
    }
    return search.pick();
}

}  // namespace segstat::detail
