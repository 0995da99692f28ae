#include "segstat/point_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "segstat/error.hpp"

namespace segstat {

namespace {

void check_distinct(std::span<const Point> coords) {
    std::vector<std::size_t> order(coords.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (coords[a].x != coords[b].x) return coords[a].x < coords[b].x;
        if (coords[a].y != coords[b].y) return coords[a].y < coords[b].y;
        return a < b;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (coords[order[i]] == coords[order[i - 1]]) {
            std::ostringstream msg;
            msg << "duplicate coordinates (" << coords[order[i]].x << ", " << coords[order[i]].y
                << ") at points " << order[i - 1] << " and " << order[i];
            throw ValidationError(msg.str());
        }
    }
}

}  // namespace

Rect bounding_box(std::span<const Point> coords) {
    if (coords.empty()) throw ValidationError("bounding box of an empty point list");
    Rect r{coords[0].x, coords[0].y, coords[0].x, coords[0].y};
    for (const Point& p : coords) {
        r.xmin = std::min(r.xmin, p.x);
        r.xmax = std::max(r.xmax, p.x);
        r.ymin = std::min(r.ymin, p.y);
        r.ymax = std::max(r.ymax, p.y);
    }
    return r;
}

PointSet::PointSet(std::vector<Point> coords, std::vector<ClassId> labels, Rect region,
                   std::optional<std::size_t> num_classes, std::vector<std::string> class_names)
    : coords_(std::move(coords)),
      labels_(std::move(labels)),
      region_(region),
      class_names_(std::move(class_names)) {
    if (coords_.size() != labels_.size()) {
        throw ValidationError("coordinate and label counts differ");
    }
    if (coords_.size() < 2) throw ValidationError("a point set needs at least 2 points");
    if (!(region_.xmax >= region_.xmin && region_.ymax >= region_.ymin)) {
        throw ValidationError("malformed region");
    }
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        const Point& p = coords_[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw ValidationError("non-finite coordinate at point " + std::to_string(i));
        }
        if (!region_.contains(p)) {
            std::ostringstream msg;
            msg << "point " << i << " (" << p.x << ", " << p.y << ") lies outside the region";
            throw ValidationError(msg.str());
        }
    }
    check_distinct(coords_);

    const std::size_t max_label =
        labels_.empty() ? 0 : *std::max_element(labels_.begin(), labels_.end());
    const std::size_t q = num_classes.value_or(max_label + 1);
    if (q == 0 || max_label >= q) throw ValidationError("label out of range");
    class_sizes_.assign(q, 0);
    for (ClassId l : labels_) ++class_sizes_[l];

    if (class_names_.empty()) {
        for (std::size_t i = 0; i < q; ++i) class_names_.push_back(std::to_string(i));
    } else if (class_names_.size() != q) {
        throw ValidationError("class name count does not match class count");
    }
}

PointSet PointSet::with_bounding_box(std::vector<Point> coords, std::vector<ClassId> labels,
                                     std::optional<std::size_t> num_classes,
                                     std::vector<std::string> class_names) {
    const Rect box = bounding_box(coords);
    return PointSet(std::move(coords), std::move(labels), box, num_classes, std::move(class_names));
}

PointSet PointSet::relabeled(std::vector<ClassId> labels) const {
    PointSet copy = *this;
    if (labels.size() != coords_.size()) throw ValidationError("label count mismatch");
    std::vector<std::size_t> sizes(num_classes(), 0);
    for (ClassId l : labels) {
        if (l >= num_classes()) throw ValidationError("label out of range");
        ++sizes[l];
    }
    copy.labels_ = std::move(labels);
    copy.class_sizes_ = std::move(sizes);
    return copy;
}

}  // namespace segstat
