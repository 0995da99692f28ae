#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segstat/geometry.hpp"

namespace segstat {

using ClassId = std::uint32_t;

/// Labeled planar points inside a rectangular study region.
///
/// Construction validates the invariants: at least two points, one label per
/// point, labels below the class count, every point inside the region and no
/// two points sharing coordinates. Instances are immutable afterwards.
class PointSet {
public:
    /// `num_classes` defaults to max(label) + 1. Classes with no members are
    /// allowed when the count is given explicitly.
    PointSet(std::vector<Point> coords, std::vector<ClassId> labels, Rect region,
             std::optional<std::size_t> num_classes = std::nullopt,
             std::vector<std::string> class_names = {});

    /// Same points, region set to the bounding box of the coordinates.
    static PointSet with_bounding_box(std::vector<Point> coords, std::vector<ClassId> labels,
                                      std::optional<std::size_t> num_classes = std::nullopt,
                                      std::vector<std::string> class_names = {});

    std::size_t size() const { return coords_.size(); }
    std::size_t num_classes() const { return class_sizes_.size(); }

    std::span<const Point> coords() const { return coords_; }
    std::span<const ClassId> labels() const { return labels_; }
    const Point& operator[](std::size_t i) const { return coords_[i]; }
    ClassId label(std::size_t i) const { return labels_[i]; }
    const Rect& region() const { return region_; }
    std::span<const std::size_t> class_sizes() const { return class_sizes_; }

    /// Display names, one per class; generated ("0", "1", ...) when absent.
    const std::vector<std::string>& class_names() const { return class_names_; }

    /// Copy with new labels over the same locations.
    PointSet relabeled(std::vector<ClassId> labels) const;

    /// Intensity estimate n / area.
    double intensity() const { return static_cast<double>(size()) / region_.area(); }

private:
    std::vector<Point> coords_;
    std::vector<ClassId> labels_;
    Rect region_;
    std::vector<std::size_t> class_sizes_;
    std::vector<std::string> class_names_;
};

Rect bounding_box(std::span<const Point> coords);

}  // namespace segstat
