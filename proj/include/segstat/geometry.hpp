#pragma once

#include <cmath>

namespace segstat {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned closed rectangle [xmin, xmax] x [ymin, ymax].
struct Rect {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 1.0;
    double ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }

    bool proper() const {
        return std::isfinite(xmin) && std::isfinite(xmax) && std::isfinite(ymin) &&
               std::isfinite(ymax) && width() > 0.0 && height() > 0.0;
    }

    bool contains(const Point& p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }

    bool contains(const Rect& r) const {
        return r.xmin >= xmin && r.xmax <= xmax && r.ymin >= ymin && r.ymax <= ymax;
    }

    /// Distance from an interior point to the nearest side.
    double distance_to_boundary(const Point& p) const {
        return std::fmin(std::fmin(p.x - xmin, xmax - p.x), std::fmin(p.y - ymin, ymax - p.y));
    }

    static Rect unit() { return {0.0, 0.0, 1.0, 1.0}; }

    friend bool operator==(const Rect&, const Rect&) = default;
};

inline double squared_distance(const Point& a, const Point& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    return dx * dx + dy * dy;
}

}  // namespace segstat
