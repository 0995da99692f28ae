#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "segstat/geometry.hpp"
#include "segstat/point_set.hpp"

namespace segstat {

/// Reads `x,y,class` records after a header naming those three columns (in
/// any order, case-insensitive). Class tokens become ids in order of first
/// appearance. Blank lines are skipped. The region defaults to the bounding
/// box. Errors are ValidationError with the offending line number.
PointSet parse_points_csv(std::istream& in, std::optional<Rect> region = std::nullopt);
PointSet read_points_csv(const std::string& path, std::optional<Rect> region = std::nullopt);

/// Parses "xmin,ymin,xmax,ymax".
Rect parse_rect(std::string_view text);

void write_points_csv(std::ostream& out, const PointSet& points);

}  // namespace segstat
