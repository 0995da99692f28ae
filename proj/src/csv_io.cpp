#include "segstat/csv_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "segstat/error.hpp"

namespace segstat {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

std::optional<double> to_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw ValidationError("line " + std::to_string(line) + ": " + what);
}

}  // namespace

PointSet parse_points_csv(std::istream& in, std::optional<Rect> region) {
    std::string raw;
    std::size_t line_no = 0;
    int col_x = -1, col_y = -1, col_class = -1;
    std::size_t width = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        if (line_no == 1 && raw.starts_with("\xEF\xBB\xBF")) raw.erase(0, 3);
        if (!trim(raw).empty()) break;
    }
    if (trim(raw).empty()) throw ValidationError("empty input: expected header x,y,class");
    {
        const auto header = split(trim(raw), ',');
        width = header.size();
        for (std::size_t c = 0; c < header.size(); ++c) {
            const std::string name = lower(header[c]);
            int* slot = name == "x" ? &col_x : name == "y" ? &col_y : name == "class" ? &col_class : nullptr;
            if (slot == nullptr) continue;
            if (*slot != -1) fail(line_no, "duplicate column '" + name + "'");
            *slot = static_cast<int>(c);
        }
        if (col_x < 0 || col_y < 0 || col_class < 0) {
            fail(line_no, "header must name columns x, y and class");
        }
    }

    std::vector<Point> coords;
    std::vector<ClassId> labels;
    std::vector<std::string> names;
    std::map<std::string, ClassId, std::less<>> ids;
    std::vector<std::size_t> source_line;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != width) {
            fail(line_no, "expected " + std::to_string(width) + " fields, found " +
                              std::to_string(fields.size()));
        }
        const auto x = to_double(fields[col_x]);
        const auto y = to_double(fields[col_y]);
        if (!x) fail(line_no, "x is not a finite number: '" + std::string(fields[col_x]) + "'");
        if (!y) fail(line_no, "y is not a finite number: '" + std::string(fields[col_y]) + "'");
        const std::string_view token = fields[col_class];
        if (token.empty()) fail(line_no, "empty class label");
        auto it = ids.find(token);
        if (it == ids.end()) {
            it = ids.emplace(std::string(token), static_cast<ClassId>(names.size())).first;
            names.emplace_back(token);
        }
        if (region && !region->contains(Point{*x, *y})) {
            fail(line_no, "point lies outside the study region");
        }
        coords.push_back({*x, *y});
        labels.push_back(it->second);
        source_line.push_back(line_no);
    }
    if (coords.size() < 2) throw ValidationError("need at least 2 points, found " + std::to_string(coords.size()));

    // Report duplicates by line number before PointSet rejects them.
    std::vector<std::size_t> order(coords.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return coords[a].x != coords[b].x ? coords[a].x < coords[b].x : coords[a].y < coords[b].y;
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (coords[order[k]] == coords[order[k - 1]]) {
            const auto [a, b] = std::minmax(source_line[order[k]], source_line[order[k - 1]]);
            fail(b, "duplicate coordinates (same as line " + std::to_string(a) + ")");
        }
    }

    const std::size_t q = names.size();
    if (region) return PointSet(std::move(coords), std::move(labels), *region, q, std::move(names));
    return PointSet::with_bounding_box(std::move(coords), std::move(labels), q, std::move(names));
}

PointSet read_points_csv(const std::string& path, std::optional<Rect> region) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    try {
        return parse_points_csv(in, region);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

Rect parse_rect(std::string_view text) {
    const auto fields = split(trim(text), ',');
    if (fields.size() != 4) throw ValidationError("region must be xmin,ymin,xmax,ymax");
    double v[4];
    for (std::size_t i = 0; i < 4; ++i) {
        const auto d = to_double(fields[i]);
        if (!d) throw ValidationError("region value is not a number: '" + std::string(fields[i]) + "'");
        v[i] = *d;
    }
    const Rect r{v[0], v[1], v[2], v[3]};
    if (!r.proper()) throw ValidationError("region needs xmin < xmax and ymin < ymax");
    return r;
}

void write_points_csv(std::ostream& out, const PointSet& points) {
    std::ostringstream buf;
    buf.precision(17);
    buf << "x,y,class\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        buf << points[i].x << ',' << points[i].y << ',' << points.class_names()[points.label(i)]
            << '\n';
    }
    out << buf.str();
}

}  // namespace segstat
