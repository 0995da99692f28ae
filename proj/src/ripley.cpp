#include "segstat/ripley.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "parallel.hpp"
#include "segstat/error.hpp"
#include "segstat/rng.hpp"

namespace segstat {

namespace {

struct PairTerm {
    double d;
    double w;
    friend bool operator<(const PairTerm& a, const PairTerm& b) {
        return a.d != b.d ? a.d < b.d : a.w < b.w;
    }
};

void check_grid(const Rect& region, double t_max, std::size_t n_steps) {
    if (!region.proper()) throw ValidationError("region must have positive width and height");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be positive");
    if (n_steps == 0) throw ValidationError("need at least one grid step");
}

double pair_weight(const Point& a, const Point& b, const Rect& region, RipleyEdge edge) {
    if (edge == RipleyEdge::none) return 1.0;
    const double wx = region.width() - std::abs(a.x - b.x);
    const double wy = region.height() - std::abs(a.y - b.y);
    if (wx <= 0.0 || wy <= 0.0) return 0.0;
    return region.area() / (wx * wy);
}

// Turns close pairs into K on the grid. Terms are summed in sorted order so
// the result does not depend on how the pairs were enumerated.
std::vector<double> accumulate(std::vector<PairTerm>& terms, const std::vector<double>& grid,
                               double scale) {
    std::sort(terms.begin(), terms.end());
    std::vector<double> k(grid.size(), 0.0);
    double running = 0.0;
    std::size_t next = 0;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        while (next < terms.size() && terms[next].d <= grid[s]) running += terms[next++].w;
        k[s] = running * scale;
    }
    return k;
}

std::vector<double> to_l_minus_t(const std::vector<double>& k, const std::vector<double>& grid) {
    std::vector<double> out(k.size());
    for (std::size_t s = 0; s < k.size(); ++s) {
        out[s] = std::sqrt(k[s] / std::numbers::pi) - grid[s];
    }
    return out;
}

std::vector<double> univariate_values(std::span<const Point> pts, const Rect& region,
                                      const std::vector<double>& grid, RipleyEdge edge) {
    const double t_max = grid.back();
    const double t2 = t_max * t_max;
    std::vector<PairTerm> terms;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d2 = squared_distance(pts[i], pts[j]);
            if (d2 > t2) continue;
            // Each unordered pair stands for two ordered ones.
            terms.push_back({std::sqrt(d2), 2.0 * pair_weight(pts[i], pts[j], region, edge)});
        }
    }
    const double n = static_cast<double>(pts.size());
    return to_l_minus_t(accumulate(terms, grid, region.area() / (n * (n - 1.0))), grid);
}

std::vector<double> bivariate_values(std::span<const Point> a, std::span<const Point> b,
                                     const Rect& region, const std::vector<double>& grid,
                                     RipleyEdge edge) {
    const double t_max = grid.back();
    const double t2 = t_max * t_max;
    std::vector<PairTerm> terms;
    for (const Point& p : a) {
        for (const Point& r : b) {
            const double d2 = squared_distance(p, r);
            if (d2 > t2) continue;
            terms.push_back({std::sqrt(d2), pair_weight(p, r, region, edge)});
        }
    }
    const double scale =
        region.area() / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    return to_l_minus_t(accumulate(terms, grid, scale), grid);
}

std::vector<Point> uniform_sample(Rng& rng, const Rect& region, std::size_t count) {
    std::vector<Point> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = rng.uniform(region.xmin, region.xmax);
        const double y = rng.uniform(region.ymin, region.ymax);
        pts.push_back({x, y});
    }
    return pts;
}

}  // namespace

std::string_view to_string(RipleyEdge e) {
    return e == RipleyEdge::none ? "none" : "translation";
}

RipleyEdge parse_ripley_edge(std::string_view name) {
    if (name == "none") return RipleyEdge::none;
    if (name == "translation") return RipleyEdge::translation;
    throw ValidationError("unknown Ripley edge weight '" + std::string(name) + "'");
}

std::vector<double> l_grid(double t_max, std::size_t n_steps) {
    std::vector<double> grid(n_steps);
    for (std::size_t s = 0; s < n_steps; ++s) {
        grid[s] = static_cast<double>(s + 1) * t_max / static_cast<double>(n_steps);
    }
    return grid;
}

LCurve l_univariate(std::span<const Point> points, const Rect& region, double t_max,
                    std::size_t n_steps, RipleyEdge edge) {
    check_grid(region, t_max, n_steps);
    if (points.size() < 2) throw ValidationError("univariate L needs at least 2 points");
    LCurve curve;
    curve.t_grid = l_grid(t_max, n_steps);
    curve.l_minus_t = univariate_values(points, region, curve.t_grid, edge);
    return curve;
}

LCurve l_bivariate(std::span<const Point> first, std::span<const Point> second, const Rect& region,
                   double t_max, std::size_t n_steps, RipleyEdge edge) {
    check_grid(region, t_max, n_steps);
    if (first.empty() || second.empty()) throw ValidationError("bivariate L needs two non-empty classes");
    LCurve curve;
    curve.t_grid = l_grid(t_max, n_steps);
    curve.l_minus_t = bivariate_values(first, second, region, curve.t_grid, edge);
    return curve;
}

std::size_t envelope_rank(std::size_t n_sim) {
    const auto k = static_cast<std::size_t>(std::floor(0.025 * static_cast<double>(n_sim + 1)));
    return std::max<std::size_t>(1, k);
}

Envelope l_envelope(const EnvelopeConfig& c) {
    if (c.n_sim < 39) throw ValidationError("envelopes need at least 39 simulations");
    check_grid(c.region, c.t_max, c.n_steps);
    const std::vector<double> grid = l_grid(c.t_max, c.n_steps);

    const bool bivariate = c.statistic == LStatistic::bivariate;
    const std::size_t uni_n = c.statistic == LStatistic::univariate_first ? c.n1 : c.n2;
    if (bivariate ? (c.n1 == 0 || c.n2 == 0) : uni_n < 2) {
        throw ValidationError("class too small for the requested L-function");
    }

    std::vector<std::vector<double>> sims(c.n_sim);
    detail::parallel_chunks(c.n_sim, c.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            Rng rng(derive_seed(c.seed, s));
            if (!bivariate) {
                sims[s] = univariate_values(uniform_sample(rng, c.region, uni_n), c.region, grid,
                                            c.edge);
                continue;
            }
            // Larger class drawn first, so swapping the class sizes yields the
            // same two samples.
            const auto big = uniform_sample(rng, c.region, std::max(c.n1, c.n2));
            const auto small = uniform_sample(rng, c.region, std::min(c.n1, c.n2));
            sims[s] = bivariate_values(big, small, c.region, grid, c.edge);
        }
    });

    const std::size_t lo = envelope_rank(c.n_sim) - 1;
    const std::size_t hi = c.n_sim - envelope_rank(c.n_sim);
    Envelope env{std::vector<double>(c.n_steps), std::vector<double>(c.n_steps)};
    std::vector<double> column(c.n_sim);
    for (std::size_t t = 0; t < c.n_steps; ++t) {
        for (std::size_t s = 0; s < c.n_sim; ++s) column[s] = sims[s][t];
        std::sort(column.begin(), column.end());
        env.low[t] = column[lo];
        env.high[t] = column[hi];
    }
    return env;
}

}  // namespace segstat
