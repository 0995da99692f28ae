#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "segstat/geometry.hpp"

namespace segstat {

/// L(t) - t on a grid t_s = s * t_max / n_steps, s = 1..n_steps. The
/// envelope vectors are empty until filled from simulations.
struct LCurve {
    std::vector<double> t_grid;
    std::vector<double> l_minus_t;
    std::vector<double> env_low;
    std::vector<double> env_high;
};

/// `translation` weights each pair by A / ((W - |dx|)(H - |dy|)).
enum class RipleyEdge { none, translation };

std::string_view to_string(RipleyEdge e);
RipleyEdge parse_ripley_edge(std::string_view name);

std::vector<double> l_grid(double t_max, std::size_t n_steps);

/// K(t) = A / (n (n - 1)) * sum over ordered pairs k != l of e_kl 1(d_kl <= t);
/// L = sqrt(K / pi). Throws ValidationError for fewer than 2 points,
/// t_max <= 0 or n_steps == 0.
LCurve l_univariate(std::span<const Point> points, const Rect& region, double t_max,
                    std::size_t n_steps, RipleyEdge edge = RipleyEdge::none);

/// Cross K(t) = A / (n1 n2) * sum over k in class 1, l in class 2 of
/// e_kl 1(d_kl <= t). Symmetric in its two arguments, bit for bit.
LCurve l_bivariate(std::span<const Point> first, std::span<const Point> second, const Rect& region,
                   double t_max, std::size_t n_steps, RipleyEdge edge = RipleyEdge::none);

enum class LStatistic { univariate_first, univariate_second, bivariate };

struct EnvelopeConfig {
    LStatistic statistic = LStatistic::bivariate;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    Rect region = Rect::unit();
    double t_max = 0.25;
    std::size_t n_steps = 50;
    RipleyEdge edge = RipleyEdge::none;
    std::size_t n_sim = 99;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct Envelope {
    std::vector<double> low;
    std::vector<double> high;
};

/// Rank used for the lower bound; the upper bound uses n_sim + 1 - rank.
std::size_t envelope_rank(std::size_t n_sim);

/// Pointwise 2.5% / 97.5% bounds of L(t) - t over n_sim patterns drawn under
/// CSR independence on `region` with class sizes (n1, n2). Swapping n1 with
/// n2 (and univariate_first with univariate_second) gives identical bounds.
/// Throws ValidationError when n_sim < 39.
Envelope l_envelope(const EnvelopeConfig& config);

}  // namespace segstat
