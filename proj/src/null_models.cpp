#include "segstat/null_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "parallel.hpp"
#include "segstat/error.hpp"
#include "segstat/rng.hpp"

namespace segstat {

namespace {

constexpr std::array<std::pair<NullKind, std::string_view>, 7> kNullNames{{
    {NullKind::rl_fixed_locations, "rl-file"},
    {NullKind::rl_case2_uniform, "rl-case2"},
    {NullKind::rl_case3_overlapping, "rl-case3"},
    {NullKind::rl_case4_disjoint, "rl-case4"},
    {NullKind::csr_independence, "csr"},
    {NullKind::rowwise_binomial, "rowwise-binomial"},
    {NullKind::overall_multinomial, "overall-multinomial"},
}};

// Stream reserved for the fixed locations of an RL study; replications use
// streams 0 .. n_mc-1.
constexpr std::uint64_t kLocationStream = ~std::uint64_t{0};

// One-sided 95% normal quantile for the size verdict.
constexpr double kVerdictZ = 1.6448536269514722;
constexpr double kCiZ = 1.959963984540054;

void append_uniform(std::vector<Point>& out, Rng& rng, const Rect& box, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
        const double x = rng.uniform(box.xmin, box.xmax);
        const double y = rng.uniform(box.ymin, box.ymax);
        out.push_back({x, y});
    }
}

// Draws from `window` until `count` points land in `core`; keeps every draw.
void append_until_inside(std::vector<Point>& out, std::vector<ClassId>& labels, Rng& rng,
                         const Rect& window, const Rect& core, std::size_t count, ClassId label) {
    std::size_t inside = 0;
    while (inside < count) {
        const Point p{rng.uniform(window.xmin, window.xmax), rng.uniform(window.ymin, window.ymax)};
        out.push_back(p);
        labels.push_back(label);
        if (core.contains(p)) ++inside;
    }
}

PointSet two_samples(Rng& rng, const Rect& box1, const Rect& box2, const Rect& region,
                     std::size_t n1, std::size_t n2) {
    std::vector<Point> coords;
    coords.reserve(n1 + n2);
    append_uniform(coords, rng, box1, n1);
    append_uniform(coords, rng, box2, n2);
    std::vector<ClassId> labels(n1, 0);
    labels.resize(n1 + n2, 1);
    return PointSet(std::move(coords), std::move(labels), region, 2);
}

PointSet generate_pattern(const NullSpec& spec, Rng& rng) {
    const std::size_t n1 = spec.n1;
    const std::size_t n2 = spec.n2;
    const Rect unit = Rect::unit();
    switch (spec.kind) {
        case NullKind::rl_fixed_locations: {
            auto labels = random_labeling(spec.locations.size(), n1, n2, rng.next());
            return PointSet::with_bounding_box(spec.locations, std::move(labels), 2);
        }
        case NullKind::rl_case2_uniform: {
            std::vector<Point> coords;
            coords.reserve(n1 + n2);
            append_uniform(coords, rng, unit, n1 + n2);
            auto labels = random_labeling(n1 + n2, n1, n2, rng.next());
            return PointSet(std::move(coords), std::move(labels), unit, 2);
        }
        case NullKind::rl_case3_overlapping:
            return two_samples(rng, Rect{0.0, 0.0, 2.0 / 3.0, 2.0 / 3.0},
                               Rect{1.0 / 3.0, 1.0 / 3.0, 1.0, 1.0}, unit, n1, n2);
        case NullKind::rl_case4_disjoint:
            return two_samples(rng, unit, Rect{2.0, 0.0, 3.0, 1.0}, Rect{0.0, 0.0, 3.0, 1.0}, n1,
                               n2);
        case NullKind::csr_independence: {
            if (spec.edge != EdgeCorrection::outer_buffer) {
                return two_samples(rng, spec.region, spec.region, spec.region, n1, n2);
            }
            std::vector<Point> coords;
            std::vector<ClassId> labels;
            append_until_inside(coords, labels, rng, spec.outer_region, spec.region, n1, 0);
            append_until_inside(coords, labels, rng, spec.outer_region, spec.region, n2, 1);
            return PointSet(std::move(coords), std::move(labels), spec.outer_region, 2);
        }
        default:
            break;
    }
    throw ValidationError("null model does not produce a point pattern");
}

NNCT generate_table(const NullSpec& spec, Rng& rng) {
    const auto n1 = static_cast<std::uint64_t>(spec.n1);
    const auto n2 = static_cast<std::uint64_t>(spec.n2);
    const double n = static_cast<double>(n1 + n2);
    if (spec.kind == NullKind::rowwise_binomial) {
        const double p = static_cast<double>(n1) / n;
        const std::uint64_t n11 = rng.binomial(n1, p);
        const std::uint64_t n21 = rng.binomial(n2, p);
        return NNCT::from_counts({{n11, n1 - n11}, {n21, n2 - n21}});
    }
    // Cells in order 11, 12, 21, 22.
    const double p1 = static_cast<double>(n1) / (2.0 * n);
    const double p2 = static_cast<double>(n2) / (2.0 * n);
    const std::array<double, 3> cumulative{p1, p1 + p2, p1 + p2 + p1};
    std::array<std::uint64_t, 4> cells{};
    for (std::uint64_t t = 0; t < n1 + n2; ++t) {
        const double u = rng.uniform();
        std::size_t c = 0;
        while (c < cumulative.size() && u >= cumulative[c]) ++c;
        ++cells[c];
    }
    return NNCT::from_counts({{cells[0], cells[1]}, {cells[2], cells[3]}});
}

NNGraph graph_for(const PointSet& points, const NullSpec& spec) {
    if (spec.kind == NullKind::csr_independence) {
        if (spec.edge == EdgeCorrection::outer_buffer) return apply_outer_buffer(points, spec.region);
        if (spec.edge == EdgeCorrection::toroidal) return apply_toroidal(points);
    }
    return build_nn_graph(points);
}

void shuffle(std::vector<ClassId>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace

std::string_view to_string(NullKind kind) {
    for (const auto& [k, name] : kNullNames) {
        if (k == kind) return name;
    }
    return "?";
}

NullKind parse_null_kind(std::string_view name) {
    for (const auto& [k, n] : kNullNames) {
        if (n == name) return k;
    }
    throw ValidationError("unknown null model '" + std::string(name) + "'");
}

bool is_random_labeling(NullKind kind) {
    return kind == NullKind::rl_fixed_locations || kind == NullKind::rl_case2_uniform ||
           kind == NullKind::rl_case3_overlapping || kind == NullKind::rl_case4_disjoint;
}

bool is_synthetic_table(NullKind kind) {
    return kind == NullKind::rowwise_binomial || kind == NullKind::overall_multinomial;
}

std::string_view to_string(SizeVerdict v) {
    switch (v) {
        case SizeVerdict::conservative: return "conservative";
        case SizeVerdict::nominal: return "nominal";
        case SizeVerdict::liberal: return "liberal";
    }
    return "?";
}

void NullSpec::validate() const {
    if (n1 < 1 || n2 < 1) throw ValidationError("class sizes n1 and n2 must be at least 1");
    if (!region.proper()) throw ValidationError("study region must have positive width and height");
    if (kind == NullKind::rl_fixed_locations && locations.size() != n1 + n2) {
        throw ValidationError("number of fixed locations (" + std::to_string(locations.size()) +
                              ") must equal n1 + n2 (" + std::to_string(n1 + n2) + ")");
    }
    if (kind == NullKind::csr_independence) {
        if (edge == EdgeCorrection::inner_buffer) {
            throw ValidationError("CSR studies support edge corrections none, toroidal, outer-buffer");
        }
        if (edge == EdgeCorrection::outer_buffer &&
            (!outer_region.proper() || !outer_region.contains(region))) {
            throw ValidationError("outer sampling window must contain the study region");
        }
    } else if (edge != EdgeCorrection::none) {
        throw ValidationError("edge correction applies to CSR studies only");
    }
}

NullSample generate(const NullSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    if (is_synthetic_table(spec.kind)) return generate_table(spec, rng);
    return generate_pattern(spec, rng);
}

std::vector<ClassId> random_labeling(std::size_t num_locations, std::size_t n1, std::size_t n2,
                                     std::uint64_t seed) {
    if (n1 + n2 != num_locations) {
        throw ValidationError("n1 + n2 must equal the number of locations");
    }
    std::vector<ClassId> labels(num_locations, 1);
    Rng rng(seed);
    // Partial Fisher-Yates over positions: the first n1 picks become class 0.
    std::vector<std::size_t> pos(num_locations);
    for (std::size_t i = 0; i < num_locations; ++i) pos[i] = i;
    for (std::size_t i = 0; i < n1; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(num_locations - i));
        std::swap(pos[i], pos[j]);
        labels[pos[i]] = 0;
    }
    return labels;
}

std::vector<ClassId> permute_labels(std::span<const ClassId> labels, std::uint64_t seed) {
    std::vector<ClassId> out(labels.begin(), labels.end());
    Rng rng(seed);
    shuffle(out, rng);
    return out;
}

double mc_randomization_test(const PointSet& points, const NNGraph& graph, TestKind test,
                             std::size_t n_mc, std::uint64_t seed, unsigned threads) {
    if (n_mc < 99) throw ValidationError("randomization tests need at least 99 relabelings");
    if (graph.size() != points.size()) throw ValidationError("graph does not match the points");
    const std::size_t q = points.num_classes();
    const QRStats qr = compute_qr(graph);

    const NNCT observed_table = build_nnct(graph, points.labels(), q);
    TestEvaluator observed_eval(observed_table, qr);
    const std::optional<double> observed = observed_eval.score(test);
    if (!observed) {
        throw DegenerateError(std::string(to_string(test)) + " is undefined for these data");
    }

    std::vector<double> scores(n_mc);
    detail::parallel_chunks(n_mc, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const auto labels = permute_labels(points.labels(), derive_seed(seed, r));
            const NNCT table = build_nnct(graph, labels, q);
            TestEvaluator eval(table, qr);
            scores[r] = eval.score(test).value_or(-std::numeric_limits<double>::infinity());
        }
    });

    std::size_t at_least = 0;
    bool constant = true;
    for (double s : scores) {
        // Relative slack so ties in exact arithmetic are not lost to rounding.
        if (s >= *observed - 1e-12 * std::max(1.0, std::abs(*observed))) ++at_least;
        if (s != *observed) constant = false;
    }
    if (constant) {
        throw DegenerateError(std::string(to_string(test)) + " is constant over relabelings");
    }
    return static_cast<double>(at_least + 1) / static_cast<double>(n_mc + 1);
}

std::pair<double, double> nominal_band(double alpha, std::size_t n_mc) {
    const double band = kVerdictZ * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(n_mc));
    return {alpha - band, alpha + band};
}

SizeEstimate size_estimate(std::size_t rejections, std::size_t n_mc, double alpha) {
    SizeEstimate est;
    est.n_mc = n_mc;
    est.rejections = rejections;
    const double m = static_cast<double>(n_mc);
    est.alpha_hat = static_cast<double>(rejections) / m;
    const double se = std::sqrt(est.alpha_hat * (1.0 - est.alpha_hat) / m);
    est.ci_low = std::max(0.0, est.alpha_hat - kCiZ * se);
    est.ci_high = std::min(1.0, est.alpha_hat + kCiZ * se);
    const auto [lo, hi] = nominal_band(alpha, n_mc);
    if (est.alpha_hat < lo) {
        est.verdict = SizeVerdict::conservative;
    } else if (est.alpha_hat > hi) {
        est.verdict = SizeVerdict::liberal;
    } else {
        est.verdict = SizeVerdict::nominal;
    }
    return est;
}

double StudyOutcome::agreement(TestKind a, TestKind b) const {
    const auto index = [&](TestKind k) {
        const auto it = std::find(tests.begin(), tests.end(), k);
        if (it == tests.end()) {
            throw ValidationError(std::string(to_string(k)) + " was not part of the study");
        }
        return static_cast<std::size_t>(it - tests.begin());
    };
    const auto& ra = rejected[index(a)];
    const auto& rb = rejected[index(b)];
    std::size_t both = 0;
    for (std::size_t r = 0; r < ra.size(); ++r) both += (ra[r] && rb[r]) ? 1 : 0;
    return ra.empty() ? 0.0 : static_cast<double>(both) / static_cast<double>(ra.size());
}

StudyOutcome run_study(const StudyConfig& config) {
    const NullSpec& spec = config.spec;
    spec.validate();
    if (config.n_mc < 100) throw ValidationError("studies need at least 100 replications");
    if (!(config.alpha > 0.0 && config.alpha <= 1.0)) {
        throw ValidationError("alpha must lie in (0, 1]");
    }
    if (config.tests.empty()) throw ValidationError("no tests requested");
    if (is_synthetic_table(spec.kind)) {
        for (TestKind t : config.tests) {
            if (needs_spatial_structure(t)) {
                throw ValidationError(std::string(to_string(t)) +
                                      " needs Q and R, which synthetic tables do not have");
            }
        }
    }

    // RL studies keep one set of locations, and hence one graph, for all
    // replications.
    std::optional<PointSet> fixed;
    std::optional<NNGraph> fixed_graph;
    std::optional<QRStats> fixed_qr;
    if (is_random_labeling(spec.kind)) {
        Rng rng(derive_seed(config.seed, kLocationStream));
        fixed = generate_pattern(spec, rng);
        fixed_graph = build_nn_graph(*fixed);
        fixed_qr = compute_qr(*fixed_graph);
    }

    const std::size_t num_tests = config.tests.size();
    // Byte flags keep concurrent writes to distinct replications race-free.
    std::vector<std::vector<unsigned char>> flags(num_tests,
                                                  std::vector<unsigned char>(config.n_mc, 0));

    detail::parallel_chunks(config.n_mc, config.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const std::uint64_t stream = derive_seed(config.seed, r);
            std::optional<NNCT> table;
            std::optional<QRStats> qr;
            if (fixed) {
                const auto labels = random_labeling(fixed->size(), spec.n1, spec.n2, stream);
                table = build_nnct(*fixed_graph, labels, 2);
                qr = fixed_qr;
            } else if (is_synthetic_table(spec.kind)) {
                Rng rng(stream);
                table = generate_table(spec, rng);
            } else {
                Rng rng(stream);
                const PointSet pattern = generate_pattern(spec, rng);
                const NNGraph graph = graph_for(pattern, spec);
                table = build_nnct(graph, pattern.labels(), 2);
                qr = compute_qr(graph);
            }
            TestEvaluator eval(*table, qr);
            for (std::size_t t = 0; t < num_tests; ++t) {
                flags[t][r] = eval.p_value(config.tests[t]) <= config.alpha ? 1 : 0;
            }
        }
    });

    StudyOutcome out;
    out.tests = config.tests;
    out.alpha = config.alpha;
    for (std::size_t t = 0; t < num_tests; ++t) {
        std::vector<bool> rej(flags[t].begin(), flags[t].end());
        const auto count = static_cast<std::size_t>(std::count(rej.begin(), rej.end(), true));
        out.sizes.push_back(size_estimate(count, config.n_mc, config.alpha));
        out.rejected.push_back(std::move(rej));
    }
    return out;
}

SizeEstimate empirical_size(const NullSpec& spec, TestKind test, std::size_t n_mc, double alpha,
                            std::uint64_t seed, unsigned threads) {
    StudyConfig config{spec, {test}, n_mc, alpha, seed, threads};
    return run_study(config).sizes.front();
}

double agreement_proportion(const NullSpec& spec, TestKind a, TestKind b, std::size_t n_mc,
                            double alpha, std::uint64_t seed, unsigned threads) {
    StudyConfig config{spec, {a}, n_mc, alpha, seed, threads};
    if (b != a) config.tests.push_back(b);
    return run_study(config).agreement(a, b);
}

}  // namespace segstat
