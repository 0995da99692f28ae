#include "segstat/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "segstat/csv_io.hpp"
#include "segstat/error.hpp"
#include "segstat/null_models.hpp"
#include "segstat/report.hpp"
#include "segstat/ripley.hpp"

namespace segstat {

namespace {

namespace fs = std::filesystem;

struct NnctArgs {
    std::string input;
    std::string correction = "none";
    unsigned buffer_k = 1;
    std::string core_region;
    std::string region;
    bool qr_adjust = false;
    std::size_t mc = 0;
    std::uint64_t seed = 1;
    std::string format = "text";
};

struct SimulateArgs {
    std::string null_kind = "csr";
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::size_t nmc = 10000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::string tests = "dixon-overall";
    std::string edge = "none";
    std::string agreement;
    std::string locations;
    std::string format = "text";
};

struct RipleyArgs {
    std::string input;
    std::string region;
    double tmax = 0.0;
    std::size_t steps = 50;
    std::size_t envelope_sims = 99;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string edge = "none";
};

unsigned resolve_threads(std::optional<unsigned> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SEGSTAT_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (*end != '\0') throw ValidationError("SEGSTAT_THREADS must be a non-negative integer");
        return static_cast<unsigned>(v);
    }
    return 0;
}

PointSet load_points(const std::string& path, const std::string& region) {
    std::optional<Rect> r;
    if (!region.empty()) r = parse_rect(region);
    if (path == "-") return parse_points_csv(std::cin, r);
    return read_points_csv(path, r);
}

std::string prop(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << v;
    std::string out = s.str();
    if (out.starts_with("0.")) out.erase(0, 1);
    return out;
}

int run_nnct(const NnctArgs& a, std::optional<unsigned> threads, std::ostream& out) {
    const PointSet points = load_points(a.input, a.region);
    AnalysisOptions o;
    o.correction = parse_edge_correction(a.correction);
    o.buffer_k = a.buffer_k;
    if (!a.core_region.empty()) o.core_region = parse_rect(a.core_region);
    o.qr_adjust = a.qr_adjust;
    if (a.mc != 0 && a.mc < 99) throw ValidationError("--mc needs at least 99 relabelings");
    o.mc = a.mc;
    o.seed = a.seed;
    o.threads = resolve_threads(threads);
    const AnalysisReport report = analyze(points, o);
    if (a.format == "json") {
        out << to_json(report).dump(2) << '\n';
    } else {
        out << format_text(report);
    }
    return 0;
}

int run_simulate(const SimulateArgs& a, std::optional<unsigned> threads, std::ostream& out) {
    StudyConfig c;
    c.spec.kind = parse_null_kind(a.null_kind);
    c.spec.edge = parse_edge_correction(a.edge);
    c.spec.n1 = a.n1;
    c.spec.n2 = a.n2;
    if (c.spec.kind == NullKind::rl_fixed_locations) {
        if (a.locations.empty()) throw ValidationError("--null rl-file needs --locations");
        const PointSet pts = read_points_csv(a.locations);
        c.spec.locations.assign(pts.coords().begin(), pts.coords().end());
        if (c.spec.n1 == 0 && c.spec.n2 == 0) {
            if (pts.num_classes() != 2) {
                throw ValidationError("locations file must have two classes, or give --n1 and --n2");
            }
            c.spec.n1 = pts.class_sizes()[0];
            c.spec.n2 = pts.class_sizes()[1];
        }
    } else if (!a.locations.empty()) {
        throw ValidationError("--locations applies to --null rl-file only");
    }
    c.tests = parse_test_list(a.tests);
    std::optional<std::pair<TestKind, TestKind>> pair;
    if (!a.agreement.empty()) {
        const auto ab = parse_test_list(a.agreement);
        if (ab.size() != 2) throw ValidationError("--agreement needs exactly two tests A,B");
        pair = {ab[0], ab[1]};
        for (TestKind k : ab) {
            if (std::find(c.tests.begin(), c.tests.end(), k) == c.tests.end()) c.tests.push_back(k);
        }
    }
    c.n_mc = a.nmc;
    c.alpha = a.alpha;
    c.seed = a.seed;
    c.threads = resolve_threads(threads);
    const StudyOutcome res = run_study(c);

    const auto [band_lo, band_hi] = nominal_band(c.alpha, c.n_mc);
    if (a.format == "json") {
        nlohmann::json j;
        j["schema"] = "segstat.size-study";
        j["version"] = 1;
        j["null"] = std::string(to_string(c.spec.kind));
        j["edge"] = std::string(to_string(c.spec.edge));
        j["n1"] = c.spec.n1;
        j["n2"] = c.spec.n2;
        j["nmc"] = c.n_mc;
        j["alpha"] = c.alpha;
        j["seed"] = c.seed;
        j["nominal_band"] = {band_lo, band_hi};
        nlohmann::json tests = nlohmann::json::array();
        for (std::size_t t = 0; t < res.tests.size(); ++t) {
            const SizeEstimate& s = res.sizes[t];
            tests.push_back({{"test", std::string(to_string(res.tests[t]))},
                             {"alpha_hat", s.alpha_hat},
                             {"rejections", s.rejections},
                             {"ci_low", s.ci_low},
                             {"ci_high", s.ci_high},
                             {"verdict", std::string(to_string(s.verdict))}});
        }
        j["tests"] = tests;
        if (pair) {
            j["agreement"] = {{"a", std::string(to_string(pair->first))},
                              {"b", std::string(to_string(pair->second))},
                              {"proportion", res.agreement(pair->first, pair->second)}};
        }
        out << j.dump(2) << '\n';
        return 0;
    }

    out << "segstat " << kVersion << "  empirical size study\n";
    out << "null: " << to_string(c.spec.kind) << "  n1 = " << c.spec.n1 << "  n2 = " << c.spec.n2;
    if (c.spec.kind == NullKind::csr_independence) out << "  edge: " << to_string(c.spec.edge);
    out << "\nreplications: " << c.n_mc << "  alpha: " << c.alpha << "  seed: " << c.seed << '\n';
    out << "nominal band: [" << prop(band_lo) << ", " << prop(band_hi) << "]\n\n";
    out << std::left << std::setw(26) << "test" << std::setw(11) << "size" << std::setw(20)
        << "95% CI" << "verdict\n";
    for (std::size_t t = 0; t < res.tests.size(); ++t) {
        const SizeEstimate& s = res.sizes[t];
        const std::string ci = "[" + prop(s.ci_low) + ", " + prop(s.ci_high) + "]";
        out << std::left << std::setw(26) << to_string(res.tests[t]) << std::setw(11)
            << prop(s.alpha_hat) << std::setw(20) << ci << to_string(s.verdict) << '\n';
    }
    if (pair) {
        out << "\nagreement(" << to_string(pair->first) << ", " << to_string(pair->second)
            << ") = " << prop(res.agreement(pair->first, pair->second)) << '\n';
    }
    return 0;
}

std::string file_token(const std::string& name) {
    std::string s = name;
    for (char& ch : s) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '.') ch = '_';
    }
    return s;
}

void write_curve(const fs::path& path, const LCurve& c) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f.precision(17);
    f << "t,l_minus_t,env_low,env_high\n";
    for (std::size_t s = 0; s < c.t_grid.size(); ++s) {
        f << c.t_grid[s] << ',' << c.l_minus_t[s] << ',';
        if (c.env_low.empty()) {
            f << ",\n";
        } else {
            f << c.env_low[s] << ',' << c.env_high[s] << '\n';
        }
    }
    if (!f) throw Error("failed writing '" + path.string() + "'");
}

int run_ripley(const RipleyArgs& a, std::optional<unsigned> threads, std::ostream& out) {
    const PointSet pts = load_points(a.input, a.region);
    const Rect region = pts.region();
    const double tmax = a.tmax > 0.0 ? a.tmax : 0.25 * std::min(region.width(), region.height());
    const RipleyEdge edge = parse_ripley_edge(a.edge);
    if (a.envelope_sims != 0 && a.envelope_sims < 39) {
        throw ValidationError("--envelope-sims needs 0 (none) or at least 39");
    }
    const std::size_t q = pts.num_classes();
    std::vector<std::vector<Point>> by_class(q);
    for (std::size_t i = 0; i < pts.size(); ++i) by_class[pts.label(i)].push_back(pts[i]);
    for (std::size_t c = 0; c < q; ++c) {
        if (by_class[c].empty()) throw ValidationError("class '" + pts.class_names()[c] + "' is empty");
    }

    fs::create_directories(a.out_dir);
    EnvelopeConfig env;
    env.region = region;
    env.t_max = tmax;
    env.n_steps = a.steps;
    env.edge = edge;
    env.n_sim = a.envelope_sims;
    env.seed = a.seed;
    env.threads = resolve_threads(threads);

    const auto& names = pts.class_names();
    for (std::size_t c = 0; c < q; ++c) {
        if (by_class[c].size() < 2) {
            out << "skipped univariate " << names[c] << ": fewer than 2 points\n";
            continue;
        }
        LCurve curve = l_univariate(by_class[c], region, tmax, a.steps, edge);
        if (a.envelope_sims != 0) {
            env.statistic = LStatistic::univariate_first;
            env.n1 = by_class[c].size();
            env.n2 = 0;
            Envelope e = l_envelope(env);
            curve.env_low = std::move(e.low);
            curve.env_high = std::move(e.high);
        }
        const fs::path p = fs::path(a.out_dir) / ("univariate_" + file_token(names[c]) + ".csv");
        write_curve(p, curve);
        out << p.string() << '\n';
    }
    for (std::size_t c = 0; c < q; ++c) {
        for (std::size_t d = c + 1; d < q; ++d) {
            // Lexicographic name order keeps the file name stable under a class swap.
            const bool flip = names[d] < names[c];
            const std::size_t lo = flip ? d : c;
            const std::size_t hi = flip ? c : d;
            LCurve curve = l_bivariate(by_class[lo], by_class[hi], region, tmax, a.steps, edge);
            if (a.envelope_sims != 0) {
                env.statistic = LStatistic::bivariate;
                env.n1 = by_class[lo].size();
                env.n2 = by_class[hi].size();
                Envelope e = l_envelope(env);
                curve.env_low = std::move(e.low);
                curve.env_high = std::move(e.high);
            }
            const fs::path p = fs::path(a.out_dir) / ("bivariate_" + file_token(names[lo]) + "_" +
                                                      file_token(names[hi]) + ".csv");
            write_curve(p, curve);
            out << p.string() << '\n';
        }
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nearest-neighbor contingency table tests of spatial segregation", "segstat"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    std::optional<unsigned> threads;
    app.add_option("--threads", threads, "Worker threads (0 = all cores; default $SEGSTAT_THREADS)")
        ->check(CLI::NonNegativeNumber);

    NnctArgs na;
    auto* nnct = app.add_subcommand("nnct", "Build the NNCT of a labeled pattern and run the tests");
    nnct->add_option("input", na.input, "CSV with columns x,y,class ('-' for stdin)")->required();
    nnct->add_option("--correction", na.correction, "Edge correction")
        ->check(CLI::IsMember({"none", "toroidal", "inner-buffer", "outer-buffer"}));
    nnct->add_option("--buffer-k", na.buffer_k, "Inner buffer width E[W] + k sd[W]");
    nnct->add_option("--core-region", na.core_region, "Core rectangle xmin,ymin,xmax,ymax (outer buffer)");
    nnct->add_option("--region", na.region, "Study region xmin,ymin,xmax,ymax (default: bounding box)");
    nnct->add_flag("--qr-adjust", na.qr_adjust, "Use Q = 0.63n, R = 0.62n in Dixon's moments");
    nnct->add_option("--mc", na.mc, "Randomization p-values from this many relabelings (>= 99)");
    nnct->add_option("--seed", na.seed, "Random seed");
    nnct->add_option("--format", na.format)->check(CLI::IsMember({"text", "json"}));
    nnct->add_option("--threads", threads, "Worker threads")->check(CLI::NonNegativeNumber);

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Empirical size and agreement under a null model");
    sim->add_option("--null", sa.null_kind, "Null model")
        ->check(CLI::IsMember({"rl-case2", "rl-case3", "rl-case4", "rl-file", "csr",
                               "rowwise-binomial", "overall-multinomial"}));
    sim->add_option("--n1", sa.n1, "Size of class 1");
    sim->add_option("--n2", sa.n2, "Size of class 2");
    sim->add_option("--nmc", sa.nmc, "Monte Carlo replications (>= 100)");
    sim->add_option("--alpha", sa.alpha, "Nominal level");
    sim->add_option("--seed", sa.seed, "Master seed");
    sim->add_option("--tests", sa.tests, "Comma-separated test names");
    sim->add_option("--edge", sa.edge, "Edge correction for CSR")
        ->check(CLI::IsMember({"none", "toroidal", "outer-buffer"}));
    sim->add_option("--agreement", sa.agreement, "Two tests A,B for the agreement proportion");
    sim->add_option("--locations", sa.locations, "Fixed locations CSV for rl-file");
    sim->add_option("--format", sa.format)->check(CLI::IsMember({"text", "json"}));
    sim->add_option("--threads", threads, "Worker threads")->check(CLI::NonNegativeNumber);

    RipleyArgs ra;
    auto* rip = app.add_subcommand("ripley", "L-function curves with CSR envelopes, one CSV each");
    rip->add_option("input", ra.input, "CSV with columns x,y,class ('-' for stdin)")->required();
    rip->add_option("--region", ra.region, "Study region xmin,ymin,xmax,ymax (default: bounding box)");
    rip->add_option("--tmax", ra.tmax, "Largest distance (default: a quarter of the shorter side)");
    rip->add_option("--steps", ra.steps, "Grid points")->check(CLI::PositiveNumber);
    rip->add_option("--envelope-sims", ra.envelope_sims, "CSR simulations (0 = none, else >= 39)");
    rip->add_option("--seed", ra.seed, "Random seed");
    rip->add_option("--out", ra.out_dir, "Output directory");
    rip->add_option("--edge", ra.edge, "Pair weight")->check(CLI::IsMember({"none", "translation"}));
    rip->add_option("--threads", threads, "Worker threads")->check(CLI::NonNegativeNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (nnct->parsed()) return run_nnct(na, threads, out);
        if (sim->parsed()) return run_simulate(sa, threads, out);
        return run_ripley(ra, threads, out);
    } catch (const ValidationError& e) {
        err << "segstat: error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "segstat: error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace segstat
