#include "segstat/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "segstat/dixon.hpp"
#include "segstat/error.hpp"
#include "segstat/null_models.hpp"
#include "segstat/pielou.hpp"
#include "segstat/test_selector.hpp"

namespace segstat {

namespace {

using nlohmann::json;

std::string cell_name(std::size_t q, std::size_t i, std::size_t j) {
    if (q <= 9) return "dixon-cell-" + std::to_string(i + 1) + std::to_string(j + 1);
    return "dixon-cell-" + std::to_string(i + 1) + "-" + std::to_string(j + 1);
}

// Two-class test kind behind a report entry, for randomization p-values.
std::optional<TestKind> kind_for(const std::string& name, bool adjusted) {
    static const std::pair<const char*, TestKind> plain[] = {
        {"pielou-overall", TestKind::pielou_overall},
        {"pielou-yates", TestKind::pielou_yates},
        {"pielou-z", TestKind::pielou_right},
        {"pielou-z-multinomial", TestKind::pielou_multinomial_right},
    };
    for (const auto& [n, k] : plain) {
        if (name == n) return k;
    }
    const std::string suffix = adjusted ? "-qr" : "";
    for (TestKind k : all_test_kinds()) {
        if (to_string(k) == name + suffix) return k;
    }
    return std::nullopt;
}

NNGraph corrected_graph(const PointSet& points, const AnalysisOptions& o,
                        std::optional<double>& width) {
    switch (o.correction) {
        case EdgeCorrection::none: return build_nn_graph(points);
        case EdgeCorrection::toroidal: return apply_toroidal(points);
        case EdgeCorrection::outer_buffer:
            if (!o.core_region) throw ValidationError("outer-buffer correction needs a core region");
            return apply_outer_buffer(points, *o.core_region);
        case EdgeCorrection::inner_buffer:
            width = inner_buffer_width(points.intensity(), o.buffer_k);
            return apply_inner_buffer(points, *width);
    }
    throw ValidationError("unknown edge correction");
}

std::string fixed(double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

json test_to_json(const TestEntry& t) {
    json j{{"name", t.name},
           {"statistic", t.result.statistic},
           {"distribution", std::string(to_string(t.result.distribution))},
           {"df", t.result.df},
           {"p_two_sided", t.result.p_two_sided},
           {"p_left", t.result.p_left},
           {"p_right", t.result.p_right},
           {"direction", std::string(to_string(t.result.direction_hint))}};
    j["mc_p"] = t.mc_p ? json(*t.mc_p) : json(nullptr);
    return j;
}

Distribution parse_distribution(const std::string& s) {
    if (s == to_string(Distribution::std_normal)) return Distribution::std_normal;
    if (s == to_string(Distribution::chi_square)) return Distribution::chi_square;
    throw ValidationError("unknown distribution '" + s + "'");
}

Direction parse_direction(const std::string& s) {
    for (Direction d : {Direction::segregation, Direction::association, Direction::none}) {
        if (s == to_string(d)) return d;
    }
    throw ValidationError("unknown direction '" + s + "'");
}

}  // namespace

bool operator==(const AnalysisReport& a, const AnalysisReport& b) {
    const auto same_test = [](const TestEntry& x, const TestEntry& y) {
        const TestResult& r = x.result;
        const TestResult& s = y.result;
        return x.name == y.name && x.mc_p == y.mc_p && r.statistic == s.statistic &&
               r.distribution == s.distribution && r.df == s.df &&
               r.p_two_sided == s.p_two_sided && r.p_left == s.p_left &&
               r.p_right == s.p_right && r.direction_hint == s.direction_hint;
    };
    if (a.tests.size() != b.tests.size()) return false;
    for (std::size_t i = 0; i < a.tests.size(); ++i) {
        if (!same_test(a.tests[i], b.tests[i])) return false;
    }
    return a.class_names == b.class_names && a.table == b.table && a.num_points == b.num_points &&
           a.correction == b.correction && a.buffer_width == b.buffer_width &&
           a.qr.Q == b.qr.Q && a.qr.R == b.qr.R && a.qr.Qk == b.qr.Qk &&
           a.qr.Q_tilde == b.qr.Q_tilde && a.qr_adjusted == b.qr_adjusted &&
           a.q_used == b.q_used && a.r_used == b.r_used && a.notes == b.notes && a.mc == b.mc &&
           a.seed == b.seed;
}

AnalysisReport analyze(const PointSet& points, const AnalysisOptions& options) {
    AnalysisReport rep;
    rep.class_names = points.class_names();
    rep.num_points = points.size();
    rep.correction = options.correction;
    rep.mc = options.mc;
    rep.seed = options.seed;

    const NNGraph graph = corrected_graph(points, options, rep.buffer_width);
    rep.qr = compute_qr(graph);
    rep.table = build_nnct(graph, points);
    const std::size_t q = rep.table.q();

    rep.qr_adjusted = options.qr_adjust;
    const QRStats used = options.qr_adjust ? qr_adjust(rep.table.n()) : rep.qr;
    rep.q_used = used.Q;
    rep.r_used = used.R;

    const auto attempt = [&](const std::string& name, auto&& compute) {
        try {
            rep.tests.push_back({name, compute(), std::nullopt});
        } catch (const DegenerateError& e) {
            rep.notes.push_back(name + ": undefined (" + e.what() + ")");
        }
    };

    std::optional<DixonMoments> moments;
    try {
        moments = dixon_moments(rep.table, used);
    } catch (const ValidationError& e) {
        rep.notes.push_back(std::string("dixon: skipped (") + e.what() + ")");
    }
    if (moments) {
        for (std::size_t i = 0; i < q; ++i) {
            for (std::size_t j = 0; j < q; ++j) {
                attempt(cell_name(q, i, j), [&] { return dixon_cell_test(rep.table, *moments, i, j); });
            }
        }
    }
    if (q == 2) {
        attempt("pielou-z", [&] { return pielou_z_rowwise(rep.table); });
        attempt("pielou-z-multinomial", [&] { return pielou_z_multinomial(rep.table); });
        attempt("pielou-overall", [&] { return pielou_chisq(rep.table, false); });
        attempt("pielou-yates", [&] { return pielou_chisq(rep.table, true); });
        if (moments) attempt("dixon-overall", [&] { return dixon_overall_test(rep.table, *moments); });
    } else {
        rep.notes.push_back("pielou: skipped (defined for two classes only)");
        if (moments) rep.notes.push_back("dixon-overall: skipped (two classes only)");
    }

    if (options.mc > 0) {
        if (q != 2) {
            rep.notes.push_back("randomization p-values: skipped (two classes only)");
        } else {
            for (TestEntry& t : rep.tests) {
                const auto kind = kind_for(t.name, options.qr_adjust);
                if (!kind) continue;
                try {
                    t.mc_p = mc_randomization_test(points, graph, *kind, options.mc, options.seed,
                                                   options.threads);
                } catch (const DegenerateError& e) {
                    rep.notes.push_back(t.name + ": no randomization p-value (" + e.what() + ")");
                }
            }
        }
    }
    return rep;
}

std::string format_p(double p) {
    if (p < 0.0001) return "<.0001";
    std::string s = fixed(p, 4);
    if (s.starts_with("0.")) s.erase(0, 1);
    return s;
}

std::string format_text(const AnalysisReport& r) {
    const NNCT& t = r.table;
    const std::size_t q = t.q();
    std::size_t w = 6;
    for (const auto& name : r.class_names) w = std::max(w, name.size() + 2);
    std::ostringstream out;
    const auto cell = [&](const std::string& s) { out << std::setw(static_cast<int>(w)) << s; };

    out << "segstat " << kVersion << "  NNCT analysis\n";
    out << "points: " << r.num_points << "  bases: " << t.n() << "  correction: "
        << to_string(r.correction);
    if (r.buffer_width) out << "  buffer width: " << fixed(*r.buffer_width, 6);
    out << "\n\n";

    out << "counts (rows: base class, columns: NN class)\n";
    cell("");
    for (const auto& name : r.class_names) cell(name);
    cell("sum");
    out << '\n';
    for (std::size_t i = 0; i < q; ++i) {
        cell(r.class_names[i]);
        for (std::size_t j = 0; j < q; ++j) cell(std::to_string(t(i, j)));
        cell(std::to_string(t.row_sums()[i]));
        out << '\n';
    }
    cell("sum");
    for (std::size_t j = 0; j < q; ++j) cell(std::to_string(t.col_sums()[j]));
    cell(std::to_string(t.n()));
    out << "\n\n";

    out << "percentages (cells by row size, sums by total)\n";
    cell("");
    for (const auto& name : r.class_names) cell(name);
    cell("sum");
    out << '\n';
    for (std::size_t i = 0; i < q; ++i) {
        cell(r.class_names[i]);
        for (std::size_t j = 0; j < q; ++j) cell(fixed(t.row_percent(i, j), 1));
        cell(fixed(t.row_sum_percent(i), 1));
        out << '\n';
    }
    cell("sum");
    for (std::size_t j = 0; j < q; ++j) cell(fixed(t.col_sum_percent(j), 1));
    cell("100.0");
    out << "\n\n";

    out << "Q = " << r.qr.Q << "  R = " << r.qr.R;
    if (r.qr.Q_tilde && *r.qr.Q_tilde != r.qr.Q) out << "  Q~ = " << *r.qr.Q_tilde;
    out << '\n';
    if (r.qr_adjusted) {
        out << "Dixon moments use QR-adjusted Q = " << fixed(r.q_used, 4)
            << "  R = " << fixed(r.r_used, 4) << '\n';
    }
    out << '\n';

    const bool with_mc = r.mc > 0;
    out << std::left << std::setw(22) << "test" << std::right << std::setw(11) << "statistic"
        << std::setw(6) << "df" << std::setw(9) << "p" << std::setw(9) << "p-left"
        << std::setw(9) << "p-right";
    if (with_mc) out << std::setw(9) << "p-mc";
    out << "  direction\n";
    for (const TestEntry& e : r.tests) {
        const TestResult& x = e.result;
        out << std::left << std::setw(22) << e.name << std::right << std::setw(11)
            << fixed(x.statistic, 4) << std::setw(6)
            << (x.distribution == Distribution::chi_square ? std::to_string(x.df) : "N")
            << std::setw(9) << format_p(x.p_two_sided) << std::setw(9) << format_p(x.p_left)
            << std::setw(9) << format_p(x.p_right);
        if (with_mc) out << std::setw(9) << (e.mc_p ? format_p(*e.mc_p) : "-");
        out << "  " << to_string(x.direction_hint) << '\n';
    }
    if (with_mc) out << "\nrandomization: " << r.mc << " relabelings, seed " << r.seed << '\n';
    if (!r.notes.empty()) {
        out << "\nnotes:\n";
        for (const auto& n : r.notes) out << "  " << n << '\n';
    }
    return out.str();
}

json to_json(const AnalysisReport& r) {
    const NNCT& t = r.table;
    const std::size_t q = t.q();
    json row_pct = json::array();
    for (std::size_t i = 0; i < q; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < q; ++j) row.push_back(t.row_percent(i, j));
        row_pct.push_back(row);
    }
    json row_sum_pct = json::array();
    json col_sum_pct = json::array();
    for (std::size_t i = 0; i < q; ++i) {
        row_sum_pct.push_back(t.row_sum_percent(i));
        col_sum_pct.push_back(t.col_sum_percent(i));
    }
    json tests = json::array();
    for (const auto& e : r.tests) tests.push_back(test_to_json(e));

    json j;
    j["schema"] = kReportSchema;
    j["version"] = kReportSchemaVersion;
    j["classes"] = r.class_names;
    j["num_points"] = r.num_points;
    j["num_bases"] = t.n();
    j["correction"] = std::string(to_string(r.correction));
    j["buffer_width"] = r.buffer_width ? json(*r.buffer_width) : json(nullptr);
    j["table"] = t.to_rows();
    j["row_sums"] = std::vector<std::uint64_t>(t.row_sums().begin(), t.row_sums().end());
    j["col_sums"] = std::vector<std::uint64_t>(t.col_sums().begin(), t.col_sums().end());
    j["row_percent"] = row_pct;
    j["row_sum_percent"] = row_sum_pct;
    j["col_sum_percent"] = col_sum_pct;
    j["qr"] = {{"Q", r.qr.Q},
               {"R", r.qr.R},
               {"Qk", r.qr.Qk},
               {"Q_tilde", r.qr.Q_tilde ? json(*r.qr.Q_tilde) : json(nullptr)},
               {"adjusted", r.qr_adjusted},
               {"Q_used", r.q_used},
               {"R_used", r.r_used}};
    j["tests"] = tests;
    j["notes"] = r.notes;
    j["metadata"] = {{"generator", std::string("segstat ") + kVersion},
                     {"mc", r.mc},
                     {"seed", r.seed}};
    return j;
}

AnalysisReport report_from_json(const json& j) {
    try {
        if (j.at("schema").get<std::string>() != kReportSchema ||
            j.at("version").get<int>() != kReportSchemaVersion) {
            throw ValidationError("unsupported report schema");
        }
        AnalysisReport r;
        r.class_names = j.at("classes").get<std::vector<std::string>>();
        r.num_points = j.at("num_points").get<std::size_t>();
        r.correction = parse_edge_correction(j.at("correction").get<std::string>());
        if (!j.at("buffer_width").is_null()) r.buffer_width = j["buffer_width"].get<double>();
        r.table = NNCT::from_counts(j.at("table").get<std::vector<std::vector<std::uint64_t>>>());
        const json& qr = j.at("qr");
        r.qr.Q = qr.at("Q").get<double>();
        r.qr.R = qr.at("R").get<double>();
        r.qr.Qk = qr.at("Qk").get<std::vector<std::size_t>>();
        if (!qr.at("Q_tilde").is_null()) r.qr.Q_tilde = qr["Q_tilde"].get<double>();
        r.qr_adjusted = qr.at("adjusted").get<bool>();
        r.q_used = qr.at("Q_used").get<double>();
        r.r_used = qr.at("R_used").get<double>();
        for (const json& t : j.at("tests")) {
            TestEntry e;
            e.name = t.at("name").get<std::string>();
            e.result.statistic = t.at("statistic").get<double>();
            e.result.distribution = parse_distribution(t.at("distribution").get<std::string>());
            e.result.df = t.at("df").get<int>();
            e.result.p_two_sided = t.at("p_two_sided").get<double>();
            e.result.p_left = t.at("p_left").get<double>();
            e.result.p_right = t.at("p_right").get<double>();
            e.result.direction_hint = parse_direction(t.at("direction").get<std::string>());
            if (!t.at("mc_p").is_null()) e.mc_p = t["mc_p"].get<double>();
            r.tests.push_back(std::move(e));
        }
        r.notes = j.at("notes").get<std::vector<std::string>>();
        r.mc = j.at("metadata").at("mc").get<std::size_t>();
        r.seed = j.at("metadata").at("seed").get<std::uint64_t>();
        return r;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed report: ") + e.what());
    }
}

}  // namespace segstat
