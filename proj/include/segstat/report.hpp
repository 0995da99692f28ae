#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "segstat/nn_engine.hpp"
#include "segstat/nnct.hpp"
#include "segstat/point_set.hpp"
#include "segstat/test_result.hpp"

namespace segstat {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "segstat.nnct-report";
inline constexpr int kReportSchemaVersion = 1;

struct AnalysisOptions {
    EdgeCorrection correction = EdgeCorrection::none;
    /// Inner buffer width is E[W] + k sd[W] at the estimated intensity.
    unsigned buffer_k = 1;
    std::optional<Rect> core_region;
    bool qr_adjust = false;
    /// Randomization p-values from this many relabelings; 0 disables them.
    std::size_t mc = 0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct TestEntry {
    std::string name;
    TestResult result;
    std::optional<double> mc_p;
};

struct AnalysisReport {
    std::vector<std::string> class_names;
    NNCT table = NNCT::from_counts({{0}});
    std::size_t num_points = 0;
    EdgeCorrection correction = EdgeCorrection::none;
    std::optional<double> buffer_width;
    QRStats qr;            // observed on the (corrected) graph
    bool qr_adjusted = false;
    double q_used = 0.0;   // values fed to Dixon's moments
    double r_used = 0.0;
    std::vector<TestEntry> tests;
    std::vector<std::string> notes;
    std::size_t mc = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const AnalysisReport&, const AnalysisReport&);
};

/// Builds the graph, table, Q/R and every applicable test. Tests that are
/// undefined for the data (zero margins, singular covariance, more than two
/// classes for Pielou) are skipped with a note.
AnalysisReport analyze(const PointSet& points, const AnalysisOptions& options);

/// p-value with four decimals, "<.0001" below that.
std::string format_p(double p);

std::string format_text(const AnalysisReport& report);
nlohmann::json to_json(const AnalysisReport& report);
/// Inverse of to_json; throws ValidationError on a schema mismatch.
AnalysisReport report_from_json(const nlohmann::json& j);

}  // namespace segstat
