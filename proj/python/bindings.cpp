#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "segstat/cli.hpp"
#include "segstat/csv_io.hpp"
#include "segstat/dixon.hpp"
#include "segstat/error.hpp"
#include "segstat/nn_engine.hpp"
#include "segstat/nnct.hpp"
#include "segstat/null_models.hpp"
#include "segstat/pielou.hpp"
#include "segstat/report.hpp"
#include "segstat/ripley.hpp"

namespace py = pybind11;
using namespace segstat;

namespace {

std::vector<Point> to_points(const std::vector<std::pair<double, double>>& xy) {
    std::vector<Point> out;
    out.reserve(xy.size());
    for (const auto& [x, y] : xy) out.push_back({x, y});
    return out;
}

std::vector<std::pair<double, double>> from_points(std::span<const Point> pts) {
    std::vector<std::pair<double, double>> out;
    out.reserve(pts.size());
    for (const Point& p : pts) out.emplace_back(p.x, p.y);
    return out;
}

Rect to_rect(const std::tuple<double, double, double, double>& r) {
    return {std::get<0>(r), std::get<1>(r), std::get<2>(r), std::get<3>(r)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Nearest-neighbor contingency table tests of spatial segregation";
    m.attr("__version__") = kVersion;

    static py::exception<Error> base_error(m, "SegstatError", PyExc_RuntimeError);
    static py::exception<ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
    static py::exception<DegenerateError> degenerate_error(m, "DegenerateError", base_error.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ValidationError& e) {
            py::set_error(validation_error, e.what());
        } catch (const DegenerateError& e) {
            py::set_error(degenerate_error, e.what());
        } catch (const Error& e) {
            py::set_error(base_error, e.what());
        }
    });

    py::enum_<EdgeCorrection>(m, "EdgeCorrection")
        .value("none", EdgeCorrection::none)
        .value("toroidal", EdgeCorrection::toroidal)
        .value("outer_buffer", EdgeCorrection::outer_buffer)
        .value("inner_buffer", EdgeCorrection::inner_buffer);

    py::class_<PointSet>(m, "PointSet")
        .def(py::init([](const std::vector<std::pair<double, double>>& xy,
                         std::vector<ClassId> labels,
                         std::optional<std::tuple<double, double, double, double>> region,
                         std::vector<std::string> class_names) {
                 auto pts = to_points(xy);
                 std::optional<std::size_t> q;
                 if (!class_names.empty()) q = class_names.size();
                 if (region) return PointSet(std::move(pts), std::move(labels), to_rect(*region), q,
                                             std::move(class_names));
                 return PointSet::with_bounding_box(std::move(pts), std::move(labels), q,
                                                    std::move(class_names));
             }),
             py::arg("coords"), py::arg("labels"), py::arg("region") = py::none(),
             py::arg("class_names") = std::vector<std::string>{})
        .def("__len__", &PointSet::size)
        .def_property_readonly("coords", [](const PointSet& p) { return from_points(p.coords()); })
        .def_property_readonly("labels", [](const PointSet& p) {
            return std::vector<ClassId>(p.labels().begin(), p.labels().end());
        })
        .def_property_readonly("class_names", &PointSet::class_names)
        .def_property_readonly("num_classes", &PointSet::num_classes)
        .def_property_readonly("region", [](const PointSet& p) {
            const Rect& r = p.region();
            return std::make_tuple(r.xmin, r.ymin, r.xmax, r.ymax);
        });

    m.def("read_points_csv",
          [](const std::string& path, std::optional<std::tuple<double, double, double, double>> region) {
              std::optional<Rect> r;
              if (region) r = to_rect(*region);
              return read_points_csv(path, r);
          },
          py::arg("path"), py::arg("region") = py::none());

    py::class_<NNGraph>(m, "NNGraph")
        .def_readonly("nn_index", &NNGraph::nn_index)
        .def_readonly("distances", &NNGraph::distances)
        .def_readonly("base_mask", &NNGraph::base_mask)
        .def_readonly("dest_mask", &NNGraph::dest_mask)
        .def_readonly("correction", &NNGraph::correction)
        .def("__len__", &NNGraph::size);

    m.def("build_nn_graph", &build_nn_graph, py::arg("points"));
    m.def("build_corrected_graph",
          [](const PointSet& pts, EdgeCorrection c,
             std::optional<std::tuple<double, double, double, double>> core,
             std::optional<double> width) {
              std::optional<Rect> r;
              if (core) r = to_rect(*core);
              return build_corrected_graph(pts, c, r, width);
          },
          py::arg("points"), py::arg("correction"), py::arg("core_region") = py::none(),
          py::arg("buffer_width") = py::none());
    m.def("inner_buffer_width", &inner_buffer_width, py::arg("intensity"), py::arg("k"));

    py::class_<QRStats>(m, "QRStats")
        .def(py::init([](double q, double r) { return QRStats{q, r, {}, std::nullopt}; }),
             py::arg("Q"), py::arg("R"))
        .def_readonly("Q", &QRStats::Q)
        .def_readonly("R", &QRStats::R)
        .def_readonly("Qk", &QRStats::Qk)
        .def_readonly("Q_tilde", &QRStats::Q_tilde);
    m.def("compute_qr", &compute_qr, py::arg("graph"));
    m.def("qr_adjust", &qr_adjust, py::arg("n"));

    py::class_<NNCT>(m, "NNCT")
        .def_static("from_counts", &NNCT::from_counts, py::arg("counts"))
        .def_property_readonly("q", &NNCT::q)
        .def_property_readonly("n", &NNCT::n)
        .def("to_rows", &NNCT::to_rows)
        .def("__getitem__", [](const NNCT& t, std::pair<std::size_t, std::size_t> ij) {
            if (ij.first >= t.q() || ij.second >= t.q()) throw py::index_error();
            return t(ij.first, ij.second);
        })
        .def("__eq__", [](const NNCT& a, const NNCT& b) { return a == b; });
    m.def("build_nnct", py::overload_cast<const NNGraph&, const PointSet&>(&build_nnct),
          py::arg("graph"), py::arg("points"));

    py::enum_<Distribution>(m, "Distribution")
        .value("std_normal", Distribution::std_normal)
        .value("chi_square", Distribution::chi_square);
    py::enum_<Direction>(m, "Direction")
        .value("segregation", Direction::segregation)
        .value("association", Direction::association)
        .value("none", Direction::none);
    py::class_<TestResult>(m, "TestResult")
        .def_readonly("statistic", &TestResult::statistic)
        .def_readonly("distribution", &TestResult::distribution)
        .def_readonly("df", &TestResult::df)
        .def_readonly("p_two_sided", &TestResult::p_two_sided)
        .def_readonly("p_left", &TestResult::p_left)
        .def_readonly("p_right", &TestResult::p_right)
        .def_readonly("direction", &TestResult::direction_hint);

    m.def("pielou_chisq", &pielou_chisq, py::arg("table"), py::arg("yates") = false);
    m.def("pielou_z_rowwise", &pielou_z_rowwise, py::arg("table"));
    m.def("pielou_z_multinomial", &pielou_z_multinomial, py::arg("table"));

    py::class_<DixonMoments>(m, "DixonMoments")
        .def("mean", &DixonMoments::mean)
        .def("var", &DixonMoments::var)
        .def_readonly("cov_diag", &DixonMoments::cov_diag);
    m.def("dixon_moments", py::overload_cast<const NNCT&, const QRStats&>(&dixon_moments),
          py::arg("table"), py::arg("qr"));
    m.def("dixon_cell_test", &dixon_cell_test, py::arg("table"), py::arg("moments"), py::arg("i"),
          py::arg("j"));
    m.def("dixon_overall_test", &dixon_overall_test, py::arg("table"), py::arg("moments"));

    py::class_<SizeEstimate>(m, "SizeEstimate")
        .def_readonly("alpha_hat", &SizeEstimate::alpha_hat)
        .def_readonly("n_mc", &SizeEstimate::n_mc)
        .def_readonly("rejections", &SizeEstimate::rejections)
        .def_readonly("ci_low", &SizeEstimate::ci_low)
        .def_readonly("ci_high", &SizeEstimate::ci_high)
        .def_property_readonly("verdict",
                               [](const SizeEstimate& s) { return std::string(to_string(s.verdict)); });

    const auto make_spec = [](const std::string& null_kind, std::size_t n1, std::size_t n2,
                              const std::string& edge) {
        NullSpec spec;
        spec.kind = parse_null_kind(null_kind);
        spec.n1 = n1;
        spec.n2 = n2;
        spec.edge = parse_edge_correction(edge);
        return spec;
    };
    m.def("empirical_size",
          [make_spec](const std::string& null_kind, std::size_t n1, std::size_t n2,
                      const std::string& test, std::size_t n_mc, double alpha, std::uint64_t seed,
                      const std::string& edge, unsigned threads) {
              return empirical_size(make_spec(null_kind, n1, n2, edge), parse_test_kind(test), n_mc,
                                    alpha, seed, threads);
          },
          py::arg("null"), py::arg("n1"), py::arg("n2"), py::arg("test"), py::arg("n_mc") = 10000,
          py::arg("alpha") = 0.05, py::arg("seed") = 1, py::arg("edge") = "none",
          py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
    m.def("agreement_proportion",
          [make_spec](const std::string& null_kind, std::size_t n1, std::size_t n2,
                      const std::string& a, const std::string& b, std::size_t n_mc, double alpha,
                      std::uint64_t seed, const std::string& edge, unsigned threads) {
              return agreement_proportion(make_spec(null_kind, n1, n2, edge), parse_test_kind(a),
                                          parse_test_kind(b), n_mc, alpha, seed, threads);
          },
          py::arg("null"), py::arg("n1"), py::arg("n2"), py::arg("a"), py::arg("b"),
          py::arg("n_mc") = 10000, py::arg("alpha") = 0.05, py::arg("seed") = 1,
          py::arg("edge") = "none", py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
    m.def("random_labeling", &random_labeling, py::arg("num_locations"), py::arg("n1"),
          py::arg("n2"), py::arg("seed"));
    m.def("mc_randomization_test",
          [](const PointSet& pts, const NNGraph& graph, const std::string& test, std::size_t n_mc,
             std::uint64_t seed, unsigned threads) {
              return mc_randomization_test(pts, graph, parse_test_kind(test), n_mc, seed, threads);
          },
          py::arg("points"), py::arg("graph"), py::arg("test"), py::arg("n_mc") = 999,
          py::arg("seed") = 1, py::arg("threads") = 1);

    py::class_<LCurve>(m, "LCurve")
        .def_readonly("t_grid", &LCurve::t_grid)
        .def_readonly("l_minus_t", &LCurve::l_minus_t)
        .def_readonly("env_low", &LCurve::env_low)
        .def_readonly("env_high", &LCurve::env_high);
    m.def("l_univariate",
          [](const std::vector<std::pair<double, double>>& xy,
             const std::tuple<double, double, double, double>& region, double t_max,
             std::size_t n_steps, const std::string& edge) {
              return l_univariate(to_points(xy), to_rect(region), t_max, n_steps,
                                  parse_ripley_edge(edge));
          },
          py::arg("points"), py::arg("region"), py::arg("t_max"), py::arg("n_steps"),
          py::arg("edge") = "none");
    m.def("l_bivariate",
          [](const std::vector<std::pair<double, double>>& a,
             const std::vector<std::pair<double, double>>& b,
             const std::tuple<double, double, double, double>& region, double t_max,
             std::size_t n_steps, const std::string& edge) {
              return l_bivariate(to_points(a), to_points(b), to_rect(region), t_max, n_steps,
                                 parse_ripley_edge(edge));
          },
          py::arg("first"), py::arg("second"), py::arg("region"), py::arg("t_max"),
          py::arg("n_steps"), py::arg("edge") = "none");

    m.def("analyze_json",
          [](const PointSet& pts, const std::string& correction, bool qr_adjust, std::size_t mc,
             std::uint64_t seed) {
              AnalysisOptions o;
              o.correction = parse_edge_correction(correction);
              o.qr_adjust = qr_adjust;
              o.mc = mc;
              o.seed = seed;
              return to_json(analyze(pts, o)).dump();
          },
          py::arg("points"), py::arg("correction") = "none", py::arg("qr_adjust") = false,
          py::arg("mc") = 0, py::arg("seed") = 1);

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return std::make_tuple(code, out.str(), err.str());
    });
}
