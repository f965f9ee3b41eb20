#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vibroute/classifier.hpp"
#include "vibroute/features.hpp"
#include "vibroute/geo.hpp"
#include "vibroute/routestore.hpp"
#include "vibroute/scoring.hpp"
#include "vibroute/telemetry.hpp"

namespace py = pybind11;
using namespace vibroute;

namespace {

std::vector<ProfileEntry> to_profile(const std::vector<std::pair<Area, std::int64_t>>& entries) {
    std::vector<ProfileEntry> out;
    out.reserve(entries.size());
    for (const auto& [area, seconds] : entries) out.push_back(ProfileEntry{area, seconds});
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Road-vibration route toolkit: mobility-area classification of 1 Hz telemetry and "
              "severity-weighted route comparison.";

    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    // --- telemetry ----------------------------------------------------------

    py::enum_<Area>(m, "Area")
        .value("A1", Area::A1)
        .value("A2", Area::A2)
        .value("A3", Area::A3);

    py::class_<TelemetrySample>(m, "TelemetrySample")
        .def(py::init<>())
        .def(py::init([](std::int64_t t, double lat, double lon, double v, double ax, double ay,
                         double az) {
                 return TelemetrySample{t, lat, lon, v, ax, ay, az};
             }),
             py::arg("t"), py::arg("lat"), py::arg("lon"), py::arg("v"), py::arg("ax"),
             py::arg("ay"), py::arg("az"))
        .def_readwrite("t", &TelemetrySample::t)
        .def_readwrite("lat", &TelemetrySample::lat)
        .def_readwrite("lon", &TelemetrySample::lon)
        .def_readwrite("v", &TelemetrySample::v)
        .def_readwrite("ax", &TelemetrySample::ax)
        .def_readwrite("ay", &TelemetrySample::ay)
        .def_readwrite("az", &TelemetrySample::az)
        .def(py::self == py::self)
        .def("__repr__", [](const TelemetrySample& s) {
            return "TelemetrySample(t=" + std::to_string(s.t) + ", v=" + std::to_string(s.v) + ")";
        });

    py::class_<TelemetryLog>(m, "TelemetryLog")
        .def(py::init<>())
        .def_readwrite("samples", &TelemetryLog::samples)
        .def_readwrite("meta", &TelemetryLog::meta)
        .def("__len__", [](const TelemetryLog& log) { return log.samples.size(); })
        .def(py::self == py::self);

    py::class_<TaggedLog>(m, "TaggedLog")
        .def(py::init<>())
        .def_readwrite("log", &TaggedLog::log)
        .def_readwrite("areas", &TaggedLog::areas)
        .def("__len__", [](const TaggedLog& t) { return t.log.samples.size(); })
        .def(py::self == py::self);

    py::class_<Segment>(m, "Segment")
        .def_readonly("begin", &Segment::begin)
        .def_readonly("end", &Segment::end)
        .def("__len__", &Segment::size)
        .def(py::self == py::self);

    py::class_<ParsedCsv>(m, "ParsedCsv")
        .def_readonly("log", &ParsedCsv::log)
        .def_readonly("areas", &ParsedCsv::areas);

    m.def("parse_csv", py::overload_cast<const std::string&>(&parse_csv), py::arg("text"),
          "Parse telemetry CSV text (header t,lat,lon,v_kmh,ax,ay,az[,area]).");
    m.def("load_csv", &load_csv, py::arg("path"));
    m.def("parse_tagged_csv", &parse_tagged_csv, py::arg("text"));
    m.def("load_tagged_csv", &load_tagged_csv, py::arg("path"));
    m.def("serialize_csv", py::overload_cast<const TelemetryLog&>(&serialize_csv), py::arg("log"));
    m.def("serialize_csv", py::overload_cast<const TaggedLog&>(&serialize_csv), py::arg("tagged"));
    m.def("save_csv", &save_csv, py::arg("path"), py::arg("csv_text"));
    m.def("segment", &segment, py::arg("log"), py::arg("max_gap") = 2,
          "Split a log into contiguous segments wherever the timestamp gap exceeds max_gap.");

    py::class_<AreaNoise>(m, "AreaNoise")
        .def(py::init<>())
        .def_readwrite("ax_sigma", &AreaNoise::ax_sigma)
        .def_readwrite("ay_sigma", &AreaNoise::ay_sigma)
        .def_readwrite("az_sigma", &AreaNoise::az_sigma)
        .def_readwrite("v_mean", &AreaNoise::v_mean)
        .def_readwrite("v_sigma", &AreaNoise::v_sigma);

    py::class_<NoiseSpec>(m, "NoiseSpec")
        .def(py::init<>())
        .def_readwrite("area", &NoiseSpec::area)
        .def_readwrite("az_mean", &NoiseSpec::az_mean)
        .def_readwrite("bump_rate", &NoiseSpec::bump_rate)
        .def_readwrite("bump_min", &NoiseSpec::bump_min)
        .def_readwrite("bump_max", &NoiseSpec::bump_max);

    py::class_<PathSpec>(m, "PathSpec")
        .def(py::init<>())
        .def(py::init([](double origin_lat, double origin_lon, double dest_lat, double dest_lon) {
                 return PathSpec{origin_lat, origin_lon, dest_lat, dest_lon};
             }),
             py::arg("origin_lat"), py::arg("origin_lon"), py::arg("dest_lat"), py::arg("dest_lon"))
        .def_readwrite("origin_lat", &PathSpec::origin_lat)
        .def_readwrite("origin_lon", &PathSpec::origin_lon)
        .def_readwrite("dest_lat", &PathSpec::dest_lat)
        .def_readwrite("dest_lon", &PathSpec::dest_lon);

    m.def(
        "synth_route",
        [](const std::vector<std::pair<Area, std::int64_t>>& profile, std::uint64_t seed,
           const NoiseSpec& noise, const PathSpec& path, std::int64_t start_time) {
            return synth_route(to_profile(profile), noise, seed, path, start_time);
        },
        py::arg("profile"), py::arg("seed"), py::arg("noise") = NoiseSpec{},
        py::arg("path") = PathSpec{}, py::arg("start_time") = 1000000,
        "Deterministic synthetic tagged route; profile is a list of (Area, seconds).");
    m.def("parse_profile", [](const std::string& text) { return parse_profile(text); },
          py::arg("text"));

    // --- features -----------------------------------------------------------

    py::enum_<FeatureVariant>(m, "FeatureVariant")
        .value("RAW_XYZ_V", FeatureVariant::raw_xyz_v)
        .value("RAW_XZ_V", FeatureVariant::raw_xz_v)
        .value("RAW_YZ_V", FeatureVariant::raw_yz_v)
        .value("STD_YZ_V", FeatureVariant::std_yz_v);

    py::class_<FeatureConfig>(m, "FeatureConfig")
        .def(py::init<>())
        .def(py::init([](FeatureVariant variant, int buffer) {
                 return FeatureConfig{variant, buffer};
             }),
             py::arg("variant"), py::arg("buffer") = 29)
        .def_readwrite("variant", &FeatureConfig::variant)
        .def_readwrite("buffer", &FeatureConfig::buffer)
        .def(py::self == py::self);

    py::class_<FeatureVector>(m, "FeatureVector")
        .def_readonly("values", &FeatureVector::values)
        .def_readonly("center_index", &FeatureVector::center_index);

    py::class_<WindowStat>(m, "WindowStat")
        .def_readonly("center_index", &WindowStat::center_index)
        .def_readonly("stddev", &WindowStat::stddev);

    m.def(
        "window_stddev",
        [](const std::vector<double>& series, int buffer) { return window_stddev(series, buffer); },
        py::arg("series"), py::arg("buffer"),
        "Sample standard deviation over centered windows of one segment.");
    m.def(
        "build_features",
        [](const TelemetryLog& log, const std::vector<Segment>& segments, const FeatureConfig& cfg) {
            return build_features(log, segments, cfg);
        },
        py::arg("log"), py::arg("segments"), py::arg("cfg"));
    m.def(
        "center_labels",
        [](const std::vector<FeatureVector>& features, const std::vector<Area>& areas) {
            return center_labels(features, areas);
        },
        py::arg("features"), py::arg("areas"));

    py::class_<NormalizationRanges>(m, "NormalizationRanges")
        .def_readonly("minmax", &NormalizationRanges::minmax)
        .def(py::self == py::self);

    m.def(
        "fit_ranges",
        [](const std::vector<FeatureVector>& features) { return fit_ranges(features); },
        py::arg("features"));
    m.def(
        "apply_ranges",
        [](const NormalizationRanges& ranges, const std::vector<double>& values) {
            return apply_ranges(ranges, values);
        },
        py::arg("ranges"), py::arg("values"));
    m.def(
        "serialize_features",
        [](const TelemetryLog& log, const std::vector<FeatureVector>& features,
           const std::vector<Area>& labels) { return serialize_features(log, features, labels); },
        py::arg("log"), py::arg("features"), py::arg("labels") = std::vector<Area>{},
        "Feature dump CSV: center_t,f1..fn[,area].");

    // --- classifier ---------------------------------------------------------

    py::class_<LabeledPatterns>(m, "LabeledPatterns")
        .def_readonly("dim", &LabeledPatterns::dim)
        .def_readonly("values", &LabeledPatterns::values)
        .def_readonly("labels", &LabeledPatterns::labels)
        .def("count", &LabeledPatterns::count);

    m.def(
        "make_patterns",
        [](const std::vector<FeatureVector>& features, const std::vector<Area>& labels) {
            return make_patterns(features, labels);
        },
        py::arg("features"), py::arg("labels"));

    py::class_<PnnModel>(m, "PnnModel")
        .def_readonly("cfg", &PnnModel::cfg)
        .def_readonly("ranges", &PnnModel::ranges)
        .def_readonly("sigma", &PnnModel::sigma)
        .def_readonly("priors", &PnnModel::priors)
        .def_readonly("costs", &PnnModel::costs)
        .def_readonly("patterns", &PnnModel::patterns);

    py::class_<Classification>(m, "Classification")
        .def_readonly("label", &Classification::label)
        .def_readonly("posterior", &Classification::posterior);

    m.def("validate_model", &validate_model, py::arg("model"));
    m.def(
        "class_density",
        [](const PnnModel& model, const std::vector<double>& x_norm, Area k) {
            return class_density(model, x_norm, k);
        },
        py::arg("model"), py::arg("x_norm"), py::arg("k"),
        "Mean Gaussian kernel of class k at a normalized feature vector.");
    m.def(
        "classify",
        [](const PnnModel& model, const std::vector<double>& x_raw) { return classify(model, x_raw); },
        py::arg("model"), py::arg("x_raw"),
        "Label and per-class posteriors for a raw-scale feature vector.");
    m.def("jackknife_accuracy", &jackknife_accuracy, py::arg("training"), py::arg("sigma"),
          py::arg("priors") = std::array<double, 3>{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
          py::arg("costs") = std::array<double, 3>{1.0, 1.0, 1.0},
          "Leave-one-out accuracy of the kernel classifier at a fixed sigma.");

    py::class_<SigmaGrid>(m, "SigmaGrid")
        .def(py::init<>())
        .def_readwrite("coarse_count", &SigmaGrid::coarse_count)
        .def_readwrite("min_sigma", &SigmaGrid::min_sigma)
        .def_readwrite("max_sigma", &SigmaGrid::max_sigma)
        .def_readwrite("refine_step", &SigmaGrid::refine_step)
        .def_readwrite("max_refine_steps", &SigmaGrid::max_refine_steps);

    py::class_<SigmaSelection>(m, "SigmaSelection")
        .def_readonly("sigma", &SigmaSelection::sigma)
        .def_readonly("accuracy", &SigmaSelection::accuracy);

    m.def("select_sigma", &select_sigma, py::arg("training"), py::arg("grid") = SigmaGrid{},
          "Sigma maximizing jackknife accuracy; ties break toward smaller sigma.");

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("model", &TrainResult::model)
        .def_readonly("sigma", &TrainResult::sigma)
        .def_readonly("loo_accuracy", &TrainResult::loo_accuracy)
        .def_readonly("pattern_count", &TrainResult::pattern_count);

    m.def(
        "train",
        [](const std::vector<TaggedLog>& tagged, const FeatureConfig& cfg, std::int64_t max_gap,
           const SigmaGrid& grid) { return train(tagged, cfg, max_gap, grid); },
        py::arg("tagged"), py::arg("cfg"), py::arg("max_gap") = 2, py::arg("grid") = SigmaGrid{},
        "Build features, fit ranges, select sigma by jackknifing, assemble the model.");

    py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
        .def_readonly("counts", &ConfusionMatrix::counts)
        .def("row_total", &ConfusionMatrix::row_total)
        .def("total", &ConfusionMatrix::total)
        .def("trace", &ConfusionMatrix::trace)
        .def("accuracy", &ConfusionMatrix::accuracy)
        .def("row_percent", &ConfusionMatrix::row_percent);

    m.def(
        "evaluate",
        [](const PnnModel& model, const std::vector<FeatureVector>& features,
           const std::vector<Area>& labels) { return evaluate(model, features, labels); },
        py::arg("model"), py::arg("features"), py::arg("labels"));
    m.def("evaluate_log", &evaluate_log, py::arg("model"), py::arg("tagged"), py::arg("max_gap") = 2);
    m.def("render_confusion_text", &render_confusion_text, py::arg("matrix"));
    m.def("confusion_to_json", &confusion_to_json, py::arg("matrix"));
    m.def("classify_trip", &classify_trip, py::arg("model"), py::arg("log"), py::arg("max_gap") = 2,
          "Classify every sample of a log, padding edges inside each segment.");

    m.def("serialize_model", &serialize_model, py::arg("model"));
    m.def("parse_model", &parse_model, py::arg("text"));
    m.def("save_model", &save_model, py::arg("path"), py::arg("model"));
    m.def("load_model", &load_model, py::arg("path"));

    // --- scoring --------------------------------------------------------------

    py::class_<Weights>(m, "Weights")
        .def(py::init<>())
        .def(py::init([](double w1, double w2, double w3) { return Weights{w1, w2, w3}; }),
             py::arg("w1"), py::arg("w2"), py::arg("w3"))
        .def_readwrite("w1", &Weights::w1)
        .def_readwrite("w2", &Weights::w2)
        .def_readwrite("w3", &Weights::w3)
        .def(py::self == py::self);

    py::class_<AreaDurations>(m, "AreaDurations")
        .def(py::init<>())
        .def(py::init([](std::int64_t t1, std::int64_t t2, std::int64_t t3) {
                 return AreaDurations{t1, t2, t3};
             }),
             py::arg("t1"), py::arg("t2"), py::arg("t3"))
        .def_readwrite("t1", &AreaDurations::t1)
        .def_readwrite("t2", &AreaDurations::t2)
        .def_readwrite("t3", &AreaDurations::t3)
        .def("total", &AreaDurations::total)
        .def(py::self == py::self)
        .def("__repr__", [](const AreaDurations& d) {
            return "AreaDurations(t1=" + std::to_string(d.t1) + ", t2=" + std::to_string(d.t2) +
                   ", t3=" + std::to_string(d.t3) + ")";
        });

    m.def("area_durations", &area_durations, py::arg("trip"));
    m.def("route_index", &route_index, py::arg("durations"), py::arg("weights") = Weights{},
          "Severity-weighted travel time: w1*t1 + w2*t2 + w3*t3.");
    m.def("route_score", &route_score, py::arg("durations"), py::arg("weights") = Weights{},
          "Index divided by total time; in [1, 2] with default weights.");

    py::class_<RouteMetrics>(m, "RouteMetrics")
        .def_readonly("durations", &RouteMetrics::durations)
        .def_readonly("index", &RouteMetrics::index)
        .def_readonly("score", &RouteMetrics::score)
        .def(py::self == py::self);

    m.def("route_metrics", &route_metrics, py::arg("durations"), py::arg("weights") = Weights{});

    py::class_<RouteCandidate>(m, "RouteCandidate")
        .def(py::init([](std::string id, const AreaDurations& durations,
                         std::optional<double> reference_score) {
                 return RouteCandidate{std::move(id), durations, reference_score};
             }),
             py::arg("id"), py::arg("durations"), py::arg("reference_score") = std::nullopt)
        .def_readwrite("id", &RouteCandidate::id)
        .def_readwrite("durations", &RouteCandidate::durations)
        .def_readwrite("reference_score", &RouteCandidate::reference_score);

    py::class_<RankedRoute>(m, "RankedRoute")
        .def_readonly("id", &RankedRoute::id)
        .def_readonly("metrics", &RankedRoute::metrics)
        .def_readonly("reference_score", &RankedRoute::reference_score)
        .def_readonly("shortest", &RankedRoute::shortest)
        .def_readonly("preferred", &RankedRoute::preferred)
        .def_readonly("score_deviates", &RankedRoute::score_deviates);

    py::class_<RouteComparison>(m, "RouteComparison")
        .def_readonly("ranked", &RouteComparison::ranked)
        .def_readonly("recommended", &RouteComparison::recommended)
        .def_readonly("no_alternative", &RouteComparison::no_alternative);

    m.def(
        "compare_routes",
        [](const std::vector<RouteCandidate>& candidates, const Weights& w) {
            return compare_routes(candidates, w);
        },
        py::arg("candidates"), py::arg("weights") = Weights{},
        "Rank candidates by ascending index; the first is recommended.");
    m.def("render_comparison_text", &render_comparison_text, py::arg("comparison"),
          py::arg("weights") = Weights{});
    m.def("comparison_to_json", &comparison_to_json, py::arg("comparison"),
          py::arg("weights") = Weights{});

    // --- route store ------------------------------------------------------------

    py::class_<GeoPoint>(m, "GeoPoint")
        .def(py::init<>())
        .def(py::init([](double lat, double lon) { return GeoPoint{lat, lon}; }), py::arg("lat"),
             py::arg("lon"))
        .def_readwrite("lat", &GeoPoint::lat)
        .def_readwrite("lon", &GeoPoint::lon)
        .def(py::self == py::self);

    m.def("haversine_m", &haversine_m, py::arg("a"), py::arg("b"),
          "Great-circle distance in meters.");

    py::class_<RouteRecord>(m, "RouteRecord")
        .def_readonly("id", &RouteRecord::id)
        .def_readonly("origin", &RouteRecord::origin)
        .def_readonly("destination", &RouteRecord::destination)
        .def_readonly("trip", &RouteRecord::trip)
        .def_readonly("metrics", &RouteRecord::metrics)
        .def_readonly("weights", &RouteRecord::weights)
        .def_readonly("created_at", &RouteRecord::created_at)
        .def(py::self == py::self);

    m.def("make_route_record", &make_route_record, py::arg("id"), py::arg("trip"),
          py::arg("weights") = Weights{}, py::arg("created_at") = -1);
    m.def("validate_record", &validate_record, py::arg("record"));
    m.def("serialize_record", &serialize_record, py::arg("record"));
    m.def("parse_record", &parse_record, py::arg("text"));

    py::class_<RouteStore>(m, "RouteStore")
        .def(py::init<std::filesystem::path>(), py::arg("dir"))
        .def_property_readonly("dir", &RouteStore::dir)
        .def("put", &RouteStore::put, py::arg("record"))
        .def("get", &RouteStore::get, py::arg("id"))
        .def("contains", &RouteStore::contains, py::arg("id"))
        .def("ids", &RouteStore::ids)
        .def("find_candidates", &RouteStore::find_candidates, py::arg("origin"),
             py::arg("destination"), py::arg("radius_m") = 100.0)
        .def("recommend", &RouteStore::recommend, py::arg("origin"), py::arg("destination"),
             py::arg("weights") = Weights{}, py::arg("radius_m") = 100.0);

    py::class_<AlertEvent>(m, "AlertEvent")
        .def_readonly("t_alert", &AlertEvent::t_alert)
        .def_readonly("t_entry", &AlertEvent::t_entry)
        .def_readonly("zone", &AlertEvent::zone)
        .def(py::self == py::self);

    m.def("alert_replay", &alert_replay, py::arg("trip"), py::arg("lookahead") = 5,
          "Alert events ahead of every entry into a higher-vibration zone.");
    m.def("to_geojson", &to_geojson, py::arg("trip"),
          "FeatureCollection with one point feature per sample.");

#ifdef VIBROUTE_VERSION
    m.attr("__version__") = VIBROUTE_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
