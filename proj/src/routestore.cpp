#include "vibroute/routestore.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vibroute/numio.hpp"

namespace vibroute {

namespace {

constexpr std::string_view kRecordHeader = "vibroute-route v1";
constexpr std::string_view kRecordSeparator = "---";
constexpr std::string_view kIndexName = "index.json";

int severity(Area a) { return static_cast<int>(a); }

void require_valid_id(const std::string& id) {
    if (id.empty()) throw DomainError("route id must not be empty");
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '-' || c == '_' || c == '.';
        if (!ok) {
            throw DomainError("route id '" + id + "' may only contain [A-Za-z0-9._-]");
        }
    }
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file_atomic(const std::filesystem::path& file, const std::string& content) {
    const std::filesystem::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

std::string header_line(const std::string& key, const std::string& value) {
    return key + ": " + value + "\n";
}

std::string expect_header(std::istringstream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("route document truncated, expected '" + key + ":'");
    const std::string prefix = key + ": ";
    if (!line.starts_with(prefix)) {
        throw ParseError("route document: expected '" + key + ":', got '" + line + "'");
    }
    return line.substr(prefix.size());
}

}  // namespace

RouteRecord make_route_record(std::string id, ClassifiedTrip trip, const Weights& w,
                              std::int64_t created_at) {
    if (trip.log.samples.empty()) throw DomainError("cannot build a route record from an empty trip");
    require_valid_id(id);
    RouteRecord r;
    r.id = std::move(id);
    r.origin = GeoPoint{trip.log.samples.front().lat, trip.log.samples.front().lon};
    r.destination = GeoPoint{trip.log.samples.back().lat, trip.log.samples.back().lon};
    r.metrics = route_metrics(area_durations(trip), w);
    r.weights = w;
    r.created_at = created_at < 0 ? trip.log.samples.back().t : created_at;
    r.trip = std::move(trip);
    return r;
}

void validate_record(const RouteRecord& record) {
    require_valid_id(record.id);
    if (record.trip.log.samples.empty()) throw DomainError("route record with empty trip");
    if (record.trip.areas.size() != record.trip.log.samples.size()) {
        throw DomainError("route record labels do not cover every sample");
    }
    const GeoPoint origin{record.trip.log.samples.front().lat, record.trip.log.samples.front().lon};
    const GeoPoint destination{record.trip.log.samples.back().lat, record.trip.log.samples.back().lon};
    if (!(origin == record.origin)) {
        throw DomainError("route record origin does not match the first sample");
    }
    if (!(destination == record.destination)) {
        throw DomainError("route record destination does not match the last sample");
    }
    const RouteMetrics recomputed = route_metrics(area_durations(record.trip), record.weights);
    if (!(recomputed == record.metrics)) {
        throw DomainError("route record metrics are inconsistent with its trip (stored index " +
                          format_double(record.metrics.index) + ", recomputed " +
                          format_double(recomputed.index) + "; stored score " +
                          format_double(record.metrics.score) + ", recomputed " +
                          format_double(recomputed.score) + ")");
    }
}

std::string serialize_record(const RouteRecord& record) {
    validate_record(record);
    std::string out;
    out += kRecordHeader;
    out += '\n';
    out += header_line("id", record.id);
    out += header_line("created_at", format_int(record.created_at));
    out += header_line("weights", format_double(record.weights.w1) + "," +
                                      format_double(record.weights.w2) + "," +
                                      format_double(record.weights.w3));
    out += header_line("origin", format_double(record.origin.lat) + " " + format_double(record.origin.lon));
    out += header_line("destination", format_double(record.destination.lat) + " " +
                                          format_double(record.destination.lon));
    out += header_line("t1", format_int(record.metrics.durations.t1));
    out += header_line("t2", format_int(record.metrics.durations.t2));
    out += header_line("t3", format_int(record.metrics.durations.t3));
    out += header_line("index", format_double(record.metrics.index));
    out += header_line("score", format_double(record.metrics.score));
    out += kRecordSeparator;
    out += '\n';
    out += serialize_csv(record.trip);
    return out;
}

RouteRecord parse_record(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kRecordHeader) {
        throw ParseError("not a vibroute route document (missing '" + std::string(kRecordHeader) + "')");
    }
    RouteRecord r;
    r.id = expect_header(in, "id");
    r.created_at = parse_int(expect_header(in, "created_at"), "created_at");

    const std::string weights = expect_header(in, "weights");
    std::istringstream ws(weights);
    std::string part;
    std::vector<double> wv;
    while (std::getline(ws, part, ',')) wv.push_back(parse_double(part, "weights"));
    if (wv.size() != 3) throw ParseError("route document: expected 3 weights");
    r.weights = Weights{wv[0], wv[1], wv[2]};

    auto parse_point = [](const std::string& text_pt, const std::string& field) {
        std::istringstream ps(text_pt);
        std::string a, b;
        if (!(ps >> a >> b)) throw ParseError("route document: invalid " + field);
        return GeoPoint{parse_double(a, field + ".lat"), parse_double(b, field + ".lon")};
    };
    r.origin = parse_point(expect_header(in, "origin"), "origin");
    r.destination = parse_point(expect_header(in, "destination"), "destination");
    r.metrics.durations.t1 = parse_int(expect_header(in, "t1"), "t1");
    r.metrics.durations.t2 = parse_int(expect_header(in, "t2"), "t2");
    r.metrics.durations.t3 = parse_int(expect_header(in, "t3"), "t3");
    r.metrics.index = parse_double(expect_header(in, "index"), "index");
    r.metrics.score = parse_double(expect_header(in, "score"), "score");

    if (!std::getline(in, line) || line != kRecordSeparator) {
        throw ParseError("route document: expected '" + std::string(kRecordSeparator) +
                         "' before the telemetry CSV");
    }
    std::string csv((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    r.trip = parse_tagged_csv(csv);
    validate_record(r);
    return r;
}

RouteStore::RouteStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_ / "routes", ec);
    if (ec) throw IoError("cannot create store directory " + dir_.string() + ": " + ec.message());
}

std::filesystem::path RouteStore::record_path(const std::string& id) const {
    return dir_ / "routes" / (id + ".route");
}

std::string RouteStore::put(const RouteRecord& record) {
    validate_record(record);
    const std::string doc = serialize_record(record);
    const std::filesystem::path path = record_path(record.id);
    if (std::filesystem::exists(path)) {
        if (read_file(path) == doc) return record.id;  // idempotent
        throw DomainError("route id '" + record.id + "' already stored with different content");
    }
    write_file_atomic(path, doc);
    rewrite_index();
    return record.id;
}

bool RouteStore::contains(const std::string& id) const {
    return std::filesystem::exists(record_path(id));
}

RouteRecord RouteStore::get(const std::string& id) const {
    const std::filesystem::path path = record_path(id);
    if (!std::filesystem::exists(path)) throw DomainError("no route with id '" + id + "'");
    return parse_record(read_file(path));
}

std::vector<std::string> RouteStore::ids() const {
    std::vector<std::string> out;
    const std::filesystem::path routes = dir_ / "routes";
    if (!std::filesystem::exists(routes)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(routes)) {
        if (entry.path().extension() == ".route") out.push_back(entry.path().stem().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

void RouteStore::rewrite_index() const {
    nlohmann::ordered_json j;
    j["format"] = "vibroute-store";
    j["version"] = 1;
    nlohmann::ordered_json routes = nlohmann::ordered_json::array();
    for (const std::string& id : ids()) {
        const RouteRecord r = get(id);
        routes.push_back({{"id", r.id},
                          {"file", "routes/" + r.id + ".route"},
                          {"origin", {r.origin.lat, r.origin.lon}},
                          {"destination", {r.destination.lat, r.destination.lon}},
                          {"index", r.metrics.index},
                          {"score", r.metrics.score}});
    }
    j["routes"] = routes;
    write_file_atomic(dir_ / kIndexName, j.dump(2) + "\n");
}

std::vector<RouteRecord> RouteStore::find_candidates(const GeoPoint& origin,
                                                     const GeoPoint& destination,
                                                     double radius_m) const {
    if (!(radius_m > 0.0)) throw DomainError("radius must be > 0");
    std::vector<RouteRecord> out;
    for (const std::string& id : ids()) {
        RouteRecord r = get(id);
        if (haversine_m(r.origin, origin) <= radius_m &&
            haversine_m(r.destination, destination) <= radius_m) {
            out.push_back(std::move(r));
        }
    }
    return out;
}

RouteComparison RouteStore::recommend(const GeoPoint& origin, const GeoPoint& destination,
                                      const Weights& w, double radius_m) const {
    validate_weights(w);
    const std::vector<RouteRecord> candidates = find_candidates(origin, destination, radius_m);
    if (candidates.empty()) {
        throw DomainError("no known route between the queried endpoints");
    }
    if (candidates.size() == 1) {
        RouteComparison out;
        RankedRoute r;
        r.id = candidates.front().id;
        r.metrics = route_metrics(area_durations(candidates.front().trip), w);
        r.shortest = true;
        r.preferred = true;
        out.ranked.push_back(std::move(r));
        out.recommended = candidates.front().id;
        out.no_alternative = true;
        return out;
    }
    std::vector<RouteCandidate> entries;
    entries.reserve(candidates.size());
    for (const RouteRecord& r : candidates) {
        entries.push_back(RouteCandidate{r.id, area_durations(r.trip), std::nullopt});
    }
    return compare_routes(entries, w);
}

std::vector<AlertEvent> alert_replay(const ClassifiedTrip& trip, std::int64_t lookahead) {
    if (lookahead < 0) throw DomainError("lookahead must be >= 0");
    if (trip.areas.size() != trip.log.samples.size()) {
        throw DomainError("trip labels do not cover every sample");
    }
    std::vector<AlertEvent> out;
    if (trip.log.samples.empty()) return out;
    const std::int64_t start = trip.log.samples.front().t;
    int prev = -1;  // below every severity, so a trip starting in A2/A3 alerts
    for (std::size_t i = 0; i < trip.areas.size(); ++i) {
        const Area zone = trip.areas[i];
        if (severity(zone) > prev && zone != Area::A1) {
            const std::int64_t entry = trip.log.samples[i].t;
            out.push_back(AlertEvent{std::max(start, entry - lookahead), entry, zone});
        }
        prev = severity(zone);
    }
    return out;
}

std::string to_geojson(const ClassifiedTrip& trip) {
    if (trip.areas.size() != trip.log.samples.size()) {
        throw DomainError("trip labels do not cover every sample");
    }
    nlohmann::ordered_json features = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < trip.log.samples.size(); ++i) {
        const TelemetrySample& s = trip.log.samples[i];
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "Point"}, {"coordinates", {s.lon, s.lat}}}},
                            {"properties",
                             {{"area", to_string(trip.areas[i])}, {"t", s.t}, {"v_kmh", s.v}}}});
    }
    nlohmann::ordered_json j;
    j["type"] = "FeatureCollection";
    j["features"] = features;
    return j.dump(2);
}

}  // namespace vibroute
