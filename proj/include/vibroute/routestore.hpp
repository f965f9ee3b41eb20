#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vibroute/geo.hpp"
#include "vibroute/scoring.hpp"
#include "vibroute/telemetry.hpp"

namespace vibroute {

/// A classified trip persisted under an id, keyed by its endpoints. The
/// weights used for the stored metrics are kept so the metrics stay
/// recomputable from the trip.
struct RouteRecord {
    std::string id;
    GeoPoint origin;
    GeoPoint destination;
    ClassifiedTrip trip;
    RouteMetrics metrics;
    Weights weights;
    std::int64_t created_at = 0;

    bool operator==(const RouteRecord&) const = default;
};

/// Derives origin/destination from the first/last sample and computes the
/// metrics. created_at < 0 means "use the trip's last timestamp".
RouteRecord make_route_record(std::string id, ClassifiedTrip trip, const Weights& w = {},
                              std::int64_t created_at = -1);

/// Checks every record invariant: endpoints match the trip, metrics equal a
/// recomputation from the trip with the stored weights.
void validate_record(const RouteRecord& record);

/// Versioned text document: metadata header, then the embedded tagged CSV.
std::string serialize_record(const RouteRecord& record);
RouteRecord parse_record(const std::string& text);

/// One document per route in a single directory, plus an index file with the
/// endpoints for candidate lookup. Concurrent readers are fine; writes follow
/// a single-writer contract.
class RouteStore {
public:
    explicit RouteStore(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }

    /// Persists the record. Idempotent for identical id+content; an id
    /// collision with different content is an error.
    std::string put(const RouteRecord& record);

    RouteRecord get(const std::string& id) const;
    bool contains(const std::string& id) const;
    std::vector<std::string> ids() const;

    /// Records whose origin and destination each lie within radius_m meters
    /// of the queried points. Direction matters: a reversed route does not
    /// match. Results are ordered by id, independent of insertion order.
    std::vector<RouteRecord> find_candidates(const GeoPoint& origin, const GeoPoint& destination,
                                             double radius_m = 100.0) const;

    /// Compares all candidate routes between the endpoints with the given
    /// weights. Throws DomainError when no route is known; a single known
    /// route is returned as trivially recommended and flagged.
    RouteComparison recommend(const GeoPoint& origin, const GeoPoint& destination,
                              const Weights& w = {}, double radius_m = 100.0) const;

private:
    std::filesystem::path record_path(const std::string& id) const;
    void rewrite_index() const;

    std::filesystem::path dir_;
};

// --- Alerting ---------------------------------------------------------------

/// Driver alert ahead of entering a higher-vibration zone.
struct AlertEvent {
    std::int64_t t_alert = 0;
    std::int64_t t_entry = 0;
    Area zone = Area::A2;

    bool operator==(const AlertEvent&) const = default;
};

/// One event per entry into an A2-or-worse zone from a strictly less severe
/// one (entering A3 from A2 re-alerts; a trip starting in A2/A3 alerts at the
/// start). t_alert = max(trip start, t_entry - lookahead).
std::vector<AlertEvent> alert_replay(const ClassifiedTrip& trip, std::int64_t lookahead = 5);

// --- GeoJSON ----------------------------------------------------------------

/// FeatureCollection with one point feature per sample; properties: area, t,
/// v_kmh.
std::string to_geojson(const ClassifiedTrip& trip);

}  // namespace vibroute
