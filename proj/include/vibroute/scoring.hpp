#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vibroute/telemetry.hpp"

namespace vibroute {

/// The classifier's per-sample output for one trip; same shape as a tagged
/// training log, every sample labeled after edge padding.
using ClassifiedTrip = TaggedLog;

/// Severity weights for the time index. Defaults follow the proposed
/// coefficients: A1 time unweighted, A2 x1.5, A3 x2.
struct Weights {
    double w1 = 1.0;
    double w2 = 1.5;
    double w3 = 2.0;

    bool operator==(const Weights&) const = default;
};

/// Requires 1 <= w1 <= w2 <= w3.
void validate_weights(const Weights& w);

/// Seconds spent in each mobility area at the 1 Hz cadence.
struct AreaDurations {
    std::int64_t t1 = 0;
    std::int64_t t2 = 0;
    std::int64_t t3 = 0;

    std::int64_t total() const { return t1 + t2 + t3; }
    bool operator==(const AreaDurations&) const = default;
};

/// Counts labeled samples per area; every sample stands for one second of
/// travel. Throws DomainError on an empty trip.
AreaDurations area_durations(const ClassifiedTrip& trip);

/// Weighted travel time in seconds: w1*t1 + w2*t2 + w3*t3.
double route_index(const AreaDurations& d, const Weights& w = {});

/// Index divided by total time; in [w1, w3], so [1, 2] with defaults.
/// Throws DomainError when the total time is zero.
double route_score(const AreaDurations& d, const Weights& w = {});

struct RouteMetrics {
    AreaDurations durations;
    double index = 0.0;
    double score = 0.0;

    bool operator==(const RouteMetrics&) const = default;
};

RouteMetrics route_metrics(const AreaDurations& d, const Weights& w = {});

/// One route entering a comparison. reference_score, when given, is an
/// externally reported score that the report re-checks against the formula.
struct RouteCandidate {
    std::string id;
    AreaDurations durations;
    std::optional<double> reference_score;
};

struct RankedRoute {
    std::string id;
    RouteMetrics metrics;
    std::optional<double> reference_score;
    bool shortest = false;
    bool preferred = false;
    bool score_deviates = false;  // reference_score inconsistent with the formula
};

struct RouteComparison {
    std::vector<RankedRoute> ranked;  // ascending index; first is recommended
    std::string recommended;
    bool no_alternative = false;  // single candidate, nothing to compare against
};

/// Ranks candidates by ascending index; ties break by lower score, then
/// lower total time, then id order. Needs at least two candidates.
RouteComparison compare_routes(std::span<const RouteCandidate> candidates, const Weights& w = {});

/// Table-style report mirroring the route-comparison layout: Total Time,
/// No. A1/A2/A3, Index, Shorten Route, Preferred Route, Score. Flags any
/// reference score that deviates from the formula value.
std::string render_comparison_text(const RouteComparison& comparison, const Weights& w = {});
std::string comparison_to_json(const RouteComparison& comparison, const Weights& w = {});

}  // namespace vibroute
