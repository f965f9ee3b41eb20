#include "vibroute/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "vibroute/numio.hpp"

namespace vibroute {

namespace {

// Printed scores carry two decimals; allow one unit in the last printed
// place for rounding slop before calling a reference score deviant.
constexpr double kScoreDeviationTolerance = 0.01;

std::string format_score(double score) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", score);
    return buf;
}

}  // namespace

void validate_weights(const Weights& w) {
    if (!(1.0 <= w.w1 && w.w1 <= w.w2 && w.w2 <= w.w3)) {
        throw DomainError("weights must satisfy 1 <= w1 <= w2 <= w3, got " + format_double(w.w1) +
                          "," + format_double(w.w2) + "," + format_double(w.w3));
    }
}

AreaDurations area_durations(const ClassifiedTrip& trip) {
    if (trip.log.samples.empty()) throw DomainError("empty trip");
    if (trip.areas.size() != trip.log.samples.size()) {
        throw DomainError("trip has " + std::to_string(trip.log.samples.size()) + " samples but " +
                          std::to_string(trip.areas.size()) + " labels");
    }
    AreaDurations d;
    for (Area a : trip.areas) {
        switch (a) {
            case Area::A1: ++d.t1; break;
            case Area::A2: ++d.t2; break;
            case Area::A3: ++d.t3; break;
        }
    }
    return d;
}

double route_index(const AreaDurations& d, const Weights& w) {
    validate_weights(w);
    if (d.t1 < 0 || d.t2 < 0 || d.t3 < 0) throw DomainError("negative area duration");
    return w.w1 * static_cast<double>(d.t1) + w.w2 * static_cast<double>(d.t2) +
           w.w3 * static_cast<double>(d.t3);
}

double route_score(const AreaDurations& d, const Weights& w) {
    const double index = route_index(d, w);
    if (d.total() == 0) throw DomainError("route score undefined for zero total time");
    return index / static_cast<double>(d.total());
}

RouteMetrics route_metrics(const AreaDurations& d, const Weights& w) {
    return RouteMetrics{d, route_index(d, w), route_score(d, w)};
}

RouteComparison compare_routes(std::span<const RouteCandidate> candidates, const Weights& w) {
    if (candidates.size() < 2) {
        throw DomainError("route comparison needs at least 2 candidates, got " +
                          std::to_string(candidates.size()));
    }
    validate_weights(w);

    RouteComparison out;
    out.ranked.reserve(candidates.size());
    for (const RouteCandidate& c : candidates) {
        RankedRoute r;
        r.id = c.id;
        r.metrics = route_metrics(c.durations, w);
        r.reference_score = c.reference_score;
        if (c.reference_score &&
            std::abs(*c.reference_score - r.metrics.score) > kScoreDeviationTolerance) {
            r.score_deviates = true;
        }
        out.ranked.push_back(std::move(r));
    }

    std::stable_sort(out.ranked.begin(), out.ranked.end(), [](const RankedRoute& a, const RankedRoute& b) {
        if (a.metrics.index != b.metrics.index) return a.metrics.index < b.metrics.index;
        if (a.metrics.score != b.metrics.score) return a.metrics.score < b.metrics.score;
        if (a.metrics.durations.total() != b.metrics.durations.total()) {
            return a.metrics.durations.total() < b.metrics.durations.total();
        }
        return a.id < b.id;
    });

    std::int64_t min_total = out.ranked.front().metrics.durations.total();
    for (const RankedRoute& r : out.ranked) min_total = std::min(min_total, r.metrics.durations.total());
    for (RankedRoute& r : out.ranked) r.shortest = r.metrics.durations.total() == min_total;

    out.ranked.front().preferred = true;
    out.recommended = out.ranked.front().id;
    return out;
}

std::string render_comparison_text(const RouteComparison& comparison, const Weights& w) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-14s %-15s %-7s %-7s %-7s %-10s %-14s %-16s %s\n", "Route",
                  "Total Time (s)", "No. A1", "No. A2", "No. A3", "Index (s)", "Shorten Route",
                  "Preferred Route", "Score");
    out += line;
    for (const RankedRoute& r : comparison.ranked) {
        std::snprintf(line, sizeof(line), "%-14s %-15lld %-7lld %-7lld %-7lld %-10s %-14s %-16s %s\n",
                      r.id.c_str(), static_cast<long long>(r.metrics.durations.total()),
                      static_cast<long long>(r.metrics.durations.t1),
                      static_cast<long long>(r.metrics.durations.t2),
                      static_cast<long long>(r.metrics.durations.t3),
                      format_double(r.metrics.index).c_str(), r.shortest ? "x" : "",
                      r.preferred ? "x" : "", format_score(r.metrics.score).c_str());
        out += line;
    }
    for (const RankedRoute& r : comparison.ranked) {
        if (r.score_deviates) {
            out += "note: route '" + r.id + "' reference score " + format_score(*r.reference_score) +
                   " deviates from the formula value " + format_score(r.metrics.score) +
                   "; the computed value is reported\n";
        }
    }
    if (comparison.no_alternative) {
        out += "note: single known route, no alternative to compare\n";
    }
    out += "Recommended route: " + comparison.recommended + " (weights " + format_double(w.w1) + "," +
           format_double(w.w2) + "," + format_double(w.w3) + ")\n";
    return out;
}

std::string comparison_to_json(const RouteComparison& comparison, const Weights& w) {
    nlohmann::ordered_json j;
    j["weights"] = {w.w1, w.w2, w.w3};
    nlohmann::ordered_json routes = nlohmann::ordered_json::array();
    for (const RankedRoute& r : comparison.ranked) {
        nlohmann::ordered_json jr;
        jr["id"] = r.id;
        jr["total"] = r.metrics.durations.total();
        jr["t1"] = r.metrics.durations.t1;
        jr["t2"] = r.metrics.durations.t2;
        jr["t3"] = r.metrics.durations.t3;
        jr["index"] = r.metrics.index;
        jr["score"] = r.metrics.score;
        jr["shortest"] = r.shortest;
        jr["preferred"] = r.preferred;
        if (r.reference_score) {
            jr["reference_score"] = *r.reference_score;
            jr["score_deviates"] = r.score_deviates;
        }
        routes.push_back(std::move(jr));
    }
    j["routes"] = routes;
    j["recommended"] = comparison.recommended;
    j["no_alternative"] = comparison.no_alternative;
    return j.dump(2);
}

}  // namespace vibroute
