#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <vector>

#include "vibroute/scoring.hpp"
#include "vibroute/telemetry.hpp"

using namespace vibroute;

namespace {

ClassifiedTrip trip_with(const std::vector<Area>& areas) {
    ClassifiedTrip trip;
    for (std::size_t i = 0; i < areas.size(); ++i) {
        trip.log.samples.push_back(
            TelemetrySample{static_cast<std::int64_t>(100 + i), 39.0, -0.3, 30, 0, 0, 9.8});
    }
    trip.areas = areas;
    return trip;
}

AreaDurations durations(std::int64_t t1, std::int64_t t2, std::int64_t t3) {
    return AreaDurations{t1, t2, t3};
}

}  // namespace

TEST_CASE("area_durations: counting at 1 Hz") {
    std::vector<Area> all_a1(60, Area::A1);
    const AreaDurations d = area_durations(trip_with(all_a1));
    CHECK(d.t1 == 60);
    CHECK(d.t2 == 0);
    CHECK(d.t3 == 0);
    CHECK(d.total() == 60);

    std::vector<Area> mixed;
    mixed.insert(mixed.end(), 21, Area::A1);
    mixed.insert(mixed.end(), 50, Area::A2);
    mixed.insert(mixed.end(), 149, Area::A3);
    const AreaDurations m = area_durations(trip_with(mixed));
    CHECK(m == durations(21, 50, 149));
    CHECK(m.total() == 220);

    CHECK_THROWS_WITH_AS(area_durations(ClassifiedTrip{}), doctest::Contains("empty"), DomainError);
}

TEST_CASE("route_index: reference durations") {
    CHECK(route_index(durations(32, 95, 135)) == 444.5);
    CHECK(route_index(durations(21, 50, 149)) == 394.0);
    CHECK(route_index(durations(173, 200, 120)) == 713.0);
    CHECK(route_index(durations(104, 164, 197)) == 744.0);
}

TEST_CASE("route_score: reference values and bounds") {
    CHECK(route_score(durations(32, 95, 135)) == doctest::Approx(444.5 / 262.0).epsilon(1e-12));
    CHECK(route_score(durations(32, 95, 135)) == doctest::Approx(1.696565).epsilon(1e-6));
    // all time in the worst area hits the upper bound exactly
    CHECK(route_score(durations(0, 0, 77)) == 2.0);
    CHECK(route_score(durations(33, 0, 0)) == 1.0);
    // the formula value, even where a published rounding disagrees
    CHECK(route_score(durations(104, 164, 197)) == doctest::Approx(1.6).epsilon(1e-12));
    CHECK_THROWS_AS(route_score(durations(0, 0, 0)), DomainError);
}

TEST_CASE("weights validation") {
    CHECK_THROWS_AS(route_index(durations(1, 1, 1), Weights{0.5, 1.5, 2.0}), DomainError);
    CHECK_THROWS_AS(route_index(durations(1, 1, 1), Weights{1.0, 2.5, 2.0}), DomainError);
    CHECK_NOTHROW(route_index(durations(1, 1, 1), Weights{1.0, 1.0, 1.0}));
}

TEST_CASE("compare_routes: first scenario recommends the shorter dark blue route") {
    const std::vector<RouteCandidate> candidates{
        {"light-blue", durations(32, 95, 135), 1.70},
        {"dark-blue", durations(21, 50, 149), 1.80},
    };
    const RouteComparison cmp = compare_routes(candidates);
    CHECK(cmp.recommended == "dark-blue");
    REQUIRE(cmp.ranked.size() == 2);
    CHECK(cmp.ranked[0].id == "dark-blue");
    CHECK(cmp.ranked[0].metrics.index == 394.0);
    CHECK(cmp.ranked[0].shortest);
    CHECK(cmp.ranked[0].preferred);
    CHECK(cmp.ranked[1].metrics.index == 444.5);
    CHECK_FALSE(cmp.ranked[1].preferred);
    // published scores round to the formula values here: no deviation flags
    CHECK_FALSE(cmp.ranked[0].score_deviates);
    CHECK_FALSE(cmp.ranked[1].score_deviates);
}

TEST_CASE("compare_routes: third scenario prefers the longer light blue route") {
    const std::vector<RouteCandidate> candidates{
        {"light-blue", durations(173, 200, 120), 1.43},
        {"dark-blue", durations(104, 164, 197), 1.49},
    };
    const RouteComparison cmp = compare_routes(candidates);
    CHECK(cmp.recommended == "light-blue");
    CHECK(cmp.ranked[0].metrics.index == 713.0);
    CHECK(cmp.ranked[1].metrics.index == 744.0);
    CHECK_FALSE(cmp.ranked[0].shortest);  // longer but preferred
    CHECK(cmp.ranked[1].shortest);
    // the reference scores are inconsistent with the formula and get flagged
    CHECK(cmp.ranked[0].score_deviates);
    CHECK(cmp.ranked[1].score_deviates);
    CHECK(cmp.ranked[0].metrics.score == doctest::Approx(1.4463).epsilon(1e-4));
    CHECK(cmp.ranked[1].metrics.score == doctest::Approx(1.6).epsilon(1e-12));

    const std::string text = render_comparison_text(cmp);
    CHECK(text.find("deviates") != std::string::npos);
    CHECK(text.find("Recommended route: light-blue") != std::string::npos);
}

TEST_CASE("compare_routes: identical candidates break ties by id order") {
    const std::vector<RouteCandidate> candidates{
        {"zulu", durations(10, 10, 10), std::nullopt},
        {"alpha", durations(10, 10, 10), std::nullopt},
    };
    const RouteComparison cmp = compare_routes(candidates);
    CHECK(cmp.recommended == "alpha");
}

TEST_CASE("compare_routes: needs two candidates") {
    const std::vector<RouteCandidate> one{{"only", durations(1, 2, 3), std::nullopt}};
    CHECK_THROWS_AS(compare_routes(one), DomainError);
    CHECK_THROWS_AS(compare_routes(std::vector<RouteCandidate>{}), DomainError);
}

TEST_CASE("properties: linearity, bounds, monotone severity, scaling") {
    std::mt19937_64 eng(4242);
    std::uniform_int_distribution<std::int64_t> dur(0, 2000);
    const Weights w;
    for (int rep = 0; rep < 1000; ++rep) {
        AreaDurations a{dur(eng), dur(eng), dur(eng)};
        if (a.total() == 0) a.t1 = 1;

        // score within [w1, w3]
        const double score = route_score(a, w);
        CHECK(score >= 1.0);
        CHECK(score <= 2.0);

        // linearity in durations
        const AreaDurations b{dur(eng), dur(eng), dur(eng)};
        const AreaDurations sum{a.t1 + b.t1, a.t2 + b.t2, a.t3 + b.t3};
        CHECK(route_index(sum, w) == route_index(a, w) + route_index(b, w));

        // with defaults: total <= index <= 2 * total
        CHECK(route_index(a, w) >= static_cast<double>(a.total()));
        CHECK(route_index(a, w) <= 2.0 * static_cast<double>(a.total()));

        // moving one second to a worse area raises the index by w_j - w_i exactly
        if (a.t1 > 0) {
            const AreaDurations moved{a.t1 - 1, a.t2, a.t3 + 1};
            CHECK(route_index(moved, w) - route_index(a, w) == w.w3 - w.w1);
            const AreaDurations up{a.t1 - 1, a.t2 + 1, a.t3};
            CHECK(route_index(up, w) - route_index(a, w) == w.w2 - w.w1);
        }
        if (a.t2 > 0) {
            const AreaDurations moved{a.t1, a.t2 - 1, a.t3 + 1};
            CHECK(route_index(moved, w) - route_index(a, w) == w.w3 - w.w2);
        }

        // score is scale-invariant, index scales linearly
        const AreaDurations tripled{3 * a.t1, 3 * a.t2, 3 * a.t3};
        CHECK(route_score(tripled, w) == doctest::Approx(score).epsilon(1e-12));
        CHECK(route_index(tripled, w) == doctest::Approx(3.0 * route_index(a, w)).epsilon(1e-12));
    }
}

TEST_CASE("compare_routes: permutation invariance") {
    std::mt19937_64 eng(777);
    std::uniform_int_distribution<std::int64_t> dur(0, 500);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<RouteCandidate> candidates;
        for (int i = 0; i < 5; ++i) {
            candidates.push_back({"r" + std::to_string(i),
                                  AreaDurations{dur(eng), dur(eng), dur(eng) + 1}, std::nullopt});
        }
        const RouteComparison base = compare_routes(candidates);
        std::shuffle(candidates.begin(), candidates.end(), eng);
        const RouteComparison shuffled = compare_routes(candidates);
        CHECK(base.recommended == shuffled.recommended);
        REQUIRE(base.ranked.size() == shuffled.ranked.size());
        for (std::size_t i = 0; i < base.ranked.size(); ++i) {
            CHECK(base.ranked[i].id == shuffled.ranked[i].id);
        }
    }
}

TEST_CASE("comparison report: table layout and machine-readable document") {
    const std::vector<RouteCandidate> candidates{
        {"light-blue", durations(32, 95, 135), std::nullopt},
        {"dark-blue", durations(21, 50, 149), std::nullopt},
    };
    const RouteComparison cmp = compare_routes(candidates);
    const std::string text = render_comparison_text(cmp);
    for (const char* column : {"Total Time (s)", "No. A1", "No. A2", "No. A3", "Index (s)",
                               "Shorten Route", "Preferred Route", "Score"}) {
        CHECK(text.find(column) != std::string::npos);
    }
    CHECK(text.find("444.5") != std::string::npos);
    CHECK(text.find("394") != std::string::npos);

    const std::string json = comparison_to_json(cmp);
    CHECK(json.find("\"recommended\": \"dark-blue\"") != std::string::npos);
    CHECK(json.find("\"index\": 394.0") != std::string::npos);
}
