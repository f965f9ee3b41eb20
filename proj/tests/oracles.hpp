// Test-only oracles and model builders, kept independent of the library's
// classification path: direct, unoptimized evaluations of the stated
// formulas for cross-checking the real implementation.
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "vibroute/classifier.hpp"

namespace vibroute::testing {

struct OracleResult {
    Area label;
    std::array<double, 3> posterior;
};

/// Brute-force kernel-density decision: normalize, sum Gaussian kernels per
/// class, weight by priors/costs, normalize to posteriors, argmax with the
/// lowest-area tie-break.
inline OracleResult oracle_classify(const PnnModel& m, const std::vector<double>& x_raw) {
    std::vector<double> x(x_raw.size());
    for (std::size_t d = 0; d < x.size(); ++d) {
        const auto [lo, hi] = m.ranges.minmax[d];
        x[d] = hi > lo ? (x_raw[d] - lo) / (hi - lo) : 0.5;
    }
    std::array<double, 3> sum{0.0, 0.0, 0.0};
    std::array<int, 3> n{0, 0, 0};
    for (std::size_t i = 0; i < m.patterns.count(); ++i) {
        double d2 = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double diff = x[d] - m.patterns.values[i * m.patterns.dim + d];
            d2 += diff * diff;
        }
        const int k = static_cast<int>(m.patterns.labels[i]);
        sum[k] += std::exp(-d2 / (2.0 * m.sigma * m.sigma));
        ++n[k];
    }
    std::array<double, 3> product{};
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
        product[k] = m.priors[k] * m.costs[k] * sum[k] / n[k];
        total += product[k];
    }
    OracleResult out{Area::A1, {}};
    double best = -1.0;
    for (int k = 0; k < 3; ++k) {
        out.posterior[k] = product[k] / total;
        if (product[k] > best) {
            best = product[k];
            out.label = static_cast<Area>(k);
        }
    }
    return out;
}

/// Nearest-neighbor label, optionally skipping one index (for leave-one-out).
inline Area one_nn(const LabeledPatterns& p, std::span<const double> x, std::size_t skip = SIZE_MAX) {
    double best = std::numeric_limits<double>::infinity();
    Area label = Area::A1;
    for (std::size_t i = 0; i < p.count(); ++i) {
        if (i == skip) continue;
        double d2 = 0.0;
        for (std::size_t d = 0; d < p.dim; ++d) {
            const double diff = x[d] - p.values[i * p.dim + d];
            d2 += diff * diff;
        }
        if (d2 < best) {
            best = d2;
            label = p.labels[i];
        }
    }
    return label;
}

inline NormalizationRanges identity_ranges(std::size_t dim) {
    NormalizationRanges r;
    r.minmax.assign(dim, {0.0, 1.0});
    return r;
}

/// Model with explicit normalized patterns and identity ranges.
inline PnnModel hand_model(std::vector<std::vector<double>> patterns, std::vector<Area> labels,
                           double sigma) {
    PnnModel m;
    m.cfg = FeatureConfig{FeatureVariant::raw_yz_v, 0};
    m.ranges = identity_ranges(patterns.front().size());
    m.sigma = sigma;
    std::vector<FeatureVector> fs;
    for (std::size_t i = 0; i < patterns.size(); ++i) fs.push_back({patterns[i], i});
    m.patterns = make_patterns(fs, labels);
    return m;
}

/// Random instance with 3..10 patterns (every class present) and moderate
/// sigma, so the unshifted oracle cannot underflow.
inline PnnModel random_model(std::mt19937_64& eng, bool random_priors = false) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<int> extra(0, 7);
    std::uniform_real_distribution<double> sig(0.1, 1.0);
    std::vector<std::vector<double>> pats;
    std::vector<Area> labels{Area::A1, Area::A2, Area::A3};
    const int count = 3 + extra(eng);
    for (int i = 3; i < count; ++i) labels.push_back(static_cast<Area>(eng() % 3));
    for (std::size_t i = 0; i < labels.size(); ++i) pats.push_back({u01(eng), u01(eng), u01(eng)});
    PnnModel m = hand_model(pats, labels, sig(eng));
    if (random_priors) {
        std::uniform_real_distribution<double> pr(0.1, 3.0);
        m.priors = {pr(eng), pr(eng), pr(eng)};
        m.costs = {pr(eng), pr(eng), pr(eng)};
    }
    return m;
}

}  // namespace vibroute::testing
