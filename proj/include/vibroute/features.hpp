#pragma once

#include <span>
#include <string>
#include <vector>

#include "vibroute/telemetry.hpp"

namespace vibroute {

/// Classifier input variants. The raw ones feed per-sample axis values, the
/// std one feeds windowed standard deviations of ay/az plus the velocity at
/// the window center.
enum class FeatureVariant { raw_xyz_v, raw_xz_v, raw_yz_v, std_yz_v };

std::string to_string(FeatureVariant v);
FeatureVariant variant_from_string(std::string_view text);

struct FeatureConfig {
    FeatureVariant variant = FeatureVariant::std_yz_v;
    int buffer = 29;  // window length in seconds, odd; used by std_yz_v only

    bool operator==(const FeatureConfig&) const = default;
};

/// Throws DomainError when buffer is even or < 3 for the std variant.
void validate_config(const FeatureConfig& cfg);

/// Input dimension: 4 for raw_xyz_v, 3 otherwise.
std::size_t feature_dim(const FeatureConfig& cfg);

struct FeatureVector {
    std::vector<double> values;
    std::size_t center_index = 0;  // source sample index in its log

    bool operator==(const FeatureVector&) const = default;
};

struct WindowStat {
    std::size_t center_index = 0;
    double stddev = 0.0;
};

/// Sample standard deviation (n-1 divisor) over every fully contained
/// centered window: max(0, n - buffer + 1) outputs. The series must come
/// from a single segment; windows never straddle recording gaps.
std::vector<WindowStat> window_stddev(std::span<const double> series, int buffer);

/// One vector per sample for raw variants, one per valid window for
/// std_yz_v. Output is ordered by center_index.
std::vector<FeatureVector> build_features(const TelemetryLog& log, std::span<const Segment> segments,
                                          const FeatureConfig& cfg);

/// Ground-truth label for each feature: the label of its center sample.
std::vector<Area> center_labels(std::span<const FeatureVector> features, std::span<const Area> areas);

/// Per-feature (min, max) learned from a training set. Applying maps training
/// values into [0,1] linearly, without clamping; a constant feature column
/// (max == min) maps to 0.5.
struct NormalizationRanges {
    std::vector<std::pair<double, double>> minmax;

    bool operator==(const NormalizationRanges&) const = default;
};

NormalizationRanges fit_ranges(std::span<const FeatureVector> features);

std::vector<double> apply_ranges(const NormalizationRanges& ranges, std::span<const double> values);
std::vector<FeatureVector> apply_ranges(const NormalizationRanges& ranges,
                                        std::span<const FeatureVector> features);

/// Feature dump CSV: `center_t,f1,f2,f3[,f4][,area]`, one row per feature,
/// center_t being the timestamp of the feature's center sample.
std::string serialize_features(const TelemetryLog& log, std::span<const FeatureVector> features,
                               std::span<const Area> labels = {});

}  // namespace vibroute
