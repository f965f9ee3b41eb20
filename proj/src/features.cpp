#include "vibroute/features.hpp"

#include <cmath>

#include "vibroute/numio.hpp"

namespace vibroute {

std::string to_string(FeatureVariant v) {
    switch (v) {
        case FeatureVariant::raw_xyz_v: return "raw-xyz";
        case FeatureVariant::raw_xz_v: return "raw-xz";
        case FeatureVariant::raw_yz_v: return "raw-yz";
        case FeatureVariant::std_yz_v: return "std-yz";
    }
    throw DomainError("invalid feature variant");
}

FeatureVariant variant_from_string(std::string_view text) {
    if (text == "raw-xyz") return FeatureVariant::raw_xyz_v;
    if (text == "raw-xz") return FeatureVariant::raw_xz_v;
    if (text == "raw-yz") return FeatureVariant::raw_yz_v;
    if (text == "std-yz") return FeatureVariant::std_yz_v;
    throw ParseError("invalid variant '" + std::string(text) +
                     "', expected raw-xyz|raw-xz|raw-yz|std-yz");
}

void validate_config(const FeatureConfig& cfg) {
    if (cfg.variant == FeatureVariant::std_yz_v) {
        if (cfg.buffer < 3 || cfg.buffer % 2 == 0) {
            throw DomainError("buffer must be odd and >= 3, got " + std::to_string(cfg.buffer));
        }
    }
}

std::size_t feature_dim(const FeatureConfig& cfg) {
    return cfg.variant == FeatureVariant::raw_xyz_v ? 4 : 3;
}

std::vector<WindowStat> window_stddev(std::span<const double> series, int buffer) {
    if (buffer < 3 || buffer % 2 == 0) {
        throw DomainError("buffer must be odd and >= 3, got " + std::to_string(buffer));
    }
    std::vector<WindowStat> out;
    const std::size_t n = series.size();
    const std::size_t b = static_cast<std::size_t>(buffer);
    if (n < b) return out;
    const std::size_t half = b / 2;
    out.reserve(n - b + 1);
    for (std::size_t start = 0; start + b <= n; ++start) {
        double mean = 0.0;
        for (std::size_t i = start; i < start + b; ++i) mean += series[i];
        mean /= static_cast<double>(b);
        double sq = 0.0;
        for (std::size_t i = start; i < start + b; ++i) {
            const double d = series[i] - mean;
            sq += d * d;
        }
        out.push_back(WindowStat{start + half, std::sqrt(sq / static_cast<double>(b - 1))});
    }
    return out;
}

std::vector<FeatureVector> build_features(const TelemetryLog& log, std::span<const Segment> segments,
                                          const FeatureConfig& cfg) {
    validate_config(cfg);
    std::vector<FeatureVector> out;

    if (cfg.variant != FeatureVariant::std_yz_v) {
        out.reserve(log.samples.size());
        for (const Segment& seg : segments) {
            for (std::size_t i = seg.begin; i < seg.end; ++i) {
                const TelemetrySample& s = log.samples[i];
                FeatureVector f;
                switch (cfg.variant) {
                    case FeatureVariant::raw_xyz_v: f.values = {s.ax, s.ay, s.az, s.v}; break;
                    case FeatureVariant::raw_xz_v: f.values = {s.ax, s.az, s.v}; break;
                    case FeatureVariant::raw_yz_v: f.values = {s.ay, s.az, s.v}; break;
                    case FeatureVariant::std_yz_v: break;
                }
                f.center_index = i;
                out.push_back(std::move(f));
            }
        }
        return out;
    }

    for (const Segment& seg : segments) {
        std::vector<double> ay(seg.size());
        std::vector<double> az(seg.size());
        for (std::size_t i = 0; i < seg.size(); ++i) {
            ay[i] = log.samples[seg.begin + i].ay;
            az[i] = log.samples[seg.begin + i].az;
        }
        auto ay_std = window_stddev(ay, cfg.buffer);
        auto az_std = window_stddev(az, cfg.buffer);
        for (std::size_t w = 0; w < ay_std.size(); ++w) {
            const std::size_t center = seg.begin + ay_std[w].center_index;
            out.push_back(FeatureVector{{ay_std[w].stddev, az_std[w].stddev, log.samples[center].v},
                                        center});
        }
    }
    return out;
}

std::vector<Area> center_labels(std::span<const FeatureVector> features, std::span<const Area> areas) {
    std::vector<Area> out;
    out.reserve(features.size());
    for (const FeatureVector& f : features) {
        if (f.center_index >= areas.size()) {
            throw DomainError("feature center index out of label range");
        }
        out.push_back(areas[f.center_index]);
    }
    return out;
}

NormalizationRanges fit_ranges(std::span<const FeatureVector> features) {
    if (features.empty()) throw DomainError("cannot fit ranges on an empty feature set");
    const std::size_t dim = features.front().values.size();
    NormalizationRanges out;
    out.minmax.assign(dim, {features.front().values[0], features.front().values[0]});
    for (std::size_t d = 0; d < dim; ++d) {
        out.minmax[d] = {features.front().values[d], features.front().values[d]};
    }
    for (const FeatureVector& f : features) {
        if (f.values.size() != dim) throw DomainError("inconsistent feature dimensions");
        for (std::size_t d = 0; d < dim; ++d) {
            out.minmax[d].first = std::min(out.minmax[d].first, f.values[d]);
            out.minmax[d].second = std::max(out.minmax[d].second, f.values[d]);
        }
    }
    return out;
}

std::vector<double> apply_ranges(const NormalizationRanges& ranges, std::span<const double> values) {
    if (values.size() != ranges.minmax.size()) {
        throw DomainError("feature dimension mismatch: expected " +
                          std::to_string(ranges.minmax.size()) + ", got " +
                          std::to_string(values.size()));
    }
    std::vector<double> out(values.size());
    for (std::size_t d = 0; d < values.size(); ++d) {
        const auto [lo, hi] = ranges.minmax[d];
        out[d] = hi > lo ? (values[d] - lo) / (hi - lo) : 0.5;
    }
    return out;
}

std::vector<FeatureVector> apply_ranges(const NormalizationRanges& ranges,
                                        std::span<const FeatureVector> features) {
    std::vector<FeatureVector> out;
    out.reserve(features.size());
    for (const FeatureVector& f : features) {
        out.push_back(FeatureVector{apply_ranges(ranges, f.values), f.center_index});
    }
    return out;
}

std::string serialize_features(const TelemetryLog& log, std::span<const FeatureVector> features,
                               std::span<const Area> labels) {
    if (!labels.empty() && labels.size() != features.size()) {
        throw DomainError("label count does not match feature count");
    }
    const std::size_t dim = features.empty() ? 0 : features.front().values.size();
    std::string out = "center_t";
    for (std::size_t d = 0; d < dim; ++d) out += ",f" + std::to_string(d + 1);
    if (!labels.empty()) out += ",area";
    out += '\n';
    for (std::size_t i = 0; i < features.size(); ++i) {
        const FeatureVector& f = features[i];
        if (f.center_index >= log.samples.size()) {
            throw DomainError("feature center index out of range");
        }
        out += format_int(log.samples[f.center_index].t);
        for (double v : f.values) {
            out += ',';
            out += format_double(v);
        }
        if (!labels.empty()) {
            out += ',';
            out += to_string(labels[i]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace vibroute
