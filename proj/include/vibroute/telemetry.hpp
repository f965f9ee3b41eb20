#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vibroute/errors.hpp"

namespace vibroute {

/// Mobility area by vibration severity: A1 (smooth) < A2 (regular) < A3 (rough).
enum class Area : int { A1 = 0, A2 = 1, A3 = 2 };

constexpr std::array<Area, 3> kAllAreas{Area::A1, Area::A2, Area::A3};

std::string to_string(Area a);
Area area_from_string(std::string_view text);

/// One 1 Hz register: epoch-second timestamp, WGS84 position, velocity in
/// km/h, and 3-axis acceleration in m/s^2.
struct TelemetrySample {
    std::int64_t t = 0;
    double lat = 0.0;
    double lon = 0.0;
    double v = 0.0;
    double ax = 0.0;
    double ay = 0.0;
    double az = 0.0;

    bool operator==(const TelemetrySample&) const = default;
};

/// Throws ParseError when a field is out of range or non-finite.
void validate_sample(const TelemetrySample& s, std::size_t line = 0);

struct TelemetryLog {
    std::vector<TelemetrySample> samples;
    std::string meta;

    bool operator==(const TelemetryLog&) const = default;
};

/// A telemetry log with one area label per sample (ground truth for training,
/// classifier output for trips).
struct TaggedLog {
    TelemetryLog log;
    std::vector<Area> areas;

    bool operator==(const TaggedLog&) const = default;
};

/// Contiguous half-open index range [begin, end) with no recording gap larger
/// than the segmentation max_gap inside it.
struct Segment {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool operator==(const Segment&) const = default;
};

// --- CSV interface --------------------------------------------------------
//
// Column layout (header required):
//   t,lat,lon,v_kmh,ax,ay,az[,area]
// t is integer epoch seconds; area, when present, is A1|A2|A3.

struct ParsedCsv {
    TelemetryLog log;
    std::optional<std::vector<Area>> areas;
};

ParsedCsv parse_csv(std::istream& in);
ParsedCsv parse_csv(const std::string& text);
ParsedCsv load_csv(const std::filesystem::path& file);

/// Requires the area column; throws ParseError naming it when absent.
TaggedLog parse_tagged_csv(const std::string& text);
TaggedLog load_tagged_csv(const std::filesystem::path& file);

std::string serialize_csv(const TelemetryLog& log);
std::string serialize_csv(const TaggedLog& tagged);
void save_csv(const std::filesystem::path& file, const std::string& csv_text);

// --- Segmentation ---------------------------------------------------------

/// Splits the log wherever consecutive timestamps differ by more than
/// max_gap seconds. The returned ranges partition [0, samples.size()).
std::vector<Segment> segment(const TelemetryLog& log, std::int64_t max_gap = 2);

// --- Synthetic routes -----------------------------------------------------

struct AreaNoise {
    double ax_sigma = 0.0;
    double ay_sigma = 0.0;
    double az_sigma = 0.0;
    double v_mean = 0.0;
    double v_sigma = 0.0;
};

/// Per-area Gaussian noise plus sparse bump impulses for A3. Defaults are
/// calibrated so that buffer-29 window std-devs of az rank A1 < A2 < A3 for
/// at least 99% of cross-area window pairs.
struct NoiseSpec {
    std::array<AreaNoise, 3> area{
        AreaNoise{0.30, 0.10, 0.05, 70.0, 12.0},  // A1: interurban, good pavement
        AreaNoise{0.35, 0.14, 0.30, 50.0, 12.0},  // A2: avenues, regular pavement
        AreaNoise{0.40, 0.20, 0.90, 30.0, 12.0},  // A3: urban streets, bumps
    };
    double az_mean = 9.81;
    double bump_rate = 0.1;   // impulses per second, A3 only
    double bump_min = 3.0;    // impulse magnitude on az, m/s^2
    double bump_max = 6.0;

    const AreaNoise& for_area(Area a) const { return area[static_cast<int>(a)]; }
};

/// Synthetic positions run in a straight line between these endpoints, so two
/// generated routes share origin/destination for route matching.
struct PathSpec {
    double origin_lat = 39.47;
    double origin_lon = -0.35;
    double dest_lat = 39.49;
    double dest_lon = -0.30;
};

struct ProfileEntry {
    Area area = Area::A1;
    std::int64_t seconds = 0;
};

/// Deterministic for a fixed seed: equal seeds give byte-identical CSV,
/// different seeds keep the label sequence and change only the values.
TaggedLog synth_route(std::span<const ProfileEntry> profile, const NoiseSpec& noise,
                      std::uint64_t seed, const PathSpec& path = {},
                      std::int64_t start_time = 1000000);

/// Parses a profile spec of the form "A1:600,A2:600,A3:600".
std::vector<ProfileEntry> parse_profile(std::string_view text);

}  // namespace vibroute
