#include "vibroute/telemetry.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>

#include "vibroute/numio.hpp"

namespace vibroute {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

void check_range(double value, double lo, double hi, const char* field, std::size_t line) {
    if (!std::isfinite(value) || value < lo || value > hi) {
        throw ParseError(std::string("field '") + field + "' out of range [" + format_double(lo) +
                             ", " + format_double(hi) + "]: " + format_double(value),
                         line);
    }
}

void check_finite(double value, const char* field, std::size_t line) {
    if (!std::isfinite(value)) {
        throw ParseError(std::string("field '") + field + "' is not finite", line);
    }
}

// Deterministic sampling on top of mt19937_64; the standard distributions
// are implementation-defined, and synthetic CSVs must be byte-identical for
// equal seeds on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform_pos() { return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53; }

    double normal() {
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

private:
    std::mt19937_64 eng_;
};

constexpr std::string_view kHeader = "t,lat,lon,v_kmh,ax,ay,az";
constexpr std::string_view kHeaderTagged = "t,lat,lon,v_kmh,ax,ay,az,area";
constexpr std::string_view kMetaPrefix = "# meta: ";

}  // namespace

std::string to_string(Area a) {
    switch (a) {
        case Area::A1: return "A1";
        case Area::A2: return "A2";
        case Area::A3: return "A3";
    }
    throw DomainError("invalid area value");
}

Area area_from_string(std::string_view text) {
    if (text == "A1") return Area::A1;
    if (text == "A2") return Area::A2;
    if (text == "A3") return Area::A3;
    throw ParseError("invalid area '" + std::string(text) + "', expected A1|A2|A3");
}

void validate_sample(const TelemetrySample& s, std::size_t line) {
    check_range(s.lat, -90.0, 90.0, "lat", line);
    check_range(s.lon, -180.0, 180.0, "lon", line);
    check_finite(s.v, "v_kmh", line);
    if (s.v < 0.0) {
        throw ParseError("field 'v_kmh' must be >= 0: " + format_double(s.v), line);
    }
    check_finite(s.ax, "ax", line);
    check_finite(s.ay, "ay", line);
    check_finite(s.az, "az", line);
}

ParsedCsv parse_csv(std::istream& in) {
    ParsedCsv out;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool tagged = false;

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (!header_seen && sv.starts_with('#')) {
            if (line.starts_with(kMetaPrefix)) {
                out.log.meta = line.substr(kMetaPrefix.size());
            }
            continue;
        }
        if (!header_seen) {
            if (sv == kHeaderTagged) {
                tagged = true;
            } else if (sv != kHeader) {
                throw ParseError("missing or invalid header, expected '" + std::string(kHeader) +
                                     "[,area]'",
                                 line_no);
            }
            header_seen = true;
            if (tagged) out.areas.emplace();
            continue;
        }

        auto fields = split_fields(sv);
        const std::size_t expected = tagged ? 8 : 7;
        if (fields.size() != expected) {
            throw ParseError("expected " + std::to_string(expected) + " columns, got " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        TelemetrySample s;
        s.t = parse_int(fields[0], "t", line_no);
        s.lat = parse_double(fields[1], "lat", line_no);
        s.lon = parse_double(fields[2], "lon", line_no);
        s.v = parse_double(fields[3], "v_kmh", line_no);
        s.ax = parse_double(fields[4], "ax", line_no);
        s.ay = parse_double(fields[5], "ay", line_no);
        s.az = parse_double(fields[6], "az", line_no);
        validate_sample(s, line_no);
        if (!out.log.samples.empty() && s.t <= out.log.samples.back().t) {
            throw ParseError("non-monotonic timestamp " + format_int(s.t), line_no);
        }
        if (tagged) out.areas->push_back(area_from_string(fields[7]));
        out.log.samples.push_back(s);
    }
    if (!header_seen) throw ParseError("empty input, expected CSV header");
    return out;
}

ParsedCsv parse_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

ParsedCsv load_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    return parse_csv(in);
}

TaggedLog parse_tagged_csv(const std::string& text) {
    ParsedCsv parsed = parse_csv(text);
    if (!parsed.areas) throw ParseError("missing required column 'area'");
    return TaggedLog{std::move(parsed.log), std::move(*parsed.areas)};
}

TaggedLog load_tagged_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    ParsedCsv parsed = parse_csv(in);
    if (!parsed.areas) throw ParseError("missing required column 'area' in " + file.string());
    return TaggedLog{std::move(parsed.log), std::move(*parsed.areas)};
}

namespace {

void append_sample(std::string& out, const TelemetrySample& s) {
    out += format_int(s.t);
    out += ',';
    out += format_double(s.lat);
    out += ',';
    out += format_double(s.lon);
    out += ',';
    out += format_double(s.v);
    out += ',';
    out += format_double(s.ax);
    out += ',';
    out += format_double(s.ay);
    out += ',';
    out += format_double(s.az);
}

}  // namespace

std::string serialize_csv(const TelemetryLog& log) {
    std::string out;
    if (!log.meta.empty()) {
        out += kMetaPrefix;
        out += log.meta;
        out += '\n';
    }
    out += kHeader;
    out += '\n';
    for (const TelemetrySample& s : log.samples) {
        append_sample(out, s);
        out += '\n';
    }
    return out;
}

std::string serialize_csv(const TaggedLog& tagged) {
    if (tagged.areas.size() != tagged.log.samples.size()) {
        throw DomainError("label count does not match sample count");
    }
    std::string out;
    if (!tagged.log.meta.empty()) {
        out += kMetaPrefix;
        out += tagged.log.meta;
        out += '\n';
    }
    out += kHeaderTagged;
    out += '\n';
    for (std::size_t i = 0; i < tagged.log.samples.size(); ++i) {
        append_sample(out, tagged.log.samples[i]);
        out += ',';
        out += to_string(tagged.areas[i]);
        out += '\n';
    }
    return out;
}

void save_csv(const std::filesystem::path& file, const std::string& csv_text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << csv_text;
    if (!out) throw IoError("write failed for " + file.string());
}

std::vector<Segment> segment(const TelemetryLog& log, std::int64_t max_gap) {
    if (max_gap < 1) throw DomainError("max_gap must be >= 1");
    std::vector<Segment> out;
    const std::size_t n = log.samples.size();
    if (n == 0) return out;
    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (log.samples[i].t - log.samples[i - 1].t > max_gap) {
            out.push_back(Segment{start, i});
            start = i;
        }
    }
    out.push_back(Segment{start, n});
    return out;
}

TaggedLog synth_route(std::span<const ProfileEntry> profile, const NoiseSpec& noise,
                      std::uint64_t seed, const PathSpec& path, std::int64_t start_time) {
    if (profile.empty()) throw DomainError("profile must not be empty");
    std::int64_t total = 0;
    for (const ProfileEntry& e : profile) {
        if (e.seconds < 1) throw DomainError("profile durations must be >= 1 s");
        total += e.seconds;
    }

    Rng rng(seed);
    TaggedLog out;
    out.log.samples.reserve(static_cast<std::size_t>(total));
    out.areas.reserve(static_cast<std::size_t>(total));

    std::int64_t i = 0;
    for (const ProfileEntry& entry : profile) {
        const AreaNoise& an = noise.for_area(entry.area);
        for (std::int64_t k = 0; k < entry.seconds; ++k, ++i) {
            const double frac = total > 1 ? static_cast<double>(i) / static_cast<double>(total - 1) : 0.0;
            TelemetrySample s;
            s.t = start_time + i;
            s.lat = path.origin_lat + frac * (path.dest_lat - path.origin_lat);
            s.lon = path.origin_lon + frac * (path.dest_lon - path.origin_lon);
            s.ax = an.ax_sigma * rng.normal();
            s.ay = an.ay_sigma * rng.normal();
            s.az = noise.az_mean + an.az_sigma * rng.normal();
            s.v = std::max(0.0, an.v_mean + an.v_sigma * rng.normal());
            if (entry.area == Area::A3 && rng.uniform() < noise.bump_rate) {
                const double magnitude = noise.bump_min + (noise.bump_max - noise.bump_min) * rng.uniform();
                s.az += rng.uniform() < 0.5 ? magnitude : -magnitude;
            }
            out.log.samples.push_back(s);
            out.areas.push_back(entry.area);
        }
    }
    return out;
}

std::vector<ProfileEntry> parse_profile(std::string_view text) {
    std::vector<ProfileEntry> out;
    for (std::string_view part : split_fields(text)) {
        std::size_t colon = part.find(':');
        if (colon == std::string_view::npos) {
            throw ParseError("invalid profile entry '" + std::string(part) + "', expected AREA:SECONDS");
        }
        ProfileEntry e;
        e.area = area_from_string(trim(part.substr(0, colon)));
        e.seconds = parse_int(trim(part.substr(colon + 1)), "profile seconds");
        out.push_back(e);
    }
    if (out.empty()) throw ParseError("empty profile");
    return out;
}

}  // namespace vibroute
