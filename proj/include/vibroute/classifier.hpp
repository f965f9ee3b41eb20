#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vibroute/features.hpp"
#include "vibroute/telemetry.hpp"

namespace vibroute {

/// Normalized training patterns with one area label each, stored row-major.
struct LabeledPatterns {
    std::size_t dim = 0;
    std::vector<double> values;  // count() * dim
    std::vector<Area> labels;

    std::size_t count() const { return labels.size(); }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values).subspan(i * dim, dim);
    }
};

LabeledPatterns make_patterns(std::span<const FeatureVector> features, std::span<const Area> labels);

/// Kernel-density classifier over min-max normalized features: a pattern
/// layer of Gaussian kernels and one summation unit per mobility area. The
/// single smoothing parameter sigma is the sphere of influence.
struct PnnModel {
    FeatureConfig cfg;
    NormalizationRanges ranges;
    double sigma = 0.0;
    std::array<double, 3> priors{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    std::array<double, 3> costs{1.0, 1.0, 1.0};
    LabeledPatterns patterns;
};

/// Throws DomainError when an invariant is broken (sigma <= 0, missing class,
/// non-positive prior/cost, dimension mismatch).
void validate_model(const PnnModel& model);

/// Mean Gaussian kernel of class k at x: (1/n_k) * sum exp(-|x-p|^2 / (2 sigma^2)).
/// x must already be on the normalized feature scale.
double class_density(const PnnModel& model, std::span<const double> x_norm, Area k);

struct Classification {
    Area label = Area::A1;
    std::array<double, 3> posterior{};
};

/// Applies model.ranges to the raw feature vector, then picks
/// argmax_k prior_k * cost_k * class_density(k). Ties break to the lowest
/// area. Posteriors are the per-class products normalized to sum to 1; the
/// kernel sums are evaluated with a shared exponent shift so the decision
/// stays exact even when every unshifted density underflows.
Classification classify(const PnnModel& model, std::span<const double> x_raw);

/// Leave-one-out accuracy at a fixed sigma. Every class needs at least two
/// patterns, otherwise leaving one out would empty the class.
double jackknife_accuracy(const LabeledPatterns& training, double sigma,
                          const std::array<double, 3>& priors = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                          const std::array<double, 3>& costs = {1.0, 1.0, 1.0});

/// Sigma search grid: coarse logarithmic pass over [min_sigma, max_sigma],
/// then a local pass at refine_step around the coarse optimum (at most
/// max_refine_steps to each side). All evaluated sigmas are integer
/// multiples of refine_step.
struct SigmaGrid {
    int coarse_count = 20;
    double min_sigma = 1.0 / 1280.0;
    double max_sigma = 1.0;
    double refine_step = 1.0 / 1280.0;
    int max_refine_steps = 128;
};

struct SigmaSelection {
    double sigma = 0.0;
    double accuracy = 0.0;
};

/// Maximizes jackknife accuracy over the grid; ties break toward smaller sigma.
SigmaSelection select_sigma(const LabeledPatterns& training, const SigmaGrid& grid = {});

struct TrainResult {
    PnnModel model;
    double sigma = 0.0;
    double loo_accuracy = 0.0;
    std::size_t pattern_count = 0;
};

/// Builds features from the tagged logs, fits normalization ranges, selects
/// sigma by jackknifing, and assembles the model.
TrainResult train(std::span<const TaggedLog> tagged, const FeatureConfig& cfg,
                  std::int64_t max_gap = 2, const SigmaGrid& grid = {});

// --- Evaluation -----------------------------------------------------------

/// 3x3 counts, rows = tagged (true) area, columns = assigned area.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, 3>, 3> counts{};

    std::size_t row_total(std::size_t r) const;
    std::size_t total() const;
    std::size_t trace() const;
    double accuracy() const;                                   // trace / total
    double row_percent(std::size_t r, std::size_t c) const;    // percent of row r assigned c
};

ConfusionMatrix evaluate(const PnnModel& model, std::span<const FeatureVector> features_raw,
                         std::span<const Area> labels);

/// Convenience: segments the tagged log, builds features per model.cfg, and
/// evaluates against the center-sample labels.
ConfusionMatrix evaluate_log(const PnnModel& model, const TaggedLog& tagged, std::int64_t max_gap = 2);

/// Table-style report with per-row percentages and overall % correctly assigned.
std::string render_confusion_text(const ConfusionMatrix& cm);
std::string confusion_to_json(const ConfusionMatrix& cm);

// --- Whole-trip classification --------------------------------------------

/// Classifies every feature of the log and pads unlabeled edge samples with
/// the nearest classified label in the same segment, so every sample ends up
/// labeled. Throws DomainError when a segment is too short to hold a single
/// window.
TaggedLog classify_trip(const PnnModel& model, const TelemetryLog& log, std::int64_t max_gap = 2);

// --- Model persistence -----------------------------------------------------

/// Self-describing versioned JSON document; decimals round-trip exactly.
std::string serialize_model(const PnnModel& model);
PnnModel parse_model(const std::string& text);
void save_model(const std::filesystem::path& file, const PnnModel& model);
PnnModel load_model(const std::filesystem::path& file);

}  // namespace vibroute
