#include "vibroute/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <thread>

#include "json.hpp"
#include "vibroute/numio.hpp"

namespace vibroute {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kModelVersion = 1;
constexpr const char* kModelFormat = "vibroute-model";

// exp(x) is exactly 0.0 below roughly x = -745.1; skipping such terms in the
// leave-one-out inner loop cannot change any argmax because the shifted
// nearest-pattern term is always exp(0) = 1.
constexpr double kLooExpCutoff = 745.0;

std::size_t area_index(Area a) { return static_cast<std::size_t>(a); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return d2;
}

std::array<std::size_t, 3> class_counts(const LabeledPatterns& p) {
    std::array<std::size_t, 3> counts{};
    for (Area a : p.labels) ++counts[area_index(a)];
    return counts;
}

void require_two_per_class(const LabeledPatterns& p) {
    const auto counts = class_counts(p);
    for (Area a : kAllAreas) {
        if (counts[area_index(a)] == 0) {
            throw DomainError("training data missing class " + to_string(a));
        }
        if (counts[area_index(a)] < 2) {
            throw DomainError("class " + to_string(a) +
                              " has a single pattern; jackknifing needs at least two");
        }
    }
}

// Runs fn(0..n-1) across worker threads; used for the sigma grid where each
// slot writes its own result, so the reduction is order-independent.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t workers = std::min<std::size_t>(hw > 0 ? hw : 1, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

// Precomputes pairwise squared distances for repeated leave-one-out passes
// over the sigma grid. Falls back to on-the-fly rows past a size threshold.
class LooEvaluator {
public:
    explicit LooEvaluator(const LabeledPatterns& p)
        : p_(p), n_(p.count()), counts_(class_counts(p)), materialize_(n_ <= 6000) {
        if (materialize_) {
            dist2_.assign(n_ * n_, 0.0);
            for (std::size_t i = 0; i < n_; ++i) {
                for (std::size_t j = i + 1; j < n_; ++j) {
                    const double d2 = squared_distance(p_.row(i), p_.row(j));
                    dist2_[i * n_ + j] = d2;
                    dist2_[j * n_ + i] = d2;
                }
            }
        }
    }

    double accuracy(double sigma, const std::array<double, 3>& priors,
                    const std::array<double, 3>& costs) const {
        const double two_s2 = 2.0 * sigma * sigma;
        const double cutoff = kLooExpCutoff * two_s2;
        std::size_t correct = 0;
        std::vector<double> scratch;
        if (!materialize_) scratch.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const double* row;
            if (materialize_) {
                row = dist2_.data() + i * n_;
            } else {
                for (std::size_t j = 0; j < n_; ++j) {
                    scratch[j] = squared_distance(p_.row(i), p_.row(j));
                }
                row = scratch.data();
            }
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n_; ++j) {
                if (j != i && row[j] < m) m = row[j];
            }
            std::array<double, 3> sums{};
            for (std::size_t j = 0; j < n_; ++j) {
                if (j == i) continue;
                const double e = row[j] - m;
                if (e <= cutoff) sums[area_index(p_.labels[j])] += std::exp(-e / two_s2);
            }
            const std::size_t truth = area_index(p_.labels[i]);
            double best = -1.0;
            std::size_t best_k = 0;
            for (std::size_t k = 0; k < 3; ++k) {
                const std::size_t nk = counts_[k] - (k == truth ? 1 : 0);
                const double u = priors[k] * costs[k] * sums[k] / static_cast<double>(nk);
                if (u > best) {
                    best = u;
                    best_k = k;
                }
            }
            if (best_k == truth) ++correct;
        }
        return static_cast<double>(correct) / static_cast<double>(n_);
    }

private:
    const LabeledPatterns& p_;
    std::size_t n_;
    std::array<std::size_t, 3> counts_;
    bool materialize_;
    std::vector<double> dist2_;
};

std::string percent(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", value);
    return buf;
}

}  // namespace

LabeledPatterns make_patterns(std::span<const FeatureVector> features, std::span<const Area> labels) {
    if (features.size() != labels.size()) {
        throw DomainError("feature/label count mismatch");
    }
    if (features.empty()) throw DomainError("empty pattern set");
    LabeledPatterns out;
    out.dim = features.front().values.size();
    out.values.reserve(features.size() * out.dim);
    out.labels.assign(labels.begin(), labels.end());
    for (const FeatureVector& f : features) {
        if (f.values.size() != out.dim) throw DomainError("inconsistent feature dimensions");
        out.values.insert(out.values.end(), f.values.begin(), f.values.end());
    }
    return out;
}

void validate_model(const PnnModel& model) {
    if (!(model.sigma > 0.0)) throw DomainError("sigma must be > 0");
    for (std::size_t k = 0; k < 3; ++k) {
        if (!(model.priors[k] > 0.0)) throw DomainError("priors must be > 0");
        if (!(model.costs[k] > 0.0)) throw DomainError("costs must be > 0");
    }
    if (model.patterns.count() == 0) throw DomainError("model has no patterns");
    if (model.patterns.dim != feature_dim(model.cfg)) {
        throw DomainError("pattern dimension does not match the feature variant");
    }
    if (model.ranges.minmax.size() != model.patterns.dim) {
        throw DomainError("normalization ranges do not match the pattern dimension");
    }
    for (const auto& [lo, hi] : model.ranges.minmax) {
        if (!(hi >= lo)) throw DomainError("normalization range with max < min");
    }
    const auto counts = class_counts(model.patterns);
    for (Area a : kAllAreas) {
        if (counts[area_index(a)] == 0) throw DomainError("model missing class " + to_string(a));
    }
    validate_config(model.cfg);
}

double class_density(const PnnModel& model, std::span<const double> x_norm, Area k) {
    if (x_norm.size() != model.patterns.dim) {
        throw DomainError("feature dimension mismatch: expected " +
                          std::to_string(model.patterns.dim) + ", got " +
                          std::to_string(x_norm.size()));
    }
    const double two_s2 = 2.0 * model.sigma * model.sigma;
    double sum = 0.0;
    std::size_t nk = 0;
    for (std::size_t i = 0; i < model.patterns.count(); ++i) {
        if (model.patterns.labels[i] != k) continue;
        ++nk;
        sum += std::exp(-squared_distance(x_norm, model.patterns.row(i)) / two_s2);
    }
    if (nk == 0) throw DomainError("model has no patterns of class " + to_string(k));
    return sum / static_cast<double>(nk);
}

Classification classify(const PnnModel& model, std::span<const double> x_raw) {
    const std::vector<double> x = apply_ranges(model.ranges, x_raw);
    const std::size_t n = model.patterns.count();
    const double two_s2 = 2.0 * model.sigma * model.sigma;

    std::vector<double> dist2(n);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        dist2[i] = squared_distance(x, model.patterns.row(i));
        m = std::min(m, dist2[i]);
    }

    // Shared shift by the nearest-pattern distance: scales every class sum by
    // exp(m / two_s2), which cancels in both the argmax and the normalized
    // posteriors but keeps tiny-sigma decisions away from underflow.
    std::array<double, 3> sums{};
    std::array<std::size_t, 3> counts{};
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = area_index(model.patterns.labels[i]);
        ++counts[k];
        sums[k] += std::exp(-(dist2[i] - m) / two_s2);
    }

    Classification out;
    double total = 0.0;
    std::array<double, 3> products{};
    for (std::size_t k = 0; k < 3; ++k) {
        products[k] = counts[k] > 0
                          ? model.priors[k] * model.costs[k] * sums[k] / static_cast<double>(counts[k])
                          : 0.0;
        total += products[k];
    }
    double best = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        out.posterior[k] = products[k] / total;
        if (products[k] > best) {
            best = products[k];
            best_k = k;
        }
    }
    out.label = static_cast<Area>(best_k);
    return out;
}

double jackknife_accuracy(const LabeledPatterns& training, double sigma,
                          const std::array<double, 3>& priors, const std::array<double, 3>& costs) {
    if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
    require_two_per_class(training);
    return LooEvaluator(training).accuracy(sigma, priors, costs);
}

SigmaSelection select_sigma(const LabeledPatterns& training, const SigmaGrid& grid) {
    if (grid.coarse_count < 2) throw DomainError("sigma grid needs at least 2 coarse points");
    if (!(grid.min_sigma > 0.0) || !(grid.max_sigma >= grid.min_sigma) || !(grid.refine_step > 0.0)) {
        throw DomainError("invalid sigma grid");
    }
    require_two_per_class(training);

    const double step = grid.refine_step;
    const std::int64_t min_steps =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(grid.min_sigma / step - 1e-9)));
    const std::int64_t max_steps =
        std::max(min_steps, static_cast<std::int64_t>(std::floor(grid.max_sigma / step + 1e-9)));

    // Coarse pass: log-spaced sigmas snapped onto multiples of the refine step.
    std::vector<std::int64_t> coarse;
    const double ratio = std::pow(grid.max_sigma / grid.min_sigma,
                                  1.0 / static_cast<double>(grid.coarse_count - 1));
    for (int i = 0; i < grid.coarse_count; ++i) {
        const double s = grid.min_sigma * std::pow(ratio, static_cast<double>(i));
        const std::int64_t k = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::llround(s / step)), min_steps, max_steps);
        if (coarse.empty() || coarse.back() != k) coarse.push_back(k);
    }

    const LooEvaluator loo(training);
    const std::array<double, 3> priors{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    const std::array<double, 3> costs{1.0, 1.0, 1.0};

    auto evaluate = [&](const std::vector<std::int64_t>& steps) {
        std::vector<double> acc(steps.size());
        parallel_for(steps.size(), [&](std::size_t i) {
            acc[i] = loo.accuracy(static_cast<double>(steps[i]) * step, priors, costs);
        });
        return acc;
    };

    std::int64_t best_steps = coarse.front();
    double best_acc = -1.0;
    auto consider = [&](std::int64_t k, double a) {
        if (a > best_acc || (a == best_acc && k < best_steps)) {
            best_acc = a;
            best_steps = k;
        }
    };

    const std::vector<double> coarse_acc = evaluate(coarse);
    for (std::size_t i = 0; i < coarse.size(); ++i) consider(coarse[i], coarse_acc[i]);

    // Local pass at the fine step around the coarse optimum, spanning one
    // coarse interval to each side (capped).
    const double center = static_cast<double>(best_steps) * step;
    std::int64_t lo = static_cast<std::int64_t>(std::ceil(center / ratio / step - 1e-9));
    std::int64_t hi = static_cast<std::int64_t>(std::floor(center * ratio / step + 1e-9));
    lo = std::clamp(lo, std::max(min_steps, best_steps - grid.max_refine_steps), best_steps);
    hi = std::clamp(hi, best_steps, std::min(max_steps, best_steps + grid.max_refine_steps));

    std::vector<std::int64_t> fine;
    for (std::int64_t k = lo; k <= hi; ++k) {
        if (std::find(coarse.begin(), coarse.end(), k) == coarse.end()) fine.push_back(k);
    }
    const std::vector<double> fine_acc = evaluate(fine);
    for (std::size_t i = 0; i < fine.size(); ++i) consider(fine[i], fine_acc[i]);

    return SigmaSelection{static_cast<double>(best_steps) * step, best_acc};
}

TrainResult train(std::span<const TaggedLog> tagged, const FeatureConfig& cfg, std::int64_t max_gap,
                  const SigmaGrid& grid) {
    validate_config(cfg);
    std::vector<FeatureVector> features;
    std::vector<Area> labels;
    for (const TaggedLog& t : tagged) {
        if (t.areas.size() != t.log.samples.size()) {
            throw DomainError("label count does not match sample count");
        }
        const std::vector<Segment> segs = segment(t.log, max_gap);
        std::vector<FeatureVector> f = build_features(t.log, segs, cfg);
        std::vector<Area> l = center_labels(f, t.areas);
        std::move(f.begin(), f.end(), std::back_inserter(features));
        labels.insert(labels.end(), l.begin(), l.end());
    }
    if (features.empty()) {
        throw DomainError("no features: every segment is shorter than the buffer");
    }

    PnnModel model;
    model.cfg = cfg;
    model.ranges = fit_ranges(features);
    model.patterns = make_patterns(apply_ranges(model.ranges, features), labels);

    const SigmaSelection sel = select_sigma(model.patterns, grid);
    model.sigma = sel.sigma;

    TrainResult out;
    out.sigma = sel.sigma;
    out.loo_accuracy = sel.accuracy;
    out.pattern_count = model.patterns.count();
    out.model = std::move(model);
    return out;
}

std::size_t ConfusionMatrix::row_total(std::size_t r) const {
    return counts[r][0] + counts[r][1] + counts[r][2];
}

std::size_t ConfusionMatrix::total() const { return row_total(0) + row_total(1) + row_total(2); }

std::size_t ConfusionMatrix::trace() const { return counts[0][0] + counts[1][1] + counts[2][2]; }

double ConfusionMatrix::accuracy() const {
    const std::size_t t = total();
    return t == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(t);
}

double ConfusionMatrix::row_percent(std::size_t r, std::size_t c) const {
    const std::size_t rt = row_total(r);
    return rt == 0 ? 0.0 : 100.0 * static_cast<double>(counts[r][c]) / static_cast<double>(rt);
}

ConfusionMatrix evaluate(const PnnModel& model, std::span<const FeatureVector> features_raw,
                         std::span<const Area> labels) {
    if (features_raw.size() != labels.size()) throw DomainError("feature/label count mismatch");
    if (features_raw.empty()) throw DomainError("empty evaluation set");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < features_raw.size(); ++i) {
        const Classification c = classify(model, features_raw[i].values);
        ++cm.counts[area_index(labels[i])][area_index(c.label)];
    }
    return cm;
}

ConfusionMatrix evaluate_log(const PnnModel& model, const TaggedLog& tagged, std::int64_t max_gap) {
    if (tagged.areas.size() != tagged.log.samples.size()) {
        throw DomainError("label count does not match sample count");
    }
    const std::vector<Segment> segs = segment(tagged.log, max_gap);
    const std::vector<FeatureVector> features = build_features(tagged.log, segs, model.cfg);
    if (features.empty()) {
        throw DomainError("no features: every segment is shorter than the buffer");
    }
    const std::vector<Area> labels = center_labels(features, tagged.areas);
    return evaluate(model, features, labels);
}

std::string render_confusion_text(const ConfusionMatrix& cm) {
    std::string out;
    out += "Tagged Mobility Area | Assigned Mobility Area";
    out += "\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-20s | %-16s %-16s %-16s | %s\n", "", "A1", "A2", "A3",
                  "% Correctly Assigned");
    out += line;
    for (std::size_t r = 0; r < 3; ++r) {
        const std::string tag = to_string(static_cast<Area>(r)) + " (" +
                                std::to_string(cm.row_total(r)) + ")";
        std::array<std::string, 3> cells;
        for (std::size_t c = 0; c < 3; ++c) {
            cells[c] = std::to_string(cm.counts[r][c]) + " (" + percent(cm.row_percent(r, c)) + ")";
        }
        const std::string overall = r == 0 ? percent(100.0 * cm.accuracy()) : std::string();
        std::snprintf(line, sizeof(line), "%-20s | %-16s %-16s %-16s | %s\n", tag.c_str(),
                      cells[0].c_str(), cells[1].c_str(), cells[2].c_str(), overall.c_str());
        out += line;
    }
    return out;
}

std::string confusion_to_json(const ConfusionMatrix& cm) {
    ordered_json j;
    j["counts"] = cm.counts;
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < 3; ++r) {
        rows.push_back({cm.row_percent(r, 0), cm.row_percent(r, 1), cm.row_percent(r, 2)});
    }
    j["row_percent"] = rows;
    j["total"] = cm.total();
    j["accuracy"] = cm.accuracy();
    return j.dump(2);
}

TaggedLog classify_trip(const PnnModel& model, const TelemetryLog& log, std::int64_t max_gap) {
    validate_model(model);
    const std::vector<Segment> segs = segment(log, max_gap);
    const std::vector<FeatureVector> features = build_features(log, segs, model.cfg);

    std::vector<std::optional<Area>> assigned(log.samples.size());
    for (const FeatureVector& f : features) {
        assigned[f.center_index] = classify(model, f.values).label;
    }

    // Edge padding: samples with no window inherit the nearest classified
    // label inside their own segment, so trip durations cover the wall time.
    for (const Segment& seg : segs) {
        std::size_t first = seg.end;
        std::size_t last = seg.end;
        for (std::size_t i = seg.begin; i < seg.end; ++i) {
            if (assigned[i]) {
                if (first == seg.end) first = i;
                last = i;
            }
        }
        if (first == seg.end) {
            throw DomainError("segment of " + std::to_string(seg.size()) +
                              " samples is shorter than the buffer; no sample could be classified");
        }
        for (std::size_t i = seg.begin; i < first; ++i) assigned[i] = assigned[first];
        for (std::size_t i = last + 1; i < seg.end; ++i) assigned[i] = assigned[last];
    }

    TaggedLog out;
    out.log = log;
    out.areas.reserve(log.samples.size());
    for (const auto& a : assigned) out.areas.push_back(*a);
    return out;
}

std::string serialize_model(const PnnModel& model) {
    ordered_json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["feature"] = {{"variant", to_string(model.cfg.variant)}, {"buffer", model.cfg.buffer}};
    ordered_json ranges = ordered_json::array();
    for (const auto& [lo, hi] : model.ranges.minmax) ranges.push_back({lo, hi});
    j["ranges"] = ranges;
    j["sigma"] = model.sigma;
    j["priors"] = model.priors;
    j["costs"] = model.costs;
    j["pattern_dim"] = model.patterns.dim;
    ordered_json patterns = ordered_json::array();
    for (std::size_t i = 0; i < model.patterns.count(); ++i) {
        const auto row = model.patterns.row(i);
        patterns.push_back({{"label", to_string(model.patterns.labels[i])},
                            {"values", std::vector<double>(row.begin(), row.end())}});
    }
    j["patterns"] = patterns;
    return j.dump(2);
}

PnnModel parse_model(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid model document: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kModelFormat) {
            throw ParseError("not a vibroute model document");
        }
        if (j.at("version").get<int>() != kModelVersion) {
            throw ParseError("unsupported model version " + j.at("version").dump());
        }
        PnnModel model;
        model.cfg.variant = variant_from_string(j.at("feature").at("variant").get<std::string>());
        model.cfg.buffer = j.at("feature").at("buffer").get<int>();
        for (const auto& pair : j.at("ranges")) {
            model.ranges.minmax.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
        }
        model.sigma = j.at("sigma").get<double>();
        model.priors = j.at("priors").get<std::array<double, 3>>();
        model.costs = j.at("costs").get<std::array<double, 3>>();
        model.patterns.dim = j.at("pattern_dim").get<std::size_t>();
        for (const auto& row : j.at("patterns")) {
            model.patterns.labels.push_back(area_from_string(row.at("label").get<std::string>()));
            const auto values = row.at("values").get<std::vector<double>>();
            if (values.size() != model.patterns.dim) {
                throw ParseError("pattern row does not match pattern_dim");
            }
            model.patterns.values.insert(model.patterns.values.end(), values.begin(), values.end());
        }
        validate_model(model);
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid model document: ") + e.what());
    }
}

void save_model(const std::filesystem::path& file, const PnnModel& model) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << serialize_model(model) << '\n';
    if (!out) throw IoError("write failed for " + file.string());
}

PnnModel load_model(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_model(text);
}

}  // namespace vibroute
