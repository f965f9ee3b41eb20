// vibroute command-line tool: training/evaluation utilities plus the two
// operation modes (gather+classify+store, lookup+compare+recommend+alert).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vibroute/classifier.hpp"
#include "vibroute/features.hpp"
#include "vibroute/numio.hpp"
#include "vibroute/routestore.hpp"
#include "vibroute/scoring.hpp"
#include "vibroute/telemetry.hpp"

namespace {

using namespace vibroute;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitDomain = 4;

struct RunConfig {
    std::string store = "vibroute-store";
    std::string model = "vibroute-model.json";
    std::string variant = "std-yz";
    int buffer = 29;
    std::string weights = "1,1.5,2";
    std::int64_t max_gap = 2;
    double radius = 100.0;
    std::int64_t lookahead = 5;
    std::uint64_t seed = 1;
};

Weights parse_weights(const std::string& text) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string piece =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        parts.push_back(parse_double(piece, "weights"));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (parts.size() != 3) throw ParseError("expected 3 comma-separated weights, got '" + text + "'");
    Weights w{parts[0], parts[1], parts[2]};
    validate_weights(w);
    return w;
}

GeoPoint parse_point(const std::string& text) {
    const std::size_t comma = text.find(',');
    if (comma == std::string::npos) {
        throw ParseError("expected 'lat,lon', got '" + text + "'");
    }
    return GeoPoint{parse_double(text.substr(0, comma), "lat"),
                    parse_double(text.substr(comma + 1), "lon")};
}

FeatureConfig feature_config(const RunConfig& cfg) {
    FeatureConfig fc;
    fc.variant = variant_from_string(cfg.variant);
    fc.buffer = cfg.buffer;
    validate_config(fc);
    return fc;
}

// --config is applied before the flag values so explicit flags win.
void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid config " + path + ": " + e.what());
    }
    if (j.contains("store")) cfg.store = j["store"].get<std::string>();
    if (j.contains("model")) cfg.model = j["model"].get<std::string>();
    if (j.contains("variant")) cfg.variant = j["variant"].get<std::string>();
    if (j.contains("buffer")) cfg.buffer = j["buffer"].get<int>();
    if (j.contains("weights")) {
        if (j["weights"].is_array()) {
            const auto v = j["weights"].get<std::vector<double>>();
            if (v.size() != 3) throw ParseError("config weights must have 3 entries");
            cfg.weights = format_double(v[0]) + "," + format_double(v[1]) + "," + format_double(v[2]);
        } else {
            cfg.weights = j["weights"].get<std::string>();
        }
    }
    if (j.contains("max_gap")) cfg.max_gap = j["max_gap"].get<std::int64_t>();
    if (j.contains("radius")) cfg.radius = j["radius"].get<double>();
    if (j.contains("lookahead")) cfg.lookahead = j["lookahead"].get<std::int64_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("write failed for " + path);
}

int run(int argc, char** argv) {
    CLI::App app{"Road-vibration route toolkit: classify 1 Hz telemetry into mobility areas "
                 "(A1/A2/A3), score routes by severity-weighted travel time, and recommend the "
                 "route that minimises patient-cabin vibration."};
    app.require_subcommand(1);

    RunConfig cfg;
    // Pre-scan for --config so file values act as defaults under every flag.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") load_config_file(cfg, argv[i + 1]);
    }
    std::string config_path;
    auto add_shared = [&cfg, &config_path](CLI::App* cmd) {
        cmd->add_option("--config", config_path,
                        "JSON config file; explicit flags override its values");
        cmd->add_option("--store", cfg.store, "route store directory");
        cmd->add_option("--model", cfg.model, "model file path");
        cmd->add_option("--buffer", cfg.buffer, "std-yz window length in seconds")
            ->check(CLI::IsMember({5, 9, 15, 29}));
        cmd->add_option("--variant", cfg.variant, "feature variant")
            ->check(CLI::IsMember({"raw-xyz", "raw-xz", "raw-yz", "std-yz"}));
        cmd->add_option("--weights", cfg.weights, "index weights w1,w2,w3");
        cmd->add_option("--max-gap", cfg.max_gap, "max timestamp gap inside one segment (s)");
        cmd->add_option("--radius", cfg.radius, "endpoint match radius in meters");
        cmd->add_option("--lookahead", cfg.lookahead, "alert lookahead in seconds");
        cmd->add_option("--seed", cfg.seed, "random seed for synthetic data");
    };

    // train
    std::vector<std::string> train_inputs;
    auto* cmd_train = app.add_subcommand("train", "train a classifier from tagged CSV logs");
    cmd_train->add_option("inputs", train_inputs, "tagged telemetry CSV files")->required();
    add_shared(cmd_train);

    // evaluate
    std::string eval_input;
    std::string eval_json;
    auto* cmd_evaluate = app.add_subcommand("evaluate", "confusion matrix of a model on tagged data");
    cmd_evaluate->add_option("input", eval_input, "tagged telemetry CSV file")->required();
    cmd_evaluate->add_option("--json", eval_json, "also write the matrix as JSON to this path");
    add_shared(cmd_evaluate);

    // classify (operation mode 1)
    std::string classify_input, classify_id, classify_name, classify_geojson;
    auto* cmd_classify =
        app.add_subcommand("classify", "classify a raw CSV trip and store it as a route");
    cmd_classify->add_option("input", classify_input, "raw telemetry CSV file")->required();
    cmd_classify->add_option("--id", classify_id, "route id")->required();
    cmd_classify->add_option("--name", classify_name, "free-form route name");
    cmd_classify->add_option("--geojson", classify_geojson, "write classified points as GeoJSON");
    add_shared(cmd_classify);

    // recommend (operation mode 2)
    std::string rec_origin, rec_dest, rec_json;
    auto* cmd_recommend =
        app.add_subcommand("recommend", "compare stored routes between two endpoints");
    cmd_recommend->add_option("--origin", rec_origin, "origin 'lat,lon'")->required();
    cmd_recommend->add_option("--dest", rec_dest, "destination 'lat,lon'")->required();
    cmd_recommend->add_option("--json", rec_json, "also write the comparison as JSON to this path");
    add_shared(cmd_recommend);

    // replay
    std::string replay_id, replay_json;
    auto* cmd_replay = app.add_subcommand("replay", "replay the alert timeline of a stored route");
    cmd_replay->add_option("--id", replay_id, "route id")->required();
    cmd_replay->add_option("--json", replay_json, "also write the timeline as JSON to this path");
    add_shared(cmd_replay);

    // synth
    std::string synth_profile = "A1:600,A2:600,A3:600";
    std::string synth_out, synth_endpoints;
    auto* cmd_synth = app.add_subcommand("synth", "generate a tagged synthetic CSV");
    cmd_synth->add_option("--profile", synth_profile, "area profile, e.g. A1:600,A2:600,A3:600");
    cmd_synth->add_option("--out", synth_out, "output CSV path")->required();
    cmd_synth->add_option("--endpoints", synth_endpoints,
                          "route endpoints 'olat,olon,dlat,dlon' (default shared test endpoints)");
    add_shared(cmd_synth);

    // export-geojson
    std::string export_id, export_out;
    auto* cmd_export = app.add_subcommand("export-geojson", "export a stored route as GeoJSON");
    cmd_export->add_option("--id", export_id, "route id")->required();
    cmd_export->add_option("--out", export_out, "output path (default: <id>.geojson)");
    add_shared(cmd_export);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (cmd_train->parsed()) {
        std::vector<TaggedLog> logs;
        for (const std::string& path : train_inputs) logs.push_back(load_tagged_csv(path));
        const TrainResult result = train(logs, feature_config(cfg), cfg.max_gap);
        save_model(cfg.model, result.model);
        std::cout << "trained on " << result.pattern_count << " patterns ("
                  << to_string(result.model.cfg.variant);
        if (result.model.cfg.variant == FeatureVariant::std_yz_v) {
            std::cout << ", buffer " << result.model.cfg.buffer << " s";
        }
        std::cout << ")\n";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "sphere of influence: %.7g\n", result.sigma);
        std::cout << buf;
        std::snprintf(buf, sizeof(buf), "jackknife accuracy: %.2f%%\n", result.loo_accuracy * 100.0);
        std::cout << buf;
        std::cout << "model written to " << cfg.model << "\n";
        return kExitOk;
    }

    if (cmd_evaluate->parsed()) {
        const PnnModel model = load_model(cfg.model);
        const TaggedLog tagged = load_tagged_csv(eval_input);
        const ConfusionMatrix cm = evaluate_log(model, tagged, cfg.max_gap);
        std::cout << render_confusion_text(cm);
        if (!eval_json.empty()) write_text(eval_json, confusion_to_json(cm) + "\n");
        return kExitOk;
    }

    if (cmd_classify->parsed()) {
        const PnnModel model = load_model(cfg.model);
        ParsedCsv parsed = load_csv(classify_input);
        if (!classify_name.empty()) parsed.log.meta = classify_name;
        const ClassifiedTrip trip = classify_trip(model, parsed.log, cfg.max_gap);
        const RouteRecord record = make_route_record(classify_id, trip, parse_weights(cfg.weights));
        RouteStore store(cfg.store);
        store.put(record);
        if (!classify_geojson.empty()) write_text(classify_geojson, to_geojson(trip) + "\n");
        const AreaDurations d = record.metrics.durations;
        std::cout << "stored route '" << record.id << "': " << trip.log.samples.size()
                  << " samples, A1/A2/A3 = " << d.t1 << "/" << d.t2 << "/" << d.t3
                  << " s, index " << format_double(record.metrics.index) << ", score "
                  << format_double(record.metrics.score) << "\n";
        return kExitOk;
    }

    if (cmd_recommend->parsed()) {
        const RouteStore store(cfg.store);
        const RouteComparison comparison = store.recommend(parse_point(rec_origin),
                                                           parse_point(rec_dest),
                                                           parse_weights(cfg.weights), cfg.radius);
        std::cout << render_comparison_text(comparison, parse_weights(cfg.weights));
        if (!rec_json.empty()) {
            write_text(rec_json, comparison_to_json(comparison, parse_weights(cfg.weights)) + "\n");
        }
        return kExitOk;
    }

    if (cmd_replay->parsed()) {
        const RouteStore store(cfg.store);
        const RouteRecord record = store.get(replay_id);
        const std::vector<AlertEvent> events = alert_replay(record.trip, cfg.lookahead);
        for (const AlertEvent& e : events) {
            std::cout << "t=" << e.t_alert << " alert: entering " << to_string(e.zone) << " at t="
                      << e.t_entry << "\n";
        }
        std::cout << events.size() << " alert(s) for route '" << replay_id << "'\n";
        if (!replay_json.empty()) {
            nlohmann::ordered_json j = nlohmann::ordered_json::array();
            for (const AlertEvent& e : events) {
                j.push_back({{"t_alert", e.t_alert}, {"t_entry", e.t_entry}, {"zone", to_string(e.zone)}});
            }
            write_text(replay_json, j.dump(2) + "\n");
        }
        return kExitOk;
    }

    if (cmd_synth->parsed()) {
        const std::vector<ProfileEntry> profile = parse_profile(synth_profile);
        PathSpec path;
        if (!synth_endpoints.empty()) {
            std::vector<double> p;
            std::size_t start = 0;
            while (start <= synth_endpoints.size()) {
                const std::size_t comma = synth_endpoints.find(',', start);
                p.push_back(parse_double(
                    synth_endpoints.substr(start,
                                           comma == std::string::npos ? std::string::npos : comma - start),
                    "endpoints"));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            if (p.size() != 4) throw ParseError("expected 'olat,olon,dlat,dlon'");
            path = PathSpec{p[0], p[1], p[2], p[3]};
        }
        const TaggedLog data = synth_route(profile, NoiseSpec{}, cfg.seed, path);
        save_csv(synth_out, serialize_csv(data));
        std::cout << "wrote " << data.log.samples.size() << " samples to " << synth_out << "\n";
        return kExitOk;
    }

    if (cmd_export->parsed()) {
        const RouteStore store(cfg.store);
        const RouteRecord record = store.get(export_id);
        const std::string out_path = export_out.empty() ? export_id + ".geojson" : export_out;
        write_text(out_path, to_geojson(record.trip) + "\n");
        std::cout << "wrote " << record.trip.log.samples.size() << " features to " << out_path << "\n";
        return kExitOk;
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const vibroute::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const vibroute::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}
