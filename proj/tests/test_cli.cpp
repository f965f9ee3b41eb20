#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "vibroute/classifier.hpp"
#include "vibroute/telemetry.hpp"

#ifndef VIBROUTE_CLI_PATH
#error "VIBROUTE_CLI_PATH must point at the built vibroute binary"
#endif

namespace {

namespace fs = std::filesystem;

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() / "vibroute_cli_test";
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string p(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& out_file = "/dev/null") {
    const std::string cmd = std::string(VIBROUTE_CLI_PATH) + " " + args + " >" + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("cli: full pipeline synth -> train -> classify -> recommend -> replay") {
    Workspace ws;

    // three tagged single-area logs for training
    REQUIRE(run("synth --profile A1:200 --seed 11 --out " + ws.p("a1.csv")) == 0);
    REQUIRE(run("synth --profile A2:200 --seed 12 --out " + ws.p("a2.csv")) == 0);
    REQUIRE(run("synth --profile A3:200 --seed 13 --out " + ws.p("a3.csv")) == 0);

    const std::string model = ws.p("model.json");
    REQUIRE(run("train " + ws.p("a1.csv") + " " + ws.p("a2.csv") + " " + ws.p("a3.csv") +
                " --buffer 9 --model " + model, ws.p("train.txt")) == 0);
    const std::string train_out = slurp(ws.p("train.txt"));
    CHECK(train_out.find("sphere of influence") != std::string::npos);
    CHECK(train_out.find("jackknife accuracy") != std::string::npos);

    // evaluate prints the confusion table and can write it as JSON
    REQUIRE(run("evaluate " + ws.p("a1.csv") + " --model " + model + " --json " + ws.p("eval.json"),
                ws.p("eval.txt")) == 0);
    CHECK(slurp(ws.p("eval.txt")).find("% Correctly Assigned") != std::string::npos);
    const auto ej = nlohmann::json::parse(slurp(ws.p("eval.json")));
    CHECK(ej["total"].get<int>() == 192);  // 200 samples, 9 s buffer
    CHECK(ej["accuracy"].get<double>() >= 0.0);

    // two candidate trips sharing endpoints, one mostly rough, one mostly smooth
    REQUIRE(run("synth --profile A1:50,A3:170 --seed 21 --out " + ws.p("rough.csv")) == 0);
    REQUIRE(run("synth --profile A1:200,A2:50 --seed 22 --out " + ws.p("smooth.csv")) == 0);

    // strip the area column so classify sees raw logs
    for (const char* name : {"rough", "smooth"}) {
        const auto tagged = vibroute::load_tagged_csv(ws.p(std::string(name) + ".csv"));
        vibroute::save_csv(ws.p(std::string(name) + "_raw.csv"),
                           vibroute::serialize_csv(tagged.log));
    }

    const std::string store = ws.p("store");
    REQUIRE(run("classify " + ws.p("rough_raw.csv") + " --id rough --model " + model + " --store " +
                store + " --buffer 9 --geojson " + ws.p("rough.geojson")) == 0);
    REQUIRE(run("classify " + ws.p("smooth_raw.csv") + " --id smooth --model " + model +
                " --store " + store + " --buffer 9") == 0);

    // GeoJSON: one feature per sample, labels match an in-process classification
    const auto gj = nlohmann::json::parse(slurp(ws.p("rough.geojson")));
    REQUIRE(gj["features"].size() == 220);
    const auto m = vibroute::load_model(model);
    const auto raw = vibroute::load_csv(ws.p("rough_raw.csv"));
    const auto trip = vibroute::classify_trip(m, raw.log);
    for (std::size_t i = 0; i < trip.areas.size(); ++i) {
        CHECK(gj["features"][i]["properties"]["area"] == vibroute::to_string(trip.areas[i]));
    }

    // recommend: the smooth route must win
    REQUIRE(run("recommend --origin 39.47,-0.35 --dest 39.49,-0.30 --store " + store + " --json " +
                ws.p("rec.json"), ws.p("rec.txt")) == 0);
    const std::string rec = slurp(ws.p("rec.txt"));
    CHECK(rec.find("Recommended route: smooth") != std::string::npos);
    const auto rj = nlohmann::json::parse(slurp(ws.p("rec.json")));
    CHECK(rj["recommended"] == "smooth");
    CHECK(rj["routes"].size() == 2);

    // replay emits an alert timeline, text and JSON
    REQUIRE(run("replay --id rough --store " + store + " --lookahead 10 --json " +
                ws.p("replay.json"), ws.p("replay.txt")) == 0);
    CHECK(slurp(ws.p("replay.txt")).find("alert") != std::string::npos);
    const auto aj = nlohmann::json::parse(slurp(ws.p("replay.json")));
    REQUIRE(aj.is_array());
    REQUIRE(!aj.empty());
    for (const auto& e : aj) {
        CHECK(e["t_alert"].get<std::int64_t>() <= e["t_entry"].get<std::int64_t>());
        CHECK(e["zone"] != "A1");
    }

    // export-geojson matches the classify-time GeoJSON
    REQUIRE(run("export-geojson --id rough --store " + store + " --out " + ws.p("again.geojson")) ==
            0);
    CHECK(slurp(ws.p("again.geojson")) == slurp(ws.p("rough.geojson")));
}

TEST_CASE("cli: determinism of synth and train") {
    Workspace ws;
    REQUIRE(run("synth --profile A1:60,A3:60 --seed 5 --out " + ws.p("one.csv")) == 0);
    REQUIRE(run("synth --profile A1:60,A3:60 --seed 5 --out " + ws.p("two.csv")) == 0);
    CHECK(slurp(ws.p("one.csv")) == slurp(ws.p("two.csv")));

    REQUIRE(run("synth --profile A1:100,A2:100,A3:100 --seed 6 --out " + ws.p("train.csv")) == 0);
    REQUIRE(run("train " + ws.p("train.csv") + " --buffer 5 --model " + ws.p("m1.json")) == 0);
    REQUIRE(run("train " + ws.p("train.csv") + " --buffer 5 --model " + ws.p("m2.json")) == 0);
    CHECK(slurp(ws.p("m1.json")) == slurp(ws.p("m2.json")));
}

TEST_CASE("cli: exit codes distinguish usage, io, and domain errors") {
    Workspace ws;
    // usage: unknown subcommand / missing required flag
    CHECK(run("frobnicate") == 2);
    CHECK(run("classify") == 2);

    // io: missing input file
    CHECK(run("train /nonexistent/tagged.csv --model " + ws.p("m.json")) == 3);

    // domain: tagged data without the area column
    REQUIRE(run("synth --profile A1:40,A2:40,A3:40 --seed 9 --out " + ws.p("t.csv")) == 0);
    const auto tagged = vibroute::load_tagged_csv(ws.p("t.csv"));
    vibroute::save_csv(ws.p("raw.csv"), vibroute::serialize_csv(tagged.log));
    CHECK(run("train " + ws.p("raw.csv") + " --model " + ws.p("m.json"), ws.p("err1.txt")) == 4);
    CHECK(slurp(ws.p("err1.txt")).find("area") != std::string::npos);

    // domain: 20 s of data cannot fill a 29 s buffer
    REQUIRE(run("synth --profile A1:20 --seed 9 --out " + ws.p("short.csv")) == 0);
    CHECK(run("train " + ws.p("short.csv") + " --buffer 29 --model " + ws.p("m.json"),
              ws.p("err2.txt")) == 4);
    CHECK(slurp(ws.p("err2.txt")).find("no features") != std::string::npos);

    // domain: recommend with unknown endpoints
    fs::create_directories(ws.p("store"));
    CHECK(run("recommend --origin 1,1 --dest 2,2 --store " + ws.p("store"), ws.p("err3.txt")) == 4);
    CHECK(slurp(ws.p("err3.txt")).find("no known route") != std::string::npos);
}

TEST_CASE("cli: config file supplies defaults, flags override") {
    Workspace ws;
    std::ofstream cfg(ws.p("cfg.json"));
    cfg << R"({"weights": [1, 1, 1], "seed": 33})";
    cfg.close();

    // config seed 33 must match an explicit --seed 33
    REQUIRE(run("synth --profile A1:30 --config " + ws.p("cfg.json") + " --out " + ws.p("a.csv")) ==
            0);
    REQUIRE(run("synth --profile A1:30 --seed 33 --out " + ws.p("b.csv")) == 0);
    CHECK(slurp(ws.p("a.csv")) == slurp(ws.p("b.csv")));

    // flag wins over the config value
    REQUIRE(run("synth --profile A1:30 --config " + ws.p("cfg.json") + " --seed 44 --out " +
                ws.p("c.csv")) == 0);
    REQUIRE(run("synth --profile A1:30 --seed 44 --out " + ws.p("d.csv")) == 0);
    CHECK(slurp(ws.p("c.csv")) == slurp(ws.p("d.csv")));
    CHECK(slurp(ws.p("c.csv")) != slurp(ws.p("a.csv")));
}
