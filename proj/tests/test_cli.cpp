#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dlwe/cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int run(const std::string &args, const fs::path &dir, const std::string &redirect = "") {
    std::string cmd = std::string(DLWE_CLI_PATH) + " " + args;
    if (!redirect.empty()) cmd += " > " + (dir / redirect).string() + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string &name) {
    fs::path dir = fs::temp_directory_path() / ("dlwe_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("info reports the partition arithmetic") {
    fs::path dir = fresh_dir("info");
    REQUIRE(run("info --partition 1,1 --json", dir, "info.json") == 0);
    json j = json::parse(slurp(dir / "info.json"));
    CHECK(j["N"] == 2);
    CHECK(j["M"] == 6);
    CHECK(j["m"] == json::array({1, 2}));

    REQUIRE(run("info --partition 1,2,3,4 --json", dir, "info2.json") == 0);
    json j2 = json::parse(slurp(dir / "info2.json"));
    CHECK(j2["m"] == json::array({1, 3, 5, 7}));
    CHECK(j2["classification"] == json::array({"triangular"}));

    REQUIRE(run("info --partition 2,4,6 --json", dir, "info3.json") == 0);
    json j3 = json::parse(slurp(dir / "info3.json"));
    CHECK(j3["M"] == 36);
    CHECK(j3["classification"] == json::array({"even"}));

    // text mode includes the diagram
    REQUIRE(run("info --partition 1,1,3,4", dir, "info.txt") == 0);
    std::string text = slurp(dir / "info.txt");
    CHECK(text.find("[][][][]\n[][][]\n[]\n[]\n") != std::string::npos);
}

TEST_CASE("invalid configuration exits with code 2") {
    fs::path dir = fresh_dir("errors");
    CHECK(run("info --partition 0,1", dir) == 2);
    CHECK(run("info", dir) == 2);
    CHECK(run("field --partition 1,1 --b 0", dir) == 2);
    CHECK(run("peaks --partition 1,1 --grid 1,0,0,1,10,10", dir) == 2);
}

TEST_CASE("field command writes a deterministic CSV") {
    fs::path dir = fresh_dir("field");
    std::string args = "field --partition 1,1 --t 10 --grid -20,20,-20,20,41,41 --out " +
                       (dir / "run1").string();
    REQUIRE(run(args, dir) == 0);
    std::string csv1 = slurp(dir / "run1" / "field.csv");
    REQUIRE(!csv1.empty());
    CHECK(csv1.substr(0, 6) == "r,s,v\n");
    CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 41 * 41 + 1);

    std::string args2 = "field --partition 1,1 --t 10 --grid -20,20,-20,20,41,41 --out " +
                        (dir / "run2").string();
    REQUIRE(run(args2, dir) == 0);
    CHECK(slurp(dir / "run2" / "field.csv") == csv1);

    json meta = json::parse(slurp(dir / "run1" / "field_meta.json"));
    CHECK(meta["tau_rs_degree"] == 12);
    CHECK(meta["singular_nodes"].empty());
}

TEST_CASE("peaks command detects and classifies the six lumps") {
    fs::path dir = fresh_dir("peaks");
    std::string args = "peaks --partition 1,1 --t 10 --grid -40,40,-40,40,301,301 --out " + dir.string();
    REQUIRE(run(args, dir) == 0);
    json j = json::parse(slurp(dir / "peaks.json"));
    CHECK(j["provenance"] == "detected");
    CHECK(j["peaks"].size() == 6);
    CHECK(j["classification_consistent"] == true);
    int multi = 0, single = 0;
    for (const auto &p : j["peaks"]) {
        if (p["kind"] == "multi") ++multi;
        if (p["kind"] == "single") ++single;
    }
    CHECK(multi == 4);
    CHECK(single == 2);
}

TEST_CASE("predict command writes prediction, patterns, and comparison") {
    fs::path dir = fresh_dir("predict");
    std::string args = "predict --partition 1,1 --t 10 --compare --grid -40,40,-40,40,301,301 --out " +
                       dir.string();
    REQUIRE(run(args, dir) == 0);

    json pred = json::parse(slurp(dir / "predicted.json"));
    CHECK(pred["provenance"] == "predicted");
    CHECK(pred["peaks"].size() == 6);

    json pat = json::parse(slurp(dir / "patterns.json"));
    CHECK(pat.contains("checks"));

    json cmp = json::parse(slurp(dir / "compare.json"));
    CHECK(cmp["matched"] == 6);
    CHECK(cmp["mean_over_diameter"].get<double>() <= 0.10);
}

TEST_CASE("config file with flag overrides") {
    fs::path dir = fresh_dir("config");
    json cfg{{"partition", {1, 1}}, {"b", "1/2"}, {"omega", "1/2"}, {"t", "10"},
             {"out", (dir / "cfg_out").string()}};
    std::ofstream(dir / "run.json") << cfg.dump();

    std::string args = "info --config " + (dir / "run.json").string() + " --json";
    REQUIRE(run(args, dir, "out.json") == 0);
    CHECK(json::parse(slurp(dir / "out.json"))["M"] == 6);

    // flag overrides the config partition
    std::string args2 = "info --config " + (dir / "run.json").string() + " --partition 2,2 --json";
    REQUIRE(run(args2, dir, "out2.json") == 0);
    CHECK(json::parse(slurp(dir / "out2.json"))["M"] == 10);
}
