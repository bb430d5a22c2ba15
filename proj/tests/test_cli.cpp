#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kDefault = std::string(LLD_CONFIG_DIR) + "/default.json";

struct Run {
    int code = -1;
    std::string err;
};

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lld_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

Run lldrate(const std::string& args, const fs::path& dir) {
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(LLDRATE_PATH) + " " + args + " 2> " + err.string() + " > /dev/null";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

json manifest(const fs::path& out) { return json::parse(slurp(out / "manifest.json")); }

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("check on the default config", "[cli]") {
    const auto dir = scratch("check");
    const auto r = lldrate("check --config " + kDefault + " --out " + (dir / "out").string(), dir);
    CHECK(r.code == 0);
    CHECK(json::parse(slurp(dir / "out" / "violations.json")).empty());
    const auto m = manifest(dir / "out");
    CHECK(m["subcommand"] == "check");
    CHECK(m["pass"] == true);
    CHECK(m["exit_code"] == 0);
    CHECK(m["config_sha"].get<std::string>().size() == 64);
    CHECK(m.contains("wall_seconds"));
    CHECK(m.contains("versions"));
}

TEST_CASE("elliptic-rate on the default config", "[cli]") {
    const auto dir = scratch("elliptic");
    const auto out = dir / "out";
    const auto r = lldrate("elliptic-rate --config " + kDefault + " --out " + out.string(), dir);
    CHECK(r.code == 0);
    std::ifstream csv(out / "elliptic_rate.csv");
    std::string line;
    int rows = 0;
    while (std::getline(csv, line))
        if (line.find(",solution_diff,") != std::string::npos) ++rows;
    CHECK(rows == 5);
    const auto m = manifest(out);
    bool found = false;
    for (const auto& f : m["fits"]) {
        if (f["quantity"] != "solution_diff") continue;
        found = true;
        CHECK(f["slope"].get<double>() >= 0.85);
        CHECK(f["model"] == "tau");
    }
    CHECK(found);
}

TEST_CASE("config errors exit with 2 and still write the manifest", "[cli]") {
    const auto dir = scratch("badconfig");
    SECTION("syntax error reports the line") {
        const auto cfg = write_config(dir, "{\n  \"lambda\": 0.1,\n  \"x1\": \n}\n");
        const auto r = lldrate("check --config " + cfg.string() + " --out " + (dir / "out").string(), dir);
        CHECK(r.code == 2);
        CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("line 4"));
        const auto m = manifest(dir / "out");
        CHECK(m["exit_code"] == 2);
        CHECK(m["pass"] == false);
        CHECK(m["error"].contains("message"));
    }
    SECTION("wrong type reports the key") {
        const auto cfg = write_config(dir, R"({"lambda": "x"})");
        const auto r = lldrate("check --config " + cfg.string() + " --out " + (dir / "out").string(), dir);
        CHECK(r.code == 2);
        CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("lambda"));
    }
    SECTION("nonpositive eps on the command line") {
        const auto r = lldrate("elliptic-rate --config " + kDefault + " --eps-list 0.1,-1,0.01,0.001 --out " +
                                   (dir / "out").string(),
                               dir);
        CHECK(r.code == 2);
        CHECK(fs::exists(dir / "out" / "manifest.json"));
    }
}

TEST_CASE("numerical failures exit with 3", "[cli]") {
    const auto dir = scratch("numerical");
    const auto r = lldrate("elliptic-rate --config " + kDefault + " --mesh-n 8 --out " + (dir / "out").string(), dir);
    CHECK(r.code == 3);
    const auto m = manifest(dir / "out");
    CHECK(m["exit_code"] == 3);
    CHECK(m["error"]["module"].is_string());
    CHECK_FALSE(m["error"]["message"].get<std::string>().empty());
}

TEST_CASE("failed thresholds exit with 1", "[cli]") {
    const auto dir = scratch("strict");
    auto cfg = json::parse(slurp(kDefault));
    cfg["acceptance"] = {{"min_slope", 5.0}};
    const auto path = write_config(dir, cfg.dump());
    const auto r = lldrate("elliptic-rate --config " + path.string() + " --out " + (dir / "out").string(), dir);
    CHECK(r.code == 1);
    CHECK(manifest(dir / "out")["pass"] == false);
}

TEST_CASE("outputs are deterministic", "[cli]") {
    const auto dir = scratch("determinism");
    const std::string common = " --config " + kDefault + " --mesh-n 256 --seed 7 --out ";
    for (const std::string sub : {"elliptic-rate", "eigen-rate", "equilibria-rate"}) {
        const auto a = dir / (sub + "_a");
        const auto b = dir / (sub + "_b");
        REQUIRE(lldrate(sub + common + a.string(), dir).code == 0);
        REQUIRE(lldrate(sub + common + b.string(), dir).code == 0);
        for (const auto& entry : fs::directory_iterator(a)) {
            if (entry.path().extension() != ".csv") continue;
            INFO(sub << " " << entry.path().filename());
            CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
        }
    }
}

TEST_CASE("usage errors", "[cli]") {
    const auto dir = scratch("usage");
    CHECK(lldrate("", dir).code != 0);
    CHECK(lldrate("nonsense --config " + kDefault, dir).code != 0);
    CHECK(lldrate("check --config /nonexistent/config.json", dir).code != 0);
}
