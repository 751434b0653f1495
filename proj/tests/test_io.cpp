#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "cwave/config.hpp"
#include "cwave/io.hpp"

using namespace cwave;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("cwave_test_io_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("doubles round-trip exactly through text") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double v = U(rng) * std::pow(10.0, (int)(rng() % 40) - 20);
        CHECK(parse_double(format_double(v)) == v);
    }
    const double tiny = std::numeric_limits<double>::denorm_min();
    CHECK(parse_double(format_double(tiny)) == tiny);
    CHECK(format_double(0.1) == "0.1");
    CHECK(std::isnan(parse_double(format_double(NAN))));
    CHECK(parse_double(format_double(-INFINITY)) == -INFINITY);
    CHECK(parse_double(" 2.5\r") == 2.5);
    CHECK(parse_double("+1e3") == 1000.0);
    CHECK_THROWS_AS(parse_double("1,5"), IoError);
    CHECK_THROWS_AS(parse_double(""), IoError);
}

TEST_CASE("csv escaping and parsing follow RFC 4180") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    const CsvTable t = parse_csv("x,\"label, with comma\",\"multi\nline\"\r\n1,\"q\"\"uote\",z\r\n");
    REQUIRE(t.header.size() == 3);
    CHECK(t.header[1] == "label, with comma");
    CHECK(t.header[2] == "multi\nline");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][1] == "q\"uote");
    CHECK(t.column("x") == 0);
    CHECK(t.column("nope") == -1);
    // LF-only files and a missing final newline are accepted
    CHECK(parse_csv("a,b\n1,2").rows.size() == 1);
    CHECK_THROWS_AS(parse_csv("a,b\r\n1\r\n"), IoError);
    CHECK_THROWS_AS(parse_csv("a\r\n\"open\r\n"), IoError);
}

TEST_CASE("write_csv then read_csv gives back the numbers") {
    const fs::path d = scratch("csv");
    std::vector<std::vector<double>> rows;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> N;
    for (int i = 0; i < 50; ++i) rows.push_back({(double)i, N(rng), N(rng) * 1e-300, NAN});
    write_csv(d / "t.csv", {"i", "a", "b,c", "d"}, rows);
    const std::string raw = slurp(d / "t.csv");
    CHECK(raw.rfind("i,a,\"b,c\",d\r\n", 0) == 0);
    const CsvTable t = read_csv(d / "t.csv");
    REQUIRE(t.rows.size() == rows.size());
    const auto a = t.numeric("a"), b = t.numeric("b,c"), nd = t.numeric("d");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(a[i] == rows[i][1]);
        CHECK(b[i] == rows[i][2]);
        CHECK(std::isnan(nd[i]));
    }
    CHECK_THROWS_AS(write_csv(d / "bad.csv", {"one"}, {{1.0, 2.0}}), IoError);
}

TEST_CASE("run directories are fresh and manifests are append-only") {
    const fs::path root = scratch("manifest");
    const fs::path d1 = new_run_dir(root, "job");
    const fs::path d2 = new_run_dir(root, "job");
    CHECK(d1.filename() == "job-0001");
    CHECK(d2.filename() == "job-0002");

    RunManifest m;
    m.command = "test";
    m.seed = 42;
    m.outputs = {"a.csv"};
    m.checks["thing"] = true;
    std::ofstream(d1 / "a.csv") << "x\r\n";
    record_manifest(d1, m);
    CHECK(fs::exists(d1 / "manifest.json"));
    // the same file cannot be recorded twice
    CHECK_THROWS_AS(record_manifest(d1, m), IoError);
    // nor listed twice by one manifest
    RunManifest twice = m;
    twice.outputs = {"b.csv", "b.csv"};
    CHECK_THROWS_AS(record_manifest(d2, twice), IoError);

    RunManifest other = m;
    other.outputs = {"a.csv"};
    record_manifest(d2, other);  // same name, different run directory
    std::ifstream log(root / "manifest.jsonl");
    std::string line;
    int n = 0;
    while (std::getline(log, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["seed"] == 42);
        CHECK(j["checks"]["thing"] == true);
        CHECK(j.contains("versions"));
        ++n;
    }
    CHECK(n == 2);
}

TEST_CASE("json output maps non-finite numbers to null") {
    CHECK(num(NAN).is_null());
    CHECK(num(1.5) == 1.5);
    const auto a = num(RVec{1.0, INFINITY});
    CHECK(a[1].is_null());
}

TEST_CASE("config: defaults, sections and overrides") {
    const RunConfig c = parse_config(R"(
[grid]
n = 1024
half_width = 15

[physics]
p = 3

[initial]
zeta = [-4, 4]
theta = [0.0, 2.5]
perturbation = 1e-3
seed = 9

[fitting]
s_end = 5
every = 0.2
control_unstable = false
)");
    CHECK(c.n == 1024);
    CHECK(c.half_width == 15.0);
    CHECK(c.p == 3.0);
    REQUIRE(c.initial.k() == 2);
    CHECK(c.initial.zeta[0] == -4.0);
    CHECK(c.initial.theta[1] == 2.5);
    CHECK(c.seed == 9);
    CHECK(c.experiment.s_end == 5.0);
    CHECK(c.experiment.fit_every == 0.2);
    CHECK_FALSE(c.experiment.control_unstable);
    CHECK(c.experiment.pde.dt == PdeOptions{}.dt);  // untouched default
    CHECK_FALSE(c.has_physical);

    const RunConfig s = parse_config("[physics]\np = 5\n[physical]\ndx = 0.001953125\namplitude = 3\n");
    CHECK(s.has_physical);
    CHECK(s.physical.p == 5.0);
    CHECK(s.physical.dx == 0.001953125);
    CHECK(s.profile.amplitude == 3.0);
    CHECK(s.profile.width == OddProfile{}.width);

    const auto j = to_json(c);
    CHECK(j["initial"]["seed"] == 9);
    CHECK(j["fitting"]["every"] == 0.2);
}

TEST_CASE("config: mistakes are reported, not ignored") {
    CHECK_THROWS_AS(parse_config("[grid]\nnn = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[gird]\nn = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nn = \"many\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nn = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[physics]\np = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[initial]\nzeta = [0, 1]\ntheta = [0]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[initial]\nzeta = [1, 0]\ntheta = [0, 0]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[initial]\nseed = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grid = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid\n"), ConfigError);
    try {
        parse_config("[fitting]\nevery = 0.1\nsend = 3\n", "run.toml");
        FAIL("no error");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("run.toml") != std::string::npos);
        CHECK(msg.find("send") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/cwave.toml"), ConfigError);
}

TEST_CASE("the shipped configs load") {
    const fs::path dir = fs::path(CWAVE_SOURCE_DIR) / "configs";
    const RunConfig a = load_config(dir / "two_soliton.toml");
    CHECK(a.initial.k() == 2);
    const RunConfig b = load_config(dir / "odd_data.toml");
    CHECK(b.has_physical);
}
