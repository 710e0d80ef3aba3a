#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using nlohmann::ordered_json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

std::string scratch_path(const std::string& stem) {
    static int counter = 0;
    return (std::filesystem::temp_directory_path() /
            ("hzeta_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) +
             "_" + stem))
        .string();
}

RunResult run_cli(const std::string& args) {
    std::string capture = scratch_path("capture");
    std::string cmd = std::string(CLI_PATH) + " " + args + " >" + capture + " 2>&1";
    int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream f(capture, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    r.out = ss.str();
    std::filesystem::remove(capture);
    return r;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

}  // namespace

// ===========================================================================
// usage and exit codes
// ===========================================================================

TEST_CASE("help exits zero, bad usage exits two") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("count --help").code == 0);
    CHECK(run_cli("").code == 2);                      // missing subcommand
    CHECK(run_cli("count").code == 2);                 // missing required --bmax
    CHECK(run_cli("count --bmax").code == 2);          // dangling value
    CHECK(run_cli("frobnicate").code == 2);            // unknown subcommand
    CHECK(run_cli("count --bmax 8 --bogus 3").code == 2);
    CHECK(run_cli("igusa --s nonsense").code == 2);    // malformed pair
    CHECK(run_cli("z1probe --s 2.2,1.0 --tgrid 5").code == 2);  // grid too small
}

// ===========================================================================
// count
// ===========================================================================

TEST_CASE("count: exact CSV at the smallest bound") {
    auto r = run_cli("count --bmax 8 --samples 1");
    CHECK(r.code == 0);
    CHECK(r.out == "B,N,N/B\n8,6,0.75\n");
}

TEST_CASE("count: doubling ladder reaches the expected slope") {
    auto r = run_cli("count --bmax 1000000 --samples 6");
    REQUIRE(r.code == 0);
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    CHECK(line == "B,N,N/B");
    std::string last;
    int rows = 0;
    while (std::getline(is, line))
        if (!line.empty()) {
            last = line;
            ++rows;
        }
    CHECK(rows == 6);
    double b = 0, ratio = 0;
    unsigned long long n = 0;
    REQUIRE(std::sscanf(last.c_str(), "%lf,%llu,%lf", &b, &n, &ratio) == 3);
    CHECK(b == doctest::Approx(1e6));
    CHECK(ratio == doctest::Approx(double(n) / 1e6).epsilon(1e-9));
    CHECK(std::abs(ratio - 1.7422528569) / 1.7422528569 < 0.03);
}

TEST_CASE("count: reruns and thread counts give byte-identical output") {
    auto a = run_cli("count --bmax 250000 --samples 4");
    auto b = run_cli("count --bmax 250000 --samples 4");
    auto c = run_cli("--threads 1 count --bmax 250000 --samples 4");
    auto d = run_cli("--threads 4 count --bmax 250000 --samples 4");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    CHECK(a.out == d.out);
}

// ===========================================================================
// verify
// ===========================================================================

TEST_CASE("verify: default battery passes and reports every case") {
    auto r = run_cli("verify");
    REQUIRE(r.code == 0);
    auto j = ordered_json::parse(r.out);
    CHECK(j["command"] == "verify");
    CHECK(j["failed"] == 0);
    CHECK(j["total"].get<long>() > 50);
    bool saw_oracle = false, saw_moment = false, saw_igusa = false;
    for (const auto& c : j["cases"]) {
        CHECK(c["status"] == "pass");
        std::string name = c["name"];
        saw_oracle = saw_oracle || name.find("oracle") != std::string::npos;
        saw_moment = saw_moment || name.find("moment") != std::string::npos;
        saw_igusa = saw_igusa || name.find("igusa") != std::string::npos;
    }
    CHECK(saw_oracle);
    CHECK(saw_moment);
    CHECK(saw_igusa);
}

TEST_CASE("verify: a perturbed value is caught and identified") {
    auto r = run_cli("verify --perturb");
    CHECK(r.code == 1);
    auto j = ordered_json::parse(r.out);
    CHECK(j["failed"] == 1);
    int fails = 0;
    std::string failing;
    for (const auto& c : j["cases"])
        if (c["status"] == "fail") {
            ++fails;
            failing = c["name"];
        }
    CHECK(fails == 1);
    CHECK(failing.find("oracle") != std::string::npos);
}

TEST_CASE("verify: user-supplied prime and frequency join the grid") {
    auto r = run_cli("verify --p 7 --alpha 1/7");
    REQUIRE(r.code == 0);
    auto j = ordered_json::parse(r.out);
    CHECK(j["failed"] == 0);
    bool saw = false;
    for (const auto& c : j["cases"]) {
        std::string name = c["name"];
        if (name.find("p=7") != std::string::npos && name.find("1/7") != std::string::npos)
            saw = true;
    }
    CHECK(saw);
    CHECK(run_cli("verify --p 8").code == 2);  // not prime
}

// ===========================================================================
// igusa
// ===========================================================================

TEST_CASE("igusa: survivor strip of a deep frequency") {
    auto r = run_cli("igusa --p 3 --d -2 --e 1 --alpha 1/27 --s 0.5,0.5");
    REQUIRE(r.code == 0);
    auto j = ordered_json::parse(r.out);
    CHECK(j["survivors"].get<long>() >= 1);
    CHECK(j["tail_bound"].get<double>() <= 1e-8);
    for (const auto& shell : j["survivor_shells"]) {
        int n = shell[0], m = shell[1];
        CHECK(2 * n - m <= -2);
    }

    // outside the convergence cone: usage error
    CHECK(run_cli("igusa --p 3 --d -2 --e 1 --alpha 1/27 --s 0.5,-0.5").code == 2);
}

TEST_CASE("igusa: explicit shell window") {
    auto r = run_cli("igusa --p 3 --d -1 --e 2 --alpha 1/3 --s 0.9,1.7 --range 0:0,0:0");
    REQUIRE(r.code == 0);
    auto j = ordered_json::parse(r.out);
    CHECK(j["shells"] == 1);
    CHECK(j["value"][0].get<double>() == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(std::abs(j["value"][1].get<double>()) < 1e-12);
}

// ===========================================================================
// constant
// ===========================================================================

TEST_CASE("constant: three routes agree and the product tail is reported") {
    auto r = run_cli("constant --pcut 3000 --bempirical 100000");
    REQUIRE(r.code == 0);
    auto j = ordered_json::parse(r.out);
    CHECK(j["agreement_within_5pct"] == true);
    double ce = j["c_euler"], cp = j["c_peyre"], cm = j["c_empirical"];
    CHECK(std::abs(ce - cp) / cp < 0.05);
    CHECK(cm > 1.6);
    CHECK(cm < 1.85);
    CHECK(j["short_euler_product_warning"] == false);
    CHECK(j["details"]["cone_factor"].get<double>() == doctest::Approx(1.0 / 3.0));

    // a very short Euler product is flagged, but the answers still agree
    auto warn = run_cli("constant --pcut 100 --bempirical 100000");
    REQUIRE(warn.code == 0);
    auto jw = ordered_json::parse(warn.out);
    CHECK(jw["short_euler_product_warning"] == true);
}

// ===========================================================================
// z1probe
// ===========================================================================

TEST_CASE("z1probe: emits the partial sum with its tail diagnostics") {
    auto r = run_cli("z1probe --s 2.2,1.0 --alpharange 8 --tgrid 30 --pcut 50");
    REQUIRE(r.code == 0);
    auto j = ordered_json::parse(r.out);
    CHECK(j["command"] == "z1probe");
    CHECK(j["terms"].get<long>() > 10);
    CHECK(j["beta_slope"].get<double>() <= -1.3);
    CHECK(j["summable"] == true);
    CHECK(std::isfinite(j["value"].get<double>()));
    CHECK(j["alpha_tail"].get<double>() >= 0);
    CHECK(j["t_tail"].get<double>() >= 0);
}

TEST_CASE("z1probe: byte-identical across reruns and thread settings") {
    std::string args = "z1probe --s 2.2,1.0 --alpharange 6 --tgrid 30 --pcut 50";
    auto a = run_cli(args);
    auto b = run_cli(args);
    auto c = run_cli("--threads 4 " + args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
}

// ===========================================================================
// model
// ===========================================================================

TEST_CASE("model: dump validates cleanly, corruption is caught") {
    std::string model_path = scratch_path("model.json");
    auto dump = run_cli("model dump --out " + model_path);
    REQUIRE(dump.code == 0);

    auto ok = run_cli("model validate --in " + model_path);
    CHECK(ok.code == 0);
    auto j = ordered_json::parse(ok.out);
    CHECK(j["ok"] == true);
    CHECK(j["violations"].empty());

    // semantically broken model: violations, exit 1
    std::ifstream f(model_path);
    ordered_json m;
    f >> m;
    f.close();
    m["strata"][0]["point_count"][0] = m["strata"][0]["point_count"][0].get<long>() + 1;
    std::string broken_path = scratch_path("broken.json");
    write_file(broken_path, m.dump(2));
    auto bad = run_cli("model validate --in " + broken_path);
    CHECK(bad.code == 1);
    auto jb = ordered_json::parse(bad.out);
    CHECK(jb["ok"] == false);
    CHECK(!jb["violations"].empty());

    // unreadable JSON: usage error
    std::string garbage_path = scratch_path("garbage.json");
    write_file(garbage_path, "{this is not json");
    CHECK(run_cli("model validate --in " + garbage_path).code == 2);
    CHECK(run_cli("model validate --in /nonexistent/path.json").code == 2);

    std::filesystem::remove(model_path);
    std::filesystem::remove(broken_path);
    std::filesystem::remove(garbage_path);
}

// ===========================================================================
// configuration files
// ===========================================================================

TEST_CASE("config file supplies subcommand options") {
    std::string cfg_path = scratch_path("config.ini");
    write_file(cfg_path, "[count]\nbmax=8\nsamples=1\n");
    auto r = run_cli("--config " + cfg_path + " count");
    CHECK(r.code == 0);
    CHECK(r.out == "B,N,N/B\n8,6,0.75\n");

    std::string bad_path = scratch_path("bad.ini");
    write_file(bad_path, "[count]\nbmax=notanumber\n");
    CHECK(run_cli("--config " + bad_path + " count").code == 2);

    CHECK(run_cli("--config /nonexistent/config.ini count --bmax 8").code == 2);

    std::filesystem::remove(cfg_path);
    std::filesystem::remove(bad_path);
}
