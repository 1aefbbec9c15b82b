#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run
{
    int status;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::path(QZB_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Run run(const std::string& exe, const std::string& args, const fs::path& dir)
{
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = "cd '" + dir.string() + "' && QZB_OUTPUT_DIR='" +
                            dir.string() + "' '" + exe + "' " + args + " > '" +
                            out.string() + "' 2> '" + err.string() + "'";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

int count_lines(const std::string& text)
{
    int n = 0;
    for (char c : text) {
        n += c == '\n';
    }
    return n;
}

} // namespace

TEST_CASE("fig2 writes one file per panel")
{
    const fs::path dir = scratch("fig2");
    const Run r = run(QZB_CLI, "fig2 --out panels --grid 21", dir);
    REQUIRE(r.status == 0);
    for (const char* g : {"0", "3", "10", "30"}) {
        const fs::path f = dir / "panels" / (std::string("fig2_g") + g + ".csv");
        REQUIRE(fs::exists(f));
        CHECK(count_lines(slurp(f)) == 22);
    }
    const auto meta =
        nlohmann::json::parse(slurp(dir / "panels" / "fig2.meta.json"));
    CHECK(meta["code_version"].is_string());
    CHECK(meta["options"]["theta"].size() == 21);
    CHECK(meta["outputs"].size() == 4);
    CHECK(meta["rng"].contains("algorithm"));
    CHECK(meta["wall_time_s"].is_number());
}

TEST_CASE("fig2 with both conventions")
{
    const fs::path dir = scratch("fig2_both");
    const Run r = run(QZB_CLI, "fig2 --grid 3 --conventions both", dir);
    REQUIRE(r.status == 0);
    CHECK(fs::exists(dir / "fig2_g10_idler-marginal.csv"));
}

TEST_CASE("corrupted config exits with code 2")
{
    const fs::path dir = scratch("badcfg");
    std::ofstream(dir / "bad.json") << "{\"g\": [0, 3,";
    const Run a = run(QZB_CLI, "fig2 --config bad.json", dir);
    CHECK(a.status == 2);
    CHECK(a.err.find("error=config_parse") != std::string::npos);
    const Run b = run(QZB_CLI, "sweep --config bad.json", dir);
    CHECK(b.status == 2);
    CHECK(b.err.find("error=config_parse") != std::string::npos);
    const Run c = run(QZB_CLI, "sweep --config missing.json", dir);
    CHECK(c.status == 2);
    const Run d = run(QZB_CLI, "evolve --g 1 --theta 1 --omega 1", dir);
    CHECK(d.status == 2);
}

TEST_CASE("design point row on stdout matches the file")
{
    const fs::path dir = scratch("dp");
    const Run r =
        run(QZB_CLI, "design-point --omega 0 --gamma 3 --tau 5 --out dp.csv",
            dir);
    REQUIRE(r.status == 0);
    CHECK(r.out == slurp(dir / "dp.csv"));
    const std::string row = r.out.substr(r.out.find('\n') + 1);
    // omega_ghz,gamma_ghz,tau_ns,cp,omega_eff,g,theta,convention,P0,P1,...
    CHECK(row.rfind("0,3,5,1,0,0,0,joint-diagonal,1,0,0,0,0,", 0) == 0);
    CHECK(fs::exists(dir / "dp.csv.meta.json"));
}

TEST_CASE("evolve in both unit systems")
{
    const fs::path dir = scratch("evolve");
    const Run a = run(QZB_CLI, "evolve --g 10 --theta 1.4 --samples 3", dir);
    REQUIRE(a.status == 0);
    CHECK(a.out == slurp(dir / "evolve.csv"));
    CHECK(count_lines(a.out) == 4);
    const Run b = run(QZB_CLI,
                      "evolve --omega 0.1 --gamma 1 --tau 14 --samples 2 "
                      "--out phys.csv",
                      dir);
    REQUIRE(b.status == 0);
    // A fixed cutoff that is too small is a numerical failure.
    const Run c = run(QZB_CLI, "evolve --g 0 --theta 2 --cutoff 4", dir);
    CHECK(c.status == 3);
    CHECK(c.err.find("error=truncation_leak") != std::string::npos);
}

TEST_CASE("sweep output is reproducible from its sidecar")
{
    const fs::path dir = scratch("sweep");
    std::ofstream(dir / "cfg.json")
        << R"({"g": [0, 10], "theta": [0.3, 0.9], "output": "a.csv"})";
    REQUIRE(run(QZB_CLI, "sweep --config cfg.json --workers 2", dir).status ==
            0);
    auto meta = nlohmann::json::parse(slurp(dir / "a.csv.meta.json"));
    meta["options"]["output"] = "b.csv";
    std::ofstream(dir / "replay.json") << meta["options"].dump();
    REQUIRE(run(QZB_CLI, "sweep --config replay.json --workers 1", dir).status ==
            0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
}

TEST_CASE("mc subcommand")
{
    const fs::path dir = scratch("mc");
    const Run r = run(QZB_CLI,
                      "mc --g 10 --theta 1 --samples 2 --trajectories 200 "
                      "--seed 5 --workers 2",
                      dir);
    REQUIRE(r.status == 0);
    CHECK(r.out == slurp(dir / "mc.csv"));
    CHECK(r.out.find("P1_stderr,Pmulti_stderr,n_traj,rng_algo,rng_seed") !=
          std::string::npos);
    const auto meta = nlohmann::json::parse(slurp(dir / "mc.csv.meta.json"));
    CHECK(meta["rng"]["seed"] == 5);
}

TEST_CASE("oracle check passes and catches a broken dissipator")
{
    const fs::path dir = scratch("check");
    const Run good = run(QZB_CLI, "check --level fast", dir);
    CHECK(good.status == 0);
    const Run bad = run(QZB_MUTANT, "check --level fast", dir);
    CHECK(bad.status == 1);
    CHECK(bad.err.find("worst offender") != std::string::npos);
}
