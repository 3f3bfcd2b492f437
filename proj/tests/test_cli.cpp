#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "peaky/analytic.hpp"
#include "peaky/commands.hpp"
#include "peaky/config.hpp"

using namespace peaky;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(PEAKY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("peaky_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("analytic CSV schema and round trip") {
    const auto r = run_cli({"analytic", "--scheme", "oopsk", "--regime", "coherent", "--M", "4", "--nu",
                            "1,0.3", "--K", "0", "--ebn0-db", "0:10:5"});
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 7);
    CHECK(rows[0] == "scheme,coherence,M,nu,K,omega,snr,ebn0_db,pe,pc_s0,pc_s1,pe_mc,mc_stderr,trials,seed");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto f = fields(rows[i]);
        REQUIRE(f.size() == 15);
        CHECK(f[0] == "oopsk");
        CHECK(f[1] == "coherent");
        for (int j = 11; j < 15; ++j) CHECK(f[j].empty());
        const double nu = std::stod(f[3]);
        const double db = std::stod(f[7]);
        ModulationSpec mod(Scheme::Oopsk, 4, nu);
        Scenario sc{mod, FadingSpec::from_rician(Coherence::Coherent, 0.0, 1.0),
                    LinkOperatingPoint::from_ebn0(from_db(db), mod)};
        CHECK(std::abs(std::stod(f[8]) - error_probability(sc).pe) <= 1e-12);
        CHECK(std::stod(f[6]) == doctest::Approx(sc.link.snr).epsilon(1e-15));
    }
    CHECK(fields(rows[2])[7] == "5");
}

TEST_CASE("single-point sweep gives one row") {
    const auto r = run_cli({"analytic", "--scheme", "oofsk", "--regime", "noncoherent", "--M", "16", "--nu",
                            "0.5", "--K", "5", "--ebn0-db", "3:3:1"});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out).size() == 2);
}

TEST_CASE("--K inf is the unfaded channel") {
    const auto r = run_cli({"analytic", "--scheme", "oopsk", "--regime", "coherent", "--M", "4", "--nu", "1",
                            "--K", "inf", "--ebn0-db", "5"});
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 2);
    const auto f = fields(rows[1]);
    CHECK(f[4] == "inf");
    // QPSK without fading: pe = 2Q(alpha) - Q(alpha)^2 with alpha^2 = snr.
    const double q = 0.5 * std::erfc(std::sqrt(std::stod(f[6])) / std::sqrt(2.0));
    CHECK(std::stod(f[8]) == doctest::Approx(2 * q - q * q).epsilon(1e-10));
}

TEST_CASE("simulate is byte-identical across runs and worker counts") {
    const std::vector<std::string> base{"simulate", "--scheme", "oofsk", "--regime", "noncoherent", "--M", "4",
                                        "--nu", "0.5", "--K", "1", "--ebn0-db", "0:10:5", "--trials", "200000",
                                        "--seed", "31"};
    auto with = [&](std::string w) {
        auto a = base;
        a.push_back("--workers");
        a.push_back(w);
        return run_cli(a);
    };
    const auto a = with("1"), b = with("1"), c = with("8");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);

    // Each row agrees with the analytic value within 3 standard errors.
    const auto an = run_cli({"analytic", "--scheme", "oofsk", "--regime", "noncoherent", "--M", "4", "--nu", "0.5",
                             "--K", "1", "--ebn0-db", "0:10:5"});
    const auto sim_rows = lines(a.out), an_rows = lines(an.out);
    REQUIRE(sim_rows.size() == an_rows.size());
    for (std::size_t i = 1; i < sim_rows.size(); ++i) {
        const auto s = fields(sim_rows[i]), t = fields(an_rows[i]);
        CHECK(s[8].empty());
        CHECK(s[13] == "200000");
        const double pe_mc = std::stod(s[11]), se = std::stod(s[12]), pe = std::stod(t[8]);
        CHECK(std::abs(pe_mc - pe) <= 3 * se);
    }
}

TEST_CASE("outputs are reproducible from the manifest") {
    const auto out = scratch("sim.csv");
    REQUIRE(run_cli({"simulate", "--scheme", "oopsk", "--regime", "noncoherent", "--M", "8", "--nu", "0.1", "--K",
                     "10", "--ebn0-db", "10", "--trials", "50000", "--seed", "5", "--out", out.string()})
                .code == 0);
    const auto manifest = nlohmann::json::parse(slurp(out.string() + ".manifest.json"));
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest["tool_version"] == cli::tool_version());
    CHECK(manifest["seed"] == 5);
    CHECK(manifest["output_paths"].size() == 1);
    const auto cfg = scratch("replay.json");
    std::ofstream(cfg) << manifest["scenario"].dump();
    const auto replay = scratch("replay.csv");
    REQUIRE(run_cli({manifest["command"].get<std::string>(), "--config", cfg.string(), "--out", replay.string()})
                .code == 0);
    CHECK(slurp(out) == slurp(replay));

    const auto an = scratch("an.csv");
    REQUIRE(run_cli({"analytic", "--config", cfg.string(), "--out", an.string()}).code == 0);
    const auto taus = lines(slurp(an.string() + ".thresholds.csv"));
    REQUIRE(taus.size() == 2);
    CHECK(fields(taus[0]).back() == "tau");
}

TEST_CASE("exponent CSV") {
    const auto one = run_cli({"exponent", "--scheme", "oofsk", "--regime", "noncoherent", "--M", "2", "--nu", "0.2",
                              "--K", "0", "--snr-db", "0", "--rates", "0:0:1"});
    REQUIRE(one.code == 0);
    const auto rows = lines(one.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "scheme,coherence,M,nu,snr,rate_nats,exponent,rho_star,integ_stderr");
    const auto f = fields(rows[1]);
    CHECK(f[5] == "0");
    CHECK(f[7] == "1");

    const auto out = scratch("exp.csv");
    REQUIRE(run_cli({"exponent", "--config", PEAKY_SOURCE_DIR "/presets/fig10.json", "--out", out.string()}).code == 0);
    const auto all = lines(slurp(out));
    CHECK(all.size() == 1 + 6 * 41);
    std::string series;
    double prev = 0.0;
    for (std::size_t i = 1; i < all.size(); ++i) {
        const auto g = fields(all[i]);
        const double e = std::stod(g[6]);
        if (g[3] == series) CHECK(e <= prev + 1e-12);
        series = g[3];
        prev = e;
    }
    const auto e0 = lines(slurp(out.string() + ".e0.csv"));
    CHECK(e0[0] == "scheme,coherence,M,nu,snr,rho,e0");
    CHECK(e0.size() == 1 + 6 * 21);

    // Rates in bits are converted to nats.
    const auto bits = run_cli({"exponent", "--config", PEAKY_SOURCE_DIR "/presets/fig10.json", "--nu", "1",
                               "--rates", "0.1:0.1:1", "--bits"});
    REQUIRE(bits.code == 0);
    CHECK(std::stod(fields(lines(bits.out)[1])[5]) == doctest::Approx(0.1 * std::log(2.0)));
}

TEST_CASE("every preset parses") {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(PEAKY_SOURCE_DIR "/presets")) {
        CHECK_NOTHROW(load_config(entry.path().string()));
        ++count;
    }
    CHECK(count == 11);
    const auto fig01 = load_config(PEAKY_SOURCE_DIR "/presets/fig01.json");
    CHECK(fig01.nu == std::vector<double>{1, 0.8, 0.3, 0.1, 0.01});
    CHECK(fig01.sweep->values().size() == 21);
}

TEST_CASE("exit codes") {
    CHECK(run_cli({}).code == cli::kExitUsage);
    CHECK(run_cli({"analytic", "--ebn0-db", "3:1:1"}).code == cli::kExitUsage);
    CHECK(run_cli({"analytic", "--nu", "2"}).code == cli::kExitUsage);
    CHECK(run_cli({"analytic", "--bogus"}).code == cli::kExitUsage);
    CHECK(run_cli({"simulate", "--trials", "10"}).code == cli::kExitUsage);
    CHECK(run_cli({"analytic", "--config", "/nonexistent.json"}).code == cli::kExitUsage);
    CHECK(run_cli({"analytic", "--help"}).code == cli::kExitOk);

    CHECK(run_binary("analytic --M 4 --nu 0.5 --ebn0-db 3") == 0);
    CHECK(run_binary("frobnicate") == 2);
}

TEST_CASE("validate detects a perturbed threshold") {
    CHECK(run_binary("validate --smoke --trials 100000") == 0);
    CHECK(run_binary("validate --smoke --trials 100000 --perturb-tau 0.5") == 1);
    const auto r = run_cli({"validate", "--smoke", "--trials", "100000"});
    CHECK(r.code == 0);
    CHECK(r.out.find("z=") != std::string::npos);
}
