#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd =
        std::string(POLYWAVE_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("polywave_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

} // namespace

TEST(CliEvolve, TwoSiteClosedFormSnapshot) {
    const fs::path dir = fresh_dir("evolve2");
    const int code = run_cli("evolve --dims 2 --init single:0 --t 0.5 --out " +
                                 dir.string(),
                             dir / "log.txt");
    EXPECT_EQ(code, 0);
    const json snap = load_json(dir / "snapshot_000.json");
    EXPECT_EQ(snap.at("n_vertices"), 2);
    EXPECT_NEAR(snap.at("coeffs")[1].get<double>(), (1.0 + std::exp(-1.0)) / 2.0, 1e-9);
    EXPECT_NEAR(snap.at("coeffs")[2].get<double>(), (1.0 - std::exp(-1.0)) / 2.0, 1e-9);
    EXPECT_EQ(snap.at("time"), 0.5);
}

TEST(CliEvolve, SingleSiteStateIsFrozen) {
    const fs::path dir = fresh_dir("evolve1");
    const int code = run_cli("evolve --dims 1 --init single:0 --t 7 --out " + dir.string(),
                             dir / "log.txt");
    EXPECT_EQ(code, 0);
    const json snap = load_json(dir / "snapshot_000.json");
    EXPECT_EQ(snap.at("coeffs"), json({0.0, 1.0}));
}

TEST(CliEvolve, RandomStateConservesTotalSum) {
    const fs::path dir = fresh_dir("evolve12");
    const int code = run_cli(
        "evolve --dims 4x3 --init random --seed 7 --t 1 --method rk4 --out " + dir.string(),
        dir / "log.txt");
    EXPECT_EQ(code, 0);
    // last column of the last summary row is the drift
    std::ifstream in(dir / "summary.csv");
    std::string line, last;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') last = line;
    const auto comma = last.rfind(',');
    ASSERT_NE(comma, std::string::npos);
    EXPECT_LE(std::abs(std::stod(last.substr(comma + 1))), 1e-9);
}

TEST(CliEvolve, CsvSnapshotsAndWatchColumns) {
    const fs::path dir = fresh_dir("evolvecsv");
    const int code = run_cli("evolve --dims 2 --init single:0 --t 0.25 --record 0 "
                             "--watch 1 --watch 2 --format csv --out " +
                                 dir.string(),
                             dir / "log.txt");
    EXPECT_EQ(code, 0);
    EXPECT_TRUE(fs::exists(dir / "snapshot_000.csv"));
    EXPECT_TRUE(fs::exists(dir / "snapshot_001.csv"));
    const std::string summary = slurp(dir / "summary.csv");
    EXPECT_NE(summary.find("coeff_1"), std::string::npos);
    EXPECT_NE(summary.find("coeff_2"), std::string::npos);
}

TEST(CliEvolve, DeterministicOutputs) {
    const fs::path a = fresh_dir("deta");
    const fs::path b = fresh_dir("detb");
    const std::string args = "evolve --dims 3x2 --init random --seed 42 --t 0.8 ";
    EXPECT_EQ(run_cli(args + "--out " + a.string(), a / "log.txt"), 0);
    EXPECT_EQ(run_cli(args + "--out " + b.string(), b / "log.txt"), 0);
    EXPECT_EQ(slurp(a / "snapshot_000.json"), slurp(b / "snapshot_000.json"));
    EXPECT_EQ(slurp(a / "summary.csv"), slurp(b / "summary.csv"));
}

TEST(CliEvolve, ManifestHashIsEmbeddedEverywhere) {
    const fs::path dir = fresh_dir("hash");
    ASSERT_EQ(run_cli("evolve --dims 2 --init single:0 --t 0.1 --out " + dir.string(),
                      dir / "log.txt"),
              0);
    const json manifest = load_json(dir / "run_manifest.json");
    const std::string hash = manifest.at("manifest_hash");
    EXPECT_EQ(hash.size(), 16u);
    EXPECT_EQ(load_json(dir / "snapshot_000.json").at("manifest_hash"), hash);
    EXPECT_NE(slurp(dir / "summary.csv").find("# manifest_hash=" + hash),
              std::string::npos);
}

TEST(CliDecompose, ProductStateHasNoPolymers) {
    const fs::path dir = fresh_dir("decprod");
    const int code =
        run_cli("decompose --dims 3 --init product:0.2,0.5,0.7 --out " + dir.string(),
                dir / "log.txt");
    EXPECT_EQ(code, 0);
    const json report = load_json(dir / "decompose_report.json");
    EXPECT_LE(report.at("max_abs_u").get<double>(), 1e-12);
    EXPECT_LE(report.at("roundtrip_residual_linf").get<double>(), 1e-12);
}

TEST(CliDecompose, EvolvedStateReportsTinyResidual) {
    const fs::path dir = fresh_dir("decevo");
    const int code = run_cli(
        "decompose --dims 6 --init single:0 --t 1 --out " + dir.string(), dir / "log.txt");
    EXPECT_EQ(code, 0);
    const json report = load_json(dir / "decompose_report.json");
    EXPECT_LE(report.at("roundtrip_residual_rel").get<double>(), 1e-10);
}

TEST(CliDecompose, ZeroSumStateExitsFour) {
    const fs::path dir = fresh_dir("deczero");
    const fs::path state = dir / "state.json";
    {
        std::ofstream out(state);
        out << R"({"n_vertices": 2, "coeffs": [1.0, -1.0, 0.0, 0.0]})";
    }
    const int code = run_cli(
        "decompose --dims 2 --init file:" + state.string() + " --out " + dir.string(),
        dir / "log.txt");
    EXPECT_EQ(code, 4);
}

TEST(CliVerify, TwoByTwoAllIdentitiesPass) {
    const fs::path dir = fresh_dir("verify22");
    const int code = run_cli("verify --dims 2x2 --seed 1 --out " + dir.string(),
                             dir / "log.txt");
    EXPECT_EQ(code, 0);
    const json report = load_json(dir / "verify_report.json");
    EXPECT_TRUE(report.at("all_pass").get<bool>());
    for (const auto& item : report.at("identities"))
        EXPECT_TRUE(item.at("pass").get<bool>()) << item.at("identity");
}

TEST(CliVerify, ManyTrialsOnThreeSitePath) {
    const fs::path dir = fresh_dir("verify3");
    const int code = run_cli("verify --dims 3 --trials 50 --out " + dir.string(),
                             dir / "log.txt");
    EXPECT_EQ(code, 0);
}

TEST(CliVerify, PeriodicBoundaryPassesToo) {
    const fs::path dir = fresh_dir("verifyper");
    const int code = run_cli(
        "verify --dims 4 --boundary periodic --trials 5 --out " + dir.string(),
        dir / "log.txt");
    EXPECT_EQ(code, 0);
}

TEST(CliVerify, SingleSiteIsVacuouslyFine) {
    const fs::path dir = fresh_dir("verify1");
    const int code =
        run_cli("verify --dims 1 --out " + dir.string(), dir / "log.txt");
    EXPECT_EQ(code, 0);
}

TEST(CliTruncate, SweepsAndZeroesTheTopRow) {
    const fs::path dir = fresh_dir("trunc");
    const int code = run_cli(
        "truncate --dims 4 --init random --seed 3 --t 0.5 --long --out " + dir.string(),
        dir / "log.txt");
    EXPECT_EQ(code, 0);
    std::ifstream in(dir / "truncation.csv");
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#' && line[0] != 'k') rows.push_back(line);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows.back(), "4,0,0,0");
    EXPECT_TRUE(fs::exists(dir / "truncation_long.csv"));
}

TEST(CliExitCodes, ArgumentErrorsExitTwo) {
    const fs::path dir = fresh_dir("exit2");
    EXPECT_EQ(run_cli("evolve --dims 0x2 --out " + dir.string(), dir / "a.txt"), 2);
    EXPECT_EQ(run_cli("evolve --dims 2 --init bogus:1 --out " + dir.string(),
                      dir / "b.txt"),
              2);
    EXPECT_EQ(run_cli("frobnicate", dir / "c.txt"), 2);
}

TEST(CliExitCodes, SizeCapViolationsExitThree) {
    const fs::path dir = fresh_dir("exit3");
    EXPECT_EQ(run_cli("evolve --dims 5x5 --out " + dir.string(), dir / "a.txt"), 3);
    EXPECT_EQ(run_cli("evolve --dims 13 --init single:0 --t 0.1 --method exact --out " +
                          dir.string(),
                      dir / "b.txt"),
              3);
}
