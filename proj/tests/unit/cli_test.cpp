#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cyber/cli/app.hpp"

using namespace cyber;
namespace fs = std::filesystem;

namespace {

const char* kCollective =
    R"({"kind":"collective-sim","seed":7,"frequency":{"type":"poisson","intensity":2},"severity":{"family":"degenerate","value":3},"replications":100})";

fs::path write_config(const std::string& name, const std::string& text)
{
    const auto dir = fs::temp_directory_path() / "cyberrisk_cli_test";
    fs::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Cli, ValidConfigHasNoDiagnostics)
{
    EXPECT_TRUE(cli::validate_text(kCollective).empty());
}

TEST(Cli, GumbelThetaBelowOne)
{
    const auto d = cli::validate_text(
        R"({"kind":"collective-sim","frequency":{"type":"poisson","intensity":2},"severity":{"family":"exponential","rate":1},"coupling":{"theta":0.5},"replications":10})");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_NE(d[0].message.find("θ ≥ 1 required"), std::string::npos);
    EXPECT_EQ(d[0].path, "/coupling/theta");
}

TEST(Cli, UnknownKindListsAllowedKinds)
{
    const auto d = cli::validate_text(R"({"kind":"nonsense"})");
    ASSERT_EQ(d.size(), 1u);
    for (const auto& k : cli::scenario_kinds()) EXPECT_NE(d[0].message.find(k), std::string::npos) << k;
}

TEST(Cli, SmokeRunWritesOutputs)
{
    const auto cfg = write_config("smoke.json", kCollective);
    cli::RunOptions o;
    o.out = cfg.parent_path() / "smoke_out";
    std::ostringstream err;
    ASSERT_EQ(cli::run_scenario(cfg, o, err), cli::kExitOk) << err.str();
    std::ifstream csv(o.out / "results.csv");
    std::size_t lines = 0;
    for (std::string l; std::getline(csv, l);) ++lines;
    EXPECT_EQ(lines, 101u);
    EXPECT_TRUE(fs::exists(o.out / "manifest.json"));

    cli::RunOptions again = o;
    again.out = cfg.parent_path() / "smoke_out2";
    ASSERT_EQ(cli::run_scenario(cfg, again, err), cli::kExitOk);
    EXPECT_EQ(cli::sha256_hex(slurp(o.out / "results.csv")), cli::sha256_hex(slurp(again.out / "results.csv")));
}

TEST(Cli, SeedOverrideChangesResults)
{
    const auto cfg = write_config(
        "seeded.json",
        R"({"kind":"collective-sim","frequency":{"type":"poisson","intensity":2},"severity":{"family":"exponential","rate":1},"replications":50})");
    cli::RunOptions a, b;
    a.out = cfg.parent_path() / "seed_a";
    b.out = cfg.parent_path() / "seed_b";
    b.seed = 99;
    std::ostringstream err;
    ASSERT_EQ(cli::run_scenario(cfg, a, err), cli::kExitOk);
    ASSERT_EQ(cli::run_scenario(cfg, b, err), cli::kExitOk);
    EXPECT_NE(slurp(a.out / "results.csv"), slurp(b.out / "results.csv"));
}

TEST(Cli, ValidationFailureExitsTwo)
{
    const auto cfg = write_config("bad.json", R"({"kind":"collective-sim","replications":-3})");
    cli::RunOptions o;
    o.out = cfg.parent_path() / "bad_out";
    std::ostringstream err;
    EXPECT_EQ(cli::run_scenario(cfg, o, err), cli::kExitValidation);
    EXPECT_FALSE(err.str().empty());
}

TEST(Cli, ExplosiveHawkesExitsThree)
{
    const auto cfg = write_config(
        "explosive.json",
        R"({"kind":"frequency-sim","arrivals":{"type":"hawkes","mu":1,"alpha":1,"beta":1},"horizon":10,"replications":5})");
    cli::RunOptions o;
    o.out = cfg.parent_path() / "explosive_out";
    std::ostringstream err;
    EXPECT_EQ(cli::run_scenario(cfg, o, err), cli::kExitModel);
    EXPECT_NE(err.str().find("explosive specification"), std::string::npos);
}

TEST(Cli, Sha256KnownVector)
{
    EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
