#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "flexbench/archive.hpp"
#include "flexbench/cli.hpp"
#include "flexbench/json_io.hpp"

using namespace flexbench;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "flexbench");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "flexbench_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string value_of(const std::string& text, const std::string& key)
{
    const auto at = text.find(key + ": ");
    REQUIRE(at != std::string::npos);
    const auto start = at + key.size() + 2;
    return text.substr(start, text.find('\n', start) - start);
}

} // namespace

TEST_CASE("usage errors")
{
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"bogus"}).code == kExitUsage);
    CHECK(cli({"simulate"}).code == kExitUsage);
    CHECK(cli({"simulate", "--material", "unobtainium"}).code == kExitUsage);
    CHECK(cli({"simulate", "--material", "steel", "--speed", "9"}).code == kExitUsage);
    CHECK(cli({"optimize", "--material", "steel"}).code == kExitUsage);
    CHECK(cli({"optimize", "--material", "steel", "--algo", "vg", "--out", "x.json"}).code == kExitUsage);
    CHECK(cli({"optimize", "--material", "steel", "--algo", "magic", "--out", "x.json"}).code == kExitUsage);
    CHECK(cli({"optimize", "--material", "steel", "--pop", "7", "--out", "x.json"}).code == kExitUsage);
    CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("simulate prints the cut state")
{
    const CliResult r = cli({"simulate", "--material", "steel", "--speed", "2", "--rake", "0", "--depth", "1e-4"});
    REQUIRE(r.code == kExitOk);
    CHECK(value_of(r.out, "material") == "steel");
    CHECK(value_of(r.out, "cutting_speed") == "2");
    CHECK(std::stod(value_of(r.out, "cutting_force")) == doctest::Approx(40.600547143350205).epsilon(1e-6));
    CHECK(std::stod(value_of(r.out, "shear_angle")) == doctest::Approx(0.37253453551942867).epsilon(1e-6));
    CHECK(value_of(r.out, "feasible") == "true");
    CHECK(value_of(r.out, "layers") == "10000");
    CHECK(std::stod(value_of(r.out, "production_time")) == doctest::Approx(5000.0));
}

TEST_CASE("sample is deterministic")
{
    const CliResult a = cli({"sample", "--material", "tungsten-alloy", "-n", "300", "--seed", "4"});
    const CliResult b = cli({"sample", "--material", "tungsten-alloy", "-n", "300", "--seed", "4"});
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK(value_of(a.out, "samples") == "300");
    CHECK(std::stoul(value_of(a.out, "front_size")) >= 1);
    CHECK(a.out.find("cutting_speed,cutting_angle,cutting_depth,production_time,tool_wear,cutting_force,thrust_force\n") !=
          std::string::npos);

    const CliResult one = cli({"sample", "--material", "steel", "-n", "1", "--seed", "0"});
    REQUIRE(one.code == kExitOk);
    CHECK(std::stoul(value_of(one.out, "front_size")) <= 1);
    CHECK(cli({"sample", "--material", "steel", "-n", "0"}).code == kExitUsage);
}

TEST_CASE("optimize, hv and adapt work on stored archives")
{
    const fs::path dir = temp_dir("pipeline");
    const std::string arch = (dir / "steel.json").string();
    const CliResult opt =
        cli({"optimize", "--material", "steel", "--pop", "12", "--gens", "3", "--seed", "2", "--out", arch});
    REQUIRE(opt.code == kExitOk);
    CHECK(opt.out.rfind("generation,evaluations,goal,current_hypervolume,best_hypervolume\n", 0) == 0);
    CHECK(fs::exists(arch));

    const CliResult zero =
        cli({"optimize", "--material", "steel", "--pop", "12", "--gens", "0", "--seed", "2", "--out", arch});
    REQUIRE(zero.code == kExitOk);
    CHECK(load_archive(arch).generation == 0);

    const CliResult hv = cli({"hv", arch});
    REQUIRE(hv.code == kExitOk);
    CHECK(std::stod(value_of(hv.out, "hypervolume")) == std::stod(value_of(hv.out, "stored_best_hypervolume")));

    const std::string pair = (dir / "pair.json").string();
    const CliResult vg = cli({"optimize", "--materials", "steel,tungsten-alloy", "--algo", "vg-ai", "--pop", "12",
                              "--gens", "4", "--epoch", "1", "--gene-length", "3", "--out", pair});
    REQUIRE(vg.code == kExitOk);
    const ParetoArchive pa = load_archive(pair);
    CHECK(pa.tasks == std::vector<std::string>{"steel", "tungsten-alloy"});
    CHECK(pa.representation.gene_length == 3);
    CHECK(pa.epoch_length == 1);

    const CliResult missing = cli({"adapt", pair, "--material", "inconel-718"});
    CHECK(missing.code == kExitUsage);
    CHECK(missing.err.find("from-scratch campaign first") != std::string::npos);

    const CliResult ad = cli({"adapt", pair, "--material", "inconel-718", "--reference", "0.5", "--runs", "3",
                              "--pop", "12", "--gens", "3"});
    REQUIRE(ad.code == kExitOk);
    CHECK(value_of(ad.out, "target") == "inconel-718");
    CHECK(value_of(ad.out, "source") == "steel+tungsten-alloy");
    CHECK(std::stod(value_of(ad.out, "threshold")) == doctest::Approx(0.495));
    CHECK(ad.out.find("run,seed,best_hypervolume,evaluations_used,success_checkpoint\n") != std::string::npos);
    CHECK(cli({"adapt", pair, "--material", "inconel-718", "--reference", "0.5", "--runs", "3", "--pop", "12",
               "--gens", "3"})
              .out == ad.out);
}

TEST_CASE("broken inputs map to the I/O exit code")
{
    const fs::path dir = temp_dir("broken");
    CHECK(cli({"hv", (dir / "absent.json").string()}).code == kExitIo);
    write_text_file(dir / "bad.json", "{\"format_version\": 1, \"tasks\": [");
    CHECK(cli({"hv", (dir / "bad.json").string()}).code == kExitIo);
    CHECK(cli({"adapt", (dir / "bad.json").string(), "--material", "steel", "--reference", "0.9"}).code == kExitIo);
    write_text_file(dir / "config.json", "{\"runs\": \"lots\"}");
    CHECK(cli({"simulate", "--material", "steel", "--config", (dir / "config.json").string()}).code == kExitIo);
    CHECK(cli({"report", (dir / "nowhere").string()}).code == kExitIo);
    CHECK(cli({"optimize", "--material", "steel", "--out", (dir / "no" / "such" / "dir" / "a.json").string()}).code ==
          kExitIo);
}

TEST_CASE("model failures map to their own exit code")
{
    // The dummy material has no equilibrium for very thin cuts at top speed.
    const CliResult r = cli({"simulate", "--material", "steel-dummy", "--speed", "5", "--rake", "1", "--depth", "1e-6"});
    CHECK(r.code == kExitModel);
}

TEST_CASE("experiment writes a bundle that report can re-render")
{
    const fs::path dir = temp_dir("experiment");
    const CliResult r = cli({"experiment", "--materials", "steel,tungsten-alloy,inconel-718", "--pop", "8", "--gens",
                             "2", "--runs", "2", "--epoch", "1", "--seed", "5", "--threads", "2", "--out",
                             dir.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(fs::exists(dir / "runs.csv"));
    CHECK(fs::exists(dir / "config.json"));
    const std::string agg = read_text_file(dir / "aggregates.csv");
    CHECK(r.out.find(agg) != std::string::npos);

    const CliResult rep = cli({"report", dir.string()});
    REQUIRE(rep.code == kExitOk);
    CHECK(rep.out.find(read_text_file(dir / "reference_hypervolumes.csv")) != std::string::npos);
    CHECK(read_text_file(dir / "aggregates.csv") == agg);

    const CliResult refs = cli({"adapt", (dir / "nothing.json").string(), "--material", "steel", "--references",
                                (dir / "reference_hypervolumes.csv").string()});
    CHECK(refs.code == kExitIo);
}
