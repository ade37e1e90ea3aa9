#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

const std::string cli = BICOID_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               fs::path("bicoid_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int run(const std::string& args) {
    const int status = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

TEST_CASE("cli runs each engine and exits zero") {
    TempDir dir;
    write_file(dir.path / "ssa.cfg", "ENGINE=ssa\nN_COMPARTMENTS=5\nS0=2\nT0=60\nTAU_M=20\nTAU_P=120\n"
                                     "FINAL_TIME=120\nSAMPLE_INTERVAL=30\nSNAPSHOT_MINUTES=1,2\n");
    CHECK(run("ssa --config " + (dir.path / "ssa.cfg").string() + " --seed 7 --out " +
              (dir.path / "out_ssa").string()) == 0);
    CHECK(fs::exists(dir.path / "out_ssa" / "ssa_run.csv"));
    CHECK(fs::exists(dir.path / "out_ssa" / "ssa_run.meta.json"));
    CHECK(fs::exists(dir.path / "out_ssa" / "ssa_snapshots.csv"));

    // config says ssa, subcommand says ode
    CHECK(run("ode --config " + (dir.path / "ssa.cfg").string() + " --out " + (dir.path / "out_ode").string()) != 0);

    write_file(dir.path / "ode.cfg", "ENGINE=ode\nN_COMPARTMENTS=5\nS0=2\nT0=60\nTAU_M=20\nTAU_P=120\n"
                                     "FINAL_TIME=120\nSAMPLE_INTERVAL=30\nSNAPSHOT_MINUTES=1,2\n");
    CHECK(run("ode --config " + (dir.path / "ode.cfg").string() + " --out " + (dir.path / "out_ode").string()) == 0);
    CHECK(fs::exists(dir.path / "out_ode" / "ode.csv"));

    write_file(dir.path / "abm.cfg", "ENGINE=abm\nN_COMPARTMENTS=10\nN_ITERATIONS=300\nSOURCE_TIME_PRODUCE=5\n"
                                     "SNAPSHOT_MINUTES=1,5\n");
    CHECK(run("abm --config " + (dir.path / "abm.cfg").string() + " --seed 3 --runs 4 --out " +
              (dir.path / "out_abm").string()) == 0);
    CHECK(fs::exists(dir.path / "out_abm" / "abm_mean.csv"));
}

TEST_CASE("cli rejects missing seed and bad configs with nonzero exit") {
    TempDir dir;
    write_file(dir.path / "abm.cfg", "ENGINE=abm\nN_ITERATIONS=100\nSNAPSHOT_MINUTES=1\n");
    CHECK(run("abm --config " + (dir.path / "abm.cfg").string() + " --out " + dir.path.string()) != 0);

    write_file(dir.path / "bad.cfg", "ENGINE=abm\nNOT_A_KEY=1\n");
    CHECK(run("abm --config " + (dir.path / "bad.cfg").string() + " --seed 1") != 0);
    CHECK(run("abm --config " + (dir.path / "missing.cfg").string() + " --seed 1") != 0);
    CHECK(run("frobnicate") != 0);
}

TEST_CASE("repeated seeded cli runs are byte-identical") {
    TempDir dir;
    write_file(dir.path / "abm.cfg", "ENGINE=abm\nN_COMPARTMENTS=10\nN_ITERATIONS=400\nSOURCE_TIME_PRODUCE=5\n"
                                     "SNAPSHOT_MINUTES=2,6\n");
    const auto cfg = (dir.path / "abm.cfg").string();
    REQUIRE(run("abm --config " + cfg + " --seed 11 --runs 3 --threads 1 --out " + (dir.path / "a").string()) == 0);
    REQUIRE(run("abm --config " + cfg + " --seed 11 --runs 3 --threads 4 --out " + (dir.path / "b").string()) == 0);
    CHECK(slurp(dir.path / "a" / "abm_mean.csv") == slurp(dir.path / "b" / "abm_mean.csv"));
    CHECK(slurp(dir.path / "a" / "abm_mean.meta.json") == slurp(dir.path / "b" / "abm_mean.meta.json"));
    CHECK(slurp(dir.path / "a" / "abm_snapshots.csv") == slurp(dir.path / "b" / "abm_snapshots.csv"));
}

TEST_CASE("compare scores identical files at zero") {
    TempDir dir;
    write_file(dir.path / "ssa.cfg", "ENGINE=ssa\nN_COMPARTMENTS=4\nS0=1\nT0=60\nTAU_M=20\nTAU_P=120\n"
                                     "FINAL_TIME=120\nSAMPLE_INTERVAL=30\nSNAPSHOT_MINUTES=1\n");
    REQUIRE(run("ssa --config " + (dir.path / "ssa.cfg").string() + " --seed 5 --out " + dir.path.string()) == 0);
    const auto csv = (dir.path / "ssa_run.csv").string();

    const std::string out_file = (dir.path / "compare.txt").string();
    const int status =
        std::system((cli + " compare " + csv + " " + csv + " --minutes 1,2 > " + out_file + " 2>/dev/null").c_str());
    REQUIRE(WEXITSTATUS(status) == 0);
    const auto text = slurp(out_file);
    CHECK(text.find("total,score,0\n") != std::string::npos);

    CHECK(run("compare " + csv + " " + csv + " --minutes 999") != 0);
}

TEST_CASE("out dir falls back to the environment variable") {
    TempDir dir;
    write_file(dir.path / "abm.cfg", "ENGINE=abm\nN_COMPARTMENTS=6\nN_ITERATIONS=50\nSNAPSHOT_MINUTES=0\n");
    const auto env_out = dir.path / "from_env";
    const int status = std::system(("BICOID_OUT_DIR=" + env_out.string() + " " + cli + " abm --config " +
                                    (dir.path / "abm.cfg").string() + " --seed 2 >/dev/null 2>&1")
                                       .c_str());
    REQUIRE(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(env_out / "abm_run.csv"));
}
