#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Out {
  int code;
  std::string text;
};

/// Runs the CLI in a scratch directory, capturing stdout.
class Cli {
 public:
  Cli() : dir_(fs::temp_directory_path() / ("gridio_cli_" + std::to_string(::getpid()) + "_" + std::to_string(n_++))) {
    fs::create_directories(dir_);
  }
  ~Cli() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  Cli(const Cli&) = delete;
  Cli& operator=(const Cli&) = delete;

  Out run(const std::string& args) const {
    fs::path out = dir_ / "stdout.txt";
    std::string cmd = "cd '" + dir_.string() + "' && '" GRIDIO_CLI_PATH "' " + args + " > '" + out.string() + "' 2>/dev/null";
    int st = std::system(cmd.c_str());
    std::ifstream f(out);
    std::stringstream ss;
    ss << f.rdbuf();
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, ss.str()};
  }
  std::string bytes(const std::string& name) const {
    std::ifstream f(dir_ / name, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

 private:
  static inline int n_ = 0;
  fs::path dir_;
};

nlohmann::json js(const Out& o) { return nlohmann::json::parse(o.text); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("costmodel at the reference configuration") {
    Cli cli;
    auto o = cli.run("costmodel --alg sssp --n 2^40 --mem 2^31 --block 2^17 --h 12");
    REQUIRE(o.code == 0);
    auto j = js(o);
    CHECK(j["total_per_n"] == "904");
    CHECK(j["io_size_per_n"] == "72");
    CHECK(j["ratio"] == "113/9");  // 904/72 reduced
    CHECK(cli.run("costmodel --alg sssp --n 2^40 --mem 2^31 --block 2^17 --h 14").code == 2);
  }

  TEST_CASE("one vertex") {
    Cli cli;
    REQUIRE(cli.run("gen --rows 1 --cols 1 --seed 1 --model weighted_directed --out g").code == 0);
    auto o = cli.run("sssp g --out d --source 1,1");
    REQUIRE(o.code == 0);
    CHECK(js(o)["output"] == "d");
    CHECK(js(o)["instance"]["n"] == 1);
    CHECK(js(cli.run("verify g d --alg sssp --source 1,1"))["verdict"] == "exact");
  }

  TEST_CASE("64x64 hierarchical sssp verifies exactly and runs deterministically") {
    Cli cli;
    REQUIRE(cli.run("gen --rows 64 --cols 64 --seed 7 --model weighted_directed --out g").code == 0);
    std::string run = "sssp g --variant hierarchical --source 5,60 --mem 4096 --block 64 --h 2";
    auto a = cli.run(run + " --out d1"), b = cli.run(run + " --out d2");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(js(a)["counters"] == js(b)["counters"]);
    CHECK(cli.bytes("d1") == cli.bytes("d2"));
    auto v = cli.run("verify g d1 --alg sssp --source 5,60");
    CHECK(v.code == 0);
    CHECK(js(v)["verdict"] == "exact");
    // a different source gives different distances
    CHECK(cli.run("verify g d1 --alg sssp --source 1,1").code == 3);
  }

  TEST_CASE("other algorithms through the CLI") {
    Cli cli;
    REQUIRE(cli.run("gen --rows 20 --cols 30 --seed 2 --model tree --out t").code == 0);
    CHECK(cli.run("euler t --out e").code == 0);
    CHECK(cli.run("verify t e --alg euler").code == 0);
    REQUIRE(cli.run("gen --rows 20 --cols 30 --seed 2 --model planar_dag --out p").code == 0);
    CHECK(cli.run("tfp p --oracle path_count --out l").code == 0);
    CHECK(cli.run("verify p l --alg tfp --oracle path_count").code == 0);
    CHECK(cli.run("toposort p --out o").code == 0);
    CHECK(cli.run("verify p o --alg toposort").code == 0);
    REQUIRE(cli.run("gen --rows 20 --cols 30 --seed 2 --model weighted_undirected --out u").code == 0);
    CHECK(cli.run("mst u --variant oblivious --out m").code == 0);
    CHECK(cli.run("verify u m --alg mst").code == 0);
  }

  TEST_CASE("exit codes") {
    Cli cli;
    CHECK(cli.run("").code == 1);
    CHECK(cli.run("frobnicate").code == 1);
    CHECK(cli.run("gen --rows 2 --cols 2 --bogus 1 --out g").code == 1);
    // tall cache: M must be at least B^2
    REQUIRE(cli.run("gen --rows 4 --cols 4 --model weighted_directed --out g").code == 0);
    CHECK(cli.run("sssp g --mem 1024 --block 64 --out d").code == 1);
    // euler on a graph that is not a tree
    CHECK(cli.run("euler g --out e").code == 2);
    CHECK(cli.run("sssp missing.grid --out d").code == 2);
  }
}
