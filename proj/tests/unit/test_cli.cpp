#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "survode/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("survode-cli-" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string file(const std::string& name, const std::string& text = {}) const {
    const auto p = (dir / name).string();
    if (!text.empty()) std::ofstream(p) << text;
    return p;
  }
};

int run(const std::string& args) {
  const std::string cmd = std::string(SURVODE_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> rows(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> out;
  for (std::string line; std::getline(in, line);) out.push_back(survode::split_csv_line(line));
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 1") {
    Scratch s;
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("estimate --no-such-flag") == 1);
    CHECK(run("estimate --config " + s.file("c.json", "{\"bogus\": 1}")) == 1);
    CHECK(run("estimate --config " + s.file("d.json", "{not json")) == 1);
    CHECK(run("estimate --parameter survival --t0 1") == 1);
    CHECK(run("--help") == 0);
  }

  TEST_CASE("runtime errors exit with 2") {
    Scratch s;
    CHECK(run("estimate --parameter survival --t0 1 --data " + s.file("missing.csv")) == 2);
    const auto bad = s.file("bad.csv", "id,group,time,status\n1,a,2,1\n1,a,2,1\n");
    CHECK(run("estimate --parameter survival --t0 1 --data " + bad) == 2);
  }

  TEST_CASE("estimate with zero events is flat at X0") {
    Scratch s;
    const auto data = s.file("flat.csv", "id,group,time,status\n1,a,2,0\n2,a,3,0\n");
    const auto out = s.file("est.csv");
    REQUIRE(run("estimate --parameter survival --t0 1 --data " + data + " -o " + out) == 0);
    const auto t = rows(out);
    REQUIRE(t.size() >= 2);
    CHECK(t[0] == std::vector<std::string>{"analysis", "group", "time", "component", "estimate", "lower", "upper"});
    for (std::size_t i = 1; i < t.size(); ++i) {
      CHECK(t[i][4] == "1");
      CHECK(t[i][5] == "1");
      CHECK(t[i][6] == "1");
    }
  }

  TEST_CASE("simulate, then test the file") {
    Scratch s;
    const auto a = s.file("a.csv"), b = s.file("b.csv"), c = s.file("c.csv"), res = s.file("res.csv");
    REQUIRE(run("simulate --parameter cuminc --n 100 --seed 5 -o " + a) == 0);
    REQUIRE(run("simulate --parameter cuminc --n 100 --seed 5 -o " + b) == 0);
    REQUIRE(run("simulate --parameter cuminc --n 100 --seed 6 -o " + c) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
    REQUIRE(run("test --parameter cuminc --t0 1 --data " + a + " -o " + res) == 0);
    const auto t = rows(res);
    REQUIRE(t.size() == 2);
    CHECK(t[0].back() == "p_value");
  }

  TEST_CASE("config values with flag overrides") {
    Scratch s;
    const auto cfg = s.file("sim.json", R"({"scenario": {"parameter": "prevalence", "shape": "deviating"},
                                            "simulate": {"n_per_group": 30}, "seed": 3})");
    const auto a = s.file("a.csv"), b = s.file("b.csv");
    REQUIRE(run("simulate -c " + cfg + " -o " + a) == 0);
    REQUIRE(run("simulate -c " + cfg + " --seed 4 -o " + b) == 0);
    CHECK(slurp(a) != slurp(b));
    CHECK(rows(a).size() > 60);
  }

  TEST_CASE("power under the null stays near the level") {
    Scratch s;
    const auto out = s.file("power.csv");
    REQUIRE(run("power --parameter survival --kappa 0 --replications 400 --n 250 --seed 1 -o " + out) == 0);
    const auto t = rows(out);
    REQUIRE(t.size() == 2);
    const auto col = std::find(t[0].begin(), t[0].end(), "rate") - t[0].begin();
    const double rate = std::stod(t[1][static_cast<std::size_t>(col)]);
    CHECK(rate >= 0.03);
    CHECK(rate <= 0.08);
  }
}
