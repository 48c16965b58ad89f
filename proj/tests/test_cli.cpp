#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = POPDYN_CLI;
const std::string kFixtures = POPDYN_FIXTURE_DIR;

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("popdyn_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

// env is a prefix such as "POPDYN_MAX_STATES=10"
Run run(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  fs::path out = scratch() / ("out" + std::to_string(counter) + ".txt");
  fs::path err = scratch() / ("err" + std::to_string(counter++) + ".txt");
  std::string cmd = (env.empty() ? "" : "env " + env + " ") + "\"" + kCli + "\" " + args + " >\"" + out.string() +
                    "\" 2>\"" + err.string() + "\"";
  int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string fx(const std::string& name) { return "\"" + kFixtures + "/" + name + "\""; }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate: steps=0 writes the header and the initial row") {
  Run r = run("simulate --config " + fx("ex2.json") + " --steps 0 --seed 1");
  REQUIRE(r.code == 0);
  auto l = lines(r.out);
  REQUIRE(l.size() == 2);
  CHECK(l[0] == "t,active_role,active_kind,active_type,xI,xa_1,xa_2,xc_3,xc_2,xc_1,nC");
  CHECK(l[1].rfind("0,", 0) == 0);
}

TEST_CASE("simulate: identical bytes for the same seed, csv file output") {
  fs::path a = scratch() / "a.csv", b = scratch() / "b.csv";
  REQUIRE(run("simulate --config " + fx("ex2.json") + " --steps 500 --seed 3 --csv \"" + a.string() + "\"").code == 0);
  REQUIRE(run("simulate --config " + fx("ex2.json") + " --steps 500 --seed 3 --csv \"" + b.string() + "\"").code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(lines(slurp(a)).size() == 502);
}

TEST_CASE("simulate: ex2 seed 7 settles at (14,9,0,0,0,0)") {
  Run r = run("simulate --config " + fx("ex2.json") + " --steps 20000 --seed 7");
  REQUIRE(r.code == 0);
  auto l = lines(r.out);
  REQUIRE(l.size() == 20002);
  auto tail = [](const std::string& row) {
    // drop t and the active agent description
    std::size_t p = 0;
    for (int i = 0; i < 4; ++i) p = row.find(',', p) + 1;
    return row.substr(p);
  };
  CHECK(tail(l.back()) == "14,9,0,0,0,0,23");
  for (std::size_t i = l.size() - 100; i < l.size(); ++i) CHECK(tail(l[i]) == tail(l.back()));
}

TEST_CASE("simulate: missing --seed is a configuration error") {
  CHECK(run("simulate --config " + fx("ex2.json") + " --steps 5").code == 2);
}

TEST_CASE("bad and missing configurations exit 2") {
  fs::path bad = scratch() / "bad.json";
  std::ofstream(bad) << "{\"types\": [";
  CHECK(run("equilibria --config \"" + bad.string() + "\"").code == 2);
  CHECK(run("equilibria --config \"" + (scratch() / "missing.json").string() + "\"").code == 2);
  CHECK(run("equilibria").code == 2);
  CHECK(run("frobnicate --config " + fx("ex1.json")).code == 2);
  fs::path zero = scratch() / "zero.json";
  std::ofstream(zero) << R"({"anticoordinating": [], "coordinating": [{"uC": ["1", "0"], "uD": ["0", "1"], "bestResponders": 0, "imitators": 0}]})";
  CHECK(run("equilibria --config \"" + zero.string() + "\"").code == 2);
}

TEST_CASE("state-space guard exits 3") {
  CHECK(run("oracle --config " + fx("ex1.json")).code == 3);
  CHECK(run("oracle --config " + fx("ex7_2.json") + " --max-states 10").code == 3);
  CHECK(run("oracle --config " + fx("ex7_2.json"), "POPDYN_MAX_STATES=10").code == 3);
  CHECK(run("oracle --config " + fx("ex7_2.json"), "POPDYN_MAX_STATES=100").code == 0);
  CHECK(run("stochastic --config " + fx("ex7_2.json") + " --max-states 10").code == 3);
}

TEST_CASE("equilibria: ex1 lists four, ex3 none") {
  Run r = run("equilibria --config " + fx("ex1.json"));
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  std::set<std::string> states;
  for (const auto& e : j["equilibria"]) states.insert(e["state"].get<std::string>());
  CHECK(states == std::set<std::string>{"(0,9,0,0,0,15)", "(20,0,0,0,1,15)", "(20,0,0,10,1,15)", "(15,0,0,0,0,15)"});

  Run none = run("equilibria --config " + fx("ex3.json"));
  REQUIRE(none.code == 0);
  CHECK(nlohmann::json::parse(none.out)["equilibria"].empty());
}

TEST_CASE("equilibria: ex2 reports the assumption violation") {
  Run r = run("equilibria --config " + fx("ex2.json"));
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["equilibria"].size() == 1);
  CHECK(j["equilibria"][0]["stability"]["assumptionsHold"] == false);
  CHECK(j["equilibria"][0]["stability"]["stable"] == false);
}

TEST_CASE("stochastic: ex7_1 SS set with verification") {
  Run r = run("stochastic --config " + fx("ex7_1.json") + " --epsilon 1e-4 --verify");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["stochasticallyStableSet"] == nlohmann::json::array({"(0,1,0,0)"}));
  CHECK(j["verified"] == true);
  CHECK(j["stationary"].size() == 1);
}

TEST_CASE("stochastic: a failed corroboration exits 4") {
  Run r = run("stochastic --config " + fx("ex7_4.json") + " --epsilon 1/2 --epsilon 1/3 --verify");
  CHECK(r.code == 4);
  CHECK(r.err.find("verification failed") != std::string::npos);
  CHECK(nlohmann::json::parse(r.out)["verified"] == false);
}

TEST_CASE("stochastic: epsilon outside (0,1) and non-binary populations exit 2") {
  CHECK(run("stochastic --config " + fx("ex7_1.json") + " --epsilon 0").code == 2);
  CHECK(run("stochastic --config " + fx("ex7_1.json") + " --epsilon 1").code == 2);
  CHECK(run("stochastic --config " + fx("ex7_1.json") + " --epsilon 007").code == 2);
  CHECK(run("stochastic --config " + fx("ex7_1.json") + " --epsilon 0.9").code == 0);
  CHECK(run("stochastic --config " + fx("ex2.json")).code == 2);
}

TEST_CASE("every fixture passes --verify") {
  const std::string big = " --max-states 20000000";
  for (const char* name : {"ex1.json", "ex2.json", "ex3.json", "ex7_1.json", "ex7_2.json", "ex7_3.json", "ex7_4.json"}) {
    INFO(name);
    for (const char* cmd : {"equilibria", "invariants", "oracle"}) {
      INFO(cmd);
      Run r = run(std::string(cmd) + " --config " + fx(name) + big + " --verify");
      CHECK(r.code == 0);
      if (r.code != 0) MESSAGE(r.err);
    }
  }
  for (const char* name : {"ex7_1.json", "ex7_2.json", "ex7_3.json", "ex7_4.json"}) {
    Run r = run("stochastic --config " + fx(name) + " --verify");
    CHECK_MESSAGE(r.code == 0, name << ": " << r.err);
  }
}

TEST_CASE("reports are byte-identical across runs") {
  for (const char* cmd : {"equilibria", "invariants", "oracle", "stochastic"}) {
    INFO(cmd);
    fs::path a = scratch() / "r1.json", b = scratch() / "r2.json";
    std::string args = std::string(cmd) + " --config " + fx("ex7_2.json") + " --out ";
    REQUIRE(run(args + "\"" + a.string() + "\"").code == 0);
    REQUIRE(run(args + "\"" + b.string() + "\"").code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
  }
}

TEST_CASE("oracle: adjacency export and DOT export") {
  fs::path adj = scratch() / "adj.txt", dot = scratch() / "c.dot";
  REQUIRE(run("oracle --config " + fx("ex7_1.json") + " --adjacency \"" + adj.string() + "\"").code == 0);
  CHECK(!slurp(adj).empty());
  REQUIRE(run("stochastic --config " + fx("ex7_1.json") + " --dot \"" + dot.string() + "\"").code == 0);
  CHECK(slurp(dot).rfind("digraph", 0) == 0);
}

}  // TEST_SUITE
