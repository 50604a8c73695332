// End-to-end smoke tests of the command-line binary: artifact schemas,
// exit-code conventions, and cross-file validation. Numeric behavior is
// covered by the library tests; here we pin the plumbing.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#ifndef WOPT_CLI_PATH
#error "WOPT_CLI_PATH must name the built command-line binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("wopt-cli-test-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string at(const std::string& name) { return (scratch() / name).string(); }

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  const std::string capture = at("last-output.txt");
  const std::string cmd =
      std::string(WOPT_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(capture);
  std::ostringstream os;
  os << in.rdbuf();
  r.out = os.str();
  return r;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("graph generation writes the declared topology") {
  const CliRun r = run_cli("graph --topology cycle --n 9 --out " + at("g9.json"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("wrote") != std::string::npos);

  const json g = read_json(at("g9.json"));
  CHECK(g.at("n") == 9);
  CHECK(g.at("edges").size() == 9);
  CHECK(g.at("name") == "cycle9");
}

TEST_CASE("graph files round trip unchanged") {
  REQUIRE(run_cli("graph --topology star --n 7 --out " + at("s7.json")).code == 0);
  REQUIRE(run_cli("graph --in " + at("s7.json") + " --out " + at("s7b.json")).code == 0);
  json a = read_json(at("s7.json"));
  json b = read_json(at("s7b.json"));
  a.erase("config");  // the flag echo names the producing invocation
  b.erase("config");
  CHECK(a == b);

  // Orbit labels supplied by hand survive the round trip.
  write_text(at("path3.json"),
             R"({"n": 3, "edges": [[0,1],[1,2]], "name": "path3", "orbits": [0,0]})");
  REQUIRE(run_cli("graph --in " + at("path3.json") + " --out " + at("path3b.json"))
              .code == 0);
  const json back = read_json(at("path3b.json"));
  REQUIRE(back.contains("orbits"));
  CHECK(back.at("orbits") == json::array({0, 0}));
}

TEST_CASE("random graphs are reproducible from the seed") {
  REQUIRE(run_cli("graph --topology erdos-renyi --n 8 --p 0.5 --seed 3 --out " +
                  at("er1.json")).code == 0);
  REQUIRE(run_cli("graph --topology erdos-renyi --n 8 --p 0.5 --seed 3 --out " +
                  at("er2.json")).code == 0);
  CHECK(read_text(at("er1.json")) == read_text(at("er2.json")));
  const json g = read_json(at("er1.json"));
  CHECK(std::string(g.at("name")).find("er8") == 0);
}

TEST_CASE("weights artifact carries the matrix data and its spectrum") {
  REQUIRE(run_cli("graph --topology cycle --n 9 --out " + at("g9.json")).code == 0);
  const CliRun r = run_cli("weights --heuristic metropolis --graph " + at("g9.json") +
                           " --out " + at("w9.json"));
  REQUIRE(r.code == 0);

  const json w = read_json(at("w9.json"));
  CHECK(w.at("graph") == "cycle9");
  CHECK(w.at("heuristic") == "metropolis");
  REQUIRE(w.at("w").size() == 9);
  for (const json& we : w.at("w"))
    CHECK(we.get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(w.at("slem").get<double>() == doctest::Approx(0.8440).epsilon(1e-3));
  CHECK(w.at("spectrum").size() == 9);
  CHECK(w.at("config").at("seed") == 0);
}

TEST_CASE("evaluate reports the worst case with rate fields when they apply") {
  REQUIRE(run_cli("graph --topology cycle --n 9 --out " + at("g9.json")).code == 0);
  REQUIRE(run_cli("weights --heuristic metropolis --graph " + at("g9.json") +
                  " --out " + at("w9.json")).code == 0);

  const CliRun r = run_cli("evaluate --graph " + at("g9.json") + " --weights " +
                           at("w9.json") + " --alpha 0.1 --out " + at("e9.json"));
  REQUIRE(r.code == 0);
  const json e = read_json(at("e9.json"));
  CHECK(e.at("status") == "optimal");
  CHECK(e.at("value").get<double>() == doctest::Approx(1.014677).epsilon(1e-3));
  REQUIRE(e.contains("rho"));
  CHECK(e.at("rho").get<double>() ==
        doctest::Approx(std::sqrt(1.014677)).epsilon(1e-3));
  CHECK(e.at("tau") == "infinity");
  CHECK(e.at("residuals").contains("gap"));
  CHECK(e.at("config").at("algorithm") == "diging");
  CHECK(e.at("config").at("criterion") == "rate");

  REQUIRE(run_cli("graph --topology cycle --n 3 --out " + at("g3.json")).code == 0);
  REQUIRE(run_cli("weights --heuristic metropolis --graph " + at("g3.json") +
                  " --out " + at("w3.json")).code == 0);
  const CliRun f = run_cli("evaluate --graph " + at("g3.json") + " --weights " +
                           at("w3.json") +
                           " --algorithm extra --criterion fmean --K 2 --init ball"
                           " --alpha 0.4 --out " + at("f3.json"));
  REQUIRE(f.code == 0);
  const json fm = read_json(at("f3.json"));
  CHECK(fm.at("value").get<double>() == doctest::Approx(0.19431303).epsilon(1e-3));
  CHECK(!fm.contains("rho"));
  CHECK(!fm.contains("tau"));
}

TEST_CASE("usage problems exit with 2 and domain dead ends with 1") {
  CHECK(run_cli("fly --now").code == 2);
  CHECK(run_cli("graph --topology cycle").code == 2);  // missing --n

  const CliRun missing = run_cli("evaluate --graph " + at("nope.json") +
                                 " --weights " + at("nope.json") + " --alpha 0.1");
  CHECK(missing.code == 2);
  CHECK(missing.out.find("cannot read") != std::string::npos);

  // Weights bound to one graph cannot be applied to another.
  REQUIRE(run_cli("graph --topology cycle --n 9 --out " + at("g9.json")).code == 0);
  REQUIRE(run_cli("graph --topology star --n 9 --out " + at("s9.json")).code == 0);
  REQUIRE(run_cli("weights --heuristic metropolis --graph " + at("g9.json") +
                  " --out " + at("w9.json")).code == 0);
  const CliRun mismatch = run_cli("evaluate --graph " + at("s9.json") +
                                  " --weights " + at("w9.json") + " --alpha 0.1");
  CHECK(mismatch.code == 2);

  // Zero weights keep slem at 1: a domain dead end, not a usage mistake.
  write_text(at("w0.json"), R"({"w": [0,0,0,0,0,0,0,0,0]})");
  const CliRun dead = run_cli("tune-alpha --graph " + at("g9.json") +
                              " --weights " + at("w0.json"));
  CHECK(dead.code == 1);
  CHECK(dead.out.find("slem") != std::string::npos);

  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("evaluate --help").code == 0);
}

TEST_CASE("tune-alpha emits the tuned step-size") {
  REQUIRE(run_cli("graph --topology cycle --n 3 --out " + at("g3.json")).code == 0);
  REQUIRE(run_cli("weights --heuristic metropolis --graph " + at("g3.json") +
                  " --out " + at("w3.json")).code == 0);
  const CliRun r = run_cli("tune-alpha --graph " + at("g3.json") + " --weights " +
                           at("w3.json") +
                           " --lo 0.05 --hi 0.8 --grid 6 --budget 40 --tol 1e-5"
                           " --out " + at("a3.json"));
  REQUIRE(r.code == 0);
  const json a = read_json(at("a3.json"));
  CHECK(a.at("alpha").get<double>() > 0.0);
  CHECK(a.at("value").get<double>() < 1.0);
  CHECK(a.at("evaluations").get<int>() >= 6);
  CHECK(a.at("config").at("lo").get<double>() == doctest::Approx(0.05));
}

TEST_CASE("compare writes the table along with a json twin") {
  REQUIRE(run_cli("graph --topology complete --n 2 --out " + at("k2.json")).code == 0);
  const CliRun r = run_cli("compare --graph " + at("k2.json") +
                           " --tol 1e-5 --budget 40 --out " + at("cmp.csv"));
  REQUIRE(r.code == 0);

  const std::string csv = read_text(at("cmp.csv"));
  CHECK(csv.rfind("heuristic,alpha,E,rho,tau,eig_2\n", 0) == 0);
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 10);  // header, eight heuristics, the tuned row

  const json twin = read_json(at("cmp.json"));
  REQUIRE(twin.at("rows").size() == 9);
  CHECK(twin.at("rows").back().at("heuristic") == "optimal");
  CHECK(twin.at("rows").back().at("ok") == true);

  // On a single edge the resistance heuristic pins the weight at 1, which
  // flips the spectrum to -1; the table records why the row is empty.
  int ok_rows = 0;
  for (const json& row : twin.at("rows")) {
    if (row.at("ok") == true) {
      ++ok_rows;
    } else {
      CHECK(row.at("heuristic") == "min-rtot");
      CHECK(std::string(row.at("note")).find("slem") != std::string::npos);
      CHECK(csv.find("\nmin-rtot,,,,,\n") != std::string::npos);
    }
  }
  CHECK(ok_rows == 8);
}
