#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "binormal/cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "binormal");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = binormal::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(cell == "nan" ? std::nan("") : std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("binormal_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--version"}).code == 0);
  CHECK(run({}).code == 1);
  CHECK(run({"verify", "nonsense"}).code == 1);
  CHECK(run({"verify", "two-sphere", "--r1", "3", "--r2", "2"}).code == 1);
}

TEST_CASE("two-sphere verification passes and is byte deterministic") {
  const Run a = run({"--no-timestamp", "verify", "two-sphere"});
  const Run b = run({"--no-timestamp", "verify", "two-sphere"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["pass"] == true);
  CHECK_FALSE(j.contains("timestamp"));
  const Run stamped = run({"verify", "two-sphere"});
  CHECK(nlohmann::json::parse(stamped.out).contains("timestamp"));
}

TEST_CASE("the normal measure fails the biharmonic criterion") {
  const Run r = run({"--no-timestamp", "verify", "two-sphere", "--variant", "normal"});
  CHECK(r.code == 2);
  const auto j = nlohmann::json::parse(r.out);
  // U_w at distance 3 from eps_0 - mu^{B(0,1)}_0 is 3 - (3 + 1/9).
  CHECK(j["scenarios"][0]["probe"]["r_w"]["value"].get<double>() == doctest::Approx(-1.0 / 9.0).epsilon(1e-10));
  CHECK(std::abs(j["scenarios"][0]["probe"]["r_p"]["value"].get<double>()) < 1e-12);
}

TEST_CASE("export grid writes kernel values") {
  const Run r = run({"export", "grid", "--kernel", "iterated-ball-green", "--points", "0.5,0,0;0,0,0"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2);
  // Rows are sorted, so the center comes first.
  CHECK(rows[0][3] == doctest::Approx(1.0 / (12.0 * oracle::kPi)).epsilon(1e-8));
  const Run d = run({"export", "grid", "--dim", "2", "--kernel", "iterated-ball-green", "--points", "0,0"});
  CHECK(parse_csv(d.out)[0][2] == doctest::Approx(1.0 / (8.0 * oracle::kPi)).epsilon(1e-8));
  const Run g = run({"export", "grid", "--kernel", "ball-green", "--source", "0.5,0,0", "--points", "0,0,0"});
  // G_B(0, y) = (1/|y| - 1) / (4 pi) at |y| = 1/2.
  CHECK(parse_csv(g.out)[0][3] == doctest::Approx(1.0 / (4.0 * oracle::kPi)).epsilon(1e-14));
  const Run n = run({"export", "grid", "--kernel", "newtonian", "--points", "0,0,4"});
  CHECK(parse_csv(n.out)[0][3] == doctest::Approx(1.0 / (16.0 * oracle::kPi)).epsilon(1e-14));
}

TEST_CASE("tensor grids and singular rows") {
  const Run t = run({"export", "grid", "--dim", "2", "--lower", "-1,-1", "--upper", "1,1", "--counts", "3,2"});
  REQUIRE(t.code == 0);
  const auto rows = parse_csv(t.out);
  CHECK(rows.size() == 6);
  int nan_rows = 0;
  for (const auto& row : rows) nan_rows += std::isnan(row[2]) ? 1 : 0;
  CHECK(nan_rows == 0);
  const Run s = run({"export", "grid", "--kernel", "newtonian", "--points", "0,0,0;1,0,0"});
  CHECK(s.code == 3);
  const auto srows = parse_csv(s.out);
  CHECK(std::isnan(srows[0][3]));
  CHECK(srows[1][3] == doctest::Approx(1.0 / (4.0 * oracle::kPi)));
  CHECK(run({"export", "grid", "--points", "0,0"}).code == 1);
  CHECK(run({"export", "grid", "--kernel", "bogus", "--points", "1,0,0"}).code == 1);
}

TEST_CASE("config runs") {
  const std::string good = write_temp("good.yaml",
                                      "version: 1\n"
                                      "seed: 3\n"
                                      "scenarios:\n"
                                      "  - kind: two-sphere\n"
                                      "    dim: 2\n"
                                      "    r1: 0.5\n"
                                      "    r2: 1.5\n"
                                      "  - kind: wos-laplace\n"
                                      "    samples: 2000\n"
                                      "    g: poly:z1^2 - z2^2\n"
                                      "    x: [0.2, 0.1]\n");
  const Run a = run({"--no-timestamp", "run", good});
  CHECK(a.code == 0);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["summary"]["scenarios"] == 2);
  CHECK(j["summary"]["passed"] == 2);
  const Run p = run({"--no-timestamp", "--parallel", "run", good});
  CHECK(p.out == a.out);

  const std::string unknown = write_temp("unknown.yaml",
                                         "scenarios:\n"
                                         "  - kind: two-sphere\n"
                                         "    radiuss: 2\n");
  const Run u = run({"run", unknown});
  CHECK(u.code == 1);
  CHECK(u.err.find("radiuss") != std::string::npos);

  const std::string typed = write_temp("typed.yaml", "scenarios:\n  - kind: two-sphere\n    r1: abc\n");
  const Run t = run({"run", typed});
  CHECK(t.code == 1);
  CHECK(t.err.find("r1") != std::string::npos);

  CHECK(run({"run", "/nonexistent/config.yaml"}).code == 1);
  std::filesystem::remove(good);
  std::filesystem::remove(unknown);
  std::filesystem::remove(typed);
}

TEST_CASE("solve subcommands") {
  const Run r = run({"--no-timestamp", "solve", "wos-laplace", "--dim", "2", "--samples", "4000", "--g", "poly:z1^2"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const auto& u = j["scenarios"][0]["estimates"]["u"];
  CHECK(std::abs(u["value"].get<double>() - 0.5) <= 4.0 * u["stderr"].get<double>());
  CHECK(run({"--no-timestamp", "solve", "wos-laplace", "--dim", "2", "--samples", "500"}).out ==
        run({"--no-timestamp", "solve", "wos-laplace", "--dim", "2", "--samples", "500", "--threads", "4"}).out);
  CHECK(run({"solve", "wos-laplace", "--eps", "0"}).code == 1);
}

TEST_CASE("zoo listing") {
  const Run r = run({"zoo", "list", "--dim", "3", "--max-degree", "2"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["members"].size() > 5);
}
