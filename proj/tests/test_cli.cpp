#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string binary() {
  const char* bin = std::getenv("MMC_BIN");
  if (!bin) throw std::runtime_error("MMC_BIN must point at the mmc binary");
  return bin;
}

// Runs the tool through the shell so MMC_SEED can be set or cleared per call.
RunResult run(const std::string& args, const std::string& env_prefix = "env -u MMC_SEED") {
  const std::string cmd = env_prefix + " " + binary() + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) throw std::runtime_error("popen failed");
  RunResult r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/mmc_cli_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

// Timing column is the last CSV field and legitimately differs between runs.
std::string strip_ms_column(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    out += line.substr(0, cut);
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("analyze pinned two point values", "[cli]") {
  const RunResult alpha = run("analyze --space two_point --functional alpha --r 0.5");
  REQUIRE(alpha.exit_code == 0);
  const json aj = json::parse(alpha.out);
  REQUIRE(aj.at("value") == 0.5);
  REQUIRE(aj.at("mode") == "exact");

  const RunResult sep = run("analyze --space two_point --functional sep --kappa 0.5 --kappa 0.5");
  REQUIRE(sep.exit_code == 0);
  REQUIRE(json::parse(sep.out).at("value") == 1.0);

  const RunResult lm = run("analyze --space two_point --functional levy_mean");
  REQUIRE(lm.exit_code == 0);
  const json lj = json::parse(lm.out);
  REQUIRE(lj.at("value") == 0.5);
  REQUIRE(lj.at("params").at("a") == 0.0);
  REQUIRE(lj.at("params").at("b") == 1.0);

  const RunResult od = run("analyze --space two_point --functional obs_diameter --kappa 0.4");
  REQUIRE(od.exit_code == 0);
  REQUIRE(json::parse(od.out).at("value") == 1.0);
}

TEST_CASE("analyze handles a single point space", "[cli]") {
  const std::string path = write_temp(
      "single.json", R"({"labels":["x"],"weights":[1.0],"dist_condensed":[]})");
  for (const char* func : {"alpha --r 0.5", "pd --kappa 0.2", "obs_variation --p 1"}) {
    const RunResult r =
        run("analyze --space " + path + " --functional " + std::string(func));
    REQUIRE(r.exit_code == 0);
    REQUIRE(json::parse(r.out).at("value") == 0.0);
  }
}

TEST_CASE("verify passes on reference spaces", "[cli]") {
  const RunResult r = run("verify --space two_point --seed 3");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j.at("all_pass") == true);
  REQUIRE(j.at("spaces").size() == 1);
  REQUIRE(j.at("spaces")[0].at("checks").size() > 50);
}

TEST_CASE("verify signals failures through the exit code", "[cli]") {
  // A negative tolerance turns the equality-tight checks into failures.
  const RunResult r = run("verify --space two_point --seed 3 --tol -0.5");
  REQUIRE(r.exit_code == 1);
  REQUIRE(json::parse(r.out).at("all_pass") == false);
}

TEST_CASE("input errors exit with code two", "[cli]") {
  const std::string bad = write_temp(
      "bad.json",
      R"({"labels":["a","b","c"],"weights":[1,1,1],"dist_condensed":[1.0,5.0,1.0]})");
  REQUIRE(run("analyze --space " + bad + " --functional alpha --r 0.5").exit_code == 2);
  REQUIRE(run("verify --space " + bad).exit_code == 2);
  REQUIRE(run("analyze --space two_point --functional no_such").exit_code == 2);
  REQUIRE(run("analyze --space two_point --functional sep --kappa 0.5").exit_code == 2);
  REQUIRE(run("analyze --functional alpha").exit_code == 2);  // --space is required
  REQUIRE(run("sweep --space two_point").exit_code == 2);     // --screen is required
  REQUIRE(run("analyze --space two_point --functional alpha --no-such-flag").exit_code == 2);
  REQUIRE(run("--help").exit_code == 0);
}

TEST_CASE("seeded commands reproduce byte for byte", "[cli]") {
  const std::string cmd =
      "analyze --space cloud:d=2,N=9,seed=3 --functional levy_radius --kappa 0.2 "
      "--family envelope --count 5";
  const RunResult a = run(cmd + " --seed 11");
  const RunResult b = run(cmd + " --seed 11");
  REQUIRE(a.exit_code == 0);
  REQUIRE(a.out == b.out);

  // The environment seed matches the flag, and the flag wins over it.
  const RunResult c = run(cmd, "env MMC_SEED=11");
  REQUIRE(c.out == a.out);
  const RunResult d = run(cmd + " --seed 11", "env MMC_SEED=4");
  REQUIRE(d.out == a.out);
  const RunResult e = run(cmd + " --seed 12");
  REQUIRE(e.out != a.out);
}

TEST_CASE("sweep emits a sorted deterministic table", "[cli]") {
  const std::string cmd =
      "sweep --space sphere:n=6,N=36,seed=2 --space sphere:n=3,N=36,seed=2 "
      "--screen euclid:1 --count 4 --seed 7";
  const RunResult a = run(cmd);
  REQUIRE(a.exit_code == 0);
  std::istringstream in(a.out);
  std::string header;
  REQUIRE(std::getline(in, header));
  REQUIRE(header == "n,space,screen,kappa,p,obs_diameter,pd_mode,obs_variation_p,iset_diameter,ms");
  std::string row1, row2;
  REQUIRE(std::getline(in, row1));
  REQUIRE(std::getline(in, row2));
  REQUIRE(row1.substr(0, 2) == "3,");  // rows ordered by n despite flag order
  REQUIRE(row2.substr(0, 2) == "6,");

  const RunResult b = run(cmd);
  REQUIRE(strip_ms_column(a.out) == strip_ms_column(b.out));

  const RunResult single_run =
      run("sweep --space two_point --screen euclid:1 --count 2 --seed 1");
  REQUIRE(single_run.exit_code == 0);
}

TEST_CASE("analyze writes payloads to files on request", "[cli]") {
  const std::string path = "/tmp/mmc_cli_payload.json";
  std::remove(path.c_str());
  const RunResult r =
      run("analyze --space two_point --functional alpha --r 0.5 --out " + path);
  REQUIRE(r.exit_code == 0);
  std::ifstream in(path);
  REQUIRE(in.good());
  json j;
  in >> j;
  REQUIRE(j.at("value") == 0.5);
  std::remove(path.c_str());
}
