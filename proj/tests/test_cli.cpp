#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("SAEV_CLI");
  REQUIRE(p != nullptr);
  return p;
}

int run_cli(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_scenario() {
  fs::path dir = fs::temp_directory_path() / "saev_cli_fixture";
  fs::create_directories(dir);
  std::ofstream g(dir / "graph.csv");
  for (int v = 0; v < 6; ++v) {
    g << v << "," << (v + 1) % 6 << ",2,1\n";
    g << (v + 1) % 6 << "," << v << ",2,1\n";
  }
  g.close();
  std::ofstream z(dir / "zones.csv");
  for (int v = 0; v < 6; ++v) z << v << "," << v << "\n";
  z.close();
  std::ofstream(dir / "stations.csv") << "0,0,50,2\n";
  std::ofstream out(dir / "scenario.txt");
  out << "schema_version = 1\n"
      << "graph = graph.csv\n"
      << "zones = zones.csv\n"
      << "stations = stations.csv\n"
      << "fleet.size = 6\n"
      << "fleet.capacity_kwh = 15\n"
      << "battery.km_per_kwh = 7\n"
      << "battery.levels = 5\n"
      << "demand.rate_per_hour = 0:6,1:6,2:6,3:6,4:6,5:6\n"
      << "demand.level_weights = 0.6,0.4,0,0,0\n"
      << "horizon_min = 300\n"
      << "seed = 3\n";
  return dir;
}

}  // namespace

TEST_CASE("validate-example passes for both documented V values") {
  REQUIRE(run_cli("validate-example --V 0.1") == 0);
  REQUIRE(run_cli("validate-example --V 1") == 0);
  REQUIRE(run_cli("validate-example --V 0.5") != 0);
}

TEST_CASE("run writes the expected artifacts and a manifest echo") {
  fs::path dir = write_scenario();
  fs::path out = dir / "out_run";
  fs::remove_all(out);
  std::string cmd = "run --scenario " + (dir / "scenario.txt").string() + " --policy mdpp" +
                    " --V 0.1 --seed 1,2 --out " + out.string();
  REQUIRE(run_cli(cmd) == 0);
  for (const char* seed : {"seed_1", "seed_2"}) {
    fs::path d = out / seed;
    for (const char* f :
         {"metrics.json", "assignments.csv", "events.log", "waiting_series.csv", "manifest.txt"})
      REQUIRE(fs::exists(d / f));
    std::string manifest = slurp(d / "manifest.txt");
    REQUIRE(manifest.find("policy = mdpp") != std::string::npos);
    REQUIRE(manifest.find("V = 0.100000") != std::string::npos);
    std::string metrics = slurp(d / "metrics.json");
    REQUIRE(metrics.find("\"audit_violations\": 0") != std::string::npos);
  }
}

TEST_CASE("repeated runs are byte-identical") {
  fs::path dir = write_scenario();
  fs::path out1 = dir / "det_a", out2 = dir / "det_b";
  fs::remove_all(out1);
  fs::remove_all(out2);
  std::string base = "run --scenario " + (dir / "scenario.txt").string() +
                     " --policy mdpp --V 0.1 --seed 9 --out ";
  REQUIRE(run_cli(base + out1.string()) == 0);
  REQUIRE(run_cli(base + out2.string()) == 0);
  for (const char* f : {"metrics.json", "assignments.csv", "events.log", "waiting_series.csv"})
    REQUIRE(slurp(out1 / "seed_9" / f) == slurp(out2 / "seed_9" / f));
}

TEST_CASE("sweep emits a per-V table") {
  fs::path dir = write_scenario();
  fs::path out = dir / "out_sweep";
  fs::remove_all(out);
  std::string cmd = "sweep --scenario " + (dir / "scenario.txt").string() +
                    " --V 0.01,0.1,0.1 --seed 1 --out " + out.string();
  REQUIRE(run_cli(cmd) == 0);
  std::string table = slurp(out / "sweep.csv");
  REQUIRE(table.find("0.010000,1,") != std::string::npos);
  REQUIRE(table.find("0.100000,pooled,") != std::string::npos);
  // the duplicated V was deduplicated: exactly two pooled rows
  std::size_t pooled = 0, pos = 0;
  while ((pos = table.find("pooled", pos)) != std::string::npos) {
    ++pooled;
    pos += 6;
  }
  REQUIRE(pooled == 2);
}

TEST_CASE("compare runs several policies on one scenario") {
  fs::path dir = write_scenario();
  fs::path out = dir / "out_cmp";
  fs::remove_all(out);
  std::string cmd = "compare --scenario " + (dir / "scenario.txt").string() +
                    " --policies mdpp,nearest_fcfs --V 0.1 --seed 1 --out " + out.string();
  REQUIRE(run_cli(cmd) == 0);
  std::string table = slurp(out / "compare.csv");
  REQUIRE(table.find("mdpp,1,") != std::string::npos);
  REQUIRE(table.find("nearest_fcfs,1,") != std::string::npos);
}

TEST_CASE("bad invocations exit nonzero with a usage error") {
  REQUIRE(run_cli("run --scenario /does/not/exist.txt") != 0);
  REQUIRE(run_cli("run") != 0);
  REQUIRE(run_cli("frobnicate") != 0);
  fs::path dir = write_scenario();
  REQUIRE(run_cli("run --scenario " + (dir / "scenario.txt").string() + " --policy bogus") != 0);
}
