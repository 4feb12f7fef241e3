// End-to-end checks of the bcb binary: exit codes, file outputs, and
// byte-level determinism of the tables.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const fs::path kWorkDir = fs::temp_directory_path() / "bcb_cli_tests";

int run_cli(const std::string& args) {
  fs::create_directories(kWorkDir);
  const std::string cmd = "cd " + kWorkDir.string() + " && " + BCB_BIN_PATH +
                          " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& name) {
  std::ifstream in(kWorkDir / name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool file_exists(const std::string& name) {
  return fs::exists(kWorkDir / name);
}

}  // namespace

TEST_CASE("cli: usage errors exit 2") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("no-such-command") == 2);
  CHECK(run_cli("compute-region --channel bsc-bc:邪") == 2);
  CHECK(run_cli("compute-region --bound marton") == 2);
  CHECK(run_cli("compute-region --channel /no/such/file.json") == 2);
  CHECK(run_cli("compare-bounds uvw uv --r0 1") == 2);
  CHECK(run_cli("compute-region --weights 1,2") == 2);
}

TEST_CASE("cli: compute-region single weight on the copy channel") {
  const int code = run_cli(
      "compute-region --channel copy --bound uvw --weights 0,1,0 "
      "--restarts 4 --max-iters 60 --seed 3 --out single");
  CHECK(code == 0);
  REQUIRE(file_exists("single.csv"));
  REQUIRE(file_exists("single.json"));
  const std::string csv = slurp("single.csv");
  CHECK(csv.find("w0,w1,w2,value,r0,r1,r2") != std::string::npos);
  // exactly one data row
  std::size_t rows = 0;
  std::istringstream ss(csv);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line[0] != '#' && line[0] != 'w') ++rows;
  }
  CHECK(rows == 1);
  // copy channel R1 axis reaches ~1 bit
  CHECK(csv.find("0,1,0,") != std::string::npos);
  const std::string json = slurp("single.json");
  CHECK(json.find("\"manifest\"") != std::string::npos);
  CHECK(json.find("\"argmax_distribution\"") != std::string::npos);
}

TEST_CASE("cli: identical seeds give byte-identical tables") {
  const std::string args =
      "compute-region --channel bsc-bc:0.1,0.2 --bound uv "
      "--weights \"0,1,0;0,0.6,0.8\" --restarts 4 --max-iters 60 --seed 11";
  CHECK(run_cli(args + " --out rep_a") == 0);
  CHECK(run_cli(args + " --out rep_b") == 0);
  const std::string a = slurp("rep_a.csv");
  const std::string b = slurp("rep_b.csv");
  REQUIRE(!a.empty());
  CHECK(a == b);
  // thread count must not change the table either
  CHECK(run_cli(args + " --threads 1 --out rep_c") == 0);
  CHECK(slurp("rep_c.csv") == a);
}

TEST_CASE("cli: verify-symmetrization passes and its negative control fails") {
  CHECK(run_cli("verify-symmetrization --fixtures 5 --seed 2 --out vpass") ==
        0);
  const std::string report = slurp("vpass.json");
  CHECK(report.find("\"pass\": true") != std::string::npos);
  CHECK(report.find("eq10") != std::string::npos);

  CHECK(run_cli("verify-symmetrization --fixtures 3 --seed 2 --corrupt "
                "--out vfail") == 3);
  const std::string failed = slurp("vfail.json");
  CHECK(failed.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("cli: verify-symmetrization single trivial fixture") {
  CHECK(run_cli("verify-symmetrization --fixtures 1 --cards "
                "U=1,V=1,T=1,W1=1,W2=1 --out vone") == 0);
}

TEST_CASE("cli: compare-bounds identical kinds is informative with zero gap") {
  const int code = run_cli(
      "compare-bounds uv uv --channel bsc-bc:0.1,0.2 --weights 0,1,0 "
      "--restarts 3 --max-iters 40 --out cmp_same");
  CHECK(code == 0);
  const std::string csv = slurp("cmp_same.csv");
  CHECK(csv.find("w0,w1,w2,value_a,value_b,diff") != std::string::npos);
  // identical specs share the seed schedule, so the gap is exactly zero
  CHECK(csv.find(",0\n") != std::string::npos);
}

TEST_CASE("cli: compare-bounds rejects bad pairs and r0 mismatches") {
  CHECK(run_cli("compare-bounds uvw nothere") == 2);
  CHECK(run_cli("compare-bounds uvw uv --r0 0 --weights 1,1,0") == 2);
}

TEST_CASE("cli: saturation informative mode with tiny fan") {
  const int code = run_cli(
      "saturation --channel bsc-bc:0.1,0.2 --bound uv --weights 0,1,0 "
      "--cards U=2,V=2 --enlarged-cards U=3,V=3 --restarts 3 "
      "--max-iters 40 --informative --out sat_small");
  CHECK(code == 0);
  const std::string csv = slurp("sat_small.csv");
  CHECK(csv.find("w0,w1,w2,base,enlarged,gap,pass") != std::string::npos);
}
