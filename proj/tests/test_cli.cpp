#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" + std::string(FOLBM_CLI_PATH) + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("folbm_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes one row per path and step") {
  const fs::path dir = fresh_dir("rows");
  REQUIRE(run("simulate --model kronecker --n-paths 7 --steps 30 --dt 0.01 --out " + dir.string()) == 0);
  CHECK(count_lines(slurp(dir / "paths.csv")) == 1 + 7 * 31);
  const std::string meta = slurp(dir / "meta.txt");
  CHECK(meta.find("model = kronecker") != std::string::npos);
  CHECK(meta.find("seed = 1") != std::string::npos);
}

TEST_CASE("output does not depend on the thread count") {
  const fs::path d1 = fresh_dir("t1");
  const fs::path d4 = fresh_dir("t4");
  const std::string args = "simulate --n-paths 40 --steps 100 --seed 3 --out ";
  REQUIRE(run(args + d1.string(), "FOLBM_THREADS=1") == 0);
  REQUIRE(run(args + d4.string(), "FOLBM_THREADS=4") == 0);
  CHECK(slurp(d1 / "paths.csv") == slurp(d4 / "paths.csv"));
}

TEST_CASE("invalid input exits with status 2") {
  const fs::path dir = fresh_dir("bad");
  CHECK(run("simulate --b 0.5 --out " + dir.string()) == 2);
  CHECK(run("simulate --dt -1 --out " + dir.string()) == 2);
  CHECK(run("simulate --model sphere --out " + dir.string()) == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("verify --only nonsense --out " + dir.string()) == 2);

  const fs::path cfg = dir / "bad.ini";
  std::ofstream(cfg) << "bogus_key = 1\n";
  CHECK(run("--config " + cfg.string() + " simulate --out " + dir.string()) == 2);
}

TEST_CASE("flags override the config file") {
  const fs::path dir = fresh_dir("cfg");
  const fs::path cfg = dir / "run.ini";
  std::ofstream(cfg) << "model = kronecker\nn_paths = 5\nsteps = 10\nseed = 9\n";
  REQUIRE(run("--config " + cfg.string() + " simulate --seed 4 --out " + dir.string()) == 0);
  const std::string meta = slurp(dir / "meta.txt");
  CHECK(meta.find("model = kronecker") != std::string::npos);
  CHECK(meta.find("seed = 4") != std::string::npos);
  CHECK(count_lines(slurp(dir / "paths.csv")) == 1 + 5 * 11);
}

TEST_CASE("density") {
  const fs::path dir = fresh_dir("density");
  REQUIRE(run("density --grid-n 64 --samples 5000 --out " + dir.string()) == 0);
  CHECK(count_lines(slurp(dir / "density_ode.csv")) == 65);
  CHECK(fs::exists(dir / "occupation.csv"));
  const std::string report = slurp(dir / "density_report.txt");
  CHECK(report.find("linf_ode_vs_closed_form") != std::string::npos);

  // a grid below the checked-solve minimum still produces output, with a warning
  const fs::path small = fresh_dir("density16");
  REQUIRE(run("density --grid-n 16 --samples 5000 --out " + small.string()) == 0);
  CHECK(slurp(small / "density_report.txt").find("warning") != std::string::npos);
}

TEST_CASE("verify selection and fault injection") {
  const fs::path dir = fresh_dir("verify");
  CHECK(run("verify --only decomposition kappa_identity --out " + dir.string()) == 0);
  const std::string report = slurp(dir / "verify_report.txt");
  CHECK(report.find("decomposition") != std::string::npos);
  CHECK(report.find("PASS") != std::string::npos);
  CHECK(report.find("FAIL") == std::string::npos);

  CHECK(run("verify --only qv --qv-paths 300 --break qv --out " + dir.string()) == 1);
  CHECK(slurp(dir / "verify_report.txt").find("FAIL") != std::string::npos);
}

}  // TEST_SUITE
