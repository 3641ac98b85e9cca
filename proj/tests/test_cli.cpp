// Drives the installed CLI binary end to end: golden outputs, exit codes,
// and byte-determinism across reruns and worker counts. The binary path
// comes from GGBM_CLI (set by ctest), falling back to the build layout.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ggbm/grid_io.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  if (const char* env = std::getenv("GGBM_CLI")) return env;
  return "../tools/ggbm";
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + cli_path() + " " +
                          args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> lines;
  std::stringstream ss(s);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / "ggbm_cli_test";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("eval golden values") {
  const RunResult r = run_cli("eval mwright --beta 0.5 --x 0");
  REQUIRE(r.exit_code == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 2);
  REQUIRE(ls[0] == "input,value");
  REQUIRE(std::stod(split_csv(ls[1])[1]) ==
          Catch::Approx(0.5641895835).epsilon(1e-9));

  const RunResult rg = run_cli("eval recip_gamma --x 0");
  REQUIRE(rg.exit_code == 0);
  REQUIRE(split_csv(lines_of(rg.out)[1])[1] == "0");

  const RunResult ml = run_cli("eval mlf --u 1 --v 1 --z 1");
  REQUIRE(std::stod(split_csv(lines_of(ml.out)[1])[1]) ==
          Catch::Approx(2.718281828).epsilon(1e-9));
}

TEST_CASE("eval rejects unknown functions and bad domains") {
  REQUIRE(run_cli("eval nosuch --x 1").exit_code == 2);
  REQUIRE(run_cli("eval mwright --beta 1.5 --x 1").exit_code == 2);
  REQUIRE(run_cli("eval bm_cdf --eps -1").exit_code == 2);
}

TEST_CASE("sample fbm small grid golden shape") {
  const RunResult r =
      run_cli("sample fbm --hurst 0.5 --n-steps 8 --n-paths 2 --seed 1");
  REQUIRE(r.exit_code == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 3);
  REQUIRE(ls[0] ==
          "t_0,t_1,t_2,t_3,t_4,t_5,t_6,t_7,t_8");
  for (int row : {1, 2}) {
    const auto cells = split_csv(ls[row]);
    REQUIRE(cells.size() == 9);
    REQUIRE(cells[0] == "0");
  }
  // identical invocation is byte-identical
  const RunResult again =
      run_cli("sample fbm --hurst 0.5 --n-steps 8 --n-paths 2 --seed 1");
  REQUIRE(again.out == r.out);
}

TEST_CASE("sample is worker-count independent and writes a JSON mirror") {
  const fs::path dir = temp_dir();
  const fs::path a = dir / "w1.csv";
  const fs::path b = dir / "w4.csv";
  REQUIRE(run_cli("sample ggbm --alpha 1.0 --beta 0.5 --n-steps 32 "
                  "--n-paths 50 --seed 7 --workers 1 --out " +
                  a.string())
              .exit_code == 0);
  REQUIRE(run_cli("sample ggbm --alpha 1.0 --beta 0.5 --n-steps 32 "
                  "--n-paths 50 --seed 7 --workers 4 --out " +
                  b.string())
              .exit_code == 0);
  REQUIRE(slurp(a) == slurp(b));
  REQUIRE(fs::exists(dir / "w1.json"));
}

TEST_CASE("sample binary format round-trips") {
  const fs::path dir = temp_dir();
  const fs::path bin = dir / "paths.bin";
  REQUIRE(run_cli("sample fbm --hurst 0.3 --n-steps 16 --n-paths 5 --seed 3 "
                  "--format bin --out " +
                  bin.string())
              .exit_code == 0);
  std::ifstream f(bin, std::ios::binary);
  const ggbm::PathGrid grid = ggbm::read_grid_binary(f);
  REQUIRE(grid.n_steps() == 16);
  REQUIRE(grid.n_paths() == 5);
  for (std::size_t i = 0; i < 5; ++i) REQUIRE(grid.row(i)[0] == 0.0);
  // binary output without --out is refused
  REQUIRE(run_cli("sample fbm --format bin").exit_code == 2);
}

TEST_CASE("sample ggbm with beta = 1 exits 2 and points to fbm") {
  const std::string cmd = "sample ggbm --alpha 1.0 --beta 1.0";
  const std::string full = cli_path() + " " + cmd + " 2>&1";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(full.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    out.append(buf.data(), got);
  const int status = pclose(pipe);
  REQUIRE(WEXITSTATUS(status) == 2);
  REQUIRE(out.find("fbm") != std::string::npos);
}

TEST_CASE("GGBM_SEED provides the default seed, flags win") {
  const RunResult via_env = run_cli(
      "sample fbm --hurst 0.5 --n-steps 8 --n-paths 1", "GGBM_SEED=123");
  const RunResult via_flag =
      run_cli("sample fbm --hurst 0.5 --n-steps 8 --n-paths 1 --seed 123");
  REQUIRE(via_env.out == via_flag.out);
  const RunResult flag_wins = run_cli(
      "sample fbm --hurst 0.5 --n-steps 8 --n-paths 1 --seed 9",
      "GGBM_SEED=123");
  REQUIRE(flag_wins.out != via_env.out);
}

TEST_CASE("smallball validity column and the force-series gate") {
  // alpha + beta = 1.5: LeadingOnly; p_series stays empty without the flag
  const RunResult r = run_cli(
      "smallball --alpha 1.0 --beta 0.5 --n-paths 2000 --n-steps 64 "
      "--n-mix 1000 --order 1 --eps 0.2 --seed 5");
  REQUIRE(r.exit_code == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls[0] ==
          "eps,p_mc,stderr_mc,p_mixed,stderr_mixed,p_series,p_leading,"
          "validity,flags");
  const auto row = split_csv(ls[1]);
  REQUIRE(row[5].empty());
  REQUIRE(row[7] == "LeadingOnly");
  const RunResult forced = run_cli(
      "smallball --alpha 1.0 --beta 0.5 --n-paths 2000 --n-steps 64 "
      "--n-mix 1000 --order 1 --eps 0.2 --seed 5 --force-series");
  REQUIRE(!split_csv(lines_of(forced.out)[1])[5].empty());
}

TEST_CASE("smallball eps = 0 row is all zeros") {
  const RunResult r = run_cli(
      "smallball --alpha 0.4 --beta 0.4 --n-paths 2000 --n-steps 64 "
      "--n-mix 500 --order 1 --eps 0 --seed 5");
  REQUIRE(r.exit_code == 0);
  const auto row = split_csv(lines_of(r.out)[1]);
  REQUIRE(std::stod(row[1]) == 0.0);  // p_mc
  REQUIRE(std::stod(row[3]) == 0.0);  // p_mixed
  REQUIRE(row[5] == "0");             // p_series
  REQUIRE(std::stod(row[6]) == 0.0);  // p_leading
}

TEST_CASE("moments rejects odd k-max; tails rejects a bad window") {
  REQUIRE(run_cli("moments --hurst 0.5 --k-max 3 --n-paths 100 --n-steps 16")
              .exit_code == 2);
  REQUIRE(run_cli("tails --alpha 1.0 --beta 0.5 --p-lo 0.2 --p-hi 0.1 "
                  "--n-paths 100000 --n-steps 64")
              .exit_code == 2);
}

TEST_CASE("moments CSV carries the growth diagnostic column") {
  const RunResult r = run_cli(
      "moments --hurst 0.5 --k-max 4 --n-paths 4000 --n-steps 64 --seed 11");
  REQUIRE(r.exit_code == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls[0] == "k,eta_hat,stderr,excluded_count,growth_diag");
  REQUIRE(ls.size() == 3);  // k = 2, 4
  REQUIRE(split_csv(ls[1])[0] == "2");
  REQUIRE(split_csv(ls[2])[0] == "4");
}

TEST_CASE("tails footer carries the fit as JSON") {
  const RunResult r = run_cli(
      "tails --alpha 1.0 --beta 1.0 --n-paths 100000 --n-steps 64 --seed 2");
  REQUIRE(r.exit_code == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls[0] == "y,p_hat,stderr");
  REQUIRE(ls.back().rfind("# fit ", 0) == 0);
  REQUIRE(ls.back().find("\"target_exponent\":2.0") != std::string::npos);
}
