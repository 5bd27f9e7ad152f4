#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("latgreen_cli_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string(LATGREEN_CLI_PATH) + " " + args + " > " +
                          (dir / "stdout.txt").string() + " 2> " +
                          (dir / "stderr.txt").string();
  const int ret = std::system(cmd.c_str());
  REQUIRE(ret != -1);
  REQUIRE(WIFEXITED(ret));
  return WEXITSTATUS(ret);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config(const char* name) {
  return (fs::path(LATGREEN_CONFIG_DIR) / name).string();
}

}  // namespace

TEST_CASE("check and evaluate succeed on the shipped configs") {
  const fs::path dir = fresh_dir("eval");
  CHECK(run("check --config " + config("model_a.json") + " --out-dir " + dir.string(),
            dir) == 0);
  CHECK(fs::exists(dir / "check.txt"));

  CHECK(run("evaluate --config " + config("model_a.json") + " --out-dir " + dir.string(),
            dir) == 0);
  const std::string report = slurp(dir / "evaluate.txt");
  CHECK(report.find("# config_hash=") == 0);
  CHECK(report.find("value=") != std::string::npos);
  CHECK(run("evaluate --config " + config("model_b.json") + " --out-dir " + dir.string(),
            dir) == 0);
  fs::remove_all(dir);
}

TEST_CASE("compare passes its rate window and writes identical bytes across runs") {
  const fs::path d1 = fresh_dir("cmp1");
  const fs::path d2 = fresh_dir("cmp2");
  const std::string cfg = config("model_a.json");
  CHECK(run("compare --config " + cfg + " --out-dir " + d1.string(), d1) == 0);
  CHECK(run("compare --config " + cfg + " --out-dir " + d2.string() + " --threads 2",
            d2) == 0);
  const std::string csv1 = slurp(d1 / "compare.csv");
  const std::string csv2 = slurp(d2 / "compare.csv");
  CHECK(!csv1.empty());
  CHECK(csv1 == csv2);
  CHECK(csv1.find("n,h,dF,oracle,asymptotic,ratio,delta,bordered") != std::string::npos);
  CHECK(slurp(d1 / "compare_summary.txt").find("PASS") != std::string::npos);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("remaining subcommands run the shipped configs clean") {
  const fs::path dir = fresh_dir("subs");
  CHECK(run("finsler --config " + config("model_a.json") + " --out-dir " + dir.string(),
            dir) == 0);
  const std::string csv = slurp(dir / "finsler.csv");
  CHECK(run("finsler --config " + config("model_a.json") + " --out-dir " + dir.string(),
            dir) == 0);
  CHECK(slurp(dir / "finsler.csv") == csv);

  CHECK(run("geodesic --config " + config("model_b.json") + " --out-dir " + dir.string(),
            dir) == 0);
  CHECK(fs::exists(dir / "geodesic.csv"));
  CHECK(run("oracle --config " + config("model_a.json") + " --out-dir " + dir.string(),
            dir) == 0);
  CHECK(fs::exists(dir / "oracle.txt"));
  CHECK(run("oz --config " + config("model_a.json") + " --out-dir " + dir.string(),
            dir) == 0);
  CHECK(slurp(dir / "oz.txt").find("ti1_over_ti2=") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("exit codes sort the failure modes") {
  const fs::path dir = fresh_dir("errs");

  // geometry refusal: two equally short lanes
  CHECK(run("geodesic --config " + config("model_two_lane.json") + " --out-dir " +
                dir.string(),
            dir) == 4);
  CHECK(slurp(dir / "stderr.txt").find("error:") != std::string::npos);

  // off-grid numerator
  {
    std::ofstream cfg(dir / "offgrid.json");
    cfg << R"({"model":{"d":2,"R":1,"J":0.2,"dpp":"1","wpp":{"all":"2"}},)"
        << R"("points":{"N":0,"x":[0.5,0],"y":[0,0]}})";
  }
  CHECK(run("evaluate --config " + (dir / "offgrid.json").string() + " --out-dir " +
                dir.string(),
            dir) == 2);

  // unknown key
  {
    std::ofstream cfg(dir / "unknown.json");
    cfg << R"({"model":{"d":2,"R":1,"J":0.2,"dpp":"1","wpp":{"all":"2"}},)"
        << R"("points":{"N":0,"x":[1,0],"y":[0,0]},"typo":1})";
  }
  CHECK(run("evaluate --config " + (dir / "unknown.json").string() + " --out-dir " +
                dir.string(),
            dir) == 2);

  // weak unit-offset coupling violates the hypotheses
  {
    std::ofstream cfg(dir / "weak.json");
    cfg << R"({"model":{"d":2,"R":1,"J":0.2,"dpp":"1","wpp":{"all":"0.5"}},)"
        << R"("points":{"N":0,"x":[1,0],"y":[0,0]}})";
  }
  CHECK(run("check --config " + (dir / "weak.json").string() + " --out-dir " +
                dir.string(),
            dir) == 3);

  // bad expression still reports position
  {
    std::ofstream cfg(dir / "expr.json");
    cfg << R"({"model":{"d":2,"R":1,"J":0.2,"dpp":"1 + * 2","wpp":{"all":"2"}},)"
        << R"("points":{"N":0,"x":[1,0],"y":[0,0]}})";
  }
  CHECK(run("check --config " + (dir / "expr.json").string() + " --out-dir " +
                dir.string(),
            dir) == 2);
  CHECK(slurp(dir / "stderr.txt").find("position") != std::string::npos);

  CHECK(run("evaluate --config " + (dir / "missing.json").string() + " --out-dir " +
                dir.string(),
            dir) != 0);
  fs::remove_all(dir);
}
