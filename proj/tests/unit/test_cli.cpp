#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path kTmp = fs::path(ELLROLL_TEST_TMP) / "cli";

struct Result {
  int code;
  std::string output;
};

Result run(const std::string& args) {
  fs::create_directories(kTmp);
  const fs::path out = kTmp / "stdout.txt";
  const std::string cmd = std::string(ELLROLL_CLI) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream f(out);
  std::stringstream ss;
  ss << f.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kTmp);
  const fs::path p = kTmp / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").code == 0);
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("compare").code == 1);
  CHECK(run("baseline --task sideways").code == 1);
  const Result bad = run("baseline --config " + write_config("bad.ini", "[body]\nmas = 1\n").string());
  CHECK(bad.code == 1);
  CHECK(bad.output.find("body.mas") != std::string::npos);
}

TEST_CASE("baseline run with SI dump") {
  const fs::path out = kTmp / "baseline";
  fs::remove_all(out);
  const Result r = run("baseline --dump-si --task h2v --out " + out.string());
  CHECK(r.code == 0);
  CHECK(r.output.find("mass_kg = 0.02") != std::string::npos);
  CHECK(r.output.find("semi_major_m = 0.034") != std::string::npos);
  CHECK(fs::exists(out / "baseline_metrics.csv"));
  CHECK(fs::exists(out / "baseline_trajectory.csv.meta.json"));
}

TEST_CASE("short train then eval and compare") {
  const fs::path out = kTmp / "train";
  fs::remove_all(out);
  const fs::path cfg = write_config(
      "short.ini", "[run]\nepochs = 2\nepisode_steps = 30\n[agent]\nbatch_size = 8\nhidden = 4,4\n");
  CHECK(run("train -q --config " + cfg.string() + " --out " + out.string()).code == 0);
  CHECK(fs::exists(out / "best.ckpt.json"));
  CHECK(run("eval --config " + cfg.string() + " --out " + out.string()).code == 0);
  CHECK(run("baseline --config " + cfg.string() + " --out " + out.string()).code == 0);
  const Result cmp = run("compare --config " + cfg.string() + " --out " + out.string() + " --rl " +
                         (out / "eval_metrics.csv").string() + " --su " + (out / "baseline_metrics.csv").string());
  CHECK(cmp.code == 0);
  CHECK(fs::exists(out / "compare.csv"));
  // Default network does not match the 4x4 checkpoint.
  CHECK(run("eval --checkpoint " + (out / "best.ckpt.json").string() + " --out " + out.string()).code == 1);
}

TEST_CASE("numerical failure exits with 2") {
  const fs::path out = kTmp / "blowup";
  fs::remove_all(out);
  const fs::path cfg = write_config(
      "blowup.ini", "[run]\nepochs = 2\nepisode_steps = 30\n[body]\ntorque_limit = 1000\n[agent]\nbatch_size = 8\n");
  const Result r = run("train -q --config " + cfg.string() + " --out " + out.string());
  CHECK(r.code == 2);
  CHECK(r.output.find("numerical failure") != std::string::npos);
  CHECK(fs::exists(out / "training_log.csv"));
}

TEST_CASE("heatmap with grid overrides") {
  const fs::path out = kTmp / "heatmap";
  fs::remove_all(out);
  CHECK(run("heatmap --theta-points 5 --omega-points 3 --out " + out.string()).code == 0);
  std::ifstream f(out / "heatmap_basic.csv");
  int lines = 0;
  for (std::string l; std::getline(f, l);) ++lines;
  CHECK(lines == 6);
}
