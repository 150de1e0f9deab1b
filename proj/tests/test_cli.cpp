#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "plgame/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "plgame-cli-tests";

int run(const std::string& args, const std::string& tag) {
  fs::create_directories(kWork);
  const std::string cmd = "cd " + kWork.string() + " && " + PLGAME_CLI + " " + args + " > " +
                          (kWork / (tag + ".out")).string() + " 2> " + (kWork / (tag + ".err")).string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string out(const std::string& tag) { return plgame::io::read_file(kWork / (tag + ".out")); }
std::string err(const std::string& tag) { return plgame::io::read_file(kWork / (tag + ".err")); }

}  // namespace

TEST_CASE("help exits cleanly") {
  CHECK(run("--help", "help") == 0);
  CHECK(out("help").find("solve") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run("", "nosub") == 1);
  CHECK(run("solve --epsilon 0.1 --bogus 3", "unknown-flag") == 1);
  CHECK(run("solve --problem quad-7d --epsilon 0.1", "unknown-problem") == 1);
  CHECK(err("unknown-problem").find("quad-sc") != std::string::npos);
  CHECK(run("solve --problem quad-2d", "no-eps") == 1);
  CHECK(run("solve --problem quad-2d --epsilon abc", "bad-eps") == 1);
  CHECK(run("solve --config /nonexistent.json", "bad-config") == 1);
  CHECK(run("plot " + (kWork / "nothing-here").string(), "bad-plot") == 1);
}

TEST_CASE("solve converges and exits 0") {
  const auto dir = kWork / "solve-ok";
  fs::remove_all(dir);
  CHECK(run("solve --problem quad-2d --epsilon 1e-3 --output " + dir.string(), "solve-ok") == 0);
  CHECK(out("solve-ok").find("first_hit:") != std::string::npos);
  CHECK(out("solve-ok").find("best_norms:") != std::string::npos);
  CHECK(fs::exists(dir / "trace.csv"));
  const auto cfg = nlohmann::json::parse(plgame::io::read_file(dir / "config.json"));
  CHECK(cfg.at("early_exit") == true);

  // replay through --config
  const auto dir2 = kWork / "solve-replay";
  fs::remove_all(dir2);
  CHECK(run("solve --config " + (dir / "config.json").string() + " --output " + dir2.string(),
            "solve-replay") == 0);
  CHECK(plgame::io::read_file(dir / "trace.csv") == plgame::io::read_file(dir2 / "trace.csv"));
}

TEST_CASE("budget exhaustion exits 2") {
  const auto dir = kWork / "solve-short";
  fs::remove_all(dir);
  CHECK(run("solve --problem quad-2d --epsilon 1e-6 --t-outer 2 --output " + dir.string(), "short") == 2);
  CHECK(out("short").find("budget_exhausted") != std::string::npos);
}

TEST_CASE("output root from the environment") {
  const auto root = kWork / "root";
  fs::remove_all(root);
  CHECK(run("solve --problem quad-sc --epsilon 0.1", "env-default") == 0);
  CHECK(fs::exists(kWork / "runs"));
  const std::string env = "PLGAME_OUTPUT_ROOT=" + root.string() + " ";
  const int status = std::system(("cd " + kWork.string() + " && " + env + PLGAME_CLI +
                                  " solve --problem quad-sc --epsilon 0.1 > /dev/null")
                                     .c_str());
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(!fs::is_empty(root));
}

TEST_CASE("sweep and plot") {
  const auto dir = kWork / "sweep";
  fs::remove_all(dir);
  CHECK(run("sweep --problem quad-2d --epsilons 0.1,0.05,0.02 --jobs 3 --output " + dir.string(),
            "sweep") == 0);
  CHECK(out("sweep").find("fitted_slope") != std::string::npos);
  CHECK(run("sweep --problem quad-2d --epsilons 0.1,0.05 --output " + dir.string(), "sweep-two") == 1);
  CHECK(run("plot " + dir.string(), "plot") == 0);
  CHECK(fs::exists(dir / "plot_sweep.svg"));
}

TEST_CASE("diagnose prints json and exits 0") {
  CHECK(run("diagnose --problem quad-sc --samples 1000 --seed 3", "diag") == 0);
  const auto j = nlohmann::json::parse(out("diag"));
  CHECK(j.at("all_must_hold_pass") == true);
  CHECK(j.at("claims").at("g_smoothness").at("verdict") == "holds-with-corrected-constant");
  CHECK(run("diagnose --problem nope", "diag-bad") == 1);
}

TEST_CASE("spec-level cli examples") {
  CHECK(run("solve --problem quad-2d --epsilon 1e-2 --output " + (kWork / "ex1").string(), "ex1") == 0);
  CHECK(run("solve --problem quad-2d --epsilon 1e-2 --t-outer 1 --output " + (kWork / "ex2").string(),
            "ex2") == 2);
  CHECK(run("sweep --problem quad-2d --epsilons 0.1", "ex3") == 1);

  CHECK(run("diagnose --problem quad-degenerate --samples 2000", "ex4") == 0);
  const auto j = nlohmann::json::parse(out("ex4"));
  const auto& stab = j.at("claims").at("argmax_stability");
  CHECK(stab.at("paper_constant") == "violated");
  CHECK(stab.at("corrected_constant") == "holds");

  CHECK(run("diagnose --problem quad-2d --samples 2000 --seed 7", "ex5a") == 0);
  CHECK(run("diagnose --problem quad-2d --samples 2000 --seed 7", "ex5b") == 0);
  CHECK(out("ex5a") == out("ex5b"));
  CHECK(nlohmann::json::parse(out("ex5a")).at("mu_hat").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("subcommand help lists the flags") {
  CHECK(run("solve --help", "solve-help") == 0);
  for (const char* flag : {"--problem", "--epsilon", "--config", "--eta1", "--eta2", "--k-inner", "--t-outer",
                           "--k-safety-multiplier", "--k-safety-additive", "--delta-inner", "--delta-g",
                           "--theta0", "--alpha0", "--seed", "--algorithm", "--output", "--early-exit",
                           "--noise-mode", "--noise-delta"}) {
    CHECK_MESSAGE(out("solve-help").find(flag) != std::string::npos, flag);
  }
  CHECK(run("sweep --help", "sweep-help") == 0);
  CHECK(out("sweep-help").find("--jobs") != std::string::npos);
  CHECK(run("diagnose --help", "diag-help") == 0);
  CHECK(out("diag-help").find("--samples") != std::string::npos);
}
