#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + SOBOLAB_CLI_PATH + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("sobolab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string out(const std::string& sub = "o") const { return "--out " + (dir / sub).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, ProbeUnitSquareCentre) {
  auto dom = dir / "square.json";
  std::ofstream(dom) << R"({"schema":"sobolab.domain/1","dimension":2,"tree":{"primitive":"box","lo":[0,0],"hi":[1,1]}})";
  auto r = cli(out() + " probe --domain " + dom.string() + " --x 0.5,0.5 --theta 1,0");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "{\"zeta\":[1.0,0.5],\"b\":0.5}\n");
  auto rep = json::parse(slurp(dir / "o" / "probe.json"));
  EXPECT_EQ(rep["rows"][0], (json{1.0, 0.5, 0.5}));
}

TEST_F(Cli, KernelSuite) {
  auto r = cli(out() + " kernels --ell 3");
  ASSERT_EQ(r.code, 0);
  auto rep = json::parse(slurp(dir / "o" / "kernels_ell3.json"));
  EXPECT_LE(rep["constants"]["pi1_residual"].get<double>(), 1e-10);
  EXPECT_LE(rep["constants"]["pi2_residual"].get<double>(), 1e-10);
  EXPECT_TRUE(rep["pass"].get<bool>());
  EXPECT_EQ(rep["params"]["config"]["command"], "kernels");
  EXPECT_EQ(rep["params"]["config"]["seed"], 20240601);
  EXPECT_TRUE(rep.contains("version"));
  EXPECT_TRUE(fs::exists(dir / "o" / "kernels_ell3.csv"));
}

TEST_F(Cli, CounterexampleEx3Csv) {
  auto r = cli(out() + " counterexample ex3 --n 3 --p 1.25 --beta 2 --k 6");
  ASSERT_EQ(r.code, 0);
  auto csv = slurp(dir / "o" / "counterexample_ex3.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,h,eps,lhs,boundary,hessian,ratio,lhs_fine,boundary_fine,ratio_fine");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  auto rep = json::parse(slurp(dir / "o" / "counterexample_ex3.json"));
  EXPECT_NEAR(rep["rates"]["lhs_vs_h"]["slope"].get<double>(), 2.0 / 3, 0.05 * 2 / 3);
  EXPECT_EQ(rep["params"]["resolved"]["k"], 6);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(cli(out() + " counterexample ex3 --gamma 2").code, 2);
  EXPECT_EQ(cli(out() + " counterexample ex3 --k six").code, 2);
  EXPECT_EQ(cli(out() + " counterexample ex3 --h [0.5,0.5]").code, 2);
  EXPECT_EQ(cli(out() + " counterexample ex7").code, 2);
  EXPECT_EQ(cli("--preset huge kernels --ell 2").code, 2);
  EXPECT_EQ(cli("--colour red kernels --ell 2").code, 2);
  EXPECT_EQ(cli(out() + " kernels").code, 2);
  EXPECT_EQ(cli(out() + " appendix --ell 4 --n 2").code, 2);
}

TEST_F(Cli, AssertionFailureWritesRecord) {
  auto r = cli(out() + " repr1d --ell 2 --family sin --nodes 3");
  EXPECT_EQ(r.code, 1);
  auto rec = json::parse(slurp(dir / "o" / "repr1d_ell2_sin.failure.json"));
  EXPECT_EQ(rec["schema"], "sobolab.failure/1");
  ASSERT_EQ(rec["failures"].size(), 1u);
  EXPECT_EQ(rec["failures"][0]["name"], "reproduction");
  EXPECT_EQ(cli(out() + " repr1d --ell 2 --family sin").code, 0);
}

TEST_F(Cli, DeterministicAcrossRunsAndThreads) {
  for (const std::string cmd : {"appendix --ell 2 --n 3", "audit rearrangement", "counterexample ex1"}) {
    ASSERT_EQ(cli(out("a") + " --threads 1 " + cmd).code, 0) << cmd;
    ASSERT_EQ(cli(out("b") + " --threads 3 " + cmd).code, 0) << cmd;
  }
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    auto name = e.path().filename().string();
    if (name.find(".meta.") != std::string::npos) continue;
    EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / name)) << name;
    ++compared;
  }
  EXPECT_EQ(compared, 6u);
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
  auto r = cli("appendix --ell 1 --n 2", "SOBOLAB_OUT=" + (dir / "env").string());
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(dir / "env" / "appendix_ell1_n2.json"));
  auto meta = json::parse(slurp(dir / "env" / "appendix_ell1_n2.meta.json"));
  EXPECT_TRUE(meta.contains("unix_time"));
}

TEST_F(Cli, AuditZeroTraceBubble) {
  auto r = cli(out() + R"( audit pointwise --gallery box --gallery-params '{"n": 3}' --field bubble --m 2)");
  ASSERT_EQ(r.code, 0);
  auto rep = json::parse(slurp(dir / "o" / "audit_pointwise.json"));
  EXPECT_TRUE(rep["constants"]["boundary_terms_zero"].get<bool>());
  EXPECT_EQ(rep["params"]["config"]["field"], "bubble");
}
