#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "igc/io.hpp"
#include "test_util.hpp"

using namespace igc;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("igc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  // Small network and marginal table so the CLI tests stay fast.
  std::vector<std::string> fast_train(const std::string& data, const std::string& model) const {
    return {"train",     "--data",          data,    "--out",   model,       "--epochs", "3", "--quiet",
            "--set",     "hidden_units=16", "--set", "batch_size=50", "--set", "model_samples=50",
            "--marginal-samples", "20000", "--cdf-knots", "512"};
  }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerateClaytonRoundTrip) {
  const auto r = run_cli({"generate", "--family", "clayton", "--theta", "3", "--n", "1000", "--seed", "1", "--out", path("c.csv")});
  ASSERT_EQ(r.status, 0) << r.err;
  const CsvTable t = read_csv(path("c.csv"));
  EXPECT_EQ(t.header, (std::vector<std::string>{"u1", "u2"}));
  EXPECT_EQ(t.values, sample_clayton(3.0, Rotation::r0, 1000, 1));
  EXPECT_TRUE(fs::exists(path("c.csv.manifest.json")));
}

TEST_F(Cli, GenerateMixtureWritesBothSpaces) {
  const auto r = run_cli({"generate", "--family", "gaussian_mixture", "--seed", "2", "--n", "500", "--out", path("m.csv")});
  ASSERT_EQ(r.status, 0) << r.err;
  const CsvTable u = read_csv(path("m.csv"));
  const CsvTable x = read_csv(path("m_x.csv"));
  EXPECT_EQ(u.header[0], "u1");
  EXPECT_EQ(x.header[0], "x1");
  EXPECT_EQ(u.values, pseudo_observations(x.values));
}

TEST_F(Cli, GenerateToyAndRandomParams) {
  ASSERT_EQ(run_cli({"generate", "--family", "ring", "--n", "300", "--out", path("ring.csv")}).status, 0);
  EXPECT_EQ(read_csv(path("ring.csv")).header[0], "x1");
  ASSERT_EQ(run_cli({"generate", "--family", "student_t", "--random-params", "--n", "300", "--out", path("t.csv")}).status, 0);
  ASSERT_EQ(run_cli({"generate", "--family", "gaussian", "--dim", "4", "--rho", "0.3", "--n", "300", "--out", path("g.csv")}).status, 0);
  EXPECT_EQ(read_csv(path("g.csv")).values.cols(), 4);
}

TEST_F(Cli, GenerateInvalidThetaNamesParameter) {
  const auto r = run_cli({"generate", "--family", "clayton", "--theta", "0", "--out", path("bad.csv")});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("theta"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("bad.csv")));
}

TEST_F(Cli, TrainSampleEvaluate) {
  ASSERT_EQ(run_cli({"generate", "--family", "gumbel", "--theta", "2", "--n", "400", "--out", path("d.csv")}).status, 0);
  auto r = run_cli(fast_train(path("d.csv"), path("m.json")));
  ASSERT_EQ(r.status, 0) << r.err;
  const CsvTable loss = read_csv(path("m_loss.csv"));
  EXPECT_EQ(loss.header, (std::vector<std::string>{"epoch", "softrank_loss", "hard_rank_loss"}));
  EXPECT_EQ(loss.values.rows(), 3);

  r = run_cli({"sample", "--model", path("m.json"), "--n", "10000", "--seed", "4", "--out", path("s.csv")});
  ASSERT_EQ(r.status, 0) << r.err;
  const Matrix s = read_csv(path("s.csv")).values;
  EXPECT_GT(s.minCoeff(), 0.0);
  EXPECT_LT(s.maxCoeff(), 1.0);
  ASSERT_EQ(run_cli({"sample", "--model", path("m.json"), "--n", "10000", "--seed", "4", "--out", path("s2.csv")}).status, 0);
  EXPECT_EQ(slurp(path("s.csv")), slurp(path("s2.csv")));

  r = run_cli({"evaluate", "--data", path("s.csv"), "--samples", path("s.csv"), "--metrics", "ise,mmd,energy", "--out",
               path("self.csv")});
  ASSERT_EQ(r.status, 0) << r.err;
  const std::string report = slurp(path("self.csv"));
  EXPECT_NE(report.find("samples,ise,0,"), std::string::npos) << report;
  EXPECT_NE(report.find("samples,mmd,0,"), std::string::npos) << report;
  EXPECT_NE(report.find("samples,energy,0,"), std::string::npos) << report;

  r = run_cli({"evaluate", "--data", path("d.csv"), "--model", path("m.json"), "--baseline", "gaussian,independence",
               "--n-model", "5000"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("independence"), std::string::npos);
}

TEST_F(Cli, SampleWithMarginalsStaysInTrainingRange) {
  ASSERT_EQ(run_cli({"generate", "--family", "grid", "--n", "400", "--out", path("x.csv")}).status, 0);
  ASSERT_EQ(run_cli(fast_train(path("x.csv"), path("m.json"))).status, 0);
  const std::string manifest = slurp(path("m.json.manifest.json"));
  EXPECT_NE(manifest.find("pseudo-observations"), std::string::npos);
  ASSERT_EQ(run_cli({"sample", "--model", path("m.json"), "--n", "3000", "--marginals", path("x.csv"), "--out", path("s.csv")}).status, 0);
  const Matrix x = read_csv(path("x.csv")).values;
  const Matrix s = read_csv(path("s.csv")).values;
  for (Index d = 0; d < 2; ++d) {
    EXPECT_GE(s.col(d).minCoeff(), x.col(d).minCoeff());
    EXPECT_LE(s.col(d).maxCoeff(), x.col(d).maxCoeff());
  }
}

TEST_F(Cli, TrainRejectsSingleColumn) {
  std::ofstream(path("one.csv")) << "x\n0.1\n0.2\n0.3\n";
  const auto r = run_cli(fast_train(path("one.csv"), path("m.json")));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("D >= 2"), std::string::npos) << r.err;
}

TEST_F(Cli, TrainIsByteIdenticalOnRerun) {
  ASSERT_EQ(run_cli({"generate", "--family", "clayton", "--theta", "3", "--n", "300", "--out", path("d.csv")}).status, 0);
  ASSERT_EQ(run_cli(fast_train(path("d.csv"), path("a.json"))).status, 0);
  ASSERT_EQ(run_cli(fast_train(path("d.csv"), path("b.json"))).status, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(Cli, TrainFractionWritesHoldout) {
  ASSERT_EQ(run_cli({"generate", "--family", "clayton", "--theta", "3", "--n", "500", "--out", path("d.csv")}).status, 0);
  auto args = fast_train(path("d.csv"), path("m.json"));
  args.insert(args.end(), {"--train-frac", "0.2", "--split-seed", "9"});
  ASSERT_EQ(run_cli(args).status, 0);
  EXPECT_EQ(read_csv(path("m_holdout.csv")).values.rows(), 400);
}

TEST_F(Cli, EvaluateErrors) {
  ASSERT_EQ(run_cli({"generate", "--family", "clayton", "--n", "200", "--out", path("d.csv")}).status, 0);
  auto r = run_cli({"evaluate", "--data", path("d.csv"), "--samples", path("d.csv"), "--metrics", "ise,likelihood"});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("valid metrics: ise, energy, mmd, tau, ks"), std::string::npos) << r.err;

  ASSERT_EQ(run_cli({"generate", "--family", "gaussian", "--dim", "6", "--n", "200", "--out", path("d6.csv")}).status, 0);
  r = run_cli({"evaluate", "--data", path("d6.csv"), "--samples", path("d6.csv"), "--metrics", "ise"});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("--force"), std::string::npos);
  r = run_cli({"evaluate", "--data", path("d6.csv"), "--samples", path("d6.csv"), "--metrics", "ise", "--force"});
  EXPECT_EQ(r.status, 0) << r.err;
}

TEST_F(Cli, BenchmarkSmoke) {
  const auto r = run_cli({"benchmark", "--suite", "bivariate", "--reps", "3", "--seed", "0", "--epochs", "1",
                          "--n-model", "2000", "--marginal-samples", "20000", "--out-dir", path("bench"), "--quiet"});
  ASSERT_EQ(r.status, 0) << r.err << r.out;
  const std::string results = slurp(path("bench/results.csv"));
  for (const char* fam : {"student_t", "clayton", "gumbel", "gaussian_mixture"}) {
    for (int rep = 0; rep < 3; ++rep) {
      EXPECT_NE(results.find(std::to_string(rep) + "," + fam + ","), std::string::npos) << fam << " " << rep;
    }
  }
  const std::string summary = slurp(path("bench/summary.csv"));
  // Header plus, per family, data tau and (ise, tau) for three candidates.
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 1 + 4 * 7);
}

TEST_F(Cli, BenchmarkThreadsDoNotChangeResults) {
  const std::vector<std::string> base{"benchmark", "--reps", "2", "--epochs", "1", "--n-model", "1000",
                                      "--marginal-samples", "10000", "--families", "clayton,gumbel", "--quiet"};
  auto one = base, two = base;
  one.insert(one.end(), {"--out-dir", path("t1"), "--threads", "1"});
  two.insert(two.end(), {"--out-dir", path("t2"), "--threads", "3"});
  ASSERT_EQ(run_cli(one).status, 0);
  ASSERT_EQ(run_cli(two).status, 0);
  EXPECT_EQ(slurp(path("t1/results.csv")), slurp(path("t2/results.csv")));
}

TEST_F(Cli, ReplayReproducesOutputs) {
  ASSERT_EQ(run_cli({"generate", "--family", "gumbel", "--theta", "4", "--n", "300", "--out", path("d.csv")}).status, 0);
  ASSERT_EQ(run_cli(fast_train(path("d.csv"), path("m.json"))).status, 0);
  auto r = run_cli({"replay", "--manifest", path("m.json.manifest.json"), "--into", path("again"), "--verify"});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(slurp(path("m.json")), slurp(path("again/m.json")));
  r = run_cli({"replay", "--manifest", path("d.csv.manifest.json"), "--verify"});
  EXPECT_EQ(r.status, 0) << r.err;
}

TEST_F(Cli, UsageErrors) {
  EXPECT_NE(run_cli({}).status, 0);
  EXPECT_NE(run_cli({"frobnicate"}).status, 0);
  EXPECT_NE(run_cli({"sample", "--n", "3"}).status, 0);
  EXPECT_EQ(run_cli({"--help"}).status, 0);
}
