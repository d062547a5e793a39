#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bubblelab/inequalities.hpp"
#include "bubblelab/config.hpp"
#include "bubblelab/errors.hpp"
#include "bubblelab/fitting.hpp"
#include "bubblelab/parallel.hpp"
#include "bubblelab/report.hpp"

using namespace bl;

TEST(Config, ParsesTheSubset) {
  auto t = ConfigTable::parse(R"(# manifest
[regime]
name = "n5-interior-u0zero-pu1"   # trailing comment
lambda_fraction = 0.5

[sweep]
deltas = [0.05, 0.025,
          0.0125]   # multi-line
seed = 1_000
flag = true
)");
  EXPECT_EQ(*t.string("regime", "name"), "n5-interior-u0zero-pu1");
  EXPECT_DOUBLE_EQ(*t.number("regime", "lambda_fraction"), 0.5);
  EXPECT_EQ(t.numbers("sweep", "deltas")->size(), 3u);
  EXPECT_EQ(*t.integer("sweep", "seed"), 1000);
  EXPECT_TRUE(*t.boolean("sweep", "flag"));
  EXPECT_FALSE(t.has("sweep", "missing"));
  EXPECT_THROW(t.string("regime", "lambda_fraction"), ConfigError);
  EXPECT_THROW(t.integer("regime", "lambda_fraction"), ConfigError);
}

TEST(Config, ErrorsNameTheLine) {
  auto line_of = [](const std::string& text) {
    try {
      ConfigTable::parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(line_of("[a]\nx = \"open\n").find("line 2"), std::string::npos);
  EXPECT_NE(line_of("[a]\nx = 1\nx = 2\n").find("line 3"), std::string::npos);
  EXPECT_NE(line_of("[a]\n\ny = [1, [2]]\n").find("line 3"), std::string::npos);
  EXPECT_NE(line_of("[a\n").find("line 1"), std::string::npos);
  EXPECT_NE(line_of("x = abc\n").find("line 1"), std::string::npos);
  EXPECT_NE(line_of("[a]\nx = 1 2\n").find("line 2"), std::string::npos);
}

TEST(Config, ExperimentConfigFromTable) {
  auto t = ConfigTable::parse(R"(
[regime]
n = 3
nu = 1
u0 = "zero"
boundary = "interior"
kind = "pu2"
lambda_fraction = 0.1
[sweep]
deltas = [0.2, 0.1, 0.05, 0.025]
eps_scale = 3
[output]
prefix = "n3"
)");
  auto c = experiment_config_from(t);
  EXPECT_EQ(regime_name(c.regime), "n3-interior-u0zero-pu2");
  EXPECT_DOUBLE_EQ(c.eps_scale, 3);
  EXPECT_EQ(c.prefix, "n3");
  EXPECT_NO_THROW(c.validate());
  auto s = c.sweep_config();
  EXPECT_EQ(s.deltas.size(), 4u);

  EXPECT_THROW(experiment_config_from(ConfigTable::parse("[regime]\nname = \"n3-interior-u0zero-pu2\"\nbogus = 1\n")),
               ConfigError);
  auto bad = c;
  bad.lambda_fraction = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.regime.kind = ProjectionKind::PU1;
  EXPECT_THROW(bad.validate(), RegimeRefusal);
  bad = c;
  bad.deltas = {0.5};
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Parallel, CoversEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, [](size_t) { FAIL(); });
}

TEST(Parallel, RethrowsLowestFailingIndex) {
  try {
    parallel_for(64, [](size_t i) {
      if (i % 10 == 7) throw SolverError("index " + std::to_string(i));
    });
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_STREQ(e.what(), "index 7");
  }
}

TEST(Parallel, WorkerCountFromEnvironment) {
  setenv("BUBBLELAB_THREADS", "3", 1);
  EXPECT_EQ(worker_count(), 3);
  for (const char* bad : {"0", "-2", "abc", "2x"}) {
    setenv("BUBBLELAB_THREADS", bad, 1);
    EXPECT_THROW(worker_count(), ConfigError) << bad;
  }
  unsetenv("BUBBLELAB_THREADS");
  EXPECT_GE(worker_count(), 1);
}

TEST(Fitting, PowerLawRecoversExponent) {
  std::vector<double> x{0.2, 0.1, 0.05, 0.025}, y, yl;
  for (double v : x) {
    y.push_back(3 * std::pow(v, 0.75));
    yl.push_back(2 * v * std::sqrt(std::abs(std::log(v))));
  }
  auto f = fit_power_law(x, y);
  EXPECT_NEAR(f.slope, 0.75, 1e-12);
  EXPECT_NEAR(f.r2, 1, 1e-12);
  EXPECT_NEAR(fit_power_law(x, yl, 0.5).slope, 1, 1e-12);
  EXPECT_TRUE(monotonically_improving({0.5, 0.8, 1.1, 1.0}));
  EXPECT_FALSE(monotonically_improving({0.9, 0.5}));
  auto p = fit_proportional({1, 2, 3}, {2, 4, 6});
  EXPECT_NEAR(p.k, 2, 1e-14);
}

TEST(Inequalities, BinomialRemainderMatchesDirectEvaluation) {
  for (double s : {0.5, 1.5, 3.0, 5.0 / 3})
    for (double t : {-0.5, -0.1, 0.2, 0.7}) {
      double direct1 = std::pow(1 + t, s) - 1;
      double direct2 = direct1 - s * t;
      EXPECT_NEAR(binomial_remainder(s, t, 1), direct1, 1e-13);
      EXPECT_NEAR(binomial_remainder(s, t, 2), direct2, 1e-13);
    }
  // small-t accuracy: R_2 ~ s(s-1)/2 t^2
  double t = 1e-7, s = 7.0 / 3;
  EXPECT_NEAR(binomial_remainder(s, t, 2) / (t * t), s * (s - 1) / 2, 1e-5);
}

TEST(Inequalities, InequalitySuitePasses) {
  for (auto& r : inequality_suite(3, 20000)) EXPECT_TRUE(r.passed) << r.name << " " << r.measured;
}

TEST(Report, FormattingAndFiles) {
  EXPECT_EQ(fmt(std::nan("")), "nan");
  EXPECT_EQ(fmt(0.5), "0.5");
  std::ostringstream os;
  write_sweep_csv(os, {});
  EXPECT_NE(os.str().find("regime"), std::string::npos);
  auto dir = std::filesystem::temp_directory_path() / "bubblelab_report_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_text_file((dir / "x.txt").string(), "hello\n");
  std::ifstream in(dir / "x.txt");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "hello");
  std::filesystem::remove_all(dir.parent_path());
}
