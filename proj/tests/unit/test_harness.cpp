#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "daur/error.hpp"
#include "daur/harness.hpp"

using namespace daur;
namespace fs = std::filesystem;

namespace {

Config tiny_config() {
  Config c;
  c.scenario.n_users = 4;
  c.scenario.n_servers = 2;
  return c;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("daur_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Usage;
}

}  // namespace

TEST(SeedRange, Forms) {
  EXPECT_EQ(parse_seed_range("3"), (std::vector<std::uint64_t>{3}));
  EXPECT_EQ(parse_seed_range("1..4"), (std::vector<std::uint64_t>{1, 2, 3, 4}));
  EXPECT_EQ(parse_seed_range("7,2,9"), (std::vector<std::uint64_t>{7, 2, 9}));
  EXPECT_EQ(parse_seed_range("5..5").size(), 1u);
  for (const char* bad : {"", "x", "4..1", "1..", "1,,2", "-3", "1..2000000"})
    EXPECT_EQ(kind_of([&] { parse_seed_range(bad); }), ErrorKind::Usage) << bad;
}

TEST(Experiments, NamesPointsAndMethods) {
  const auto& names = experiment_names();
  ASSERT_EQ(names.size(), 9u);
  for (const auto& n : names) {
    EXPECT_TRUE(is_experiment(n));
    EXPECT_FALSE(experiment_points(n).empty());
    EXPECT_FALSE(experiment_methods(n).empty());
  }
  EXPECT_FALSE(is_experiment("sweep_nothing"));
  std::vector<std::string> labels;
  for (const auto& p : experiment_points("sweep_bandwidth")) labels.push_back(p.label);
  EXPECT_EQ(labels, (std::vector<std::string>{"1", "2.5", "5", "7.5", "10"}));
  labels.clear();
  for (const auto& p : experiment_points("sweep_preference")) labels.push_back(p.label);
  EXPECT_EQ(labels, (std::vector<std::string>{"low", "medium", "high", "mixed"}));
  Config c;
  experiment_points("sweep_weights")[1].apply(c);
  EXPECT_DOUBLE_EQ(c.scenario.omega_t, 0.3);
  EXPECT_DOUBLE_EQ(c.scenario.omega_e, 0.7);
  experiment_points("sweep_server_freq")[0].apply(c);
  EXPECT_DOUBLE_EQ(c.scenario.f_server_hz, 2e9);
  EXPECT_EQ(experiment_methods("dc_penalty_study").size(), 2u);
}

TEST(RunExperiment, UsageErrors) {
  ExperimentSpec s{"nope", tiny_config(), {1}};
  EXPECT_EQ(kind_of([&] { run_experiment(s); }), ErrorKind::Usage);
  s.name = "baseline_compare";
  s.seeds.clear();
  EXPECT_EQ(kind_of([&] { run_experiment(s); }), ErrorKind::Usage);
  s.seeds = {1};
  s.methods = {"DAUR", "SIMPLEX"};
  EXPECT_EQ(kind_of([&] { run_experiment(s); }), ErrorKind::Usage);
  s.methods.clear();
  s.points = std::vector<std::string>{"42"};
  EXPECT_EQ(kind_of([&] { run_experiment(s); }), ErrorKind::Usage);
}

TEST(RunExperiment, ZeroLengthSweepWritesHeaderOnly) {
  const fs::path dir = fresh_dir("empty");
  ExperimentSpec s{"sweep_power", tiny_config(), {1, 2}};
  s.points = std::vector<std::string>{};
  s.out_dir = dir.string();
  const ExperimentResult r = run_experiment(s);
  EXPECT_TRUE(r.rows.empty());
  EXPECT_TRUE(r.summary.empty());
  EXPECT_EQ(slurp(dir / "sweep_power.csv"), rows_csv_header() + "\n");
}

TEST(RunExperiment, CanonicalOrderAndThreadIndependence) {
  ExperimentSpec s{"sweep_power", tiny_config(), {3, 1}};
  s.methods = {"GUCAA", "RUCAA"};
  s.points = std::vector<std::string>{"0.2", "0.05"};
  s.timing = false;
  const ExperimentResult one = run_experiment(s);
  ASSERT_EQ(one.rows.size(), 8u);
  // Points follow sweep order, seeds follow the given order, methods follow canonical order.
  EXPECT_EQ(one.rows[0].point, "0.05");
  EXPECT_EQ(one.rows[0].seed, 3u);
  EXPECT_EQ(one.rows[0].method, "RUCAA");
  EXPECT_EQ(one.rows[1].method, "GUCAA");
  EXPECT_EQ(one.rows[2].seed, 1u);
  EXPECT_EQ(one.rows[4].point, "0.2");
  for (const auto& row : one.rows) {
    EXPECT_EQ(row.experiment, "sweep_power");
    EXPECT_EQ(row.status, "ok");
    EXPECT_EQ(row.wall_ms, 0.0);
    EXPECT_GT(row.dpe, 0.0);
  }
  s.threads = 3;
  const ExperimentResult three = run_experiment(s);
  EXPECT_EQ(rows_csv(three.rows), rows_csv(one.rows));
  EXPECT_EQ(summary_csv(three.summary), summary_csv(one.summary));
}

TEST(Summarize, MeanAndSampleStd) {
  std::vector<ResultRow> rows;
  for (double v : {1.0, 2.0, 4.0}) {
    ResultRow r;
    r.experiment = "e";
    r.point = "p";
    r.method = "A";
    r.dpe = v;
    r.outer_rounds = int(v);
    r.wall_ms = 2 * v;
    rows.push_back(r);
  }
  ResultRow failed = rows[0];
  failed.dpe = std::nan("");
  failed.status = "numerical_failure";
  rows.push_back(failed);
  ResultRow other = rows[0];
  other.method = "B";
  rows.push_back(other);
  const auto sum = summarize(rows);
  ASSERT_EQ(sum.size(), 2u);
  EXPECT_EQ(sum[0].method, "A");
  EXPECT_EQ(sum[0].count, 3);
  EXPECT_DOUBLE_EQ(sum[0].mean_dpe, 7.0 / 3.0);
  const double m = 7.0 / 3.0;
  const double var = ((1 - m) * (1 - m) + (2 - m) * (2 - m) + (4 - m) * (4 - m)) / 2.0;
  EXPECT_NEAR(sum[0].std_dpe, std::sqrt(var), 1e-15);
  EXPECT_DOUBLE_EQ(sum[0].mean_outer_rounds, 7.0 / 3.0);
  EXPECT_DOUBLE_EQ(sum[0].mean_wall_ms, 14.0 / 3.0);
  EXPECT_EQ(sum[1].count, 1);
  EXPECT_EQ(sum[1].std_dpe, 0.0);
}

TEST(Csv, RowsHeaderAndFormat) {
  EXPECT_EQ(rows_csv_header(),
            "experiment,point,seed,method,dpe,outer_rounds,fp_rounds,qcqp_rounds,wall_ms,status");
  ResultRow r;
  r.experiment = "baseline_compare";
  r.point = "default";
  r.seed = 7;
  r.method = "DAUR";
  r.dpe = 77.5;
  r.outer_rounds = 2;
  r.fp_rounds = 9;
  r.qcqp_rounds = 2;
  const std::string csv = rows_csv({r});
  EXPECT_EQ(csv, rows_csv_header() + "\nbaseline_compare,default,7,DAUR,77.5,2,9,2,0,ok\n");
}

// Every experiment writes the files the plotting scripts read.
TEST(RunExperiment, AllExperimentsWriteTheirFiles) {
  const fs::path dir = fresh_dir("all");
  for (const auto& name : experiment_names()) {
    ExperimentSpec s{name, tiny_config(), {1}};
    s.out_dir = dir.string();
    s.timing = false;
    const auto points = experiment_points(name);
    s.points = std::vector<std::string>{points.front().label};
    const ExperimentResult r = run_experiment(s);
    EXPECT_EQ(r.rows.size(), experiment_methods(name).size()) << name;
    EXPECT_TRUE(fs::exists(dir / (name + ".csv"))) << name;
    EXPECT_TRUE(fs::exists(dir / (name + "_summary.csv"))) << name;
    const bool traced = name == "baseline_compare" || name == "dc_penalty_study";
    EXPECT_EQ(fs::exists(dir / (name + "_traces.csv")), traced) << name;
    for (const auto& row : r.rows) EXPECT_EQ(row.status, "ok") << name << " " << row.method;
  }
}
