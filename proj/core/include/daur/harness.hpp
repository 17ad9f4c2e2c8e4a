#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "daur/config.hpp"

namespace daur {

// The nine experiment names, in listing order.
const std::vector<std::string>& experiment_names();
bool is_experiment(const std::string& name);

// One point of a sweep: a label written to the `point` column and the change
// it makes to the base configuration.
struct SweepPoint {
  std::string label;
  std::function<void(Config&)> apply;
};
std::vector<SweepPoint> experiment_points(const std::string& experiment);
// Methods run by default; rounding_compare and dc_penalty_study report
// pseudo-methods (rounding techniques, DAUR with and without the rank-1 step).
std::vector<std::string> experiment_methods(const std::string& experiment);

struct ExperimentSpec {
  std::string name;
  Config config;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> methods;                // empty: experiment default
  std::optional<std::vector<std::string>> points;  // subset of point labels
  std::string out_dir;                             // empty: nothing written
  bool timing = true;                              // false writes wall_ms = 0
  int threads = 1;
};

struct ResultRow {
  std::string experiment;
  std::string point;
  std::uint64_t seed = 0;
  std::string method;
  double dpe = 0.0;
  int outer_rounds = 0;
  int fp_rounds = 0;
  int qcqp_rounds = 0;
  double wall_ms = 0.0;
  std::string status = "ok";  // error kind when the cell failed
};

struct SummaryRow {
  std::string experiment;
  std::string point;
  std::string method;
  int count = 0;  // successful rows
  double mean_dpe = 0.0;
  double std_dpe = 0.0;  // sample standard deviation
  double mean_outer_rounds = 0.0;
  double mean_wall_ms = 0.0;
};

// Per-round traces: kind is "outer" (best DPE after each outer round),
// "fp" (inner objective, index = outer round), or "dc" (penalized objective
// of the last association block, with the penalty in `extra`).
struct TraceRow {
  std::string point;
  std::uint64_t seed = 0;
  std::string method;
  std::string kind;
  int index = 0;
  int round = 0;
  double value = 0.0;
  double extra = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // canonical order: point, seed, method
  std::vector<SummaryRow> summary;
  std::vector<TraceRow> traces;
  std::vector<std::string> files;  // paths written
};

// Throws Error(Usage) for an unknown experiment, an empty seed list, an
// unknown method or point label.
ExperimentResult run_experiment(const ExperimentSpec& spec);

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

std::string rows_csv_header();
std::string rows_csv(const std::vector<ResultRow>& rows);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string traces_csv(const std::vector<TraceRow>& rows);

// "a..b", "a,b,c" or a single integer.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

}  // namespace daur
