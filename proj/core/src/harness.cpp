#include "daur/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "daur/daur.hpp"
#include "daur/error.hpp"
#include "daur/qcqp.hpp"
#include "daur/rng.hpp"
#include "daur/rounding.hpp"
#include "daur/transforms.hpp"

namespace daur {
namespace {

constexpr const char* kNoRank1 = "DAUR-no-rank1";

std::vector<SweepPoint> numeric_sweep(const std::vector<double>& values, double unit,
                                      double ScenarioParams::*field) {
  std::vector<SweepPoint> out;
  for (double v : values)
    out.push_back({format_number(v), [=](Config& c) { c.scenario.*field = v * unit; }});
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

struct CellOutput {
  std::vector<ResultRow> rows;
  std::vector<TraceRow> traces;
};

ResultRow row_from(const RunReport& r, bool timing) {
  ResultRow row;
  row.method = r.method;
  row.dpe = r.dpe;
  row.outer_rounds = r.outer_rounds;
  row.fp_rounds = r.fp_rounds;
  row.qcqp_rounds = r.qcqp_rounds;
  row.wall_ms = timing ? r.wall_ms : 0.0;
  return row;
}

ResultRow failed_row(const std::string& method, const std::string& status) {
  ResultRow row;
  row.method = method;
  row.dpe = std::nan("");
  row.status = status;
  return row;
}

void add_traces(CellOutput& out, const RunReport& r, bool with_dc) {
  for (size_t i = 0; i < r.objective_trace.size(); ++i)
    out.traces.push_back({"", 0, r.method, "outer", 0, int(i) + 1, r.objective_trace[i], 0.0});
  for (size_t k = 0; k < r.fp_traces.size(); ++k)
    for (const auto& t : r.fp_traces[k])
      out.traces.push_back({"", 0, r.method, "fp", int(k) + 1, t.round, t.objective, t.kkt_residual});
  if (with_dc) {
    for (const auto& t : r.dc_trace)
      out.traces.push_back({"", 0, r.method, "dc", 0, t.round, t.objective, t.penalty});
    out.traces.push_back({"", 0, r.method, "final", 0, 0, r.dc_penalty, r.dc_trace_s});
  }
}

// Random starting association and offload ratios, relaxation solved once,
// each rounding technique scored on the same relaxed solution.
void rounding_cell(const NetworkInstance& inst, const SolverConfig& cfg, std::uint64_t seed,
                   const std::vector<std::string>& methods, bool timing, CellOutput& out) {
  const int N = inst.n_users, M = inst.n_servers;
  Rng rng(derive_seed(seed, 0x726f756eull));
  MatrixXd x = MatrixXd::Zero(N, M);
  VectorXd phi(N);
  for (int n = 0; n < N; ++n) {
    x(n, rng.index(M)) = 1.0;
    phi(n) = rng.uniform(1.0 - cfg.offload_cap, cfg.offload_cap);
  }
  Decision view = equal_share_decision(inst, x, phi, cfg);
  view.phi_bw.setConstant(1.0 / N);
  view.zeta.setConstant(1.0 / N);
  view.gamma.setConstant(optimal_gamma(inst.omega_b));
  const AuxState aux = prospective_auxiliary(inst, view);
  const QcqpData q = assemble_qcqp(inst, view, aux, cfg.offload_cap);
  const SdrData sdr = lift_to_sdr(q, cfg.varpi);
  SdpOptions opt;
  opt.tol = cfg.tol;
  const SdpResult relaxed = solve_sdr(sdr, opt);
  const MatrixXd S = 0.5 * (relaxed.S + relaxed.S.transpose());
  MatrixXd x_cont;
  VectorXd phi_cont;
  unstack_q(q, extract_q(S), x_cont, phi_cont);
  for (int n = 0; n < N; ++n) phi_cont(n) = std::clamp(phi_cont(n), q.offload_lo, q.offload_hi);
  const auto table = compare_roundings(inst, S, x_cont, phi_cont, 1, seed, cfg);
  for (const auto& t : table) {
    if (!contains(methods, t.technique)) continue;
    ResultRow row;
    row.method = t.technique;
    row.dpe = t.mean_objective;
    row.wall_ms = timing ? t.mean_wall_ms : 0.0;
    if (!t.all_feasible) row.status = "infeasible";
    out.rows.push_back(row);
  }
}

CellOutput run_cell(const std::string& experiment, const Config& cfg, std::uint64_t seed,
                    const std::vector<std::string>& methods, bool timing) {
  CellOutput out;
  NetworkInstance inst;
  try {
    inst = generate_network(cfg.scenario, seed);
  } catch (const Error& e) {
    for (const auto& m : methods) out.rows.push_back(failed_row(m, to_string(e.kind())));
    return out;
  }
  if (experiment == "rounding_compare") {
    try {
      rounding_cell(inst, cfg.solver, seed, methods, timing, out);
    } catch (const Error& e) {
      out.rows.clear();
      for (const auto& m : methods) out.rows.push_back(failed_row(m, to_string(e.kind())));
    }
    return out;
  }
  const bool keep_traces = experiment == "baseline_compare" || experiment == "dc_penalty_study";
  for (const auto& m : methods) {
    try {
      RunReport r;
      if (m == kNoRank1) {
        SolverConfig s = cfg.solver;
        s.drop_rank1 = true;
        r = daur_run(inst, s);
        r.method = kNoRank1;
      } else {
        r = run_method(m, inst, cfg.solver, seed);
      }
      out.rows.push_back(row_from(r, timing));
      if (keep_traces) add_traces(out, r, experiment == "dc_penalty_study");
    } catch (const Error& e) {
      out.rows.push_back(failed_row(m, to_string(e.kind())));
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& body,
                std::vector<std::string>& files) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Usage, "cannot write " + path.string());
  f << body;
  files.push_back(path.string());
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ',';
    s += c;
    first = false;
  }
  s += '\n';
  return s;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "baseline_compare", "sweep_bandwidth", "sweep_server_freq", "sweep_user_freq",
      "sweep_power",      "sweep_weights",   "sweep_preference",  "rounding_compare",
      "dc_penalty_study"};
  return names;
}

bool is_experiment(const std::string& name) { return contains(experiment_names(), name); }

std::vector<SweepPoint> experiment_points(const std::string& e) {
  using SP = ScenarioParams;
  if (e == "sweep_bandwidth") return numeric_sweep({1, 2.5, 5, 7.5, 10}, 1e6, &SP::bandwidth_hz);
  if (e == "sweep_server_freq") return numeric_sweep({2, 5, 10, 15, 20}, 1e9, &SP::f_server_hz);
  if (e == "sweep_user_freq")
    return numeric_sweep({0.1, 0.25, 0.5, 0.75, 1}, 1e9, &SP::f_user_hz);
  if (e == "sweep_power") return numeric_sweep({0.02, 0.05, 0.1, 0.15, 0.2}, 1.0, &SP::power_w);
  if (e == "sweep_weights") {
    std::vector<SweepPoint> out;
    for (double wt : {0.1, 0.3, 0.5, 0.7, 0.9})
      out.push_back({format_number(wt), [=](Config& c) {
                       c.scenario.omega_t = wt;
                       c.scenario.omega_e = std::round((1.0 - wt) * 10.0) / 10.0;
                     }});
    return out;
  }
  if (e == "sweep_preference") {
    std::vector<SweepPoint> out;
    for (auto [label, level] : {std::pair{"low", 0.2}, {"medium", 0.5}, {"high", 1.0}})
      out.push_back({label, [level = level](Config& c) {
                       c.scenario.preference_mode = "fixed";
                       c.scenario.preference = level;
                     }});
    out.push_back({"mixed", [](Config& c) { c.scenario.preference_mode = "mixed"; }});
    return out;
  }
  if (is_experiment(e)) return {{"default", [](Config&) {}}};
  throw Error(ErrorKind::Usage, "unknown experiment '" + e + "'");
}

std::vector<std::string> experiment_methods(const std::string& e) {
  if (!is_experiment(e)) throw Error(ErrorKind::Usage, "unknown experiment '" + e + "'");
  if (e == "rounding_compare") {
    std::vector<std::string> out;
    for (Rounding r : all_roundings()) out.push_back(to_string(r));
    return out;
  }
  if (e == "dc_penalty_study") return {"DAUR", kNoRank1};
  if (e == "sweep_preference") return {"DAUR"};
  return method_names();
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (!is_experiment(spec.name)) throw Error(ErrorKind::Usage, "unknown experiment '" + spec.name + "'");
  if (spec.seeds.empty()) throw Error(ErrorKind::Usage, "seed list is empty");
  const auto allowed = experiment_methods(spec.name);
  std::vector<std::string> methods;
  if (spec.methods.empty()) {
    methods = allowed;
  } else {
    for (const auto& m : allowed)
      if (contains(spec.methods, m)) methods.push_back(m);
    for (const auto& m : spec.methods)
      if (!contains(allowed, m))
        throw Error(ErrorKind::Usage, "method '" + m + "' is not part of " + spec.name);
  }

  std::vector<SweepPoint> points;
  for (auto& p : experiment_points(spec.name))
    if (!spec.points || contains(*spec.points, p.label)) points.push_back(std::move(p));
  if (spec.points)
    for (const auto& label : *spec.points)
      if (std::none_of(points.begin(), points.end(), [&](const SweepPoint& p) { return p.label == label; }))
        throw Error(ErrorKind::Usage, "unknown point '" + label + "' for " + spec.name);

  std::vector<Config> configs;
  for (const auto& p : points) {
    Config c = spec.config;
    p.apply(c);
    validate(c);
    configs.push_back(c);
  }

  const size_t n_cells = points.size() * spec.seeds.size();
  std::vector<CellOutput> cells(n_cells);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < n_cells; i = next++) {
      const size_t p = i / spec.seeds.size(), s = i % spec.seeds.size();
      cells[i] = run_cell(spec.name, configs[p], spec.seeds[s], methods, spec.timing);
    }
  };
  const int n_threads = std::clamp(spec.threads, 1, 64);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentResult res;
  for (size_t i = 0; i < n_cells; ++i) {
    const size_t p = i / spec.seeds.size(), s = i % spec.seeds.size();
    for (auto& row : cells[i].rows) {
      row.experiment = spec.name;
      row.point = points[p].label;
      row.seed = spec.seeds[s];
      res.rows.push_back(std::move(row));
    }
    for (auto& t : cells[i].traces) {
      t.point = points[p].label;
      t.seed = spec.seeds[s];
      res.traces.push_back(std::move(t));
    }
  }
  res.summary = summarize(res.rows);

  if (!spec.out_dir.empty()) {
    namespace fs = std::filesystem;
    const fs::path dir(spec.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Usage, "cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / (spec.name + ".csv"), rows_csv(res.rows), res.files);
    write_file(dir / (spec.name + "_summary.csv"), summary_csv(res.summary), res.files);
    if (spec.name == "baseline_compare" || spec.name == "dc_penalty_study")
      write_file(dir / (spec.name + "_traces.csv"), traces_csv(res.traces), res.files);
  }
  return res;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::map<std::pair<std::string, std::string>, size_t> index;
  std::vector<std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.point, r.method);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      SummaryRow s;
      s.experiment = r.experiment;
      s.point = r.point;
      s.method = r.method;
      out.push_back(s);
      groups.emplace_back();
    }
    if (r.status == "ok") groups[it->second].push_back(&r);
  }
  for (size_t g = 0; g < out.size(); ++g) {
    auto& s = out[g];
    const auto& members = groups[g];
    s.count = static_cast<int>(members.size());
    if (members.empty()) {
      s.mean_dpe = s.std_dpe = std::nan("");
      continue;
    }
    for (const auto* r : members) {
      s.mean_dpe += r->dpe;
      s.mean_outer_rounds += r->outer_rounds;
      s.mean_wall_ms += r->wall_ms;
    }
    s.mean_dpe /= s.count;
    s.mean_outer_rounds /= s.count;
    s.mean_wall_ms /= s.count;
    double ss = 0.0;
    for (const auto* r : members) ss += (r->dpe - s.mean_dpe) * (r->dpe - s.mean_dpe);
    s.std_dpe = s.count > 1 ? std::sqrt(ss / (s.count - 1)) : 0.0;
  }
  return out;
}

std::string rows_csv_header() {
  return "experiment,point,seed,method,dpe,outer_rounds,fp_rounds,qcqp_rounds,wall_ms,status";
}

std::string rows_csv(const std::vector<ResultRow>& rows) {
  std::string s = rows_csv_header() + '\n';
  for (const auto& r : rows)
    s += csv_line({r.experiment, r.point, std::to_string(r.seed), r.method, format_number(r.dpe),
                   std::to_string(r.outer_rounds), std::to_string(r.fp_rounds),
                   std::to_string(r.qcqp_rounds), format_number(r.wall_ms), r.status});
  return s;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string s = "experiment,point,method,count,mean_dpe,std_dpe,mean_outer_rounds,mean_wall_ms\n";
  for (const auto& r : rows)
    s += csv_line({r.experiment, r.point, r.method, std::to_string(r.count), format_number(r.mean_dpe),
                   format_number(r.std_dpe), format_number(r.mean_outer_rounds),
                   format_number(r.mean_wall_ms)});
  return s;
}

std::string traces_csv(const std::vector<TraceRow>& rows) {
  std::string s = "point,seed,method,kind,index,round,value,extra\n";
  for (const auto& r : rows)
    s += csv_line({r.point, std::to_string(r.seed), r.method, r.kind, std::to_string(r.index),
                   std::to_string(r.round), format_number(r.value), format_number(r.extra)});
  return s;
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  auto parse_one = [&](std::string_view tok) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
      throw Error(ErrorKind::Usage, "bad seed '" + std::string(tok) + "'");
    return v;
  };
  std::vector<std::uint64_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t a = parse_one(std::string_view(text).substr(0, dots));
    const std::uint64_t b = parse_one(std::string_view(text).substr(dots + 2));
    if (b < a) throw Error(ErrorKind::Usage, "seed range '" + text + "' is descending");
    if (b - a >= 1000000) throw Error(ErrorKind::Usage, "seed range '" + text + "' is too long");
    for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
    return out;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_one(tok));
  if (out.empty()) throw Error(ErrorKind::Usage, "no seeds given");
  return out;
}

}  // namespace daur
