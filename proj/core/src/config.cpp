#include "daur/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "daur/error.hpp"

namespace daur {
namespace {

struct Field {
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* first = v.data();
  const auto* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last)
    throw Error(ErrorKind::InvalidParameter, "'" + key + "' expects a number, got '" + v + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw Error(ErrorKind::InvalidParameter, "'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorKind::InvalidParameter, "'" + key + "' expects a boolean, got '" + v + "'");
}

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

#define DAUR_DOUBLE(section, name)                                                   \
  {#section "." #name,                                                               \
   Field{[](Config& c, const std::string& v) { c.section.name = parse_double(#name, v); }, \
         [](const Config& c) { return fmt_double(c.section.name); }}}
#define DAUR_INT(section, name)                                                      \
  {#section "." #name,                                                               \
   Field{[](Config& c, const std::string& v) { c.section.name = parse_int(#name, v); }, \
         [](const Config& c) { return std::to_string(c.section.name); }}}
#define DAUR_BOOL(section, name)                                                     \
  {#section "." #name,                                                               \
   Field{[](Config& c, const std::string& v) { c.section.name = parse_bool(#name, v); }, \
         [](const Config& c) { return std::string(c.section.name ? "true" : "false"); }}}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      DAUR_INT(scenario, n_users),
      DAUR_INT(scenario, n_servers),
      DAUR_DOUBLE(scenario, radius_m),
      DAUR_BOOL(scenario, fading),
      DAUR_DOUBLE(scenario, noise_dbm_per_hz),
      DAUR_DOUBLE(scenario, bandwidth_hz),
      DAUR_DOUBLE(scenario, power_w),
      DAUR_DOUBLE(scenario, f_user_hz),
      DAUR_DOUBLE(scenario, f_server_hz),
      DAUR_DOUBLE(scenario, eta_user),
      DAUR_DOUBLE(scenario, eta_server),
      DAUR_DOUBLE(scenario, eta_gen),
      DAUR_DOUBLE(scenario, kappa_user),
      DAUR_DOUBLE(scenario, kappa_server),
      DAUR_DOUBLE(scenario, task_min_kb),
      DAUR_DOUBLE(scenario, task_max_kb),
      DAUR_DOUBLE(scenario, block_size_mb),
      DAUR_DOUBLE(scenario, wired_rate_bps),
      DAUR_DOUBLE(scenario, omega_b),
      DAUR_DOUBLE(scenario, eta_v),
      DAUR_DOUBLE(scenario, omega_t),
      DAUR_DOUBLE(scenario, omega_e),
      DAUR_DOUBLE(scenario, preference_base),
      DAUR_DOUBLE(scenario, preference),
      {"scenario.preference_mode",
       Field{[](Config& c, const std::string& v) { c.scenario.preference_mode = v; },
             [](const Config& c) { return c.scenario.preference_mode; }}},
      DAUR_DOUBLE(solver, eps1),
      DAUR_DOUBLE(solver, eps2),
      DAUR_DOUBLE(solver, eps3),
      DAUR_DOUBLE(solver, varpi),
      DAUR_INT(solver, max_rounds),
      DAUR_DOUBLE(solver, tol),
      DAUR_DOUBLE(solver, offload_cap),
      DAUR_DOUBLE(solver, baseline_rho),
      DAUR_DOUBLE(solver, baseline_psi),
      DAUR_BOOL(solver, drop_rank1),
  };
  return table;
}

#undef DAUR_DOUBLE
#undef DAUR_INT
#undef DAUR_BOOL

const Field* find_field(const std::string& key) {
  for (const auto& [name, field] : fields()) {
    if (name == key) return &field;
  }
  // Bare names are accepted when unambiguous.
  const Field* hit = nullptr;
  for (const auto& [name, field] : fields()) {
    const auto dot = name.find('.');
    if (name.substr(dot + 1) == key) {
      if (hit) return nullptr;
      hit = &field;
    }
  }
  return hit;
}

}  // namespace

Config parse_config(std::istream& in) {
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::InvalidParameter,
                  "line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Field* field = find_field(key);
    if (!field)
      throw Error(ErrorKind::InvalidParameter,
                  "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    field->set(cfg, value);
  }
  validate(cfg);
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidParameter, "cannot open config '" + path + "'");
  return parse_config(in);
}

std::string dump_config(const Config& cfg) {
  std::ostringstream out;
  for (const auto& [name, field] : fields()) out << name << " = " << field.get(cfg) << '\n';
  return out.str();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [name, field] : fields()) keys.push_back(name);
  return keys;
}

void validate(const Config& cfg) {
  const auto& s = cfg.scenario;
  const auto& v = cfg.solver;
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::InvalidParameter, what);
  };
  require(s.n_users >= 1, "n_users must be >= 1");
  require(s.n_servers >= 1, "n_servers must be >= 1");
  require(s.radius_m > 0, "radius_m must be > 0");
  require(s.bandwidth_hz > 0, "bandwidth_hz must be > 0");
  require(s.power_w > 0, "power_w must be > 0");
  require(s.f_user_hz > 0 && s.f_server_hz > 0, "frequencies must be > 0");
  require(s.eta_user > 0 && s.eta_server > 0 && s.eta_gen > 0, "cycle counts must be > 0");
  require(s.kappa_user > 0 && s.kappa_server > 0, "capacitances must be > 0");
  require(s.task_min_kb > 0 && s.task_max_kb >= s.task_min_kb, "task size range invalid");
  require(s.block_size_mb > 0, "block_size_mb must be > 0");
  require(s.wired_rate_bps > 0, "wired_rate_bps must be > 0");
  require(s.omega_b > 0, "omega_b must be > 0");
  require(s.omega_t > 0 && s.omega_e > 0, "omega_t and omega_e must be > 0");
  require(s.preference_base > 0 && s.preference > 0, "preference weights must be > 0");
  require(s.preference_mode == "fixed" || s.preference_mode == "mixed",
          "preference_mode must be 'fixed' or 'mixed'");
  require(v.eps1 > 0 && v.eps2 > 0 && v.eps3 > 0, "eps1/eps2/eps3 must be > 0");
  require(v.varpi > 0, "varpi must be > 0");
  require(v.max_rounds >= 1, "max_rounds must be >= 1");
  require(v.tol > 0 && v.tol < 1e-2, "tol must lie in (0, 1e-2)");
  require(v.offload_cap > 0.5 && v.offload_cap < 1.0, "offload_cap must lie in (0.5, 1)");
  require(v.baseline_rho > 0 && v.baseline_rho <= 1, "baseline_rho must lie in (0, 1]");
  require(v.baseline_psi > 0 && v.baseline_psi <= 1, "baseline_psi must lie in (0, 1]");
}

}  // namespace daur
