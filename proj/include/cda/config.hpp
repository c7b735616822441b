#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cda {

// Flat dotted-key run configuration. Unknown keys are rejected by name; the
// effective configuration is echoed to a manifest that is itself a valid
// config file.
struct RunConfig {
  std::string experiment = "convergence";  // convergence | decay | cavity
  std::string out_dir = "out";
  double dt = 1e-3;       // cavity default 0.02 applied when unset
  bool dt_set = false;
  double t_final = 1.0;
  double mu1 = 100.0, mu2 = 100.0, mu3 = 100.0;
  double H = 0.0;  // 0: use 4h
  double h_max = 1.0;
  int h_levels = 6;
  double decay_h = 0.0625;
  std::vector<double> decay_mu = {1.0, 10.0, 100.0, 1000.0};
  std::string pair = "taylor_hood";  // taylor_hood | scott_vogelius
  std::string solver_backend = "lu";  // lu | gmres
  double solver_tol = 1e-10;

  double cavity_Pr = 1.0, cavity_Ra = 1e3, cavity_Le = 2.0, cavity_N = 0.8;
  int cavity_n = 16, cavity_steps = 4000;
  double cavity_inv_Da = 0.0;
  double cavity_wall_left_T = 1.0, cavity_wall_right_T = 0.0;
  double cavity_wall_left_S = 1.0, cavity_wall_right_S = 0.0;

  double effective_dt() const {
    if (dt_set) return dt;
    return experiment == "cavity" ? 0.02 : 1e-3;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + v + "'");
  }
  if (pos != v.size())
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + v + "'");
  return x;
}

inline int parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x)
    throw std::invalid_argument("config: key '" + key + "' expects an integer, got '" + v + "'");
  return i;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw std::invalid_argument("config: key '" + key + "' expects a list");
  return out;
}

}  // namespace detail

// Reads `key = value` lines ('#' comments, blank lines allowed) into a map.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: malformed line " + std::to_string(lineno) +
                                  " in " + path);
    kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  return kv;
}

inline void validate_config(const RunConfig& cfg);

inline RunConfig parse_config(const std::map<std::string, std::string>& kv) {
  RunConfig cfg;
  for (const auto& [key, v] : kv) {
    if (key == "experiment") cfg.experiment = v;
    else if (key == "out") cfg.out_dir = v;
    else if (key == "dt") { cfg.dt = detail::parse_double(key, v); cfg.dt_set = true; }
    else if (key == "t_final") cfg.t_final = detail::parse_double(key, v);
    else if (key == "mu1") cfg.mu1 = detail::parse_double(key, v);
    else if (key == "mu2") cfg.mu2 = detail::parse_double(key, v);
    else if (key == "mu3") cfg.mu3 = detail::parse_double(key, v);
    else if (key == "H") cfg.H = detail::parse_double(key, v);
    else if (key == "h.max") cfg.h_max = detail::parse_double(key, v);
    else if (key == "h.levels") cfg.h_levels = detail::parse_int(key, v);
    else if (key == "decay.h") cfg.decay_h = detail::parse_double(key, v);
    else if (key == "decay.mu_list") cfg.decay_mu = detail::parse_list(key, v);
    else if (key == "pair") cfg.pair = v;
    else if (key == "solver.backend") cfg.solver_backend = v;
    else if (key == "solver.tol") cfg.solver_tol = detail::parse_double(key, v);
    else if (key == "cavity.Pr") cfg.cavity_Pr = detail::parse_double(key, v);
    else if (key == "cavity.Ra") cfg.cavity_Ra = detail::parse_double(key, v);
    else if (key == "cavity.Le") cfg.cavity_Le = detail::parse_double(key, v);
    else if (key == "cavity.N") cfg.cavity_N = detail::parse_double(key, v);
    else if (key == "cavity.n") cfg.cavity_n = detail::parse_int(key, v);
    else if (key == "cavity.steps") cfg.cavity_steps = detail::parse_int(key, v);
    else if (key == "cavity.inv_Da") cfg.cavity_inv_Da = detail::parse_double(key, v);
    else if (key == "cavity.wall_left_T") cfg.cavity_wall_left_T = detail::parse_double(key, v);
    else if (key == "cavity.wall_right_T") cfg.cavity_wall_right_T = detail::parse_double(key, v);
    else if (key == "cavity.wall_left_S") cfg.cavity_wall_left_S = detail::parse_double(key, v);
    else if (key == "cavity.wall_right_S") cfg.cavity_wall_right_S = detail::parse_double(key, v);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  validate_config(cfg);
  return cfg;
}

inline void validate_config(const RunConfig& cfg) {
  if (cfg.experiment != "convergence" && cfg.experiment != "decay" &&
      cfg.experiment != "cavity")
    throw std::invalid_argument("config: key 'experiment' must be convergence, decay, or cavity");
  if (cfg.dt_set && !(cfg.dt > 0))
    throw std::invalid_argument("config: key 'dt' must be positive");
  if (!(cfg.t_final > 0)) throw std::invalid_argument("config: key 't_final' must be positive");
  if (cfg.mu1 < 0) throw std::invalid_argument("config: key 'mu1' must be nonnegative");
  if (cfg.mu2 < 0) throw std::invalid_argument("config: key 'mu2' must be nonnegative");
  if (cfg.mu3 < 0) throw std::invalid_argument("config: key 'mu3' must be nonnegative");
  if (cfg.H < 0) throw std::invalid_argument("config: key 'H' must be nonnegative");
  if (!(cfg.h_max > 0)) throw std::invalid_argument("config: key 'h.max' must be positive");
  if (cfg.h_levels < 1) throw std::invalid_argument("config: key 'h.levels' must be >= 1");
  if (!(cfg.decay_h > 0)) throw std::invalid_argument("config: key 'decay.h' must be positive");
  for (double m : cfg.decay_mu)
    if (m <= 0)
      throw std::invalid_argument("config: key 'decay.mu_list' entries must be positive");
  if (cfg.pair != "taylor_hood" && cfg.pair != "scott_vogelius")
    throw std::invalid_argument("config: key 'pair' must be taylor_hood or scott_vogelius");
  if (cfg.solver_backend != "lu" && cfg.solver_backend != "gmres")
    throw std::invalid_argument("config: key 'solver.backend' must be lu or gmres");
  if (!(cfg.solver_tol > 0) || cfg.solver_tol > 1e-2)
    throw std::invalid_argument("config: key 'solver.tol' must be in (0, 1e-2]");
  if (!(cfg.cavity_Pr > 0))
    throw std::invalid_argument("config: key 'cavity.Pr' must be positive");
  if (!(cfg.cavity_Ra > 0))
    throw std::invalid_argument("config: key 'cavity.Ra' must be positive");
  if (!(cfg.cavity_Le > 0))
    throw std::invalid_argument("config: key 'cavity.Le' must be positive");
  if (cfg.cavity_n < 1) throw std::invalid_argument("config: key 'cavity.n' must be >= 1");
  if (cfg.cavity_steps < 0)
    throw std::invalid_argument("config: key 'cavity.steps' must be nonnegative");
  if (cfg.cavity_inv_Da < 0)
    throw std::invalid_argument("config: key 'cavity.inv_Da' must be nonnegative");
}

inline void write_manifest(const RunConfig& cfg, const std::string& path,
                           const std::string& version) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("config: cannot write manifest " + path);
  os.precision(17);
  os << "# generated manifest, version " << version << "\n";
  os << "experiment = " << cfg.experiment << "\n";
  os << "out = " << cfg.out_dir << "\n";
  os << "dt = " << cfg.effective_dt() << "\n";
  os << "t_final = " << cfg.t_final << "\n";
  os << "mu1 = " << cfg.mu1 << "\n";
  os << "mu2 = " << cfg.mu2 << "\n";
  os << "mu3 = " << cfg.mu3 << "\n";
  os << "H = " << cfg.H << "\n";
  os << "h.max = " << cfg.h_max << "\n";
  os << "h.levels = " << cfg.h_levels << "\n";
  os << "decay.h = " << cfg.decay_h << "\n";
  os << "decay.mu_list = ";
  for (std::size_t i = 0; i < cfg.decay_mu.size(); ++i)
    os << (i ? "," : "") << cfg.decay_mu[i];
  os << "\n";
  os << "pair = " << cfg.pair << "\n";
  os << "solver.backend = " << cfg.solver_backend << "\n";
  os << "solver.tol = " << cfg.solver_tol << "\n";
  os << "cavity.Pr = " << cfg.cavity_Pr << "\n";
  os << "cavity.Ra = " << cfg.cavity_Ra << "\n";
  os << "cavity.Le = " << cfg.cavity_Le << "\n";
  os << "cavity.N = " << cfg.cavity_N << "\n";
  os << "cavity.n = " << cfg.cavity_n << "\n";
  os << "cavity.steps = " << cfg.cavity_steps << "\n";
  os << "cavity.inv_Da = " << cfg.cavity_inv_Da << "\n";
  os << "cavity.wall_left_T = " << cfg.cavity_wall_left_T << "\n";
  os << "cavity.wall_right_T = " << cfg.cavity_wall_right_T << "\n";
  os << "cavity.wall_left_S = " << cfg.cavity_wall_left_S << "\n";
  os << "cavity.wall_right_S = " << cfg.cavity_wall_right_S << "\n";
}

}  // namespace cda
