#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ptdqd/cli.hpp"
#include "ptdqd/params.hpp"

namespace ptdqd {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Carries the "<path>:<line>:" prefix for every parse diagnostic.
struct ParseCtx {
  std::string path;
  int line = 0;
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
  }
};

double parse_double(const ParseCtx& ctx, const std::string& key, const std::string& value) {
  if (value.empty()) ctx.fail("empty value for key '" + key + "'");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end != value.c_str() + value.size() || errno == ERANGE || !std::isfinite(v)) {
    ctx.fail("invalid number '" + value + "' for key '" + key + "'");
  }
  return v;
}

int parse_int(const ParseCtx& ctx, const std::string& key, const std::string& value) {
  if (value.empty()) ctx.fail("empty value for key '" + key + "'");
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end != value.c_str() + value.size() || errno == ERANGE || v < -2147483647L ||
      v > 2147483647L) {
    ctx.fail("invalid integer '" + value + "' for key '" + key + "'");
  }
  return static_cast<int>(v);
}

bool parse_bool(const ParseCtx& ctx, const std::string& key, const std::string& value) {
  const std::string v = lower(value);
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  ctx.fail("invalid boolean '" + value + "' for key '" + key +
           "' (use true/false, 1/0, on/off)");
}

std::vector<double> parse_double_list(const ParseCtx& ctx, const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::size_t stop = (comma == std::string::npos) ? value.size() : comma;
    out.push_back(parse_double(ctx, key, trim(value.substr(start, stop - start))));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void apply_params_key(const ParseCtx& ctx, SetupParams& p, const std::string& key,
                      const std::string& value, bool& omega_max_given,
                      bool& omega_cut_given) {
  if (key == "omega0") p.omega0 = parse_double(ctx, key, value);
  else if (key == "lambda") p.lambda = parse_double(ctx, key, value);
  else if (key == "kappa1") p.kappa1 = parse_double(ctx, key, value);
  else if (key == "kappa2") p.kappa2 = parse_double(ctx, key, value);
  else if (key == "kappa_extra") p.kappa_extra = parse_double(ctx, key, value);
  else if (key == "g0") p.g0 = parse_double(ctx, key, value);
  else if (key == "Gamma") p.Gamma = parse_double(ctx, key, value);
  else if (key == "eps") p.eps = parse_double(ctx, key, value);
  else if (key == "tc") p.tc = parse_double(ctx, key, value);
  else if (key == "V") p.V = parse_double(ctx, key, value);
  else if (key == "mu1") p.mu1 = parse_double(ctx, key, value);
  else if (key == "mu2") p.mu2 = parse_double(ctx, key, value);
  else if (key == "beta") p.beta = parse_double(ctx, key, value);
  else if (key == "gamma_b") p.gamma_b = parse_double(ctx, key, value);
  else if (key == "omega_c") p.omega_c = parse_double(ctx, key, value);
  else if (key == "omega_max") { p.omega_max = parse_double(ctx, key, value); omega_max_given = true; }
  else if (key == "omega_cut") { p.omega_cut = parse_double(ctx, key, value); omega_cut_given = true; }
  else if (key == "lamb_shift") p.lamb_shift = parse_bool(ctx, key, value);
  else ctx.fail("unknown key '" + key + "' in section [params]");
}

void apply_tune_balance_key(const ParseCtx& ctx, TuneBalanceConfig& c,
                            const std::string& key, const std::string& value) {
  if (key == "n_theta") c.n_theta = parse_int(ctx, key, value);
  else if (key == "gamma_b_values") c.gamma_b_values = parse_double_list(ctx, key, value);
  else ctx.fail("unknown key '" + key + "' in section [tune_balance]");
}

void apply_evolve_key(const ParseCtx& ctx, EvolveConfig& c, const std::string& key,
                      const std::string& value) {
  if (key == "t_start") c.t_start = parse_double(ctx, key, value);
  else if (key == "t_end") c.t_end = parse_double(ctx, key, value);
  else if (key == "n_times") c.n_times = parse_int(ctx, key, value);
  else if (key == "init_re1") c.init_re1 = parse_double(ctx, key, value);
  else if (key == "init_im1") c.init_im1 = parse_double(ctx, key, value);
  else if (key == "init_re2") c.init_re2 = parse_double(ctx, key, value);
  else if (key == "init_im2") c.init_im2 = parse_double(ctx, key, value);
  else if (key == "method") c.method = value;
  else if (key == "e0") c.e0 = parse_double(ctx, key, value);
  else if (key == "omega_d") c.omega_d = parse_double(ctx, key, value);
  else if (key == "photon_bound") c.photon_bound = parse_double(ctx, key, value);
  else if (key == "noise") c.noise = parse_bool(ctx, key, value);
  else ctx.fail("unknown key '" + key + "' in section [evolve]");
}

void apply_transmission_key(const ParseCtx& ctx, TransmissionConfig& c,
                            const std::string& key, const std::string& value) {
  if (key == "axis") c.axis = value;
  else if (key == "axis_start") c.axis_start = parse_double(ctx, key, value);
  else if (key == "axis_stop") c.axis_stop = parse_double(ctx, key, value);
  else if (key == "axis_step") c.axis_step = parse_double(ctx, key, value);
  else if (key == "omega_d_start") c.omega_d_start = parse_double(ctx, key, value);
  else if (key == "omega_d_stop") c.omega_d_stop = parse_double(ctx, key, value);
  else if (key == "omega_d_step") c.omega_d_step = parse_double(ctx, key, value);
  else ctx.fail("unknown key '" + key + "' in section [transmission]");
}

void apply_steady_key(const ParseCtx& ctx, SteadyConfig& c, const std::string& key,
                      const std::string& value) {
  if (key == "model") c.model = value;
  else if (key == "axis") c.axis = value;
  else if (key == "axis_start") c.axis_start = parse_double(ctx, key, value);
  else if (key == "axis_stop") c.axis_stop = parse_double(ctx, key, value);
  else if (key == "axis_step") c.axis_step = parse_double(ctx, key, value);
  else ctx.fail("unknown key '" + key + "' in section [steady]");
}

void apply_compare_key(const ParseCtx& ctx, CompareLindbladConfig& c,
                       const std::string& key, const std::string& value) {
  if (key == "mode") c.mode = value;
  else if (key == "model") c.model = value;
  else if (key == "t_start") c.t_start = parse_double(ctx, key, value);
  else if (key == "t_end") c.t_end = parse_double(ctx, key, value);
  else if (key == "n_times") c.n_times = parse_int(ctx, key, value);
  else if (key == "init_re1") c.init_re1 = parse_double(ctx, key, value);
  else if (key == "init_im1") c.init_im1 = parse_double(ctx, key, value);
  else if (key == "init_re2") c.init_re2 = parse_double(ctx, key, value);
  else if (key == "init_im2") c.init_im2 = parse_double(ctx, key, value);
  else if (key == "method") c.method = value;
  else if (key == "photon_bound") c.photon_bound = parse_double(ctx, key, value);
  else if (key == "kappa2_start") c.kappa2_start = parse_double(ctx, key, value);
  else if (key == "kappa2_stop") c.kappa2_stop = parse_double(ctx, key, value);
  else if (key == "kappa2_step") c.kappa2_step = parse_double(ctx, key, value);
  else ctx.fail("unknown key '" + key + "' in section [compare_lindblad]");
}

void check(const std::string& path, bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(path + ": " + msg);
}

bool one_of(const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (v == a) return true;
  }
  return false;
}

void validate_semantics(const std::string& path, const RunConfig& cfg) {
  check(path, cfg.tune_balance.n_theta >= 4, "[tune_balance] n_theta must be >= 4");
  for (double g : cfg.tune_balance.gamma_b_values) {
    check(path, g >= 0.0, "[tune_balance] gamma_b_values entries must be >= 0");
  }

  const EvolveConfig& e = cfg.evolve;
  check(path, one_of(e.method, {"eigenbasis", "quadrature"}),
        "[evolve] method must be 'eigenbasis' or 'quadrature'");
  check(path, e.n_times >= 2, "[evolve] n_times must be >= 2");
  check(path, e.t_end > e.t_start, "[evolve] t_end must exceed t_start");
  check(path, e.photon_bound > 0.0, "[evolve] photon_bound must be > 0");

  const TransmissionConfig& t = cfg.transmission;
  check(path, one_of(t.axis, {"lambda", "kappa2"}),
        "[transmission] axis must be 'lambda' or 'kappa2'");
  check(path, t.axis_step > 0.0, "[transmission] axis_step must be > 0");
  check(path, t.axis_stop >= t.axis_start,
        "[transmission] axis_stop must be >= axis_start");
  check(path, t.omega_d_step > 0.0, "[transmission] omega_d_step must be > 0");
  check(path, t.omega_d_stop >= t.omega_d_start,
        "[transmission] omega_d_stop must be >= omega_d_start");

  const SteadyConfig& s = cfg.steady;
  check(path, one_of(s.model, {"eom", "lindblad_micro", "lindblad_phen", "all"}),
        "[steady] model must be 'eom', 'lindblad_micro', 'lindblad_phen', or 'all'");
  check(path, one_of(s.axis, {"lambda", "kappa2"}),
        "[steady] axis must be 'lambda' or 'kappa2'");
  check(path, s.axis_step > 0.0, "[steady] axis_step must be > 0");
  check(path, s.axis_stop >= s.axis_start, "[steady] axis_stop must be >= axis_start");

  const CompareLindbladConfig& c = cfg.compare_lindblad;
  check(path, one_of(c.mode, {"timeseries", "eigenvalues"}),
        "[compare_lindblad] mode must be 'timeseries' or 'eigenvalues'");
  check(path, one_of(c.model, {"microscopic", "phenomenological"}),
        "[compare_lindblad] model must be 'microscopic' or 'phenomenological'");
  check(path, one_of(c.method, {"eigenbasis", "quadrature"}),
        "[compare_lindblad] method must be 'eigenbasis' or 'quadrature'");
  check(path, c.n_times >= 2, "[compare_lindblad] n_times must be >= 2");
  check(path, c.t_end > c.t_start, "[compare_lindblad] t_end must exceed t_start");
  check(path, c.photon_bound > 0.0, "[compare_lindblad] photon_bound must be > 0");
  check(path, c.kappa2_step > 0.0, "[compare_lindblad] kappa2_step must be > 0");
  check(path, c.kappa2_stop >= c.kappa2_start,
        "[compare_lindblad] kappa2_stop must be >= kappa2_start");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(int v) { return std::to_string(v); }

std::string fmt(bool v) { return v ? "true" : "false"; }

std::string fmt(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt(v[i]);
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> resolved_pairs(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  auto put = [&out](const std::string& k, std::string v) {
    out.emplace_back(k, std::move(v));
  };

  const SetupParams& p = cfg.params;
  put("params.omega0", fmt(p.omega0));
  put("params.lambda", fmt(p.lambda));
  put("params.kappa1", fmt(p.kappa1));
  put("params.kappa2", fmt(p.kappa2));
  put("params.kappa_extra", fmt(p.kappa_extra));
  put("params.g0", fmt(p.g0));
  put("params.Gamma", fmt(p.Gamma));
  put("params.eps", fmt(p.eps));
  put("params.tc", fmt(p.tc));
  put("params.V", fmt(p.V));
  put("params.mu1", fmt(p.mu1));
  put("params.mu2", fmt(p.mu2));
  put("params.beta", fmt(p.beta));
  put("params.gamma_b", fmt(p.gamma_b));
  put("params.omega_c", fmt(p.omega_c));
  put("params.omega_max", fmt(p.omega_max));
  put("params.omega_cut", fmt(p.omega_cut));
  put("params.lamb_shift", fmt(p.lamb_shift));

  const TuneBalanceConfig& tb = cfg.tune_balance;
  put("tune_balance.n_theta", fmt(tb.n_theta));
  put("tune_balance.gamma_b_values", fmt(tb.gamma_b_values));

  const EvolveConfig& e = cfg.evolve;
  put("evolve.t_start", fmt(e.t_start));
  put("evolve.t_end", fmt(e.t_end));
  put("evolve.n_times", fmt(e.n_times));
  put("evolve.init_re1", fmt(e.init_re1));
  put("evolve.init_im1", fmt(e.init_im1));
  put("evolve.init_re2", fmt(e.init_re2));
  put("evolve.init_im2", fmt(e.init_im2));
  put("evolve.method", e.method);
  put("evolve.e0", fmt(e.e0));
  put("evolve.omega_d", fmt(e.omega_d));
  put("evolve.photon_bound", fmt(e.photon_bound));
  put("evolve.noise", fmt(e.noise));

  const TransmissionConfig& t = cfg.transmission;
  put("transmission.axis", t.axis);
  put("transmission.axis_start", fmt(t.axis_start));
  put("transmission.axis_stop", fmt(t.axis_stop));
  put("transmission.axis_step", fmt(t.axis_step));
  put("transmission.omega_d_start", fmt(t.omega_d_start));
  put("transmission.omega_d_stop", fmt(t.omega_d_stop));
  put("transmission.omega_d_step", fmt(t.omega_d_step));

  const SteadyConfig& s = cfg.steady;
  put("steady.model", s.model);
  put("steady.axis", s.axis);
  put("steady.axis_start", fmt(s.axis_start));
  put("steady.axis_stop", fmt(s.axis_stop));
  put("steady.axis_step", fmt(s.axis_step));

  const CompareLindbladConfig& c = cfg.compare_lindblad;
  put("compare_lindblad.mode", c.mode);
  put("compare_lindblad.model", c.model);
  put("compare_lindblad.t_start", fmt(c.t_start));
  put("compare_lindblad.t_end", fmt(c.t_end));
  put("compare_lindblad.n_times", fmt(c.n_times));
  put("compare_lindblad.init_re1", fmt(c.init_re1));
  put("compare_lindblad.init_im1", fmt(c.init_im1));
  put("compare_lindblad.init_re2", fmt(c.init_re2));
  put("compare_lindblad.init_im2", fmt(c.init_im2));
  put("compare_lindblad.method", c.method);
  put("compare_lindblad.photon_bound", fmt(c.photon_bound));
  put("compare_lindblad.kappa2_start", fmt(c.kappa2_start));
  put("compare_lindblad.kappa2_stop", fmt(c.kappa2_stop));
  put("compare_lindblad.kappa2_step", fmt(c.kappa2_step));
  return out;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");

  RunConfig cfg;
  ParseCtx ctx{path, 0};
  std::string section;
  bool omega_max_given = false, omega_cut_given = false;

  std::string raw;
  while (std::getline(in, raw)) {
    ++ctx.line;
    std::string line = raw;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') ctx.fail("malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!one_of(section, {"params", "tune_balance", "evolve", "transmission",
                            "steady", "compare_lindblad"})) {
        ctx.fail("unknown section [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) ctx.fail("expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) ctx.fail("empty key");
    if (section.empty()) ctx.fail("key '" + key + "' appears before any [section]");

    if (section == "params") {
      apply_params_key(ctx, cfg.params, key, value, omega_max_given, omega_cut_given);
    } else if (section == "tune_balance") {
      apply_tune_balance_key(ctx, cfg.tune_balance, key, value);
    } else if (section == "evolve") {
      apply_evolve_key(ctx, cfg.evolve, key, value);
    } else if (section == "transmission") {
      apply_transmission_key(ctx, cfg.transmission, key, value);
    } else if (section == "steady") {
      apply_steady_key(ctx, cfg.steady, key, value);
    } else {
      apply_compare_key(ctx, cfg.compare_lindblad, key, value);
    }
  }

  if (!omega_max_given) cfg.params.omega_max = 10.0 * cfg.params.omega_c;
  if (!omega_cut_given) cfg.params.omega_cut = 100.0 * cfg.params.omega0;

  try {
    cfg.params.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(path + ": " + err.what());
  }
  validate_semantics(path, cfg);
  cfg.resolved = resolved_pairs(cfg);
  return cfg;
}

}  // namespace ptdqd
