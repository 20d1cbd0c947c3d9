#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ptdqd/params.hpp"

namespace ptdqd {

/// Configuration file error with line/key diagnostics.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TuneBalanceConfig {
  int n_theta = 200;
  std::vector<double> gamma_b_values;  ///< optional sensitivity-scan values
};

struct EvolveConfig {
  double t_start = 0.0;
  double t_end = 1600.0;
  int n_times = 2000;
  double init_re1 = 1.0, init_im1 = 0.0;
  double init_re2 = 0.0, init_im2 = 0.0;
  std::string method = "eigenbasis";  ///< eigenbasis | quadrature
  double e0 = 0.0;
  double omega_d = 0.0;
  double photon_bound = 50.0;
  bool noise = true;  ///< false zeroes the noise-kernel amplitude
};

struct TransmissionConfig {
  std::string axis = "lambda";  ///< lambda | kappa2
  double axis_start = 0.0, axis_stop = 0.012, axis_step = 0.00025;
  double omega_d_start = 7.985, omega_d_stop = 8.015, omega_d_step = 0.0005;
};

struct SteadyConfig {
  std::string model = "eom";  ///< eom | lindblad_micro | lindblad_phen | all
  std::string axis = "lambda";
  double axis_start = 0.0, axis_stop = 0.012, axis_step = 0.00025;
};

struct CompareLindbladConfig {
  std::string mode = "timeseries";  ///< timeseries | eigenvalues
  std::string model = "microscopic";
  double t_start = 0.0, t_end = 1600.0;
  int n_times = 2000;
  double init_re1 = 1.0, init_im1 = 0.0;
  double init_re2 = 0.0, init_im2 = 0.0;
  std::string method = "eigenbasis";
  double photon_bound = 50.0;
  double kappa2_start = 0.002, kappa2_stop = 0.010, kappa2_step = 0.0002;
};

struct RunConfig {
  SetupParams params;
  TuneBalanceConfig tune_balance;
  EvolveConfig evolve;
  TransmissionConfig transmission;
  SteadyConfig steady;
  CompareLindbladConfig compare_lindblad;
  /// Every resolved key=value in deterministic order, echoed into outputs.
  std::vector<std::pair<std::string, std::string>> resolved;
};

/// Parses a flat [section] key = value config file. Unknown sections or keys
/// are rejected with line diagnostics; SetupParams invariants are
/// revalidated on load. omega_max/omega_cut default to 10*omega_c and
/// 100*omega0 unless given explicitly.
RunConfig load_config(const std::string& path);

/// Recomputes the key=value echo for the *current* state of a config
/// (callers that override fields after load_config use this to refresh
/// RunConfig::resolved). Deterministic field order, %.17g doubles.
std::vector<std::pair<std::string, std::string>> resolved_pairs(const RunConfig& cfg);

/// Entry point of the command-line tool (also callable in-process).
/// Subcommands: tune-balance, evolve, transmission, steady, compare-lindblad.
/// Flags: --config <path> --out <path> [--no-lamb-shift] [--no-phonon]
/// [--method quadrature|eigenbasis] [--threads N]; PTDQD_THREADS is the
/// fallback for --threads. Exit codes: 0 success, 2 config error,
/// 3 numerical failure.
int cli_main(int argc, const char* const* argv);

}  // namespace ptdqd
