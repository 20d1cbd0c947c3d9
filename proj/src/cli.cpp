#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ptdqd/cli.hpp"
#include "ptdqd/cmat2.hpp"
#include "ptdqd/dynamics.hpp"
#include "ptdqd/inout.hpp"
#include "ptdqd/ness.hpp"
#include "ptdqd/nh.hpp"
#include "ptdqd/params.hpp"
#include "ptdqd/version.hpp"

namespace ptdqd {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

/// Keeps free-text cells from breaking the comma-separated layout.
std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::vector<double> grid_from(double start, double stop, double step) {
  std::vector<double> g;
  const long n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  g.reserve(static_cast<std::size_t>(n + 1));
  for (long i = 0; i <= n; ++i) g.push_back(start + i * step);
  return g;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) {
    t[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  }
  return t;
}

/// Accumulates one CSV document: '#' metadata block, column header, rows.
class CsvDoc {
 public:
  void meta(const std::string& line) { head_ += "# " + line + "\n"; }
  void columns(const std::string& cols) { cols_ = cols + "\n"; }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ',';
      body_ += cells[i];
    }
    body_ += '\n';
  }
  std::string str() const { return head_ + cols_ + body_; }

 private:
  std::string head_, cols_, body_;
};

/// Buffers every byte until the command finished, so failed runs leave no
/// partial output behind.
struct Sink {
  std::string out_path;  ///< empty = stdout
  std::string csv;
  std::vector<std::pair<std::string, std::string>> extra_files;

  void flush() const {
    if (out_path.empty()) {
      std::fwrite(csv.data(), 1, csv.size(), stdout);
      std::fflush(stdout);
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open output file: " + out_path);
      f.write(csv.data(), static_cast<std::streamsize>(csv.size()));
    }
    for (const auto& [path, content] : extra_files) {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open output file: " + path);
      f.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
  }
};

void emit_config_meta(CsvDoc& doc, const char* command, const RunConfig& cfg) {
  doc.meta(std::string("ptdqd ") + PTDQD_VERSION);
  doc.meta(std::string("command: ") + command);
  for (const auto& [k, v] : cfg.resolved) doc.meta(k + " = " + v);
}

json roots_to_json(const std::vector<BalanceRoot>& roots) {
  json arr = json::array();
  for (const BalanceRoot& r : roots) {
    arr.push_back({{"theta", r.theta}, {"eps", r.eps}, {"tc", r.tc}, {"dn", r.dn}});
  }
  return arr;
}

void cmd_tune_balance(const RunConfig& cfg, Sink& sink) {
  const SetupParams& p = cfg.params;
  const BalanceScan scan = tune_balance_scan(p, cfg.tune_balance.n_theta);

  json summary;
  summary["version"] = PTDQD_VERSION;
  summary["rhs"] = scan.rhs;
  summary["roots"] = roots_to_json(scan.roots);
  json sens = json::array();
  for (double g : cfg.tune_balance.gamma_b_values) {
    SetupParams pg = p;
    pg.gamma_b = g;
    const BalanceScan sg = tune_balance_scan(pg, cfg.tune_balance.n_theta);
    sens.push_back({{"gamma_b", g}, {"roots", roots_to_json(sg.roots)}});
  }
  summary["gamma_b_sensitivity"] = sens;

  CsvDoc doc;
  emit_config_meta(doc, "tune-balance", cfg);
  if (scan.roots.empty()) {
    doc.meta("warning: no balance roots found for these parameters");
    std::fprintf(stderr, "warning: no balance roots found for these parameters\n");
  }
  if (sink.out_path.empty()) {
    doc.meta("roots: " + summary.dump());
  } else {
    sink.extra_files.emplace_back(sink.out_path + ".roots.json",
                                  summary.dump(2) + "\n");
  }
  doc.columns("theta,eps,tc,lhs,rhs,is_root");

  const double step =
      scan.theta.size() > 1 ? scan.theta[1] - scan.theta[0] : 0.0;
  for (std::size_t i = 0; i < scan.theta.size(); ++i) {
    const double th = scan.theta[i];
    int is_root = 0;
    for (const BalanceRoot& r : scan.roots) {
      if (std::abs(th - r.theta) <= step * (1.0 + 1e-9)) is_root = 1;
    }
    doc.row({num(th), num(p.omega0 * std::cos(th)),
             num(0.5 * p.omega0 * std::sin(th)), num(scan.lhs[i]),
             num(scan.rhs), std::to_string(is_root)});
  }
  sink.csv = doc.str();
}

void cmd_evolve(const RunConfig& cfg, Sink& sink) {
  const SetupParams& p = cfg.params;
  const EvolveConfig& e = cfg.evolve;
  const DqdSteadyState ss = solve_ness(p);
  const CMat2 H = build_heff(p, ss);
  NoiseKernelSpec spec = make_noise_kernel_spec(p, ss);
  if (!e.noise) spec.amp = 0.0;

  const std::pair<cplx, cplx> init{cplx(e.init_re1, e.init_im1),
                                   cplx(e.init_re2, e.init_im2)};
  const double alpha =
      std::sqrt(std::norm(init.first) + std::norm(init.second));
  const std::vector<double> times = linspace(e.t_start, e.t_end, e.n_times);
  const CorrMethod method = (e.method == "quadrature")
                                ? CorrMethod::quadrature
                                : CorrMethod::eigenbasis;
  const DriveSpec drive{e.e0, e.omega_d};
  const Trajectory traj = evolve_correlations(H, spec, init, times, method,
                                              drive, e.photon_bound);

  CsvDoc doc;
  emit_config_meta(doc, "evolve", cfg);
  if (alpha > 0.0 && alpha <= 1e-4) {
    const char* w =
        "warning: initial amplitude <= 1e-4 is comparable to vacuum noise; "
        "the separation of coherent and fluctuating parts degrades";
    doc.meta(w);
    std::fprintf(stderr, "%s\n", w);
  }
  if (traj.first_invalid_index >= 0) {
    const std::string w =
        "warning: photon bound exceeded from t = " +
        num(times[static_cast<std::size_t>(traj.first_invalid_index)]) +
        " ns onward; rows carry validity_flag=0 there";
    doc.meta(w);
    std::fprintf(stderr, "%s\n", w.c_str());
  }
  doc.columns(
      "t,re_b1,im_b1,re_b2,im_b2,n1,n2,fluct1,fluct2,current,validity_flag");

  for (std::size_t i = 0; i < times.size(); ++i) {
    const cplx b1 = traj.quad[i].first;
    const cplx b2 = traj.quad[i].second;
    const double fluct1 = traj.n1[i] - std::norm(b1);
    const double fluct2 = traj.n2[i] - std::norm(b2);
    doc.row({num(times[i]), num(b1.real()), num(b1.imag()), num(b2.real()),
             num(b2.imag()), num(traj.n1[i]), num(traj.n2[i]), num(fluct1),
             num(fluct2), num(traj.current[i]),
             std::to_string(traj.validity_flag[i])});
  }
  sink.csv = doc.str();
}

void cmd_transmission(const RunConfig& cfg, int threads, Sink& sink) {
  const SetupParams& p = cfg.params;
  const TransmissionConfig& t = cfg.transmission;
  const DqdSteadyState ss = solve_ness(p);
  const std::vector<double> grid =
      grid_from(t.axis_start, t.axis_stop, t.axis_step);
  const std::vector<double> wgrid =
      grid_from(t.omega_d_start, t.omega_d_stop, t.omega_d_step);
  const SweepAxis axis =
      (t.axis == "kappa2") ? SweepAxis::kappa2 : SweepAxis::lambda;
  const SweepResult res = sweep_transmission(p, ss, axis, grid, wgrid, threads);

  json peaks = json::array();
  for (const SweepPeakSummary& s : res.peaks) {
    json e;
    e["axis_value"] = s.axis_value;
    e["peak_omega_d"] = s.peak_omega_d;
    e["detmin_omega_d"] = s.detmin_omega_d;
    e["re_lam_plus"] = s.re_lam_plus;
    e["re_lam_minus"] = s.re_lam_minus;
    e["cand_minus"] = s.cand_minus;
    e["cand_plus"] = s.cand_plus;
    e["max_peak_detmin_gap"] = s.max_peak_detmin_gap;
    e["max_peak_relam_gap"] = s.max_peak_relam_gap;
    SetupParams pa = p;
    if (axis == SweepAxis::kappa2) {
      pa.kappa2 = s.axis_value;
    } else {
      pa.lambda = s.axis_value;
    }
    try {
      const PhaseLandmarks lm = phase_landmarks(pa, ss);
      e["pi_flips"] = lm.pi_flips;
      e["zero_phase"] = lm.zero_phase;
    } catch (const std::exception& ex) {
      e["landmarks_error"] = std::string(ex.what());
    }
    peaks.push_back(e);
  }
  json summary;
  summary["version"] = PTDQD_VERSION;
  summary["axis"] = t.axis;
  summary["peaks"] = peaks;

  CsvDoc doc;
  emit_config_meta(doc, "transmission", cfg);
  doc.meta("axis: " + t.axis);
  if (sink.out_path.empty()) {
    doc.meta("peaks: " + summary.dump());
  } else {
    sink.extra_files.emplace_back(sink.out_path + ".peaks.json",
                                  summary.dump(2) + "\n");
  }
  doc.columns(
      "axis_value,omega_d,amp1,phase1,amp2,phase2,phase2_unwrapped,abs_det,"
      "re_lam_plus,im_lam_plus,re_lam_minus,im_lam_minus,closed_form_dev,"
      "error,error_msg");
  for (const SweepRow& r : res.rows) {
    doc.row({num(r.axis_value), num(r.omega_d), num(r.amp1), num(r.phase1),
             num(r.amp2), num(r.phase2), num(r.phase2_unwrapped),
             num(r.abs_det), num(r.re_lam_plus), num(r.im_lam_plus),
             num(r.re_lam_minus), num(r.im_lam_minus), num(r.closed_form_dev),
             std::to_string(r.error ? 1 : 0), sanitize(r.error_msg)});
  }
  sink.csv = doc.str();
}

void cmd_steady(const RunConfig& cfg, Sink& sink) {
  const SetupParams& p = cfg.params;
  const SteadyConfig& s = cfg.steady;
  const DqdSteadyState ss = solve_ness(p);
  const std::vector<double> grid =
      grid_from(s.axis_start, s.axis_stop, s.axis_step);

  std::vector<std::pair<std::string, SteadyModel>> models;
  if (s.model == "eom" || s.model == "all") {
    models.emplace_back("eom", SteadyModel::eom);
  }
  if (s.model == "lindblad_micro" || s.model == "all") {
    models.emplace_back("lindblad_micro", SteadyModel::lindblad_micro);
  }
  if (s.model == "lindblad_phen" || s.model == "all") {
    models.emplace_back("lindblad_phen", SteadyModel::lindblad_phen);
  }

  CsvDoc doc;
  emit_config_meta(doc, "steady", cfg);
  doc.meta("axis: " + s.axis);
  doc.columns("model,axis_value,n1,n2,current,error,error_msg");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double v : grid) {
    SetupParams pa = p;
    if (s.axis == "kappa2") {
      pa.kappa2 = v;
    } else {
      pa.lambda = v;
    }
    for (const auto& [name, model] : models) {
      try {
        const SteadyPhotons ph = steady_state_photons(pa, ss, model);
        doc.row({name, num(v), num(ph.n1), num(ph.n2), num(ph.current), "0",
                 ""});
      } catch (const std::exception& ex) {
        doc.row({name, num(v), num(nan), num(nan), num(nan), "1",
                 sanitize(ex.what())});
      }
    }
  }
  sink.csv = doc.str();
}

void append_traj_cells(std::vector<std::string>& cells, const Trajectory& tr,
                       std::size_t i) {
  const cplx b1 = tr.quad[i].first;
  const cplx b2 = tr.quad[i].second;
  cells.push_back(num(b1.real()));
  cells.push_back(num(b1.imag()));
  cells.push_back(num(b2.real()));
  cells.push_back(num(b2.imag()));
  cells.push_back(num(tr.n1[i]));
  cells.push_back(num(tr.n2[i]));
  cells.push_back(num(tr.n1[i] - std::norm(b1)));
  cells.push_back(num(tr.n2[i] - std::norm(b2)));
  cells.push_back(std::to_string(tr.validity_flag[i]));
}

void cmd_compare_lindblad(const RunConfig& cfg, Sink& sink) {
  const SetupParams& p = cfg.params;
  const CompareLindbladConfig& c = cfg.compare_lindblad;
  const DqdSteadyState ss = solve_ness(p);
  const LindbladModel model = (c.model == "phenomenological")
                                  ? LindbladModel::phenomenological
                                  : LindbladModel::microscopic;

  CsvDoc doc;
  emit_config_meta(doc, "compare-lindblad", cfg);

  if (c.mode == "timeseries") {
    const std::pair<cplx, cplx> init{cplx(c.init_re1, c.init_im1),
                                     cplx(c.init_re2, c.init_im2)};
    const std::vector<double> times = linspace(c.t_start, c.t_end, c.n_times);
    const CorrMethod method = (c.method == "quadrature")
                                  ? CorrMethod::quadrature
                                  : CorrMethod::eigenbasis;
    const CMat2 H = build_heff(p, ss);
    const NoiseKernelSpec spec = make_noise_kernel_spec(p, ss);
    const Trajectory eom = evolve_correlations(H, spec, init, times, method,
                                               DriveSpec{}, c.photon_bound);
    const Trajectory lb = lindblad_evolve(p, ss, model, DriveSpec{}, init,
                                          times, c.photon_bound);
    doc.meta("lindblad model: " + c.model);
    doc.columns(
        "t,eom_re_b1,eom_im_b1,eom_re_b2,eom_im_b2,eom_n1,eom_n2,eom_fluct1,"
        "eom_fluct2,eom_validity,lb_re_b1,lb_im_b1,lb_re_b2,lb_im_b2,lb_n1,"
        "lb_n2,lb_fluct1,lb_fluct2,lb_validity");
    for (std::size_t i = 0; i < times.size(); ++i) {
      std::vector<std::string> cells{num(times[i])};
      append_traj_cells(cells, eom, i);
      append_traj_cells(cells, lb, i);
      doc.row(cells);
    }
  } else {  // eigenvalues
    const std::vector<double> grid =
        grid_from(c.kappa2_start, c.kappa2_stop, c.kappa2_step);
    const Kappa2Thresholds th = kappa2_thresholds(p, ss);
    doc.meta("kappa2_ep = " + num(th.kappa2_ep));
    if (th.kappa2_th) {
      doc.meta("kappa2_th = " + num(*th.kappa2_th));
    } else {
      doc.meta("kappa2_th = none (system dissipative for every kappa2)");
    }
    doc.columns(
        "kappa2,re_lam_plus,im_lam_plus,re_lam_minus,im_lam_minus,"
        "re_lam2_plus,im_lam2_plus,re_lam2_minus,im_lam2_minus,pair_diff,"
        "max_im_lam");
    for (double v : grid) {
      SetupParams pa = p;
      pa.kappa2 = v;
      const EigenInfo e1 = eig2(build_heff(pa, ss));
      const EigenInfo e2 = eig2(build_heff_lindblad(pa, ss));
      const double direct = std::max(std::abs(e1.lam_plus - e2.lam_plus),
                                     std::abs(e1.lam_minus - e2.lam_minus));
      const double swapped = std::max(std::abs(e1.lam_plus - e2.lam_minus),
                                      std::abs(e1.lam_minus - e2.lam_plus));
      const double pair_diff = std::min(direct, swapped);
      const double max_im =
          std::max(e1.lam_plus.imag(), e1.lam_minus.imag());
      doc.row({num(v), num(e1.lam_plus.real()), num(e1.lam_plus.imag()),
               num(e1.lam_minus.real()), num(e1.lam_minus.imag()),
               num(e2.lam_plus.real()), num(e2.lam_plus.imag()),
               num(e2.lam_minus.real()), num(e2.lam_minus.imag()),
               num(pair_diff), num(max_im)});
    }
  }
  sink.csv = doc.str();
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  std::string config_path, out_path, method_override;
  int threads = 0;

  CLI::App app{"coupled-cavity + quantum-dot gain simulator"};
  app.name("ptdqd");
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--config", config_path,
                 "config file ([section] key = value)");
  app.add_option("--out", out_path,
                 "output CSV path (default: stdout); JSON summaries go to "
                 "<out>.roots.json / <out>.peaks.json");
  app.add_flag("--no-lamb-shift",
               "drop the principal-value (Lamb-type) bath shifts");
  app.add_flag("--no-phonon", "set the phonon coupling gamma_b to 0");
  app.add_option("--method", method_override,
                 "correlation method for evolve/compare-lindblad")
      ->check(CLI::IsMember({"eigenbasis", "quadrature"}));
  app.add_option("--threads", threads, "worker threads for sweep grids")
      ->check(CLI::PositiveNumber);

  CLI::App* tb = app.add_subcommand(
      "tune-balance", "scan the gain-loss balance condition over the "
                      "resonance ellipse and report its roots");
  CLI::App* ev = app.add_subcommand(
      "evolve", "time-evolve cavity quadratures and correlations");
  CLI::App* tr = app.add_subcommand(
      "transmission", "sweep driven transmission amplitude/phase grids");
  CLI::App* st = app.add_subcommand(
      "steady", "steady-state photon numbers and intercavity current");
  app.add_subcommand("compare-lindblad",
                     "compare the full dynamics against local-Lindblad "
                     "reductions (timeseries or eigenvalue sweep)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (app.count("--no-lamb-shift") > 0) cfg.params.lamb_shift = false;
    if (app.count("--no-phonon") > 0) cfg.params.gamma_b = 0.0;
    if (!method_override.empty()) {
      cfg.evolve.method = method_override;
      cfg.compare_lindblad.method = method_override;
    }
    cfg.resolved = resolved_pairs(cfg);

    if (threads <= 0) {
      if (const char* env = std::getenv("PTDQD_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 1024) {
          threads = static_cast<int>(v);
        } else {
          std::fprintf(stderr, "warning: ignoring invalid PTDQD_THREADS='%s'\n",
                       env);
        }
      }
    }
    if (threads <= 0) threads = 1;

    Sink sink;
    sink.out_path = out_path;
    if (tb->parsed()) {
      cmd_tune_balance(cfg, sink);
    } else if (ev->parsed()) {
      cmd_evolve(cfg, sink);
    } else if (tr->parsed()) {
      cmd_transmission(cfg, threads, sink);
    } else if (st->parsed()) {
      cmd_steady(cfg, sink);
    } else {
      cmd_compare_lindblad(cfg, sink);
    }
    sink.flush();
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace ptdqd
