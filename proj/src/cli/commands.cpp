#include "hom/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "hom/analytic.hpp"
#include "hom/ensemble.hpp"
#include "hom/rng.hpp"
#include "hom/stats.hpp"
#include "hom/trajectory.hpp"

#ifndef HOMSIM_VERSION
#define HOMSIM_VERSION "0.0.0"
#endif

namespace hom::cli {
namespace {

using nlohmann::json;

constexpr double kZMax = 3.0;
constexpr double kKsLevel = 0.01;
constexpr double kConsistencyTol = 1e-12;
constexpr double kUnitaryTol = 1e-10;
constexpr std::size_t kKsSamples = 10000;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double value_or_nan(const std::optional<double>& v) {
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

std::string hamiltonian_name(HamiltonianKind k) {
  switch (k) {
    case HamiltonianKind::kAuto: return "auto";
    case HamiltonianKind::kFull: return "full";
    case HamiltonianKind::kAdiabatic: return "adiabatic";
  }
  return "?";
}

json meta(const SystemParams& p, std::uint64_t seed, const std::string& timestamp) {
  return {{"params", params_json(p)}, {"seed", seed}, {"version", HOMSIM_VERSION}, {"timestamp", timestamp}};
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

OracleCheck consistency_check(const SystemParams& p, bool corrupt) {
  auto channels = build_jump_channels(p);
  if (corrupt) {
    if (channels.empty()) {
      channels.push_back({cplx(0.1) * cavity_annihilation(0, p.dims()), ChannelTag::kD1, true});
    } else {
      channels.front().op *= cplx(1.1);
    }
  }
  const double defect = channel_consistency_defect(p, channels);
  return {"channel_consistency", defect <= kConsistencyTol,
          {{"defect", defect}, {"tolerance", kConsistencyTol}, {"corrupted", corrupt}}};
}

OracleCheck unitary_check(const SystemParams& p) {
  const OperatorMatrix u = precompute_propagator(stage_hamiltonian(p), p.dt);
  const double defect = max_abs((u.adjoint() * u).entries() - OperatorMatrix::identity(p.dims()).entries());
  return {"unitary_propagator", defect <= kUnitaryTol, {{"defect", defect}, {"tolerance", kUnitaryTol}}};
}

OracleCheck lindblad_check(const RunConfig& cfg) {
  const Dims dims = cfg.params.dims();
  const std::vector<NamedObservable> obs = {
      {"c1_number", cavity_number(0, dims)},
      {"aa_population", ion_transition(0, IonLevel::kA, IonLevel::kA, dims) *
                            ion_transition(1, IonLevel::kA, IonLevel::kA, dims)},
  };
  const std::vector<double> times = {1.0, 5.0, 10.0};
  OracleCheck check{"lindblad_ensemble", true, json::object()};
  try {
    const auto scores = ensemble_compare(cfg.params, obs, times, cfg.n_traj, cfg.seed, cfg.threads);
    json rows = json::array();
    double worst = 0.0;
    for (const auto& z : scores) {
      worst = std::max(worst, z.z);
      rows.push_back({{"observable", z.observable},
                      {"t", z.time},
                      {"trajectory_mean", z.trajectory_mean},
                      {"trajectory_stderr", z.trajectory_stderr},
                      {"lindblad", z.lindblad},
                      {"z", z.z}});
    }
    check.passed = worst <= kZMax;
    check.details = {{"n_traj", cfg.n_traj}, {"max_abs_z", worst}, {"z_max", kZMax}, {"scores", rows}};
  } catch (const InvariantViolation& e) {
    check.passed = false;
    check.details = {{"error", e.what()}};
  }
  return check;
}

std::vector<OracleCheck> waiting_time_checks(const RunConfig& cfg) {
  const double rate = 2.0 * cfg.params.kappa;
  if (rate <= 0.0) {
    json skipped = {{"skipped", "kappa = 0: no cavity decay to sample"}};
    return {{"ks_fixed_step", true, skipped}, {"ks_fast", true, skipped}, {"ks_fixed_vs_fast", true, skipped}};
  }
  const auto fixed = frozen_ion_click_times(cfg.params, Sampler::kFixedStep, kKsSamples, cfg.seed, cfg.threads);
  const auto fast =
      frozen_ion_click_times(cfg.params, Sampler::kWaitingTime, kKsSamples, mix64(cfg.seed), cfg.threads);
  const auto cdf = [rate](double t) { return t <= 0 ? 0.0 : -std::expm1(-rate * t); };

  const auto one = [&](const char* name, const std::vector<double>& xs) {
    const auto ks = stats::ks_one_sample(xs, cdf);
    return OracleCheck{name,
                       ks.p_value >= kKsLevel,
                       {{"n", xs.size()},
                        {"rate", rate},
                        {"mean", stats::mean_stderr(xs).mean},
                        {"statistic", ks.statistic},
                        {"p_value", ks.p_value},
                        {"level", kKsLevel}}};
  };
  const auto two = stats::ks_two_sample(fixed, fast);
  return {one("ks_fixed_step", fixed),
          one("ks_fast", fast),
          {"ks_fixed_vs_fast",
           two.p_value >= kKsLevel,
           {{"n", kKsSamples}, {"statistic", two.statistic}, {"p_value", two.p_value}, {"level", kKsLevel}}}};
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

json params_json(const SystemParams& p) {
  return {{"g", p.g},           {"omega", p.omega},       {"delta", p.delta},   {"kappa", p.kappa},
          {"gamma_ca", p.gamma_ca}, {"gamma_cb", p.gamma_cb}, {"eta", p.eta},   {"lambda", p.lambda},
          {"phi", p.phi},       {"dt", p.dt},             {"T", p.t_wait},      {"T2", p.t_wait2},
          {"n_max", p.n_max},   {"hamiltonian", hamiltonian_name(p.hamiltonian)},
          {"resolved_hamiltonian", p.uses_adiabatic() ? "adiabatic" : "full"}};
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "param,value,n_traj,p_hat,p_stderr,F_hat,F_stderr,infidelity\n";
  for (const auto& pt : result.points) {
    os << pt.param << ',' << format_double(pt.value) << ',' << pt.n_traj << ',' << format_double(pt.p_hat) << ','
       << format_double(pt.p_stderr) << ',' << format_double(pt.F_hat) << ',' << format_double(pt.F_stderr) << ','
       << format_double(1.0 - pt.F_hat) << '\n';
  }
  return os.str();
}

std::string redistribution_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "phi,n_traj,Ps_hat,Ps_stderr,two_click_fraction,Ps_theory\n";
  for (const auto& pt : result.points) {
    os << format_double(pt.value) << ',' << pt.n_traj << ',' << format_double(value_or_nan(pt.Ps_hat)) << ','
       << format_double(value_or_nan(pt.Ps_stderr)) << ',' << format_double(value_or_nan(pt.two_click_fraction))
       << ',' << format_double(analytic::same_detector_probability(pt.value)) << '\n';
  }
  return os.str();
}

json sweep_json(const SweepResult& result, bool redistribution) {
  json rows = json::array();
  for (const auto& pt : result.points) {
    if (redistribution) {
      rows.push_back({{"phi", pt.value},
                      {"n_traj", pt.n_traj},
                      {"Ps_hat", number_or_null(value_or_nan(pt.Ps_hat))},
                      {"Ps_stderr", number_or_null(value_or_nan(pt.Ps_stderr))},
                      {"two_click_fraction", number_or_null(value_or_nan(pt.two_click_fraction))},
                      {"Ps_theory", analytic::same_detector_probability(pt.value)}});
    } else {
      rows.push_back({{"param", pt.param},
                      {"value", pt.value},
                      {"n_traj", pt.n_traj},
                      {"p_hat", pt.p_hat},
                      {"p_stderr", pt.p_stderr},
                      {"F_hat", number_or_null(pt.F_hat)},
                      {"F_stderr", number_or_null(pt.F_stderr)},
                      {"infidelity", number_or_null(1.0 - pt.F_hat)}});
    }
  }
  return {{"meta", meta(result.params, result.master_seed, result.timestamp)}, {"rows", rows}};
}

std::string spectrum_csv(const SpectrumConfig& s) {
  const analytic::WwParams ww{s.gamma, s.omega};
  std::ostringstream os;
  os << "nu,amp_re,amp_im,spectral_density\n";
  const double step = (s.nu_max - s.nu_min) / static_cast<double>(s.nu_points - 1);
  for (std::size_t k = 0; k < s.nu_points; ++k) {
    const double nu = s.nu_min + step * static_cast<double>(k);
    const cplx a = analytic::ww_amplitude(nu, s.t, ww);
    os << format_double(nu) << ',' << format_double(a.real()) << ',' << format_double(a.imag()) << ','
       << format_double(std::norm(a)) << '\n';
  }
  os << "# normalization=" << format_double(analytic::emission_probability(s.t, ww)) << '\n';
  return os.str();
}

json spectrum_json(const SpectrumConfig& s) {
  const analytic::WwParams ww{s.gamma, s.omega};
  json rows = json::array();
  const double step = (s.nu_max - s.nu_min) / static_cast<double>(s.nu_points - 1);
  for (std::size_t k = 0; k < s.nu_points; ++k) {
    const double nu = s.nu_min + step * static_cast<double>(k);
    const cplx a = analytic::ww_amplitude(nu, s.t, ww);
    rows.push_back({{"nu", nu}, {"amp_re", a.real()}, {"amp_im", a.imag()}, {"spectral_density", std::norm(a)}});
  }
  return {{"meta",
           {{"gamma", s.gamma}, {"omega", s.omega}, {"t", s.t}, {"version", HOMSIM_VERSION}}},
          {"normalization", analytic::emission_probability(s.t, ww)},
          {"rows", rows}};
}

double channel_consistency_defect(const SystemParams& p, const std::vector<JumpChannel>& channels) {
  OperatorMatrix lhs = build_h_eff(p) - build_hamiltonian(p);
  for (const auto& c : channels) lhs += cplx(0.0, 0.5) * (c.op.adjoint() * c.op);
  return max_abs(lhs.entries());
}

std::vector<double> frozen_ion_click_times(const SystemParams& p, Sampler sampler, std::size_t n,
                                           std::uint64_t seed, int threads, double dt) {
  SystemParams q = p;
  q.g = 0.0;
  q.omega = 0.0;
  q.gamma_ca = 0.0;
  q.gamma_cb = 0.0;
  q.eta = 1.0;
  q.hamiltonian = HamiltonianKind::kFull;
  q.dt = dt;
  q.validate();
  const double rate = 2.0 * q.kappa;
  if (rate <= 0.0) throw ParameterError("kappa: waiting-time sampling needs kappa > 0");

  // The window holds all but e^-30 of the exponential mass.
  const Stage stage(build_h_eff(q), build_jump_channels(q), StageOptions{dt, 30.0 / rate});
  const StateVector psi0 = StateVector::basis(q.dims(), flatten({IonLevel::kA, IonLevel::kA, 1, 0}, q.n_max));
  return run_ensemble_parallel(
      n, seed,
      [&](RngStream& rng) {
        const StageRun run = run_stage(sampler, psi0, stage, rng);
        return run.click ? run.click->time : std::numeric_limits<double>::infinity();
      },
      threads);
}

std::vector<OracleCheck> run_oracle_suite(const RunConfig& cfg) {
  std::vector<OracleCheck> checks;
  checks.push_back(consistency_check(cfg.params, cfg.debug_corrupt_channels));
  if (cfg.params.kappa == 0.0 && cfg.params.gamma_ca == 0.0 && cfg.params.gamma_cb == 0.0) {
    checks.push_back(unitary_check(cfg.params));
  }
  checks.push_back(lindblad_check(cfg));
  for (auto& c : waiting_time_checks(cfg)) checks.push_back(std::move(c));
  return checks;
}

CommandOutput execute(const RunConfig& cfg) {
  const RunOptions options{cfg.threads, cfg.sampler, false};
  const bool as_json = cfg.format == Format::kJson;
  switch (cfg.command) {
    case Command::kEntangleSweep: {
      const auto result = sweep(cfg.params, cfg.param, cfg.grid, cfg.n_traj, cfg.seed, options);
      return {as_json ? sweep_json(result, false).dump(2) + "\n" : sweep_csv(result), true};
    }
    case Command::kRedistribute: {
      const auto result = run_redistribution(cfg.params, cfg.grid, cfg.n_traj, cfg.seed, options);
      return {as_json ? sweep_json(result, true).dump(2) + "\n" : redistribution_csv(result), true};
    }
    case Command::kSpectrum:
      return {as_json ? spectrum_json(cfg.spectrum).dump(2) + "\n" : spectrum_csv(cfg.spectrum), true};
    case Command::kOracleCheck: {
      const auto checks = run_oracle_suite(cfg);
      bool all = true;
      json rows = json::array();
      for (const auto& c : checks) {
        all = all && c.passed;
        rows.push_back({{"name", c.name}, {"pass", c.passed}, {"details", c.details}});
      }
      json report = {{"meta", meta(cfg.params, cfg.seed, utc_timestamp())}, {"pass", all}, {"checks", rows}};
      return {report.dump(2) + "\n", all};
    }
  }
  return {"", false};
}

void write_output(const RunConfig& cfg, const std::string& text) {
  if (!cfg.out) {
    std::cout << text << std::flush;
    if (!std::cout) throw IoError("cannot write to stdout");
    return;
  }
  std::ofstream out(*cfg.out, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file '" + *cfg.out + "'");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + *cfg.out + "' failed");
}

}  // namespace hom::cli
