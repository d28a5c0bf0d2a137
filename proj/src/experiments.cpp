#include "hom/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <numbers>

#include "hom/ensemble.hpp"
#include "hom/stats.hpp"

namespace hom {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class Fn>
auto fan_out(std::size_t n, std::uint64_t seed, const RunOptions& options, Fn&& fn) {
  if (options.serial) return run_ensemble_serial(n, seed, fn);
  return run_ensemble_parallel(n, seed, fn, options.threads);
}

std::vector<TrajectorySummary> run_summaries(const Protocol& protocol, std::size_t n_traj, std::uint64_t seed,
                                             const RunOptions& options) {
  return fan_out(n_traj, seed, options, [&](RngStream& rng) { return summarize(run_protocol(protocol, rng)); });
}

}  // namespace

std::string_view to_string(SweptParam param) {
  switch (param) {
    case SweptParam::kEta: return "eta";
    case SweptParam::kLambda: return "lambda";
    case SweptParam::kGamma: return "gamma";
    case SweptParam::kPhi: return "phi";
  }
  return "?";
}

SweptParam parse_swept_param(std::string_view name) {
  if (name == "eta") return SweptParam::kEta;
  if (name == "lambda") return SweptParam::kLambda;
  if (name == "gamma") return SweptParam::kGamma;
  if (name == "phi") return SweptParam::kPhi;
  throw ParameterError("param: expected one of eta, lambda, gamma, phi; got '" + std::string(name) + "'");
}

std::vector<double> default_grid(SweptParam param) {
  switch (param) {
    case SweptParam::kEta: return {0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    case SweptParam::kLambda: return {0.5, 0.75, 1.0, 1.25, 1.5};
    case SweptParam::kGamma: return {0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
    case SweptParam::kPhi: {
      std::vector<double> g;
      for (int k = 0; k <= 12; ++k) g.push_back(k * std::numbers::pi / 6.0);
      return g;
    }
  }
  return {};
}

SystemParams with_value(SystemParams p, SweptParam param, double value) {
  const std::string name(to_string(param));
  if (!std::isfinite(value)) throw ParameterError("grid: " + name + " value is not finite");
  switch (param) {
    case SweptParam::kEta:
      if (value < 0 || value > 1) throw ParameterError("grid: eta value outside [0, 1]");
      p.eta = value;
      break;
    case SweptParam::kLambda:
      if (value <= 0) throw ParameterError("grid: lambda value must be > 0");
      p.lambda = value;
      break;
    case SweptParam::kGamma:
      if (value < 0) throw ParameterError("grid: gamma value must be >= 0");
      p.gamma_ca = value;
      p.gamma_cb = value;
      break;
    case SweptParam::kPhi:
      // The closed end keeps the default 13-point grid, which ends at 2 pi.
      if (value < 0 || value > kTwoPi + 1e-12) throw ParameterError("grid: phi value outside [0, 2pi]");
      p.phi = value;
      break;
  }
  p.validate();
  return p;
}

double fidelity_to_target(const StateVector& post_click, ChannelTag tag) {
  if (tag != ChannelTag::kD1 && tag != ChannelTag::kD2) {
    throw std::invalid_argument("fidelity_to_target: only D1 and D2 clicks herald a target");
  }
  if (post_click.dims().size() != 4 || post_click.dims()[0] != 3 || post_click.dims()[1] != 3) {
    throw DimensionError("fidelity_to_target: expected protocol dims");
  }
  const std::size_t n_max = post_click.dims()[2] - 1;
  const double sign = tag == ChannelTag::kD1 ? 1.0 : -1.0;
  const cplx ba = post_click[flatten({IonLevel::kB, IonLevel::kA, 0, 0}, n_max)];
  const cplx ab = post_click[flatten({IonLevel::kA, IonLevel::kB, 0, 0}, n_max)];
  return std::norm((ba + sign * ab) / std::sqrt(2.0));
}

TrajectorySummary summarize(const TrajectoryRecord& record) {
  TrajectorySummary s;
  s.stream_index = record.stream_index;
  s.outcome = record.outcome;
  if (record.first_click) {
    s.first = record.first_click->tag;
    s.fidelity = fidelity_to_target(*record.heralded_state, record.first_click->tag);
  }
  if (record.second_click) s.second = record.second_click->tag;
  return s;
}

SweepPoint aggregate(std::vector<TrajectorySummary> records, bool with_second_stage) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.stream_index < b.stream_index; });

  SweepPoint pt;
  pt.n_traj = records.size();
  std::vector<double> fid;
  double sum_d1 = 0.0;
  double sum_d2 = 0.0;
  for (const auto& r : records) {
    if (!r.first) continue;
    ++pt.n_success;
    fid.push_back(r.fidelity);
    const bool first_d1 = *r.first == ChannelTag::kD1;
    if (first_d1) {
      ++pt.heralds_d1;
      sum_d1 += r.fidelity;
    } else {
      ++pt.heralds_d2;
      sum_d2 += r.fidelity;
    }
    if (!r.second) continue;
    ++pt.n_two_clicks;
    const bool second_d1 = *r.second == ChannelTag::kD1;
    if (first_d1 && second_d1) ++pt.d1_then_d1;
    if (first_d1 && !second_d1) ++pt.d1_then_d2;
    if (!first_d1 && second_d1) ++pt.d2_then_d1;
    if (!first_d1 && !second_d1) ++pt.d2_then_d2;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  pt.p_hat = static_cast<double>(pt.n_success) / static_cast<double>(pt.n_traj);
  pt.p_stderr = stats::binomial_stderr(pt.p_hat, pt.n_traj);
  const auto f = stats::mean_stderr(fid);
  pt.F_hat = fid.empty() ? nan : f.mean;
  pt.F_stderr = f.stderr_;
  pt.F_d1 = pt.heralds_d1 ? sum_d1 / static_cast<double>(pt.heralds_d1) : nan;
  pt.F_d2 = pt.heralds_d2 ? sum_d2 / static_cast<double>(pt.heralds_d2) : nan;

  if (with_second_stage) {
    if (pt.n_two_clicks > 0) {
      const double same = static_cast<double>(pt.d1_then_d1 + pt.d2_then_d2);
      pt.Ps_hat = same / static_cast<double>(pt.n_two_clicks);
      pt.Ps_stderr = stats::binomial_stderr(*pt.Ps_hat, pt.n_two_clicks);
    } else {
      pt.Ps_hat = nan;
      pt.Ps_stderr = nan;
    }
    pt.two_click_fraction =
        pt.n_success ? static_cast<double>(pt.n_two_clicks) / static_cast<double>(pt.n_success) : nan;
  }
  return pt;
}

SweepPoint run_entanglement_generation(const SystemParams& p, std::size_t n_traj, std::uint64_t seed,
                                       const RunOptions& options) {
  if (n_traj == 0) throw std::invalid_argument("run_entanglement_generation: n_traj must be >= 1");
  const Protocol protocol(p, options.sampler, /*second_stage=*/false);
  return aggregate(run_summaries(protocol, n_traj, seed, options));
}

SweepResult sweep(const SystemParams& p, SweptParam param, std::span<const double> grid, std::size_t n_traj,
                  std::uint64_t seed, const RunOptions& options) {
  if (grid.empty()) throw ParameterError("grid: must not be empty");
  if (param == SweptParam::kPhi) throw ParameterError("param: phi is scanned by the redistribution run");
  std::vector<SystemParams> points;
  for (double v : grid) points.push_back(with_value(p, param, v));

  SweepResult out{p, std::string(to_string(param)), {}, seed, utc_timestamp()};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    SweepPoint pt = run_entanglement_generation(points[k], n_traj, seed, options);
    pt.param = out.param;
    pt.value = grid[k];
    out.points.push_back(std::move(pt));
  }
  return out;
}

SweepResult run_redistribution(const SystemParams& p, std::span<const double> phi_grid, std::size_t n_traj,
                               std::uint64_t seed, const RunOptions& options) {
  if (phi_grid.empty()) throw ParameterError("grid: must not be empty");
  if (n_traj == 0) throw std::invalid_argument("run_redistribution: n_traj must be >= 1");
  std::vector<SystemParams> points;
  for (double v : phi_grid) points.push_back(with_value(p, SweptParam::kPhi, v));

  SweepResult out{p, "phi", {}, seed, utc_timestamp()};
  for (std::size_t k = 0; k < phi_grid.size(); ++k) {
    const Protocol protocol(points[k], options.sampler, /*second_stage=*/true);
    SweepPoint pt = aggregate(run_summaries(protocol, n_traj, seed, options), /*with_second_stage=*/true);
    pt.param = "phi";
    pt.value = phi_grid[k];
    out.points.push_back(std::move(pt));
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace hom
