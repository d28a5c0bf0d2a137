#pragma once

// Entanglement-generation sweeps and the second-photon redistribution scan.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hom/model.hpp"
#include "hom/trajectory.hpp"

namespace hom {

enum class SweptParam { kEta, kLambda, kGamma, kPhi };

std::string_view to_string(SweptParam param);
/// Accepts "eta", "lambda", "gamma", "phi".
SweptParam parse_swept_param(std::string_view name);

/// Default grids: eta 0.5..1.0 step 0.1; lambda 0.5..1.5 step 0.25;
/// gamma {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}; phi 0..2pi step pi/6 (13 points).
std::vector<double> default_grid(SweptParam param);

/// Copy of p with the swept parameter set; gamma sets gamma_ca = gamma_cb.
/// Throws ParameterError for values outside the parameter's legal range.
SystemParams with_value(SystemParams p, SweptParam param, double value);

struct RunOptions {
  int threads = 0;  ///< <= 0: OpenMP default
  Sampler sampler = Sampler::kWaitingTime;
  bool serial = false;  ///< use the serial reference kernel
};

/// |<target (x) |00>|psi>|^2 with target |+> for D1 and |-> for D2.
double fidelity_to_target(const StateVector& post_click, ChannelTag tag);

/// The per-trajectory facts that sweep statistics need.
struct TrajectorySummary {
  std::uint64_t stream_index = 0;
  Outcome outcome = Outcome::kNoClick;
  std::optional<ChannelTag> first;
  std::optional<ChannelTag> second;
  double fidelity = 0.0;  ///< meaningful only when `first` is set
};

TrajectorySummary summarize(const TrajectoryRecord& record);

struct SweepPoint {
  std::string param;
  double value = 0.0;
  std::size_t n_traj = 0;

  std::size_t n_success = 0;
  double p_hat = 0.0;
  double p_stderr = 0.0;
  double F_hat = 0.0;  ///< NaN when there were no heralds
  double F_stderr = 0.0;

  std::size_t heralds_d1 = 0;
  std::size_t heralds_d2 = 0;
  double F_d1 = 0.0;
  double F_d2 = 0.0;

  std::size_t n_two_clicks = 0;
  std::size_t d1_then_d1 = 0;
  std::size_t d1_then_d2 = 0;
  std::size_t d2_then_d1 = 0;
  std::size_t d2_then_d2 = 0;
  std::optional<double> Ps_hat;
  std::optional<double> Ps_stderr;
  std::optional<double> two_click_fraction;
};

/// Deterministic reduction in ascending stream_index order. Throws on empty input.
/// Second-photon fields are filled when `with_second_stage` is set.
SweepPoint aggregate(std::vector<TrajectorySummary> records, bool with_second_stage = false);

struct SweepResult {
  SystemParams params;
  std::string param;
  std::vector<SweepPoint> points;
  std::uint64_t master_seed = 0;
  std::string timestamp;  ///< UTC, ISO 8601; metadata only
};

/// Runs `n_traj` first-stage trajectories; p_hat is the recorded-click fraction and
/// F_hat the mean herald fidelity over those clicks.
SweepPoint run_entanglement_generation(const SystemParams& p, std::size_t n_traj, std::uint64_t seed,
                                       const RunOptions& options = {});

/// Every grid point reuses `seed`, so neighbouring points share random numbers and
/// their differences reflect the parameter change rather than sampling noise.
SweepResult sweep(const SystemParams& p, SweptParam param, std::span<const double> grid, std::size_t n_traj,
                  std::uint64_t seed, const RunOptions& options = {});

/// Full two-photon protocol per phase value.
SweepResult run_redistribution(const SystemParams& p, std::span<const double> phi_grid, std::size_t n_traj,
                               std::uint64_t seed, const RunOptions& options = {});

std::string utc_timestamp();

}  // namespace hom
