#pragma once

// Quantum-jump (Monte Carlo wavefunction) engine.
//
// Two interchangeable samplers unravel the same master equation:
//   * fixed-step: per step of length dt, jump with probability
//     P = dt * sum_k <L_k^dag L_k>, otherwise propagate with exp(-i H_eff dt);
//   * waiting-time: draw r, propagate the unnormalized state until its squared
//     norm falls to r, then jump. The crossing is located by a greedy descent
//     over a ladder of propagators exp(-i H_eff 2^k tau0), tau0 <= 1e-6 / g.
//
// Only recorded detector clicks end a stage; lost photons and spontaneous
// decays collapse the state, are logged, and evolution continues.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hom/hilbert.hpp"
#include "hom/model.hpp"
#include "hom/rng.hpp"

namespace hom {

class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Event {
  double time = 0.0;
  ChannelTag tag = ChannelTag::kD1;
  bool recorded = false;
};

enum class NoJumpNorm {
  kExact,       ///< divide by the norm actually left after propagation
  kFirstOrder,  ///< divide by sqrt(1 - P)
};

enum class Sampler { kFixedStep, kWaitingTime };

struct StageOptions {
  double dt = 0.01;
  double t_max = 100.0;
  NoJumpNorm no_jump_norm = NoJumpNorm::kExact;
  double p_step_max = 0.05;
  double refine = 1e-6;  ///< waiting-time crossing resolution
};

/// exp(-i h_eff dt).
OperatorMatrix precompute_propagator(const OperatorMatrix& h_eff, double dt);

/// Immutable per-stage data shared read-only by all trajectory workers.
class Stage {
 public:
  struct Channel {
    CompressedOperator op;
    ChannelTag tag;
    bool recorded;
  };

  Stage(const OperatorMatrix& h_eff, const std::vector<JumpChannel>& channels, StageOptions options);

  const StageOptions& options() const { return options_; }
  const Dims& dims() const { return dims_; }
  const CompressedOperator& step_propagator() const { return step_propagator_; }
  /// sum_k L_k^dag L_k.
  const CompressedOperator& jump_rate_operator() const { return rate_operator_; }
  std::span<const Channel> channels() const { return channels_; }

  /// Ladder rung k is exp(-i H_eff tau0 2^k); rung count is ladder_depth() + 1.
  std::size_t ladder_depth() const { return ladder_.size() - 1; }
  const CompressedOperator& ladder(std::size_t k) const { return ladder_.at(k); }
  double ladder_unit() const { return ladder_unit_; }

 private:
  StageOptions options_;
  Dims dims_;
  CompressedOperator step_propagator_;
  CompressedOperator rate_operator_;
  std::vector<Channel> channels_;
  std::vector<CompressedOperator> ladder_;
  double ladder_unit_ = 0.0;
};

struct StepResult {
  StateVector state;
  std::optional<Event> event;
};

/// One fixed step starting at stage-local time t. Throws StepSizeError when
/// the step's total jump probability reaches options().p_step_max.
StepResult step(const StateVector& psi, const Stage& stage, RngStream& rng, double t);

/// Result of running one stage until a recorded click or the end of its window.
struct StageRun {
  std::vector<Event> events;  ///< every jump, recorded or not, absolute times
  std::optional<Event> click;
  StateVector state;  ///< normalized; post-click state when click is set
};

/// Fixed-step sampler. Event times are offset by t_offset.
StageRun run_until_click(const StateVector& psi0, const Stage& stage, RngStream& rng,
                         double t_offset = 0.0);

/// Waiting-time sampler with the same contract as run_until_click.
StageRun sample_click_fast(const StateVector& psi0, const Stage& stage, RngStream& rng,
                           double t_offset = 0.0);

StageRun run_stage(Sampler sampler, const StateVector& psi0, const Stage& stage, RngStream& rng,
                   double t_offset = 0.0);

/// Fixed-step evolution that never stops on clicks; returns the normalized
/// state at each requested time (rounded to the step grid, ascending).
std::vector<StateVector> sample_unconditioned(const StateVector& psi0, const Stage& stage,
                                              RngStream& rng, std::span<const double> times);

enum class Outcome { kNoClick, kOneClick, kTwoClicks };

struct TrajectoryRecord {
  std::uint64_t stream_index = 0;
  std::vector<Event> events;
  std::optional<Event> first_click;
  std::optional<StateVector> heralded_state;  ///< state right after the first click
  std::optional<Event> second_click;
  Outcome outcome = Outcome::kNoClick;
  StateVector final_state;
};

/// Everything one protocol trajectory needs, built once per parameter set.
class Protocol {
 public:
  Protocol(const SystemParams& params, Sampler sampler, bool second_stage = true,
           NoJumpNorm no_jump_norm = NoJumpNorm::kExact);

  const SystemParams& params() const { return params_; }
  Sampler sampler() const { return sampler_; }
  bool has_second_stage() const { return stage2_.has_value(); }
  const Stage& first_stage() const { return stage1_; }
  const StateVector& initial() const { return psi0_; }

 private:
  friend TrajectoryRecord run_protocol(const Protocol& protocol, RngStream& rng);

  SystemParams params_;
  Sampler sampler_;
  Stage stage1_;
  std::optional<Stage> stage2_;
  OperatorMatrix gate_;
  StateVector psi0_;
};

/// Herald over T, write the phase, then wait up to T2 for the second photon.
TrajectoryRecord run_protocol(const Protocol& protocol, RngStream& rng);

}  // namespace hom
