#include "hom/trajectory.hpp"

#include <cmath>
#include <string>

namespace hom {
namespace {

using Vec = Eigen::VectorXcd;

std::size_t step_count(double t_max, double dt) {
  if (t_max <= 0) return 0;
  return static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
}

/// Picks a channel with probability proportional to ||L_k psi||^2 and
/// applies it. Returns false when every channel annihilates psi.
bool collapse(Vec& psi, const Stage& stage, RngStream& rng, Event& event, double time) {
  const auto channels = stage.channels();
  std::vector<Vec> images;
  std::vector<double> weights;
  images.reserve(channels.size());
  weights.reserve(channels.size());
  double total = 0.0;
  for (const auto& ch : channels) {
    images.emplace_back(ch.op * psi);
    weights.push_back(images.back().squaredNorm());
    total += weights.back();
  }
  if (!(total > 0.0)) return false;

  const double u = rng.uniform() * total;
  std::size_t pick = channels.size() - 1;
  double acc = 0.0;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    acc += weights[k];
    if (u < acc && weights[k] > 0.0) {
      pick = k;
      break;
    }
  }
  while (weights[pick] == 0.0) --pick;  // u landed in floating-point slack past the last live channel

  psi = images[pick] / std::sqrt(weights[pick]);
  event = {time, channels[pick].tag, channels[pick].recorded};
  return true;
}

/// In-place fixed step. Returns true if a jump happened.
bool fixed_step(Vec& psi, Vec& scratch, const Stage& stage, RngStream& rng, double t_end,
                Event& event) {
  const auto& opt = stage.options();
  scratch.noalias() = stage.jump_rate_operator() * psi;
  const double p_jump = opt.dt * psi.dot(scratch).real();
  if (p_jump >= opt.p_step_max) {
    throw StepSizeError("jump probability " + std::to_string(p_jump) + " per step exceeds " +
                        std::to_string(opt.p_step_max) + "; reduce dt");
  }
  const double r = rng.uniform();
  if (r < p_jump && collapse(psi, stage, rng, event, t_end)) return true;

  scratch.noalias() = stage.step_propagator() * psi;
  psi.swap(scratch);
  if (opt.no_jump_norm == NoJumpNorm::kExact) {
    psi /= psi.norm();
  } else {
    psi /= std::sqrt(1.0 - p_jump);
  }
  return false;
}

}  // namespace

OperatorMatrix precompute_propagator(const OperatorMatrix& h_eff, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("precompute_propagator: dt must be > 0");
  return matrix_exp(h_eff, cplx(0.0, -dt));
}

Stage::Stage(const OperatorMatrix& h_eff, const std::vector<JumpChannel>& channels, StageOptions options)
    : options_(options), dims_(h_eff.dims()) {
  if (!(options_.dt > 0)) throw std::invalid_argument("Stage: dt must be > 0");
  if (options_.t_max < 0) throw std::invalid_argument("Stage: t_max must be >= 0");
  if (!(options_.refine > 0)) throw std::invalid_argument("Stage: refine must be > 0");

  step_propagator_ = compress(precompute_propagator(h_eff, options_.dt));
  auto rate = OperatorMatrix::zero(dims_);
  for (const auto& ch : channels) {
    if (ch.op.dims() != dims_) throw DimensionError("Stage: channel dims differ from Hamiltonian");
    rate += ch.op.adjoint() * ch.op;
    channels_.push_back({compress(ch.op), ch.tag, ch.recorded});
  }
  rate_operator_ = compress(rate);

  std::size_t depth = 0;
  if (options_.t_max > 0) {
    depth = static_cast<std::size_t>(std::ceil(std::log2(options_.t_max / options_.refine)));
  }
  ladder_unit_ = options_.t_max > 0 ? std::ldexp(options_.t_max, -static_cast<int>(depth)) : 0.0;
  ladder_.reserve(depth + 1);
  for (std::size_t k = 0; k <= depth; ++k) {
    const double tau = std::ldexp(ladder_unit_, static_cast<int>(k));
    ladder_.push_back(compress(matrix_exp(h_eff, cplx(0.0, -tau))));
  }
}

StepResult step(const StateVector& psi, const Stage& stage, RngStream& rng, double t) {
  if (psi.dims() != stage.dims()) throw DimensionError("step: state dims differ from stage");
  Vec v = psi.amplitudes();
  Vec scratch(v.size());
  Event event;
  const bool jumped = fixed_step(v, scratch, stage, rng, t + stage.options().dt, event);
  StepResult out{StateVector(std::move(v), psi.dims()), std::nullopt};
  if (jumped) out.event = event;
  return out;
}

StageRun run_until_click(const StateVector& psi0, const Stage& stage, RngStream& rng, double t_offset) {
  if (psi0.dims() != stage.dims()) throw DimensionError("run_until_click: state dims differ from stage");
  const double dt = stage.options().dt;
  const std::size_t n = step_count(stage.options().t_max, dt);
  Vec psi = psi0.amplitudes();
  Vec scratch(psi.size());
  StageRun run{{}, std::nullopt, psi0};
  Event event;
  for (std::size_t k = 0; k < n; ++k) {
    const double t_end = t_offset + static_cast<double>(k + 1) * dt;
    if (!fixed_step(psi, scratch, stage, rng, t_end, event)) continue;
    run.events.push_back(event);
    if (event.recorded) {
      run.click = event;
      break;
    }
  }
  run.state = StateVector(std::move(psi), psi0.dims());
  return run;
}

StageRun sample_click_fast(const StateVector& psi0, const Stage& stage, RngStream& rng, double t_offset) {
  if (psi0.dims() != stage.dims()) throw DimensionError("sample_click_fast: state dims differ from stage");
  StageRun run{{}, std::nullopt, psi0};
  if (stage.options().t_max <= 0) return run;

  const std::size_t depth = stage.ladder_depth();
  const std::uint64_t end = std::uint64_t{1} << depth;
  Vec psi = psi0.amplitudes();
  Vec candidate(psi.size());
  std::uint64_t pos = 0;
  double r = rng.uniform();

  while (true) {
    // Largest grid advance that keeps the squared norm above r.
    for (std::size_t k = depth + 1; k-- > 0;) {
      const std::uint64_t stride = std::uint64_t{1} << k;
      if (end - pos < stride) continue;
      candidate.noalias() = stage.ladder(k) * psi;
      if (candidate.squaredNorm() > r) {
        psi.swap(candidate);
        pos += stride;
      }
    }
    if (pos == end) break;

    Vec before = psi;
    candidate.noalias() = stage.ladder(0) * psi;
    psi.swap(candidate);
    pos += 1;
    const double time = t_offset + static_cast<double>(pos) * stage.ladder_unit();
    Event event;
    if (!collapse(psi, stage, rng, event, time)) {
      // Rate vanished at the right edge; jump from the left edge instead.
      psi = before;
      if (!collapse(psi, stage, rng, event, time)) break;
    }
    run.events.push_back(event);
    if (event.recorded) {
      run.click = event;
      run.state = StateVector(std::move(psi), psi0.dims());
      return run;
    }
    if (pos == end) break;
    r = rng.uniform();
  }
  const double n2 = psi.squaredNorm();
  if (n2 > 0) psi /= std::sqrt(n2);
  run.state = StateVector(std::move(psi), psi0.dims());
  return run;
}

StageRun run_stage(Sampler sampler, const StateVector& psi0, const Stage& stage, RngStream& rng,
                   double t_offset) {
  return sampler == Sampler::kFixedStep ? run_until_click(psi0, stage, rng, t_offset)
                                        : sample_click_fast(psi0, stage, rng, t_offset);
}

std::vector<StateVector> sample_unconditioned(const StateVector& psi0, const Stage& stage,
                                              RngStream& rng, std::span<const double> times) {
  const double dt = stage.options().dt;
  Vec psi = psi0.amplitudes();
  Vec scratch(psi.size());
  std::vector<StateVector> out;
  out.reserve(times.size());
  std::size_t done = 0;
  Event event;
  for (double t : times) {
    const auto target = static_cast<std::size_t>(std::llround(t / dt));
    if (target < done) throw std::invalid_argument("sample_unconditioned: times must ascend");
    for (; done < target; ++done) {
      fixed_step(psi, scratch, stage, rng, static_cast<double>(done + 1) * dt, event);
    }
    out.emplace_back(psi, psi0.dims());
  }
  return out;
}

Protocol::Protocol(const SystemParams& params, Sampler sampler, bool second_stage, NoJumpNorm no_jump_norm)
    : params_(params),
      sampler_(sampler),
      stage1_([&] {
        params.validate();
        return Stage(stage_hamiltonian(params), build_jump_channels(params),
                     {params.dt, params.t_wait, no_jump_norm});
      }()),
      gate_(phase_gate(params.phi, params.n_max)),
      psi0_(initial_state(params)) {
  if (second_stage) {
    stage2_.emplace(stage_hamiltonian(params), build_jump_channels(params),
                    StageOptions{params.dt, params.t_wait2, no_jump_norm});
  }
}

TrajectoryRecord run_protocol(const Protocol& protocol, RngStream& rng) {
  TrajectoryRecord rec{rng.stream_index(), {}, std::nullopt, std::nullopt, std::nullopt,
                       Outcome::kNoClick, protocol.psi0_};
  StageRun first = run_stage(protocol.sampler_, protocol.psi0_, protocol.stage1_, rng, 0.0);
  rec.events = std::move(first.events);
  if (!first.click) {
    rec.final_state = std::move(first.state);
    return rec;
  }
  rec.first_click = first.click;
  rec.heralded_state = first.state;
  rec.outcome = Outcome::kOneClick;
  rec.final_state = std::move(first.state);
  if (!protocol.stage2_) return rec;

  const StateVector gated = apply(protocol.gate_, rec.final_state);
  StageRun second = run_stage(protocol.sampler_, gated, *protocol.stage2_, rng, first.click->time);
  rec.events.insert(rec.events.end(), second.events.begin(), second.events.end());
  if (second.click) {
    rec.second_click = second.click;
    rec.outcome = Outcome::kTwoClicks;
  }
  rec.final_state = std::move(second.state);
  return rec;
}

}  // namespace hom
