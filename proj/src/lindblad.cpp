#include "hom/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hom/ensemble.hpp"
#include "hom/stats.hpp"
#include "hom/trajectory.hpp"

namespace hom {
namespace {

using Mat = Eigen::MatrixXcd;

/// Sparse form of the generator, built once per integration.
struct Generator {
  CompressedOperator h;
  CompressedOperator anti;  // sum_k L_k^dag L_k
  std::vector<CompressedOperator> recycled;
  std::vector<CompressedOperator> recycled_adj;

  Generator(const OperatorMatrix& hamiltonian, const std::vector<JumpChannel>& channels, Recycling recycling) {
    if (hermiticity_defect(hamiltonian.entries()) > 1e-12) {
      throw std::invalid_argument("liouvillian: Hamiltonian must be Hermitian");
    }
    h = compress(hamiltonian);
    auto k = OperatorMatrix::zero(hamiltonian.dims());
    for (const auto& ch : channels) {
      if (ch.op.dims() != hamiltonian.dims()) throw DimensionError("liouvillian: channel dims differ");
      k += ch.op.adjoint() * ch.op;
      if (recycling == Recycling::kAll || !ch.recorded) {
        recycled.push_back(compress(ch.op));
        recycled_adj.push_back(compress(ch.op.adjoint()));
      }
    }
    anti = compress(k);
  }

  Mat operator()(const Mat& rho) const {
    const cplx i{0.0, 1.0};
    Mat hr = h * rho;
    Mat kr = anti * rho;
    Mat out = -i * (hr - hr.adjoint()) - 0.5 * (kr + kr.adjoint());
    for (std::size_t c = 0; c < recycled.size(); ++c) {
      const Mat lr = recycled[c] * rho;
      out += lr * recycled_adj[c];
    }
    return out;
  }
};

void check(const Mat& rho, cplx trace0, Recycling recycling, const LindbladTolerances& tol, double t,
           bool positivity) {
  auto fail = [&](const std::string& what, double value) {
    std::ostringstream os;
    os << "lindblad invariant violated at t=" << t << ": " << what << " = " << value;
    throw InvariantViolation(os.str());
  };
  const double herm = hermiticity_defect(rho);
  if (herm > tol.hermiticity) fail("hermiticity defect", herm);
  if (recycling == Recycling::kAll) {
    const double drift = std::abs(rho.trace() - trace0);
    if (drift > tol.trace) fail("trace drift", drift);
  }
  if (positivity) {
    const Mat herm_part = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < -tol.positivity) fail("min eigenvalue", lo);
  }
}

}  // namespace

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries, Dims dims) : entries_(std::move(entries)), dims_(std::move(dims)) {
  const auto d = total_dim(dims_);
  if (entries_.rows() != entries_.cols() || static_cast<std::size_t>(entries_.rows()) != d) {
    throw DimensionError("DensityMatrix: shape does not match dims");
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return {psi.amplitudes() * psi.amplitudes().adjoint(), psi.dims()};
}

double DensityMatrix::purity() const { return (entries_ * entries_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  const Mat herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

cplx DensityMatrix::expectation(const OperatorMatrix& op) const {
  if (op.dims() != dims_) throw DimensionError("DensityMatrix::expectation: dims differ");
  return (op.entries() * entries_).trace();
}

Eigen::MatrixXcd liouvillian_apply(const DensityMatrix& rho, const OperatorMatrix& h,
                                   const std::vector<JumpChannel>& channels, Recycling recycling) {
  if (rho.dims() != h.dims()) throw DimensionError("liouvillian_apply: rho and H dims differ");
  return Generator(h, channels, recycling)(rho.entries());
}

std::vector<DensityMatrix> integrate_sampled(const DensityMatrix& rho0, const OperatorMatrix& h,
                                             const std::vector<JumpChannel>& channels,
                                             std::span<const double> times, double dt_rk,
                                             Recycling recycling, const LindbladTolerances& tol) {
  if (!(dt_rk > 0)) throw std::invalid_argument("integrate: dt_rk must be > 0");
  if (rho0.dims() != h.dims()) throw DimensionError("integrate: rho and H dims differ");
  const Generator gen(h, channels, recycling);
  const cplx trace0 = rho0.trace();
  Mat rho = rho0.entries();
  double t = 0.0;
  std::vector<DensityMatrix> out;
  out.reserve(times.size());
  for (double target : times) {
    if (target < t) throw std::invalid_argument("integrate: times must ascend from 0");
    const double span = target - t;
    const auto steps = static_cast<std::size_t>(std::ceil(span / dt_rk - 1e-9));
    const double h_step = steps > 0 ? span / static_cast<double>(steps) : 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
      const Mat k1 = gen(rho);
      const Mat k2 = gen(rho + 0.5 * h_step * k1);
      const Mat k3 = gen(rho + 0.5 * h_step * k2);
      const Mat k4 = gen(rho + h_step * k3);
      rho += (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      check(rho, trace0, recycling, tol, t + static_cast<double>(s + 1) * h_step, false);
    }
    t = target;
    check(rho, trace0, recycling, tol, t, true);
    out.emplace_back(rho, rho0.dims());
  }
  return out;
}

DensityMatrix integrate(const DensityMatrix& rho0, const OperatorMatrix& h, const std::vector<JumpChannel>& channels,
                        double t_end, double dt_rk, Recycling recycling, const LindbladTolerances& tol) {
  const double times[] = {t_end};
  return integrate_sampled(rho0, h, channels, times, dt_rk, recycling, tol).front();
}

OperatorMatrix coherent_hamiltonian(const SystemParams& p) {
  const auto h = stage_hamiltonian(p);
  return cplx(0.5) * (h + h.adjoint());
}

double default_rk_step(const SystemParams& p) {
  const double scale = stage_hamiltonian(p).entries().cwiseAbs().rowwise().sum().maxCoeff();
  const double half = 0.5 * p.dt;
  return scale > 0 ? std::min(half, 0.025 / scale) : half;
}

std::vector<ZScore> ensemble_compare(const SystemParams& p, const std::vector<NamedObservable>& observables,
                                     std::span<const double> times, std::size_t n_traj, std::uint64_t seed,
                                     int threads) {
  p.validate();
  if (times.empty()) return {};
  const auto channels = build_jump_channels(p);
  const Stage stage(stage_hamiltonian(p), channels, {p.dt, times.back()});
  const StateVector psi0 = initial_state(p);

  // values[i][o * times + t] for trajectory i.
  const std::size_t width = observables.size() * times.size();
  const auto values = run_ensemble_parallel(
      n_traj, seed,
      [&](RngStream& rng) {
        const auto states = sample_unconditioned(psi0, stage, rng, times);
        std::vector<double> row(width);
        for (std::size_t o = 0; o < observables.size(); ++o) {
          for (std::size_t k = 0; k < times.size(); ++k) {
            row[o * times.size() + k] = expectation(states[k], observables[o].op).real();
          }
        }
        return row;
      },
      threads);

  const auto rhos = integrate_sampled(DensityMatrix::pure(psi0), coherent_hamiltonian(p), channels, times,
                                     default_rk_step(p));

  std::vector<ZScore> out;
  std::vector<double> column(n_traj);
  for (std::size_t o = 0; o < observables.size(); ++o) {
    for (std::size_t k = 0; k < times.size(); ++k) {
      for (std::size_t i = 0; i < n_traj; ++i) column[i] = values[i][o * times.size() + k];
      const auto ms = stats::mean_stderr(column);
      ZScore z;
      z.observable = observables[o].name;
      z.time = times[k];
      z.trajectory_mean = ms.mean;
      z.trajectory_stderr = ms.stderr_;
      z.lindblad = rhos[k].expectation(observables[o].op).real();
      z.z = std::abs(z.trajectory_mean - z.lindblad) / std::hypot(ms.stderr_, kSolverFloor);
      out.push_back(z);
    }
  }
  return out;
}

}  // namespace hom
