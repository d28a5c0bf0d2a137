#pragma once

// Density-matrix reference for the trajectory engine:
//   d rho / dt = -i[H, rho] + sum_k (L_k rho L_k^dag - 1/2 {L_k^dag L_k, rho}),
// integrated with classical fourth-order Runge-Kutta.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hom/hilbert.hpp"
#include "hom/model.hpp"

namespace hom {

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DensityMatrix {
 public:
  DensityMatrix(Eigen::MatrixXcd entries, Dims dims);
  static DensityMatrix pure(const StateVector& psi);

  const Eigen::MatrixXcd& entries() const { return entries_; }
  Eigen::MatrixXcd& entries() { return entries_; }
  const Dims& dims() const { return dims_; }

  cplx trace() const { return entries_.trace(); }
  double purity() const;
  double min_eigenvalue() const;
  cplx expectation(const OperatorMatrix& op) const;

 private:
  Eigen::MatrixXcd entries_;
  Dims dims_;
};

/// Which jump terms feed population back into rho.
enum class Recycling {
  kAll,             ///< unconditioned master equation, trace preserving
  kUnrecordedOnly,  ///< conditioned on no recorded click; trace is the no-click probability
};

/// Time derivative of rho. `h` must be Hermitian.
Eigen::MatrixXcd liouvillian_apply(const DensityMatrix& rho, const OperatorMatrix& h,
                                   const std::vector<JumpChannel>& channels,
                                   Recycling recycling = Recycling::kAll);

struct LindbladTolerances {
  double trace = 1e-8;
  double hermiticity = 1e-10;
  double positivity = 1e-8;
};

/// Returns rho at each of the ascending `times`. Throws InvariantViolation when
/// Hermiticity, trace (kAll only) or positivity drift beyond `tol`.
std::vector<DensityMatrix> integrate_sampled(const DensityMatrix& rho0, const OperatorMatrix& h,
                                             const std::vector<JumpChannel>& channels,
                                             std::span<const double> times, double dt_rk,
                                             Recycling recycling = Recycling::kAll,
                                             const LindbladTolerances& tol = {});

DensityMatrix integrate(const DensityMatrix& rho0, const OperatorMatrix& h,
                        const std::vector<JumpChannel>& channels, double t_end, double dt_rk,
                        Recycling recycling = Recycling::kAll, const LindbladTolerances& tol = {});

/// Hermitian part (H + H^dag)/2 of the stage generator: the coherent part of the
/// master equation whose unraveling the trajectory engine samples.
OperatorMatrix coherent_hamiltonian(const SystemParams& p);

/// min(dt/2, 0.025 / ||H_eff||_inf). The second bound keeps RK4 inside the
/// positivity tolerance when the detuning dominates the generator.
double default_rk_step(const SystemParams& p);

struct NamedObservable {
  std::string name;
  OperatorMatrix op;
};

struct ZScore {
  std::string observable;
  double time = 0.0;
  double trajectory_mean = 0.0;
  double trajectory_stderr = 0.0;
  double lindblad = 0.0;
  double z = 0.0;
};

/// Resolution floor added in quadrature to the Monte Carlo standard error, so
/// that deterministic agreement (e.g. at t = 0) gives z = 0 rather than 0/0.
inline constexpr double kSolverFloor = 1e-10;

/// Unconditioned fixed-step trajectory means against the master equation.
std::vector<ZScore> ensemble_compare(const SystemParams& p, const std::vector<NamedObservable>& observables,
                                     std::span<const double> times, std::size_t n_traj,
                                     std::uint64_t seed, int threads = 0);

}  // namespace hom
