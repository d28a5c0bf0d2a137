#pragma once

// Closed-form results: spontaneous-emission amplitudes of a single decaying
// emitter, beam-splitter algebra on up to two photons, and the leading-order
// protocol predictions used as references by the simulation.

#include <array>
#include <complex>
#include <cstddef>
#include <utility>

#include "hom/hilbert.hpp"
#include "hom/model.hpp"

namespace hom::analytic {

struct WwParams {
  double gamma = 1.0;  ///< cavity-enhanced decay rate
  double omega = 0.0;  ///< emitter frequency
};

/// sqrt(G/2pi) [1 - exp(i(w - nu)t - G t/2)] / [(nu - w) + i G/2]. t may be +infinity.
cplx ww_amplitude(double nu, double t, const WwParams& p);
double spectral_density(double nu, double t, const WwParams& p);

/// Integral of spectral_density over the whole frequency axis (adaptive
/// Gauss-Kronrod after nu - w = (G/2) tan(theta)).
double emission_probability(double t, const WwParams& p, double tolerance = 1e-10);

/// Amplitudes on |n_a, n_b> of two bosonic modes, n_a, n_b <= 2.
class ModePair {
 public:
  ModePair() = default;
  static ModePair fock(std::size_t n_a, std::size_t n_b);

  cplx operator()(std::size_t n_a, std::size_t n_b) const { return amps_.at(n_a * 3 + n_b); }
  cplx& operator()(std::size_t n_a, std::size_t n_b) { return amps_.at(n_a * 3 + n_b); }
  double norm2() const;

 private:
  std::array<cplx, 9> amps_{};
};

/// Maps a state of the two cavity modes to the detector modes under
/// d1 = sqrt(R) c1 + sqrt(T) c2, d2 = sqrt(T) c1 - sqrt(R) c2, R = lambda / (1 + lambda).
/// Input components with more than two photons in total are rejected.
ModePair bs_mode_transform(const ModePair& input, double lambda);

/// (|b a> + |a b>)/sqrt2 and (|b a> - |a b>)/sqrt2 on the two-ion space, dims {3, 3}.
std::pair<StateVector, StateVector> heralded_states();

/// 4 kappa (g Omega / (Delta kappa))^2, scaled by eta.
double detection_rate(const SystemParams& p);
/// detection_rate * T, clamped to [0, 1].
double success_probability(const SystemParams& p);
/// ((1 + cos phi)/2, (1 - cos phi)/2).
std::pair<double, double> p1_p2_split(double phi);
double same_detector_probability(double phi);

}  // namespace hom::analytic
