#pragma once

// Two trapped ions in two cavities, Raman-coupled through the upper level |c>,
// with the cavity outputs mixed on a beam splitter before two detectors.

#include <cstddef>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "hom/hilbert.hpp"

namespace hom {

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Which no-jump generator a stage evolves under.
enum class HamiltonianKind {
  kAuto,       ///< adiabatic when gamma_ca = gamma_cb = 0, full otherwise
  kFull,       ///< H - i kappa sum c^dag c - i (gamma_ca + gamma_cb) sum |c><c|
  kAdiabatic,  ///< far-detuned Raman form with |c> eliminated
};

/// All rates and times are in units of g (times in units of 1/g).
struct SystemParams {
  double g = 1.0;
  double omega = 1.0;
  double delta = 20.0;
  double kappa = 10.0;  ///< half the cavity field decay rate; cavities lose photons at 2*kappa
  double gamma_ca = 0.0;
  double gamma_cb = 0.0;
  double eta = 1.0;     ///< detection efficiency
  double lambda = 1.0;  ///< beam-splitter ratio R/T
  double phi = 0.0;     ///< relative phase written onto ion 1 between the two clicks
  double dt = 0.01;
  double t_wait = 100.0;     ///< first-photon window
  double t_wait2 = 10000.0;  ///< second-photon window
  std::size_t n_max = 1;
  HamiltonianKind hamiltonian = HamiltonianKind::kAuto;

  /// Throws ParameterError naming the offending field.
  void validate() const;

  double reflectance() const { return lambda / (1.0 + lambda); }
  double transmittance() const { return 1.0 / (1.0 + lambda); }
  bool uses_adiabatic() const;
  Dims dims() const { return protocol_dims(n_max); }
};

enum class ChannelTag {
  kD1,
  kD2,
  kLostD1,
  kLostD2,
  kSpontAIon1,
  kSpontBIon1,
  kSpontAIon2,
  kSpontBIon2,
};

std::string_view to_string(ChannelTag tag);
bool is_detector(ChannelTag tag);

struct JumpChannel {
  OperatorMatrix op;  ///< rate absorbed into the amplitude prefactor
  ChannelTag tag;
  bool recorded;
};

/// |to><from| on one ion (0 or 1), lifted to the full space.
OperatorMatrix ion_transition(std::size_t ion, IonLevel to, IonLevel from, const Dims& dims);
/// Annihilation operator of cavity 0 or 1.
OperatorMatrix cavity_annihilation(std::size_t cavity, const Dims& dims);
/// c^dag c of cavity 0 or 1.
OperatorMatrix cavity_number(std::size_t cavity, const Dims& dims);
/// Detector mode d1 (detector = 1) or d2 (detector = 2) for the splitter ratio in p.
OperatorMatrix detector_mode(int detector, const SystemParams& p);

OperatorMatrix build_hamiltonian(const SystemParams& p);
OperatorMatrix build_h_eff(const SystemParams& p);
OperatorMatrix build_h_eff_adiabatic(const SystemParams& p);
/// build_h_eff or build_h_eff_adiabatic, per p.uses_adiabatic().
OperatorMatrix stage_hamiltonian(const SystemParams& p);

std::vector<JumpChannel> build_jump_channels(const SystemParams& p);

/// Diagonal unitary: e^{i phi} on every basis state with ion 1 in |a>.
OperatorMatrix phase_gate(double phi, std::size_t n_max);

/// |a a>|0 0>.
StateVector initial_state(const SystemParams& p);

}  // namespace hom
