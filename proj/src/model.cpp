#include "hom/model.hpp"

#include <cmath>
#include <string>

namespace hom {
namespace {

constexpr std::size_t kIon1 = 0;
constexpr std::size_t kCav1 = 2;

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw ParameterError(std::string(field) + ": " + why);
}

OperatorMatrix local_projector(IonLevel to, IonLevel from) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  m(static_cast<int>(to), static_cast<int>(from)) = 1.0;
  return {std::move(m), {3}};
}

}  // namespace

void SystemParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  require(finite(g) && g >= 0, "g", "must be a finite rate >= 0");
  require(finite(omega) && omega >= 0, "omega", "must be a finite rate >= 0");
  require(finite(delta), "delta", "must be finite");
  require(finite(kappa) && kappa >= 0, "kappa", "must be a finite rate >= 0");
  require(finite(gamma_ca) && gamma_ca >= 0, "gamma_ca", "must be a finite rate >= 0");
  require(finite(gamma_cb) && gamma_cb >= 0, "gamma_cb", "must be a finite rate >= 0");
  require(finite(eta) && eta >= 0 && eta <= 1, "eta", "must lie in [0, 1]");
  require(finite(lambda) && lambda > 0, "lambda", "must be > 0");
  require(finite(phi), "phi", "must be finite");
  require(finite(dt) && dt > 0, "dt", "must be > 0");
  require(finite(t_wait) && t_wait > 0, "T", "must be > 0");
  require(finite(t_wait2) && t_wait2 > 0, "T2", "must be > 0");
  require(n_max == 1 || n_max == 2, "n_max", "must be 1 or 2");
  if (uses_adiabatic()) {
    require(delta != 0, "delta", "adiabatic form needs a nonzero detuning");
  }
}

bool SystemParams::uses_adiabatic() const {
  switch (hamiltonian) {
    case HamiltonianKind::kFull:
      return false;
    case HamiltonianKind::kAdiabatic:
      return true;
    case HamiltonianKind::kAuto:
      break;
  }
  return gamma_ca == 0.0 && gamma_cb == 0.0;
}

std::string_view to_string(ChannelTag tag) {
  switch (tag) {
    case ChannelTag::kD1: return "D1";
    case ChannelTag::kD2: return "D2";
    case ChannelTag::kLostD1: return "LOST_D1";
    case ChannelTag::kLostD2: return "LOST_D2";
    case ChannelTag::kSpontAIon1: return "SPONT_A_ION1";
    case ChannelTag::kSpontBIon1: return "SPONT_B_ION1";
    case ChannelTag::kSpontAIon2: return "SPONT_A_ION2";
    case ChannelTag::kSpontBIon2: return "SPONT_B_ION2";
  }
  return "?";
}

bool is_detector(ChannelTag tag) {
  return tag == ChannelTag::kD1 || tag == ChannelTag::kD2 || tag == ChannelTag::kLostD1 ||
         tag == ChannelTag::kLostD2;
}

OperatorMatrix ion_transition(std::size_t ion, IonLevel to, IonLevel from, const Dims& dims) {
  if (ion > 1) throw DimensionError("ion_transition: ion must be 0 or 1");
  return embed(local_projector(to, from), kIon1 + ion, dims);
}

OperatorMatrix cavity_annihilation(std::size_t cavity, const Dims& dims) {
  if (cavity > 1) throw DimensionError("cavity_annihilation: cavity must be 0 or 1");
  const std::size_t n = dims.at(kCav1 + cavity);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    a(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = std::sqrt(static_cast<double>(k));
  }
  return embed(OperatorMatrix(std::move(a), {n}), kCav1 + cavity, dims);
}

OperatorMatrix cavity_number(std::size_t cavity, const Dims& dims) {
  const auto a = cavity_annihilation(cavity, dims);
  return a.adjoint() * a;
}

OperatorMatrix detector_mode(int detector, const SystemParams& p) {
  const Dims dims = p.dims();
  const double r = std::sqrt(p.reflectance());
  const double t = std::sqrt(p.transmittance());
  const auto c1 = cavity_annihilation(0, dims);
  const auto c2 = cavity_annihilation(1, dims);
  if (detector == 1) return cplx(r) * c1 + cplx(t) * c2;
  if (detector == 2) return cplx(t) * c1 - cplx(r) * c2;
  throw std::invalid_argument("detector_mode: detector must be 1 or 2");
}

OperatorMatrix build_hamiltonian(const SystemParams& p) {
  const Dims dims = p.dims();
  auto h = OperatorMatrix::zero(dims);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto cc = ion_transition(i, IonLevel::kC, IonLevel::kC, dims);
    const auto cb = ion_transition(i, IonLevel::kC, IonLevel::kB, dims);
    const auto ca = ion_transition(i, IonLevel::kC, IonLevel::kA, dims);
    const auto cav = cavity_annihilation(i, dims);
    const auto cavity_term = cb * cav;
    h += cplx(p.delta) * cc;
    h += cplx(p.g) * (cavity_term + cavity_term.adjoint());
    h += cplx(p.omega) * (ca + ca.adjoint());
  }
  return h;
}

OperatorMatrix build_h_eff(const SystemParams& p) {
  const Dims dims = p.dims();
  auto h = build_hamiltonian(p);
  const cplx i{0.0, 1.0};
  for (std::size_t k = 0; k < 2; ++k) {
    h -= i * p.kappa * cavity_number(k, dims);
    h -= i * (p.gamma_ca + p.gamma_cb) * ion_transition(k, IonLevel::kC, IonLevel::kC, dims);
  }
  return h;
}

OperatorMatrix build_h_eff_adiabatic(const SystemParams& p) {
  const Dims dims = p.dims();
  auto h = OperatorMatrix::zero(dims);
  const cplx i{0.0, 1.0};
  const double raman = p.g * p.omega / p.delta;
  for (std::size_t k = 0; k < 2; ++k) {
    const auto ab = ion_transition(k, IonLevel::kA, IonLevel::kB, dims);
    const auto cav = cavity_annihilation(k, dims);
    const auto emit = ab * cav;
    h += cplx(raman) * (emit + emit.adjoint());
    h += cplx(p.g * p.g / p.delta) * ion_transition(k, IonLevel::kB, IonLevel::kB, dims);
    h += cplx(p.omega * p.omega / p.delta) * ion_transition(k, IonLevel::kA, IonLevel::kA, dims);
    h -= i * p.kappa * cavity_number(k, dims);
  }
  return h;
}

OperatorMatrix stage_hamiltonian(const SystemParams& p) {
  return p.uses_adiabatic() ? build_h_eff_adiabatic(p) : build_h_eff(p);
}

std::vector<JumpChannel> build_jump_channels(const SystemParams& p) {
  const Dims dims = p.dims();
  std::vector<JumpChannel> out;
  const auto d1 = detector_mode(1, p);
  const auto d2 = detector_mode(2, p);
  const double seen = std::sqrt(2.0 * p.kappa * p.eta);
  const double lost = std::sqrt(2.0 * p.kappa * (1.0 - p.eta));
  if (p.kappa > 0 && p.eta > 0) {
    out.push_back({cplx(seen) * d1, ChannelTag::kD1, true});
    out.push_back({cplx(seen) * d2, ChannelTag::kD2, true});
  }
  if (p.kappa > 0 && p.eta < 1) {
    out.push_back({cplx(lost) * d1, ChannelTag::kLostD1, false});
    out.push_back({cplx(lost) * d2, ChannelTag::kLostD2, false});
  }
  const ChannelTag spont_a[2] = {ChannelTag::kSpontAIon1, ChannelTag::kSpontAIon2};
  const ChannelTag spont_b[2] = {ChannelTag::kSpontBIon1, ChannelTag::kSpontBIon2};
  for (std::size_t k = 0; k < 2; ++k) {
    if (p.gamma_ca > 0) {
      out.push_back({cplx(std::sqrt(2.0 * p.gamma_ca)) * ion_transition(k, IonLevel::kA, IonLevel::kC, dims),
                     spont_a[k], false});
    }
    if (p.gamma_cb > 0) {
      out.push_back({cplx(std::sqrt(2.0 * p.gamma_cb)) * ion_transition(k, IonLevel::kB, IonLevel::kC, dims),
                     spont_b[k], false});
    }
  }
  return out;
}

OperatorMatrix phase_gate(double phi, std::size_t n_max) {
  const Dims dims = protocol_dims(n_max);
  auto u = OperatorMatrix::identity(dims);
  const cplx phase = std::polar(1.0, phi);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (unflatten(k, n_max).ion1 == IonLevel::kA) {
      u.entries()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = phase;
    }
  }
  return u;
}

StateVector initial_state(const SystemParams& p) {
  return StateVector::basis(p.dims(), flatten({IonLevel::kA, IonLevel::kA, 0, 0}, p.n_max));
}

}  // namespace hom
