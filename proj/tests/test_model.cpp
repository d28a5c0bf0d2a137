#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hom/hilbert.hpp"
#include "hom/model.hpp"

namespace hom {
namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

std::size_t idx(IonLevel i1, IonLevel i2, std::size_t n1, std::size_t n2, std::size_t n_max = 1) {
  return flatten({i1, i2, n1, n2}, n_max);
}

SystemParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SystemParams p;
  p.g = 0.2 + 2 * u(rng);
  p.omega = 0.2 + 2 * u(rng);
  p.delta = -30 + 60 * u(rng);
  p.kappa = 20 * u(rng);
  p.gamma_ca = u(rng);
  p.gamma_cb = u(rng);
  p.eta = u(rng);
  p.lambda = 0.1 + 3 * u(rng);
  p.n_max = u(rng) < 0.5 ? 1 : 2;
  p.hamiltonian = HamiltonianKind::kFull;
  return p;
}

TEST(Params, Defaults) {
  const SystemParams p;
  EXPECT_EQ(p.g, 1.0);
  EXPECT_EQ(p.omega, 1.0);
  EXPECT_EQ(p.delta, 20.0);
  EXPECT_EQ(p.kappa, 10.0);
  EXPECT_EQ(p.t_wait, 100.0);
  EXPECT_EQ(p.t_wait2, 100.0 * p.t_wait);
  EXPECT_EQ(p.eta, 1.0);
  EXPECT_EQ(p.lambda, 1.0);
  EXPECT_EQ(p.gamma_ca, 0.0);
  EXPECT_EQ(p.phi, 0.0);
  EXPECT_EQ(p.dt, 0.01);
  EXPECT_EQ(p.n_max, 1u);
  EXPECT_NO_THROW(p.validate());
  EXPECT_TRUE(p.uses_adiabatic());
}

TEST(Params, ValidationNamesField) {
  SystemParams p;
  p.eta = 1.5;
  try {
    p.validate();
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("eta", 0), 0u);
  }
  p = {};
  p.lambda = 0;
  EXPECT_THROW(p.validate(), ParameterError);
  p = {};
  p.n_max = 3;
  EXPECT_THROW(p.validate(), ParameterError);
  p = {};
  p.kappa = -1;
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(Params, SplitterConservesProbability) {
  for (double lambda : {0.1, 0.5, 1.0, 1.5, 7.0}) {
    SystemParams p;
    p.lambda = lambda;
    EXPECT_NEAR(p.reflectance() + p.transmittance(), 1.0, 1e-15);
    EXPECT_NEAR(p.reflectance() / p.transmittance(), lambda, 1e-12);
  }
}

TEST(Hamiltonian, DetuningOnlyWithoutCouplings) {
  SystemParams p;
  p.g = 0;
  p.omega = 0;
  const auto h = build_hamiltonian(p);
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (i != j) {
        EXPECT_EQ(h(i, j), cplx(0.0));
        continue;
      }
      const auto b = unflatten(i, 1);
      const double expected = p.delta * ((b.ion1 == IonLevel::kC) + (b.ion2 == IonLevel::kC));
      EXPECT_EQ(h(i, i), cplx(expected));
    }
  }
}

TEST(Hamiltonian, CavityMatrixElement) {
  SystemParams p;
  p.g = 0.7;
  const auto h = build_hamiltonian(p);
  for (auto x2 : {IonLevel::kA, IonLevel::kB, IonLevel::kC}) {
    for (std::size_t n2 : {0u, 1u}) {
      EXPECT_EQ(h(idx(IonLevel::kC, x2, 0, n2), idx(IonLevel::kB, x2, 1, n2)), cplx(0.7));
    }
  }
}

TEST(Hamiltonian, HermitianForRandomParams) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    EXPECT_EQ(hermiticity_defect(build_hamiltonian(random_params(rng)).entries()), 0.0);
  }
}

TEST(HEff, NoDampingEqualsHamiltonian) {
  SystemParams p;
  p.kappa = 0;
  p.hamiltonian = HamiltonianKind::kFull;
  EXPECT_EQ(max_abs(build_h_eff(p).entries() - build_hamiltonian(p).entries()), 0.0);
}

TEST(HEff, AntiHermitianPartNegativeSemidefinite) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const auto h = build_h_eff(random_params(rng)).entries();
    const Eigen::MatrixXcd anti = (h - h.adjoint()) / cplx(0.0, 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(anti);
    EXPECT_LE(es.eigenvalues().maxCoeff(), 1e-12);
  }
}

TEST(HEff, ChannelConsistencyRandomized) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_params(rng);
    OperatorMatrix lhs = build_h_eff(p) - build_hamiltonian(p);
    for (const auto& c : build_jump_channels(p)) lhs += cplx(0.0, 0.5) * (c.op.adjoint() * c.op);
    EXPECT_LT(max_abs(lhs.entries()), 1e-12);
  }
}

TEST(Adiabatic, FirstOrderMatchesRamanAmplitude) {
  SystemParams p;
  p.kappa = 0;  // pure coherent first-order check
  const double t = 1e-4;
  const auto u = matrix_exp(build_h_eff_adiabatic(p), cplx(0.0, -t));
  const auto psi = apply(u, initial_state(p));
  const cplx expected(0.0, -p.g * p.omega * t / p.delta);
  EXPECT_LT(std::abs(psi[idx(IonLevel::kB, IonLevel::kA, 1, 0)] - expected), 1e-9);
  EXPECT_LT(std::abs(psi[idx(IonLevel::kA, IonLevel::kB, 0, 1)] - expected), 1e-9);
}

TEST(Adiabatic, NoCavityCouplingIsDiagonal) {
  SystemParams p;
  p.g = 0;
  const auto h = build_h_eff_adiabatic(p);
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (i != j) {
        EXPECT_EQ(h(i, j), cplx(0.0));
        continue;
      }
      const auto b = unflatten(i, 1);
      const double stark = p.omega * p.omega / p.delta * ((b.ion1 == IonLevel::kA) + (b.ion2 == IonLevel::kA));
      const double damping = p.kappa * static_cast<double>(b.cav1 + b.cav2);
      EXPECT_NEAR(std::abs(h(i, i) - cplx(stark, -damping)), 0.0, 1e-15);
    }
  }
}

TEST(Adiabatic, UpperLevelDecoupled) {
  SystemParams p;
  const auto h = build_h_eff_adiabatic(p);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto b = unflatten(i, 1);
    if (b.ion1 != IonLevel::kC && b.ion2 != IonLevel::kC) continue;
    for (std::size_t j = 0; j < h.size(); ++j) {
      const auto o = unflatten(j, 1);
      if (o.ion1 == IonLevel::kC || o.ion2 == IonLevel::kC) continue;
      EXPECT_EQ(h(i, j), cplx(0.0));
      EXPECT_EQ(h(j, i), cplx(0.0));
    }
  }
  // Propagation from a random off-|c> state never leaks into |c>.
  std::mt19937_64 rng(24);
  std::normal_distribution<double> d;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(36);
  for (std::size_t i = 0; i < 36; ++i) {
    const auto b = unflatten(i, 1);
    if (b.ion1 != IonLevel::kC && b.ion2 != IonLevel::kC) v(static_cast<Eigen::Index>(i)) = {d(rng), d(rng)};
  }
  const auto out = apply(matrix_exp(h, cplx(0.0, -50.0)), normalize(StateVector(v, p.dims())));
  for (std::size_t i = 0; i < 36; ++i) {
    const auto b = unflatten(i, 1);
    if (b.ion1 == IonLevel::kC || b.ion2 == IonLevel::kC) EXPECT_LT(std::abs(out[i]), 1e-12);
  }
}

TEST(Channels, IdealSetIsTwoScaledDetectorModes) {
  const SystemParams p;
  const auto ch = build_jump_channels(p);
  ASSERT_EQ(ch.size(), 2u);
  EXPECT_EQ(ch[0].tag, ChannelTag::kD1);
  EXPECT_EQ(ch[1].tag, ChannelTag::kD2);
  EXPECT_TRUE(ch[0].recorded && ch[1].recorded);
  const Dims dims = p.dims();
  const auto c1 = cavity_annihilation(0, dims), c2 = cavity_annihilation(1, dims);
  const double s = std::sqrt(2 * p.kappa) / std::sqrt(2.0);
  EXPECT_LT(max_abs(ch[0].op.entries() - (cplx(s) * (c1 + c2)).entries()), 1e-14);
  EXPECT_LT(max_abs(ch[1].op.entries() - (cplx(s) * (c1 - c2)).entries()), 1e-14);
}

TEST(Channels, DetectorPhotonConservation) {
  for (double lambda : {0.3, 1.0, 2.5}) {
    for (double eta : {0.0, 0.4, 1.0}) {
      SystemParams p;
      p.lambda = lambda;
      p.eta = eta;
      p.n_max = 2;
      auto sum = OperatorMatrix::zero(p.dims());
      for (const auto& c : build_jump_channels(p)) {
        if (c.tag == ChannelTag::kD1 || c.tag == ChannelTag::kD2 || c.tag == ChannelTag::kLostD1 ||
            c.tag == ChannelTag::kLostD2) {
          sum += c.op.adjoint() * c.op;
        }
      }
      const auto expected = cplx(2 * p.kappa) * (cavity_number(0, p.dims()) + cavity_number(1, p.dims()));
      EXPECT_LT(max_abs(sum.entries() - expected.entries()), 1e-12);
    }
  }
}

TEST(Channels, BalancedSplitterEqualRates) {
  const SystemParams p;
  const auto psi = StateVector::basis(p.dims(), idx(IonLevel::kA, IonLevel::kA, 1, 0));
  const auto ch = build_jump_channels(p);
  EXPECT_NEAR(norm2(apply(ch[0].op, psi)), norm2(apply(ch[1].op, psi)), 1e-14);
}

TEST(Channels, EfficiencySplitAndSpontaneous) {
  SystemParams p;
  p.eta = 0.5;
  p.gamma_ca = 0.1;
  p.gamma_cb = 0.2;
  const auto ch = build_jump_channels(p);
  EXPECT_EQ(ch.size(), 8u);
  int recorded = 0;
  for (const auto& c : ch) recorded += c.recorded;
  EXPECT_EQ(recorded, 2);
}

TEST(PhaseGate, IdentityAtZero) {
  EXPECT_EQ(max_abs(phase_gate(0.0, 1).entries() - Eigen::MatrixXcd::Identity(36, 36)), 0.0);
}

TEST(PhaseGate, ActsOnIonOneLowerLevel) {
  const double phi = 0.83;
  const Dims dims = protocol_dims(1);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(36);
  v(idx(IonLevel::kB, IonLevel::kA, 0, 0)) = 1 / std::sqrt(2.0);
  v(idx(IonLevel::kA, IonLevel::kB, 0, 0)) = 1 / std::sqrt(2.0);
  const auto out = apply(phase_gate(phi, 1), StateVector(v, dims));
  EXPECT_NEAR(std::abs(out[idx(IonLevel::kB, IonLevel::kA, 0, 0)] - 1 / std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out[idx(IonLevel::kA, IonLevel::kB, 0, 0)] - std::polar(1.0, phi) / std::sqrt(2.0)), 0.0,
              1e-15);
}

TEST(PhaseGate, UnitaryAndComposes) {
  const auto u = phase_gate(1.1, 2);
  const Eigen::Index n = static_cast<Eigen::Index>(u.size());
  EXPECT_LT(max_abs(u.entries().adjoint() * u.entries() - Eigen::MatrixXcd::Identity(n, n)), 1e-15);
  const double a = 4.0, b = 3.5;
  const auto composed = phase_gate(a, 1) * phase_gate(b, 1);
  EXPECT_LT(max_abs(composed.entries() - phase_gate(std::fmod(a + b, 2 * std::numbers::pi), 1).entries()), 1e-14);
}

TEST(InitialState, VacuumBothGround) {
  const SystemParams p;
  const auto psi = initial_state(p);
  EXPECT_EQ(norm2(psi), 1.0);
  EXPECT_EQ(expectation(psi, cavity_number(0, p.dims())), cplx(0.0));
  EXPECT_EQ(expectation(psi, cavity_number(1, p.dims())), cplx(0.0));
  const auto pop_a = ion_transition(0, IonLevel::kA, IonLevel::kA, p.dims()) +
                     ion_transition(1, IonLevel::kA, IonLevel::kA, p.dims());
  EXPECT_EQ(expectation(psi, pop_a), cplx(2.0));
}

}  // namespace
}  // namespace hom
