#include "hom/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

namespace hom::analytic {
namespace {

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
  return f;
}

double binomial(std::size_t n, std::size_t k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

}  // namespace

cplx ww_amplitude(double nu, double t, const WwParams& p) {
  if (!(p.gamma > 0)) throw std::invalid_argument("ww_amplitude: gamma must be > 0");
  if (t < 0) throw std::invalid_argument("ww_amplitude: t must be >= 0");
  const cplx i{0.0, 1.0};
  const cplx decayed = std::isinf(t) ? cplx{} : std::exp(i * (p.omega - nu) * t - 0.5 * p.gamma * t);
  const cplx denom = (nu - p.omega) + 0.5 * i * p.gamma;
  return std::sqrt(p.gamma / (2.0 * std::numbers::pi)) * (1.0 - decayed) / denom;
}

double spectral_density(double nu, double t, const WwParams& p) { return std::norm(ww_amplitude(nu, t, p)); }

double emission_probability(double t, const WwParams& p, double tolerance) {
  if (!(p.gamma > 0)) throw std::invalid_argument("emission_probability: gamma must be > 0");
  if (t < 0) throw std::invalid_argument("emission_probability: t must be >= 0");
  // |1 - e^{-i d t - G t / 2}|^2 = 1 + e^{-G t} - 2 e^{-G t / 2} cos(d t), d = nu - omega.
  // The smooth part goes through Gauss-Kronrod with d = (G/2) tan(theta), which
  // cancels the Lorentzian; the cosine part is a Fourier integral.
  const double half = 0.5 * p.gamma;
  const double weight = p.gamma / (2.0 * std::numbers::pi);
  auto lorentzian = [&](double d) { return weight / (d * d + half * half); };
  auto smooth = [&](double theta) {
    const double c = std::cos(theta);
    if (c <= 0.0) return 0.0;
    const double d = half * std::tan(theta);
    return lorentzian(d) * half / (c * c);
  };
  const double edge = 0.5 * std::numbers::pi;
  const double total = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(smooth, -edge, edge, 15, tolerance);
  if (std::isinf(t)) return total;
  const double damping = std::exp(-half * t);
  double oscillating = 0.0;
  if (t > 0 && damping > 0) {
    boost::math::quadrature::ooura_fourier_cos<double> fourier(tolerance);
    oscillating = 2.0 * fourier.integrate(lorentzian, t).first;
  } else if (t == 0) {
    oscillating = total;
  }
  return total * (1.0 + damping * damping) - 2.0 * damping * oscillating;
}

ModePair ModePair::fock(std::size_t n_a, std::size_t n_b) {
  ModePair m;
  m(n_a, n_b) = 1.0;
  return m;
}

double ModePair::norm2() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

ModePair bs_mode_transform(const ModePair& input, double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("bs_mode_transform: lambda must be > 0");
  const double sr = std::sqrt(lambda / (1.0 + lambda));
  const double st = std::sqrt(1.0 / (1.0 + lambda));
  ModePair out;
  for (std::size_t n1 = 0; n1 <= 2; ++n1) {
    for (std::size_t n2 = 0; n2 <= 2; ++n2) {
      const cplx a = input(n1, n2);
      if (a == cplx{}) continue;
      if (n1 + n2 > 2) throw std::invalid_argument("bs_mode_transform: more than two photons");
      // (c1^dag)^n1 (c2^dag)^n2 / sqrt(n1! n2!) with
      // c1^dag = sqrt(R) d1^dag + sqrt(T) d2^dag, c2^dag = sqrt(T) d1^dag - sqrt(R) d2^dag.
      const double norm = 1.0 / std::sqrt(factorial(n1) * factorial(n2));
      for (std::size_t j = 0; j <= n1; ++j) {
        for (std::size_t k = 0; k <= n2; ++k) {
          const double coeff = binomial(n1, j) * std::pow(sr, static_cast<double>(j)) *
                               std::pow(st, static_cast<double>(n1 - j)) * binomial(n2, k) *
                               std::pow(st, static_cast<double>(k)) *
                               std::pow(-sr, static_cast<double>(n2 - k));
          const std::size_t m1 = j + k;
          const std::size_t m2 = n1 + n2 - m1;
          out(m1, m2) += a * norm * coeff * std::sqrt(factorial(m1) * factorial(m2));
        }
      }
    }
  }
  return out;
}

std::pair<StateVector, StateVector> heralded_states() {
  const Dims dims{3, 3};
  const std::size_t ba = 1 * 3 + 0;
  const std::size_t ab = 0 * 3 + 1;
  Eigen::VectorXcd plus = Eigen::VectorXcd::Zero(9);
  Eigen::VectorXcd minus = Eigen::VectorXcd::Zero(9);
  const double s = 1.0 / std::sqrt(2.0);
  plus[ba] = s;
  plus[ab] = s;
  minus[ba] = s;
  minus[ab] = -s;
  return {StateVector(plus, dims), StateVector(minus, dims)};
}

double detection_rate(const SystemParams& p) {
  if (p.kappa <= 0 || p.delta == 0) return 0.0;
  const double x = p.g * p.omega / (p.delta * p.kappa);
  return 4.0 * p.kappa * x * x * p.eta;
}

double success_probability(const SystemParams& p) {
  return std::clamp(detection_rate(p) * p.t_wait, 0.0, 1.0);
}

std::pair<double, double> p1_p2_split(double phi) {
  const double c = std::cos(phi);
  return {0.5 * (1.0 + c), 0.5 * (1.0 - c)};
}

double same_detector_probability(double phi) { return 0.5 * (1.0 + std::cos(phi)); }

}  // namespace hom::analytic
