#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hom::stats {

/// sqrt(p (1 - p) / n).
double binomial_stderr(double p_hat, std::size_t n);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

/// Sample mean and standard error (n - 1 normalization). n = 1 gives stderr 0.
MeanStderr mean_stderr(std::span<const double> xs);

/// Kolmogorov limiting survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_q(double x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample test against a continuous CDF. Uses the Stephens small-sample correction.
KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Coefficient of determination of the least-squares line y = slope * x through the origin,
/// measured against the mean of y.
struct OriginFit {
  double slope = 0.0;
  double r_squared = 0.0;
};
OriginFit fit_through_origin(std::span<const double> x, std::span<const double> y);

}  // namespace hom::stats
