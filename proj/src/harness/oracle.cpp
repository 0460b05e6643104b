// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hrom/error.hpp"
#include "hrom/harness.hpp"

namespace hrom {

namespace {

using cd = std::complex<double>;

// log(1 + z) / s2 given z and zs = z / s2, exact as s2 -> 0.
cd log1p_scaled(cd z, cd zs, double s2) {
  if (std::abs(z) < 1e-3) return zs * (1.0 - z * (1.0 / 2.0 - z * (1.0 / 3.0 - z * (1.0 / 4.0 - z / 5.0))));
  return std::log(1.0 + z) / s2;
}

// Re(e^{-i phi log K} f_j(phi) / (i phi)) with f_j in the rotation-free
// ("little trap") form, which keeps log() on the principal branch. With
// beta = b - i rho sigma phi and d^2 = beta^2 - sigma^2 a, the differences
// beta - d are rewritten as sigma^2 a / (beta + d) so nothing is divided by
// sigma^2 after cancelling; the small-sigma limit stays accurate.
double probability_integrand(const HestonParams& p, int j, double phi) {
  const cd i(0.0, 1.0);
  const double u = j == 1 ? 0.5 : -0.5;
  const double b = j == 1 ? p.kappa - p.rho * p.sigma : p.kappa;
  const double s2 = p.sigma * p.sigma;
  const cd beta = b - p.rho * p.sigma * i * phi;
  const cd a = 2.0 * u * i * phi - phi * phi;
  const cd d = std::sqrt(beta * beta - s2 * a);
  const cd m = a / (beta + d);     // (beta - d) / sigma^2
  const cd g = s2 * m / (beta + d);  // (beta - d) / (beta + d)
  const cd e = std::exp(-d * p.T);
  // (1 - g e) / (1 - g) = 1 + z
  const cd zs = m * (1.0 - e) / ((beta + d) * (1.0 - g));
  const cd log_term = log1p_scaled(s2 * zs, zs, s2);
  const cd c = (p.r_d - p.r_f) * i * phi * p.T + p.kappa * p.theta * (m * p.T - 2.0 * log_term);
  const cd dd = m * (1.0 - e) / (1.0 - g * e);
  const cd f = std::exp(c + dd * p.v0 + i * phi * (std::log(p.S0) - std::log(p.K)));
  return std::real(f / (i * phi));
}

}  // namespace

double reference_price_heston_cf(const HestonParams& params) {
  params.validate();
  using boost::math::quadrature::gauss_kronrod;
  const double inf = std::numeric_limits<double>::infinity();
  double prob[2];
  double err[2];
  for (int j = 1; j <= 2; ++j) {
    double error = 0.0;
    const double integral = gauss_kronrod<double, 61>::integrate(
        [&](double phi) { return probability_integrand(params, j, phi); }, 0.0, inf, 20, 1e-13, &error);
    if (!std::isfinite(integral)) throw NumericalError("heston oracle: integral is not finite");
    prob[j - 1] = 0.5 + integral / std::numbers::pi;
    err[j - 1] = error / std::numbers::pi;
  }
  const double df_f = params.S0 * std::exp(-params.r_f * params.T);
  const double df_d = params.K * std::exp(-params.r_d * params.T);
  const double abs_error = df_f * err[0] + df_d * err[1];
  if (!(abs_error < 1e-8)) throw NumericalError("heston oracle: quadrature did not converge");
  return df_f * prob[0] - df_d * prob[1];
}

}  // namespace hrom
