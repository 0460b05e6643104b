// SPDX-License-Identifier: Apache-2.0
#include "hrom/heston.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hrom/error.hpp"

namespace hrom {

void HestonParams::validate() const {
  if (!(kappa > 0.0)) throw DomainError("heston: kappa must be positive");
  if (!(theta > 0.0)) throw DomainError("heston: theta must be positive");
  if (!(sigma > 0.0)) throw DomainError("heston: sigma must be positive");
  if (!(rho > -1.0 && rho < 1.0)) throw DomainError("heston: rho must lie in (-1, 1)");
  if (!(T > 0.0)) throw DomainError("heston: T must be positive");
  if (!(K > 0.0)) throw DomainError("heston: K must be positive");
  if (!(S0 > 0.0)) throw DomainError("heston: S0 must be positive");
  if (!(v0 > 0.0)) throw DomainError("heston: v0 must be positive");
  if (!std::isfinite(r_d) || !std::isfinite(r_f)) throw DomainError("heston: rates must be finite");
}

void OptionSpec::validate() const {
  params.validate();
  if (!(blend >= 0.0 && blend <= 1.0)) throw DomainError("option: blend must lie in [0, 1]");
  if (kind == OptionKind::butterfly_spread) {
    if (!(K1 > 0.0 && K1 < K3)) throw DomainError("butterfly: need 0 < K1 < K3");
    if (std::abs(K2 - 0.5 * (K1 + K3)) > 1e-12) throw DomainError("butterfly: K2 must equal (K1 + K3) / 2");
  }
}

double OptionSpec::reference_strike() const {
  return kind == OptionKind::butterfly_spread ? K2 : params.K;
}

const char* to_string(OptionKind kind) {
  switch (kind) {
    case OptionKind::european_call: return "european-call";
    case OptionKind::butterfly_spread: return "butterfly";
    case OptionKind::digital_call: return "digital";
  }
  return "unknown";
}

OptionKind option_kind_from_string(std::string_view name) {
  if (name == "european-call") return OptionKind::european_call;
  if (name == "butterfly") return OptionKind::butterfly_spread;
  if (name == "digital") return OptionKind::digital_call;
  throw ConfigError("unknown option kind '" + std::string(name) + "'");
}

CoefficientField coefficients(const HestonParams& p) {
  CoefficientField field;
  const double s = p.sigma;
  const double rho = p.rho;
  field.diffusion = [s, rho](const Point& z) -> Eigen::Matrix2d {
    Eigen::Matrix2d a;
    a << s * s, rho * s, rho * s, 1.0;
    return 0.5 * z[0] * a;
  };
  const Eigen::Vector2d slope(p.kappa, 0.5);
  const Eigen::Vector2d shift(-p.kappa * p.theta + 0.5 * s * s, -(p.r_d - p.r_f) + 0.5 * rho * s);
  field.convection = [slope, shift](const Point& z) -> Eigen::Vector2d { return z[0] * slope + shift; };
  field.reaction = p.r_d;
  return field;
}

double payoff(const OptionSpec& spec, double /*v*/, double x) {
  switch (spec.kind) {
    case OptionKind::european_call: {
      const double K = spec.params.K;
      return std::max(K * std::exp(x) - K, 0.0);
    }
    case OptionKind::butterfly_spread: {
      // (s - K1)+ - 2 (s - K2)+ + (s - K3)+ written piecewise so it is exactly
      // zero outside (K1, K3) instead of a cancellation residue.
      const double s = spec.K2 * std::exp(x);
      if (s <= spec.K1 || s >= spec.K3) return 0.0;
      return s <= spec.K2 ? s - spec.K1 : spec.K3 - s;
    }
    case OptionKind::digital_call:
      return x > 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

BcLayout boundary_layout(const OptionSpec& spec) {
  switch (spec.kind) {
    case OptionKind::european_call:
      return {BcKind::dirichlet, BcKind::dirichlet, BcKind::dirichlet, BcKind::neumann};
    case OptionKind::butterfly_spread:
    case OptionKind::digital_call:
      return {BcKind::neumann, BcKind::neumann, BcKind::dirichlet, BcKind::dirichlet};
  }
  return kAllDirichlet;
}

double normal_cdf(double y) { return 0.5 * std::erfc(-y / std::numbers::sqrt2); }

namespace {

double european_v_min(const OptionSpec& spec, const RectDomain& dom, double tau, double x) {
  const HestonParams& p = spec.params;
  if (tau <= 0.0) return payoff(spec, dom.v_min, x);
  const double v_lo = dom.v_min;
  const double v_hi = spec.alt_bc ? dom.v_min : dom.v_max;
  const double drift = p.r_d - p.r_f;
  const double d_plus = (x + (drift + 0.5 * v_lo) * tau) / std::sqrt(v_lo * tau);
  const double d_minus = (x + (drift - 0.5 * v_hi) * tau) / std::sqrt(v_hi * tau);
  const double strike_growth = spec.alt_bc ? std::exp(-p.r_d * tau) : std::exp(p.r_d * tau);
  return p.K * std::exp(x - p.r_f * tau) * normal_cdf(d_plus) - p.K * strike_growth * normal_cdf(d_minus);
}

double european_v_max(const OptionSpec& spec, double tau, double x) {
  return spec.params.K * std::exp(x - spec.params.r_f * tau);
}

}  // namespace

double boundary_value(const OptionSpec& spec, const RectDomain& domain, BoundarySide side,
                      BcKind kind, double tau, double v, double x) {
  if (side == BoundarySide::none) throw DomainError("boundary_value: interior side");
  if (boundary_layout(spec)[static_cast<int>(side)] != kind)
    throw DomainError(std::string("boundary_value: wrong condition type on side ") + to_string(side));

  const HestonParams& p = spec.params;
  switch (spec.kind) {
    case OptionKind::european_call:
      switch (side) {
        case BoundarySide::v_min: return european_v_min(spec, domain, tau, x);
        case BoundarySide::v_max: return european_v_max(spec, tau, x);
        case BoundarySide::x_min:
          return spec.blend * european_v_max(spec, tau, domain.x_min) +
                 (1.0 - spec.blend) * european_v_min(spec, domain, tau, domain.x_min);
        case BoundarySide::x_max: return 0.5 * v * p.K * std::exp(x - p.r_f * tau);
        case BoundarySide::none: break;
      }
      break;
    case OptionKind::butterfly_spread:
      return 0.0;
    case OptionKind::digital_call:
      if (side == BoundarySide::x_max) return std::exp(x - p.r_f * tau);
      return 0.0;
  }
  return 0.0;
}

BoundaryData boundary_data(const OptionSpec& spec, const RectDomain& domain, double tau) {
  BoundaryData bc;
  bc.dirichlet = [spec, domain, tau](BoundarySide side, const Point& z) {
    return boundary_value(spec, domain, side, BcKind::dirichlet, tau, z[0], z[1]);
  };
  bc.neumann = [spec, domain, tau](BoundarySide side, const Point& z) {
    return boundary_value(spec, domain, side, BcKind::neumann, tau, z[0], z[1]);
  };
  return bc;
}

bool has_homogeneous_boundary_data(const OptionSpec& spec) {
  return spec.kind == OptionKind::butterfly_spread;
}

LogCoordinates log_transform(const OptionSpec& spec, double S, double t) {
  if (!(S > 0.0)) throw DomainError("log_transform: spot must be positive");
  if (t < 0.0 || t > spec.params.T) throw DomainError("log_transform: t outside [0, T]");
  return {std::log(S / spec.reference_strike()), spec.params.T - t};
}

std::pair<double, double> inverse_log_transform(const OptionSpec& spec, double x, double tau) {
  return {spec.reference_strike() * std::exp(x), spec.params.T - tau};
}

Preset preset(std::string_view name) {
  Preset p;
  p.name = std::string(name);
  p.domain = RectDomain{0.0025, 0.5, -5.0, 5.0};
  p.dt = 0.01;
  if (name == "european-call") {
    p.spec.kind = OptionKind::european_call;
    p.spec.params = HestonParams{2.5, 0.06, 0.4, -0.9, 0.0198, 0.0, 1.0, 1.0, 1.0, 0.1683};
    p.cells_v = 48;
    p.cells_x = 96;
  } else if (name == "butterfly") {
    p.spec.kind = OptionKind::butterfly_spread;
    p.spec.params = HestonParams{2.5, 0.06, 0.4, 0.55, 0.0198, 0.0, 1.0, 0.5, 1.0, 0.1683};
    p.spec.K1 = 0.1;
    p.spec.K2 = 0.5;
    p.spec.K3 = 0.9;
    p.cells_v = 48;
    p.cells_x = 96;
  } else if (name == "digital") {
    p.spec.kind = OptionKind::digital_call;
    p.spec.params = HestonParams{2.5,  0.06, 0.5, -0.1, std::log(1.052), std::log(1.048),
                                 0.25, 1.0,  1.0, 0.05225};
    p.cells_v = 32;
    p.cells_x = 128;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return p;
}

std::vector<std::string> preset_names() { return {"european-call", "butterfly", "digital"}; }

}  // namespace hrom
