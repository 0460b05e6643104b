// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hrom/assembly.hpp"
#include "hrom/mesh.hpp"

namespace hrom {

/// Heston market/model constants.
struct HestonParams {
  double kappa = 2.5;    // mean reversion speed
  double theta = 0.06;   // long-run variance
  double sigma = 0.4;    // vol of vol
  double rho = -0.9;     // correlation
  double r_d = 0.0198;   // domestic rate
  double r_f = 0.0;      // foreign rate
  double T = 1.0;        // maturity in years
  double K = 1.0;        // strike
  double S0 = 1.0;       // spot
  double v0 = 0.1683;    // initial variance

  void validate() const;
};

enum class OptionKind { european_call, butterfly_spread, digital_call };

struct OptionSpec {
  OptionKind kind = OptionKind::european_call;
  HestonParams params;
  // Butterfly strikes; K2 is also the log-moneyness reference.
  double K1 = 0.1;
  double K2 = 0.5;
  double K3 = 0.9;
  // x_min Dirichlet blend for the European call.
  double blend = 0.5;
  // European v_min condition: use v_min inside both d+ and d- and discount
  // the strike term with exp(-r_d tau).
  bool alt_bc = false;

  void validate() const;
  /// Strike defining x = log(S / K_ref).
  double reference_strike() const;
};

const char* to_string(OptionKind kind);
OptionKind option_kind_from_string(std::string_view name);

/// A(v) = v/2 [[s^2, rho s], [rho s, 1]],
/// b(v) = v [kappa, 1/2] + [-kappa theta + s^2/2, -(r_d - r_f) + rho s/2],
/// reaction r_d. Independent of x.
CoefficientField coefficients(const HestonParams& params);

double payoff(const OptionSpec& spec, double v, double x);

/// Boundary condition type on each rectangle side for this option.
BcLayout boundary_layout(const OptionSpec& spec);

/// Boundary datum on `side` at time-to-maturity tau. For Neumann sides the
/// value is the conormal flux A grad u . n.
double boundary_value(const OptionSpec& spec, const RectDomain& domain, BoundarySide side,
                      BcKind kind, double tau, double v, double x);

/// Standard normal CDF via erfc.
double normal_cdf(double y);

struct LogCoordinates {
  double x = 0.0;
  double tau = 0.0;
};

LogCoordinates log_transform(const OptionSpec& spec, double S, double t);
/// Inverse of log_transform: returns (S, t).
std::pair<double, double> inverse_log_transform(const OptionSpec& spec, double x, double tau);

/// Named experiment setup: option, localized domain and grid.
struct Preset {
  std::string name;
  OptionSpec spec;
  RectDomain domain;
  int cells_v = 48;
  int cells_x = 96;
  double dt = 0.01;
};

/// "european-call", "butterfly" or "digital".
Preset preset(std::string_view name);
std::vector<std::string> preset_names();

/// Boundary data bound to a time-to-maturity.
BoundaryData boundary_data(const OptionSpec& spec, const RectDomain& domain, double tau);

/// True when every boundary datum vanishes identically (no load vector).
bool has_homogeneous_boundary_data(const OptionSpec& spec);

}  // namespace hrom
