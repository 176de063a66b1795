#pragma once

#include <complex>

#include "laxtop/errors.hpp"

namespace laxtop {

using Complex = std::complex<double>;

enum class Regime { rational, trigonometric, elliptic };

const char* regime_name(Regime r);

// Evaluation context for the special functions. The same context is
// shared by every module that evaluates phi, E1 or wp.
//
// Singular sets per regime: {0} (rational), i*pi*Z (trigonometric),
// Z + tau*Z (elliptic).
struct EllipticContext {
  Regime regime = Regime::rational;
  Complex tau{0.0, 1.0};   // modular parameter, elliptic only, Im(tau) > 0
  int series_cutoff = 32;  // theta series truncation |k| <= cutoff
  double pole_guard = 1e-6;

  static EllipticContext make_rational(double guard = 1e-6);
  static EllipticContext make_trigonometric(double guard = 1e-6);
  static EllipticContext make_elliptic(Complex tau, int cutoff = 32,
                                       double guard = 1e-6);

  // Throws ConfigError on violated invariants (Im tau, cutoff, guard).
  void validate() const;

  EllipticContext with_guard(double guard) const;
};

// Distance from z to the singular set of the active regime.
double singular_distance(const EllipticContext& ctx, Complex z);

// Distance from z to the period lattice Z + tau*Z.
double lattice_distance(Complex tau, Complex z);

// Odd Jacobi theta, truncated series
//   theta(z|tau) = sum_k exp(pi*i*tau*(k+1/2)^2 + 2*pi*i*(k+1/2)*(z+1/2)).
// Throws WrongRegime outside the elliptic regime, NonConvergent when the
// truncation tail exceeds 1e-15 relative to the largest term.
Complex theta(const EllipticContext& ctx, Complex z);

// Term-wise derivative of the theta series, order 0..3.
Complex theta_deriv(const EllipticContext& ctx, Complex z, int order);

// Kronecker function phi(z,q):
//   1/z + 1/q | coth z + coth q | theta'(0) theta(z+q) / (theta(z) theta(q)).
// Requires z, q and z+q at distance >= pole_guard from the singular set.
Complex kronecker_phi(const EllipticContext& ctx, Complex z, Complex q);

// First Eisenstein function: 1/z | coth z | theta'(z)/theta(z).
Complex e1(const EllipticContext& ctx, Complex z);

// Weierstrass function:
//   1/z^2 | 1/sinh^2 z + 1/3 | -E1'(z) + theta'''(0)/(3 theta'(0)).
Complex wp(const EllipticContext& ctx, Complex z);

// d/dq phi(z,q) = phi(z,q) (E1(z+q) - E1(q)), one code path for all
// regimes. Preconditions as kronecker_phi.
Complex phi_dq(const EllipticContext& ctx, Complex z, Complex q);

// d/dz phi(z,q) = phi(z,q) (E1(z+q) - E1(z)).
Complex phi_dz(const EllipticContext& ctx, Complex z, Complex q);

// Coefficients of the expansion phi(z,q) = 1/q + c0 + c1*q + O(q^2):
// c0 = E1(z), c1 = (E1(z)^2 - wp(z))/2.
struct PhiFiniteParts {
  Complex c0;
  Complex c1;
};
PhiFiniteParts phi_finite_parts(const EllipticContext& ctx, Complex z);

namespace detail {

// Unguarded evaluators for callers that have already screened their
// inputs against the singular set. The derivative forms stay accurate
// near zeros of theta(z+q), where the E1 closed form degenerates to
// 0 * inf.
Complex phi_raw(const EllipticContext& ctx, Complex z, Complex q);
Complex e1_raw(const EllipticContext& ctx, Complex z);
Complex wp_raw(const EllipticContext& ctx, Complex z);
Complex phi_dfirst_raw(const EllipticContext& ctx, Complex z, Complex q);
Complex phi_dsecond_raw(const EllipticContext& ctx, Complex z, Complex q);

bool is_finite(Complex v);

}  // namespace detail

}  // namespace laxtop
