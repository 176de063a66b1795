#include "laxtop/specfun.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace laxtop {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

[[noreturn]] void throw_near_pole(const char* what, Complex z, double dist,
                                  double guard) {
  std::ostringstream os;
  os << what << ": argument (" << z.real() << "," << z.imag()
     << ") at distance " << dist << " < pole guard " << guard;
  throw NearPole(os.str());
}

void require_regular(const EllipticContext& ctx, Complex z, const char* what) {
  const double d = singular_distance(ctx, z);
  if (d < ctx.pole_guard) throw_near_pole(what, z, d, ctx.pole_guard);
}

Complex coth(Complex z) { return std::cosh(z) / std::sinh(z); }

// theta series with term-wise derivative of given order. Terms are
// paired as m = k+1/2 and -m so the cutoff is symmetric.
Complex theta_sum(const EllipticContext& ctx, Complex z, int order) {
  Complex acc{0.0, 0.0};
  double max_term = 0.0;
  double last_term = 0.0;
  for (int k = ctx.series_cutoff - 1; k >= 0; --k) {
    const double m = k + 0.5;
    const Complex gauss = std::exp(kPi * kI * ctx.tau * (m * m));
    const Complex wplus = 2.0 * kPi * kI * m;
    const Complex ep = std::exp(wplus * (z + 0.5));
    const Complex em = std::exp(-wplus * (z + 0.5));
    Complex dp{1.0, 0.0}, dm{1.0, 0.0};
    for (int d = 0; d < order; ++d) {
      dp *= wplus;
      dm *= -wplus;
    }
    const Complex term = gauss * (dp * ep + dm * em);
    acc += term;
    const double mag = std::abs(term);
    if (mag > max_term) max_term = mag;
    if (k == ctx.series_cutoff - 1) last_term = mag;
  }
  if (last_term > 1e-15 * max_term) {
    std::ostringstream os;
    os << "theta series tail " << last_term << " above 1e-15 relative at cutoff "
       << ctx.series_cutoff << " (Im tau = " << ctx.tau.imag() << ")";
    throw NonConvergent(os.str());
  }
  return acc;
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::rational: return "rational";
    case Regime::trigonometric: return "trigonometric";
    case Regime::elliptic: return "elliptic";
  }
  return "?";
}

EllipticContext EllipticContext::make_rational(double guard) {
  EllipticContext ctx;
  ctx.regime = Regime::rational;
  ctx.pole_guard = guard;
  ctx.validate();
  return ctx;
}

EllipticContext EllipticContext::make_trigonometric(double guard) {
  EllipticContext ctx;
  ctx.regime = Regime::trigonometric;
  ctx.pole_guard = guard;
  ctx.validate();
  return ctx;
}

EllipticContext EllipticContext::make_elliptic(Complex tau, int cutoff,
                                               double guard) {
  EllipticContext ctx;
  ctx.regime = Regime::elliptic;
  ctx.tau = tau;
  ctx.series_cutoff = cutoff;
  ctx.pole_guard = guard;
  ctx.validate();
  return ctx;
}

void EllipticContext::validate() const {
  if (regime == Regime::elliptic && tau.imag() <= 0.0)
    throw ConfigError("elliptic context requires Im(tau) > 0");
  if (series_cutoff < 8) throw ConfigError("series_cutoff must be >= 8");
  if (pole_guard <= 0.0) throw ConfigError("pole_guard must be positive");
}

EllipticContext EllipticContext::with_guard(double guard) const {
  EllipticContext ctx = *this;
  ctx.pole_guard = guard;
  ctx.validate();
  return ctx;
}

double lattice_distance(Complex tau, Complex z) {
  // Nearest point of Z + tau*Z; search the 3x3 neighborhood of the
  // rounded lattice coordinates (enough for any reduced tau).
  const double b = z.imag() / tau.imag();
  const double a = z.real() - b * tau.real();
  const double ra = std::round(a);
  const double rb = std::round(b);
  double best = std::abs(z - (Complex(ra, 0.0) + rb * tau));
  for (int da = -1; da <= 1; ++da)
    for (int db = -1; db <= 1; ++db) {
      const Complex p = Complex(ra + da, 0.0) + (rb + db) * tau;
      best = std::min(best, std::abs(z - p));
    }
  return best;
}

double singular_distance(const EllipticContext& ctx, Complex z) {
  switch (ctx.regime) {
    case Regime::rational:
      return std::abs(z);
    case Regime::trigonometric: {
      const double k = std::round(z.imag() / kPi);
      return std::abs(z - Complex(0.0, k * kPi));
    }
    case Regime::elliptic:
      return lattice_distance(ctx.tau, z);
  }
  return 0.0;
}

Complex theta(const EllipticContext& ctx, Complex z) {
  return theta_deriv(ctx, z, 0);
}

Complex theta_deriv(const EllipticContext& ctx, Complex z, int order) {
  if (ctx.regime != Regime::elliptic)
    throw WrongRegime("theta requires the elliptic regime");
  if (order < 0 || order > 3)
    throw IndexOutOfRange("theta_deriv supports orders 0..3");
  ctx.validate();
  return theta_sum(ctx, z, order);
}

namespace detail {

bool is_finite(Complex v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

Complex phi_raw(const EllipticContext& ctx, Complex z, Complex q) {
  switch (ctx.regime) {
    case Regime::rational:
      return 1.0 / z + 1.0 / q;
    case Regime::trigonometric:
      return coth(z) + coth(q);
    case Regime::elliptic:
      return theta_deriv(ctx, 0.0, 1) * theta_sum(ctx, z + q, 0) /
             (theta_sum(ctx, z, 0) * theta_sum(ctx, q, 0));
  }
  return {};
}

Complex e1_raw(const EllipticContext& ctx, Complex z) {
  switch (ctx.regime) {
    case Regime::rational:
      return 1.0 / z;
    case Regime::trigonometric:
      return coth(z);
    case Regime::elliptic:
      return theta_sum(ctx, z, 1) / theta_sum(ctx, z, 0);
  }
  return {};
}

Complex wp_raw(const EllipticContext& ctx, Complex z) {
  switch (ctx.regime) {
    case Regime::rational:
      return 1.0 / (z * z);
    case Regime::trigonometric: {
      const Complex s = std::sinh(z);
      return 1.0 / (s * s) + 1.0 / 3.0;
    }
    case Regime::elliptic: {
      // -E1'(z) + theta'''(0)/(3 theta'(0)) with
      // E1' = theta''/theta - (theta'/theta)^2.
      const Complex t0 = theta_sum(ctx, z, 0);
      const Complex t1 = theta_sum(ctx, z, 1);
      const Complex t2 = theta_sum(ctx, z, 2);
      const Complex ratio = t1 / t0;
      return ratio * ratio - t2 / t0 +
             theta_sum(ctx, 0.0, 3) / (3.0 * theta_deriv(ctx, 0.0, 1));
    }
  }
  return {};
}

// d/dz phi(z,q). In the elliptic case evaluated as
//   theta'(0) theta'(z+q)/(theta(z) theta(q)) - phi(z,q) E1(z)
// which stays accurate near zeros of theta(z+q).
Complex phi_dfirst_raw(const EllipticContext& ctx, Complex z, Complex q) {
  switch (ctx.regime) {
    case Regime::rational:
      return -1.0 / (z * z);
    case Regime::trigonometric: {
      const Complex s = std::sinh(z);
      return -1.0 / (s * s);
    }
    case Regime::elliptic: {
      const Complex tz = theta_sum(ctx, z, 0);
      const Complex tq = theta_sum(ctx, q, 0);
      const Complex num = theta_deriv(ctx, 0.0, 1);
      return num * theta_sum(ctx, z + q, 1) / (tz * tq) -
             num * theta_sum(ctx, z + q, 0) / (tz * tq) *
                 (theta_sum(ctx, z, 1) / tz);
    }
  }
  return {};
}

Complex phi_dsecond_raw(const EllipticContext& ctx, Complex z, Complex q) {
  return phi_dfirst_raw(ctx, q, z);
}

}  // namespace detail

Complex kronecker_phi(const EllipticContext& ctx, Complex z, Complex q) {
  require_regular(ctx, z, "kronecker_phi(z)");
  require_regular(ctx, q, "kronecker_phi(q)");
  require_regular(ctx, z + q, "kronecker_phi(z+q)");
  const Complex v = detail::phi_raw(ctx, z, q);
  if (!detail::is_finite(v)) throw NonConvergent("kronecker_phi produced a non-finite value");
  return v;
}

Complex e1(const EllipticContext& ctx, Complex z) {
  require_regular(ctx, z, "e1");
  const Complex v = detail::e1_raw(ctx, z);
  if (!detail::is_finite(v)) throw NonConvergent("e1 produced a non-finite value");
  return v;
}

Complex wp(const EllipticContext& ctx, Complex z) {
  require_regular(ctx, z, "wp");
  const Complex v = detail::wp_raw(ctx, z);
  if (!detail::is_finite(v)) throw NonConvergent("wp produced a non-finite value");
  return v;
}

Complex phi_dq(const EllipticContext& ctx, Complex z, Complex q) {
  const Complex p = kronecker_phi(ctx, z, q);
  return p * (detail::e1_raw(ctx, z + q) - detail::e1_raw(ctx, q));
}

Complex phi_dz(const EllipticContext& ctx, Complex z, Complex q) {
  const Complex p = kronecker_phi(ctx, z, q);
  return p * (detail::e1_raw(ctx, z + q) - detail::e1_raw(ctx, z));
}

PhiFiniteParts phi_finite_parts(const EllipticContext& ctx, Complex z) {
  require_regular(ctx, z, "phi_finite_parts");
  const Complex c0 = detail::e1_raw(ctx, z);
  const Complex c1 = 0.5 * (c0 * c0 - detail::wp_raw(ctx, z));
  return {c0, c1};
}

}  // namespace laxtop
