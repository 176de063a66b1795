#include "laxtop/rmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace laxtop {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

void require_distance(double dist, double guard, const char* what, Complex u) {
  if (dist < guard) {
    std::ostringstream os;
    os << what << ": (" << u.real() << "," << u.imag() << ") at distance "
       << dist << " < pole guard " << guard;
    throw NearPole(os.str());
  }
}

// Residue of f at 0 from a Richardson pole fit. The odd combination
// eps * (f(eps) - f(-eps)) / 2 = c_{-1} + c_1 eps^2 + c_2 eps^4 + ...
// is extrapolated twice, leaving an O(eps^6) error.
template <typename F>
auto residue_fit(const F& f, double eps) {
  auto fit = [&](double e) {
    auto d = f(Complex(e, 0.0)) - f(Complex(-e, 0.0));
    d *= Complex(e / 2.0, 0.0);
    return d;
  };
  auto a = fit(eps);
  auto b = fit(eps / 2.0);
  auto c = fit(eps / 4.0);
  auto b1 = Complex(4.0 / 3.0, 0.0) * b - Complex(1.0 / 3.0, 0.0) * a;
  auto c1 = Complex(4.0 / 3.0, 0.0) * c - Complex(1.0 / 3.0, 0.0) * b;
  return Complex(16.0 / 15.0, 0.0) * c1 - Complex(1.0 / 15.0, 0.0) * b1;
}

class ScalarProvider : public RProvider {
 public:
  explicit ScalarProvider(const EllipticContext& ctx) : ctx_(ctx) {
    ctx_.validate();
  }

  int site_dim() const override { return 1; }
  const EllipticContext& context() const override { return ctx_; }

  TensorOp quantum(Complex h, Complex z) const override {
    return scalar_op(kronecker_phi(ctx_, h, z));
  }

  TensorOp f_derivative(Complex h, Complex z) const override {
    screen(h, "f_derivative(h)");
    screen(z, "f_derivative(z)");
    return scalar_op(detail::phi_dsecond_raw(ctx_, h, z));
  }

  TensorOp d_superscript(Complex h, Complex z) const override {
    screen(h, "d_superscript(h)");
    screen(z, "d_superscript(z)");
    return scalar_op(detail::phi_dfirst_raw(ctx_, h, z));
  }

  TensorOp classical_r(Complex z) const override {
    return scalar_op(e1(ctx_, z));
  }

  TensorOp finite_part_arg(Complex x) const override {
    return scalar_op(e1(ctx_, x));
  }

  // E1 is odd in every regime, so the constant term of its Laurent
  // expansion at 0 vanishes identically.
  TensorOp classical_finite() const override { return TensorOp(1); }

  TensorOp hbar_linear_coeff(Complex z) const override {
    const PhiFiniteParts parts = phi_finite_parts(ctx_, z);
    return scalar_op(parts.c1);
  }

  Complex weierstrass(Complex u) const override { return wp(ctx_, u); }

  double argument_distance(Complex u) const override {
    return singular_distance(ctx_, u);
  }
  double superscript_distance(Complex u) const override {
    return singular_distance(ctx_, u);
  }

 private:
  static TensorOp scalar_op(Complex v) {
    TensorOp t(1);
    t.comp(0, 0, 0, 0) = v;
    return t;
  }
  void screen(Complex u, const char* what) const {
    require_distance(singular_distance(ctx_, u), ctx_.pole_guard, what, u);
  }

  EllipticContext ctx_;
};

}  // namespace

ProviderPtr scalar_provider(const EllipticContext& ctx) {
  return std::make_shared<ScalarProvider>(ctx);
}

WeylBasis::WeylBasis(int n_in) : n(n_in), clock(n_in), shift(n_in) {
  if (n < 1) throw DimensionMismatch("WeylBasis requires n >= 1");
  for (int k = 0; k < n; ++k) {
    clock(k, k) = std::exp(2.0 * kPi * kI * Complex(k, 0.0) / Complex(n, 0.0));
    shift(k, (k + 1) % n) = 1.0;
  }
  T.reserve(static_cast<size_t>(n) * n);
  for (int a1 = 0; a1 < n; ++a1) {
    Matrix qa = Matrix::identity(n);
    for (int p = 0; p < a1; ++p) qa = qa * clock;
    for (int a2 = 0; a2 < n; ++a2) {
      Matrix m = qa;
      for (int p = 0; p < a2; ++p) m = m * shift;
      const Complex phase =
          std::exp(kPi * kI * Complex(a1 * a2, 0.0) / Complex(n, 0.0));
      T.push_back(phase * m);
    }
  }
  TxTm.reserve(T.size());
  for (int a1 = 0; a1 < n; ++a1)
    for (int a2 = 0; a2 < n; ++a2) {
      // T_{-a} = T_a^{-1}, which is the adjoint since T_a is unitary.
      TxTm.push_back(tensor_product(t(a1, a2), T[index(a1, a2)].adjoint()));
    }
}

namespace {

// Short deterministic sample stream used by the calibration gates.
struct GateSampler {
  std::mt19937_64 rng{0x5eed5a17ull};
  std::uniform_real_distribution<double> dist{-0.45, 0.45};
  Complex draw() { return {dist(rng), dist(rng)}; }
};

}  // namespace

BelavinProvider::BelavinProvider(const EllipticContext& ctx, int n)
    : ctx_(ctx), basis_(n), r0_(n) {
  if (ctx_.regime != Regime::elliptic)
    throw WrongRegime("belavin_provider requires the elliptic regime");
  ctx_.validate();
  calibrate();
  // r^{(0)} from the per-term expansion of r(z) at z = 0; only the
  // a != 0 terms contribute.
  TensorOp acc(n);
  for (int a1 = 0; a1 < n; ++a1)
    for (int a2 = 0; a2 < n; ++a2) {
      if (a1 == 0 && a2 == 0) continue;
      const Complex coeff =
          detail::e1_raw(ctx_, omega(a1, a2)) +
          2.0 * kPi * kI * Complex(a2, 0.0) / Complex(n, 0.0);
      acc += (c_ * coeff) * basis_.TxTm[basis_.index(a1, a2)];
    }
  r0_ = acc;
}

Complex BelavinProvider::omega(int a1, int a2) const {
  return (Complex(a1, 0.0) + Complex(a2, 0.0) * ctx_.tau) / Complex(basis_.n, 0.0);
}

TensorOp BelavinProvider::quantum_with(double c, double kappa, Complex h,
                                       Complex z) const {
  const int n = basis_.n;
  TensorOp acc(n);
  for (int a1 = 0; a1 < n; ++a1)
    for (int a2 = 0; a2 < n; ++a2) {
      const Complex w =
          std::exp(2.0 * kPi * kI * Complex(a2, 0.0) * kappa * z / Complex(n, 0.0));
      const Complex p = detail::phi_raw(ctx_, kappa * z, h + omega(a1, a2));
      acc += (c * w * p) * basis_.TxTm[basis_.index(a1, a2)];
    }
  return acc;
}

double BelavinProvider::argument_distance(Complex u) const {
  return lattice_distance(ctx_.tau, kappa_ * u) / kappa_;
}

double BelavinProvider::superscript_distance(Complex u) const {
  const int n = basis_.n;
  return lattice_distance(ctx_.tau, Complex(n, 0.0) * u) / n;
}

TensorOp BelavinProvider::quantum(Complex h, Complex z) const {
  require_distance(superscript_distance(h), ctx_.pole_guard, "quantum(h)", h);
  require_distance(argument_distance(z), ctx_.pole_guard, "quantum(z)", z);
  return quantum_with(c_, kappa_, h, z);
}

TensorOp BelavinProvider::f_derivative(Complex h, Complex z) const {
  require_distance(superscript_distance(h), ctx_.pole_guard, "f_derivative(h)", h);
  require_distance(argument_distance(z), ctx_.pole_guard, "f_derivative(z)", z);
  const int n = basis_.n;
  TensorOp acc(n);
  for (int a1 = 0; a1 < n; ++a1)
    for (int a2 = 0; a2 < n; ++a2) {
      const Complex ia2 = 2.0 * kPi * kI * Complex(a2, 0.0) * kappa_ / Complex(n, 0.0);
      const Complex w = std::exp(ia2 * z);
      const Complex arg = kappa_ * z;
      const Complex sup = h + omega(a1, a2);
      const Complex term = ia2 * detail::phi_raw(ctx_, arg, sup) +
                           kappa_ * detail::phi_dfirst_raw(ctx_, arg, sup);
      acc += (c_ * w * term) * basis_.TxTm[basis_.index(a1, a2)];
    }
  return acc;
}

TensorOp BelavinProvider::d_superscript(Complex h, Complex z) const {
  require_distance(superscript_distance(h), ctx_.pole_guard, "d_superscript(h)", h);
  require_distance(argument_distance(z), ctx_.pole_guard, "d_superscript(z)", z);
  const int n = basis_.n;
  TensorOp acc(n);
  for (int a1 = 0; a1 < n; ++a1)
    for (int a2 = 0; a2 < n; ++a2) {
      const Complex w =
          std::exp(2.0 * kPi * kI * Complex(a2, 0.0) * kappa_ * z / Complex(n, 0.0));
      const Complex term =
          detail::phi_dsecond_raw(ctx_, kappa_ * z, h + omega(a1, a2));
      acc += (c_ * w * term) * basis_.TxTm[basis_.index(a1, a2)];
    }
  return acc;
}

TensorOp BelavinProvider::classical_r(Complex z) const {
  require_distance(argument_distance(z), ctx_.pole_guard, "classical_r", z);
  const int n = basis_.n;
  TensorOp acc(n);
  for (int a1 = 0; a1 < n; ++a1)
    for (int a2 = 0; a2 < n; ++a2) {
      Complex coeff;
      if (a1 == 0 && a2 == 0) {
        coeff = detail::e1_raw(ctx_, kappa_ * z);
      } else {
        const Complex w = std::exp(2.0 * kPi * kI * Complex(a2, 0.0) * kappa_ * z /
                                   Complex(n, 0.0));
        coeff = w * detail::phi_raw(ctx_, kappa_ * z, omega(a1, a2));
      }
      acc += (c_ * coeff) * basis_.TxTm[basis_.index(a1, a2)];
    }
  return acc;
}

TensorOp BelavinProvider::finite_part_arg(Complex x) const {
  require_distance(superscript_distance(x), ctx_.pole_guard, "finite_part_arg", x);
  const int n = basis_.n;
  TensorOp acc(n);
  for (int a1 = 0; a1 < n; ++a1)
    for (int a2 = 0; a2 < n; ++a2) {
      const Complex coeff =
          detail::e1_raw(ctx_, x + omega(a1, a2)) +
          2.0 * kPi * kI * Complex(a2, 0.0) / Complex(n, 0.0);
      acc += (c_ * coeff) * basis_.TxTm[basis_.index(a1, a2)];
    }
  return acc;
}

TensorOp BelavinProvider::hbar_linear_coeff(Complex z) const {
  require_distance(argument_distance(z), ctx_.pole_guard, "hbar_linear_coeff", z);
  const int n = basis_.n;
  TensorOp acc(n);
  for (int a1 = 0; a1 < n; ++a1)
    for (int a2 = 0; a2 < n; ++a2) {
      Complex coeff;
      if (a1 == 0 && a2 == 0) {
        const Complex ee = detail::e1_raw(ctx_, kappa_ * z);
        coeff = 0.5 * (ee * ee - detail::wp_raw(ctx_, kappa_ * z));
      } else {
        const Complex w = std::exp(2.0 * kPi * kI * Complex(a2, 0.0) * kappa_ * z /
                                   Complex(n, 0.0));
        coeff = w * detail::phi_dsecond_raw(ctx_, kappa_ * z, omega(a1, a2));
      }
      acc += (c_ * coeff) * basis_.TxTm[basis_.index(a1, a2)];
    }
  return acc;
}

Complex BelavinProvider::weierstrass(Complex u) const {
  return kappa_ * kappa_ * detail::wp_raw(ctx_, kappa_ * u);
}

void BelavinProvider::calibrate() {
  const int n = basis_.n;
  const double scales[3] = {1.0, 1.0 / n, static_cast<double>(n)};
  const TensorOp one = TensorOp::identity(n);
  const TensorOp perm = permutation_op(n);
  // Probe points inside a fine cell of spacing 1/n.
  const Complex z0 = Complex(0.352, 0.274) / Complex(n, 0.0);
  const Complex h0 = Complex(-0.231, 0.318) / Complex(n, 0.0);
  const double eps = 0.04 / n;

  std::vector<CalibrationCandidate> table;
  std::vector<std::pair<double, double>> survivors;
  std::vector<std::pair<double, double>> seen;
  for (double c : scales)
    for (double kappa : scales) {
      if (std::find(seen.begin(), seen.end(), std::make_pair(c, kappa)) !=
          seen.end())
        continue;
      seen.emplace_back(c, kappa);
      CalibrationCandidate cand;
      cand.c = c;
      cand.kappa = kappa;
      const TensorOp res_h = residue_fit(
          [&](Complex e) { return quantum_with(c, kappa, e, z0); }, eps);
      const TensorOp res_z = residue_fit(
          [&](Complex e) { return quantum_with(c, kappa, h0, e); }, eps);
      cand.residue_super = matnorm(res_h - one);
      cand.residue_arg = matnorm(res_z - perm);
      cand.residues_pass = cand.residue_super < 1e-5 && cand.residue_arg < 1e-5;
      if (cand.residues_pass) survivors.emplace_back(c, kappa);
      table.push_back(cand);
    }

  if (survivors.empty())
    throw CalibrationFailed(
        "no (c, kappa) candidate satisfies both residue conditions");

  report_.candidates = std::move(table);
  report_.ambiguous = survivors.size() > 1;
  c_ = survivors.front().first;
  kappa_ = survivors.front().second;
  for (const auto& cand : report_.candidates)
    if (cand.c == c_ && cand.kappa == kappa_) {
      report_.residue_super = cand.residue_super;
      report_.residue_arg = cand.residue_arg;
    }
  report_.c = c_;
  report_.kappa = kappa_;

  // Axiom gate on the survivor: associative Yang-Baxter, swap and
  // unitarity on a short deterministic sample set.
  GateSampler sampler;
  const double guard = std::min(5e-2, 0.25 / n);
  auto guarded_draw = [&](auto dist_fn) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const Complex u = sampler.draw();
      if (dist_fn(u) >= guard) return u;
    }
    throw CalibrationFailed("calibration sampling failed to find guarded points");
  };

  double worst_aybe = 0.0, worst_swap = 0.0, worst_unit = 0.0;
  for (int s = 0; s < 8; ++s) {
    const Complex z = guarded_draw([&](Complex u) { return superscript_distance(u); });
    Complex w;
    do {
      w = guarded_draw([&](Complex u) { return superscript_distance(u); });
    } while (superscript_distance(z - w) < guard);
    Complex q1 = guarded_draw([&](Complex u) { return argument_distance(u); });
    Complex q2, q3;
    do {
      q2 = guarded_draw([&](Complex u) { return argument_distance(u); });
      q3 = guarded_draw([&](Complex u) { return argument_distance(u); });
    } while (argument_distance(q1 - q2) < guard ||
             argument_distance(q2 - q3) < guard ||
             argument_distance(q1 - q3) < guard);

    const Complex q12 = q1 - q2, q23 = q2 - q3, q13 = q1 - q3;
    const ThreeOp lhs =
        compose(act_space(quantum(z, q12), 12), act_space(quantum(w, q23), 23));
    const ThreeOp rhs =
        compose(act_space(quantum(w, q13), 13), act_space(quantum(z - w, q12), 12)) +
        compose(act_space(quantum(w - z, q23), 23), act_space(quantum(z, q13), 13));
    worst_aybe = std::max(worst_aybe, matnorm(lhs - rhs));

    const TensorOp swap_lhs = quantum(z, q1);
    const TensorOp swap_rhs = compose(quantum(q1, z), perm);
    worst_swap = std::max(worst_swap, matnorm(swap_lhs - swap_rhs));

    const TensorOp prod = compose(quantum(z, q1), swap_spaces(quantum(z, -q1)));
    const TensorOp expect = (weierstrass(z) - weierstrass(q1)) * one;
    worst_unit = std::max(worst_unit, matnorm(prod - expect));
  }
  report_.aybe_gate = worst_aybe;
  report_.swap_gate = worst_swap;
  report_.unitarity_gate = worst_unit;

  if (worst_aybe > 1e-6 || worst_swap > 1e-6 || worst_unit > 1e-6) {
    std::ostringstream os;
    os << "calibrated candidate (c=" << c_ << ", kappa=" << kappa_
       << ") fails the axiom gate: aybe=" << worst_aybe
       << " swap=" << worst_swap << " unitarity=" << worst_unit;
    throw CalibrationFailed(os.str());
  }
}

ProviderPtr belavin_provider(const EllipticContext& ctx, int n) {
  return std::make_shared<BelavinProvider>(ctx, n);
}

TensorOp classical_from_swap(const RProvider& p, Complex z) {
  return compose(p.finite_part_arg(z), permutation_op(p.site_dim()));
}

ProviderPtr make_provider(const EllipticContext& ctx, int n) {
  if (n == 1) return scalar_provider(ctx);
  return belavin_provider(ctx, n);
}

}  // namespace laxtop
