#pragma once

#include <memory>
#include <vector>

#include "laxtop/specfun.hpp"
#include "laxtop/tensorops.hpp"

namespace laxtop {

// Contract for quantum R-matrices and their derived objects. The
// convention throughout: quantum(h, z) is R^h(z) with superscript h
// and argument z, reducing to phi(h, z) at site dimension 1.
//
// Pole structure: simple pole in h at 0 with residue 1 (x) 1, simple
// pole in z at 0 with residue P.
class RProvider {
 public:
  virtual ~RProvider() = default;

  virtual int site_dim() const = 0;
  virtual const EllipticContext& context() const = 0;

  // R^h(z)
  virtual TensorOp quantum(Complex h, Complex z) const = 0;
  // F^h(z) = d/dz R^h(z), derivative in the argument
  virtual TensorOp f_derivative(Complex h, Complex z) const = 0;
  // d/dh R^h(z), derivative in the superscript
  virtual TensorOp d_superscript(Complex h, Complex z) const = 0;
  // classical r-matrix: finite part of R^h(z) as h -> 0
  virtual TensorOp classical_r(Complex z) const = 0;
  // R^{x,(0)}: finite part of R^x(q) as q -> 0
  virtual TensorOp finite_part_arg(Complex x) const = 0;
  // r^{(0)}: finite part of r(z) as z -> 0
  virtual TensorOp classical_finite() const = 0;
  // coefficient of h^1 in the expansion of R^h(z) around h = 0
  virtual TensorOp hbar_linear_coeff(Complex z) const = 0;
  // The Weierstrass-type function appearing in the unitarity relation
  // R^z_12(q) R^z_21(-q) = (wp(z) - wp(q)) 1(x)1 for this provider.
  virtual Complex weierstrass(Complex u) const = 0;

  // Distances to the singular sets of the argument and superscript
  // slots; used by callers to screen inputs.
  virtual double argument_distance(Complex u) const = 0;
  virtual double superscript_distance(Complex u) const = 0;
};

using ProviderPtr = std::shared_ptr<const RProvider>;

// N=1 provider: quantum(h, z) = phi(h, z) for the regime of ctx.
ProviderPtr scalar_provider(const EllipticContext& ctx);

// Clock-and-shift basis T_a, a in Z_n x Z_n, with
// T_a = exp(pi i a1 a2 / n) Q^{a1} Lambda^{a2} and half-periods
// omega_a = (a1 + a2 tau)/n.
struct WeylBasis {
  explicit WeylBasis(int n);

  int n;
  Matrix clock;  // Q
  Matrix shift;  // Lambda
  std::vector<Matrix> T;        // index a1*n + a2
  std::vector<TensorOp> TxTm;   // T_a (x) T_{-a}

  int index(int a1, int a2) const { return a1 * n + a2; }
  const Matrix& t(int a1, int a2) const { return T[index(a1, a2)]; }
};

// One calibration candidate and its residue fit residuals.
struct CalibrationCandidate {
  double c = 1.0;
  double kappa = 1.0;
  double residue_super = 0.0;  // |Res_h R^h(z) - 1(x)1|
  double residue_arg = 0.0;    // |Res_z R^h(z) - P|
  bool residues_pass = false;
};

struct CalibrationReport {
  double c = 1.0;
  double kappa = 1.0;
  double residue_super = 0.0;
  double residue_arg = 0.0;
  double aybe_gate = 0.0;
  double swap_gate = 0.0;
  double unitarity_gate = 0.0;
  bool ambiguous = false;
  std::vector<CalibrationCandidate> candidates;
};

// Elliptic GL(n) provider in the clock-and-shift basis,
//   R^h(z) = c * sum_a exp(2 pi i a2 kappa z / n)
//                    phi(kappa z, h + omega_a) T_a (x) T_{-a},
// with (c, kappa) selected from {1, 1/n, n}^2 by the residue conditions
// and a short axiom gate at construction. Derived objects are computed
// analytically from the per-term phi structure.
class BelavinProvider : public RProvider {
 public:
  BelavinProvider(const EllipticContext& ctx, int n);

  int site_dim() const override { return basis_.n; }
  const EllipticContext& context() const override { return ctx_; }

  TensorOp quantum(Complex h, Complex z) const override;
  TensorOp f_derivative(Complex h, Complex z) const override;
  TensorOp d_superscript(Complex h, Complex z) const override;
  TensorOp classical_r(Complex z) const override;
  TensorOp finite_part_arg(Complex x) const override;
  TensorOp classical_finite() const override { return r0_; }
  TensorOp hbar_linear_coeff(Complex z) const override;
  Complex weierstrass(Complex u) const override;

  double argument_distance(Complex u) const override;
  double superscript_distance(Complex u) const override;

  const CalibrationReport& calibration() const { return report_; }

 private:
  TensorOp quantum_with(double c, double kappa, Complex h, Complex z) const;
  Complex omega(int a1, int a2) const;
  void calibrate();

  EllipticContext ctx_;
  WeylBasis basis_;
  double c_ = 1.0;
  double kappa_ = 1.0;
  TensorOp r0_;
  CalibrationReport report_;
};

ProviderPtr belavin_provider(const EllipticContext& ctx, int n);

// r(z) reconstructed from the argument finite part via the swap
// property: finite_part_arg(z) composed with P. Must agree with
// classical_r(z).
TensorOp classical_from_swap(const RProvider& p, Complex z);

// Provider for a run configuration: scalar for n = 1, Belavin for
// elliptic n >= 2. Throws WrongRegime for n >= 2 outside the elliptic
// regime.
ProviderPtr make_provider(const EllipticContext& ctx, int n);

}  // namespace laxtop
