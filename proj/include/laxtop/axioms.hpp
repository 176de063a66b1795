#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "laxtop/rmatrix.hpp"

namespace laxtop {

// Deterministic sampling plan for the identity verifiers. For a fixed
// seed the accepted sample sequence is reproducible regardless of the
// evaluation schedule.
struct SamplePlan {
  std::uint64_t seed = 1;
  int count = 200;
  double lo = -0.5;   // per-component box for every complex variable
  double hi = 0.5;
  double pole_guard = 5e-2;
};

struct IdentityReport {
  std::string identity;
  int requested = 0;
  int accepted = 0;
  int skipped = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  // Variable name -> value at the worst sample.
  std::vector<std::pair<std::string, Complex>> worst_point;
};

// ---- scalar identity suite (Kronecker function level) ----

IdentityReport check_fay(const EllipticContext& ctx, const SamplePlan& plan,
                         double tol);
// phi(z,q1) phi(z,q2) = phi(z,q1+q2)(E1(z)+E1(q1)+E1(q2)-E1(q1+q2+z))
IdentityReport check_degeneration(const EllipticContext& ctx,
                                  const SamplePlan& plan, double tol);
// phi(z,q) phi(z,-q) = wp(z) - wp(q)
IdentityReport check_unitarity_scalar(const EllipticContext& ctx,
                                      const SamplePlan& plan, double tol);
// phi(z,q1) phi(z,q2) = phi(z,q1+q2)(E1(q1)+E1(q2)) - d/dz phi(z,q1+q2)
IdentityReport check_rewritten(const EllipticContext& ctx,
                               const SamplePlan& plan, double tol);
// phi(z+1,q) = phi(z,q) and phi(z+tau,q) = exp(-2 pi i q) phi(z,q)
IdentityReport check_quasi_periodicity(const EllipticContext& ctx,
                                       const SamplePlan& plan, double tol);

std::vector<IdentityReport> scalar_identity_suite(const EllipticContext& ctx,
                                                  const SamplePlan& plan,
                                                  double tol);

// ---- R-matrix axiom suite ----

IdentityReport check_aybe(const RProvider& p, const SamplePlan& plan, double tol);
IdentityReport check_skew(const RProvider& p, const SamplePlan& plan, double tol);
IdentityReport check_unitarity(const RProvider& p, const SamplePlan& plan,
                               double tol);
// Combined report: max of skew and unitarity residuals.
IdentityReport check_unitarity_skew(const RProvider& p, const SamplePlan& plan,
                                    double tol);
IdentityReport check_qybe(const RProvider& p, const SamplePlan& plan, double tol);
// R12^z(x) R23^z(y) = R13^z(x+y) r12(x) + r23(y) R13^z(x+y) - dz R13^z(x+y)
IdentityReport check_master(const RProvider& p, const SamplePlan& plan,
                            double tol);
// The x->0, y->0, combined and shifted degenerations of the master
// identity, in that order.
std::vector<IdentityReport> check_degenerations(const RProvider& p,
                                                const SamplePlan& plan,
                                                double tol);
// R^z(q) = R^q(z) P
IdentityReport check_swap(const RProvider& p, const SamplePlan& plan, double tol);
// hbar-expansion: the analytic h-linear coefficient equals
// (1/2)(r(z)^2 - wp(z) 1(x)1); the finite-difference convergence of the
// remainder is cross-checked at hbar in {1e-2, 1e-3}.
IdentityReport check_classical_limit(const RProvider& p, const SamplePlan& plan,
                                     double tol);

// Every provider-level check above, in a fixed order.
std::vector<IdentityReport> provider_suite(const RProvider& p,
                                           const SamplePlan& plan, double tol);

// Thread budget used for sample evaluation: LAXTOP_THREADS when set
// and positive, hardware concurrency otherwise.
unsigned thread_budget();

// JSON array with one object per report: identity, requested, accepted,
// skipped, max_residual, tolerance, pass, worst_point.
std::string reports_to_json(const std::vector<IdentityReport>& reports);

}  // namespace laxtop
