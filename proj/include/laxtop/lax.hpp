#pragma once

#include <cstdint>
#include <vector>

#include "laxtop/rmatrix.hpp"

namespace laxtop {

// Dynamical state of the GL(NM) system: positions q_i, velocities
// qdot_i and the M x M grid of N x N spin blocks S^{ij}. On shell,
// qdot_i = tr S^{ii}; qdot is stored separately because the modified
// Lax equation is only visible off shell.
struct PhaseState {
  int N = 1;
  int M = 1;
  Complex eta;
  std::vector<Complex> q;
  std::vector<Complex> qdot;
  std::vector<Matrix> S;  // row-major M x M grid

  PhaseState() = default;
  PhaseState(int N_in, int M_in, Complex eta_in);

  const Matrix& spin(int i, int j) const;
  Matrix& spin(int i, int j);
  Complex spin_trace(int i) const;  // tr S^{ii}
  Complex mu(int i) const { return qdot[i] - spin_trace(i); }
  double off_shell_norm() const;
  void sync_qdot();  // qdot_i := tr S^{ii}
};

// Seeded generators. Spin entries are complex Gaussian via Box-Muller
// (platform-independent), scaled to max-abs `scale`; positions are
// spread on a deterministic grid with a seeded jitter. States come out
// on shell.
PhaseState random_state(int N, int M, Complex eta, std::uint64_t seed,
                        double scale = 1.0);
// Full spin matrix is the outer product of two seeded NM-vectors.
PhaseState rank1_state(int N, int M, Complex eta, std::uint64_t seed,
                       double scale = 1.0);

// Block Lax matrices:
//   L^{ij}(z) = tr_2(R^z(q_ij + eta) P S^{ij}_2)
//   M^{ij}(z) = -delta^{ij} tr_2(R^{(0),z} P S^{ii}_2)
//               - (1-delta^{ij}) tr_2(R^z(q_ij) P S^{ij}_2)
BlockMatrix build_L(const RProvider& p, const PhaseState& st, Complex z);
BlockMatrix build_M(const RProvider& p, const PhaseState& st, Complex z);

// Inertia-type linear functionals:
//   J_eta(X)   = tr_2((R^{(0),eta} - r^{(0)}) X_2)
//   J_eta_q(X) = tr_2((R^{(0),q+eta} - R^{(0),q}) X_2)
Matrix J_eta(const RProvider& p, Complex eta, const Matrix& x);
Matrix J_eta_q(const RProvider& p, Complex eta, Complex q, const Matrix& x);

// Spin part of the equations of motion (independent of qdot):
//   dS^{ii} = [S^{ii}, J_eta(S^{ii})]
//             + sum_{k != i} (S^{ik} J_eta_q(q_ki, S^{ki})
//                             - J_eta_q(q_ik, S^{ik}) S^{ki})
//   dS^{ij} = S^{ij} J_eta(S^{jj}) - J_eta(S^{ii}) S^{ij}
//             + sum_{k != j} S^{ik} J_eta_q(q_kj, S^{kj})
//             - sum_{k != i} J_eta_q(q_ik, S^{ik}) S^{kj}
std::vector<Matrix> spin_derivative(const RProvider& p, const PhaseState& st);

struct StateDerivative {
  std::vector<Complex> dq;
  std::vector<Matrix> dS;
};

// Full on-shell derivative: dq_i = tr S^{ii}, dS as above. In strict
// mode throws OffShell when |qdot_i - tr S^{ii}| > 1e-10.
StateDerivative eom_rhs(const RProvider& p, const PhaseState& st,
                        bool strict = true);

// Max-abs-entry norm of
//   Ldot(z) - [L(z), M(z)] - sum_{ij} (mu_i - mu_j) E_ij (x)
//       tr_2(F^z(q_ij + eta) P S^{ij}_2)
// with Ldot assembled by the chain rule through F and spin_derivative.
// With include_extra = false the mu-term is omitted.
double lax_residual(const RProvider& p, const PhaseState& st, Complex z,
                    bool include_extra = true);

// Max over i != k of || S^{ik}_1 P S^{ki}_1 - S^{ii}_1 S^{kk}_2 ||;
// zero exactly on rank-one spin matrices.
double rank1_check(const PhaseState& st);

struct Rank1Derivative {
  std::vector<Complex> dq;
  std::vector<Matrix> dS_diag;
};

// Diagonal-block dynamics on the rank-one locus, computed without the
// off-diagonal blocks:
//   dS^{ii} = [S^{ii}, J_eta(S^{ii})]
//             + sum_{k != i} (S^{ii} Jt_eta_q(q_ki, S^{kk})
//                             - Jb_eta_q(q_ik, S^{kk}) S^{ii})
// with Jt(X) = tr_2(P K X_2) and Jb(X) = tr_2(K P X_2) for the kernel
// K of J_eta_q. Throws NotRankOne unless rank1_check(st) < 1e-10.
Rank1Derivative rank1_eom(const RProvider& p, const PhaseState& st);

// ---- printed reference reductions ----

// N=1 spin many-body formulas (M x M scalar matrices):
//   L_ij(z) = S_ij phi(z, q_ij + eta)
//   M_ij(z) = -delta_ij (E1(z) + E1(eta)) S_ii - (1-delta_ij) S_ij phi(z, q_ij)
Matrix spin_rs_L(const EllipticContext& ctx, const PhaseState& st, Complex z);
Matrix spin_rs_M(const EllipticContext& ctx, const PhaseState& st, Complex z);
// Sdot_ii = -sum_{k!=i} S_ik S_ki (E1(q_ik+eta) + E1(q_ik-eta) - 2 E1(q_ik))
// Sdot_ij = sum_{k!=j} S_ik S_kj (E1(q_kj+eta) - E1(q_kj))
//           - sum_{k!=i} S_ik S_kj (E1(q_ik+eta) - E1(q_ik))
Matrix spin_rs_eom(const EllipticContext& ctx, const PhaseState& st);

// M=1 relativistic-top formulas via the independent route:
//   L(z) = tr_2(R^eta(z) S_2),  M(z) = -tr_2(r(z) S_2),
//   Sdot = [S, J(S)] with J = J_eta.
Matrix top_L(const RProvider& p, const PhaseState& st, Complex z);
Matrix top_M(const RProvider& p, const PhaseState& st, Complex z);
Matrix top_eom(const RProvider& p, const PhaseState& st);

// ---- state snapshots ----

// JSON object {N, M, eta, q[], qdot[], S as nested arrays of [re,im]},
// bit-exact round trip.
std::string state_to_json(const PhaseState& st);
PhaseState state_from_json(const std::string& text);

}  // namespace laxtop
