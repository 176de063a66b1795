#include "laxtop/lax.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"

namespace laxtop {

namespace {

void require_pair_regular(const RProvider& p, Complex u, int i, int j,
                          const char* what) {
  const double d = p.argument_distance(u);
  const double guard = p.context().pole_guard;
  if (d < guard) {
    std::ostringstream os;
    os << what << ": pair (" << i << "," << j << ") argument (" << u.real()
       << "," << u.imag() << ") at distance " << d << " < pole guard " << guard;
    throw NearPole(os.str());
  }
}

// tr_2(A P S_2) for a two-space operator A.
Matrix trace_with_perm(const TensorOp& a, const TensorOp& perm,
                       const Matrix& s) {
  return tr2_contract(compose(a, perm), s);
}

struct BoxMuller {
  std::mt19937_64 rng;
  explicit BoxMuller(std::uint64_t seed) : rng(seed) {}
  double normal() {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double u1 = 0.0;
    do {
      u1 = u(rng);
    } while (u1 <= 1e-300);
    const double u2 = u(rng);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238 * u2);
  }
  Complex cnormal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im) * (1.0 / std::sqrt(2.0));
  }
};

std::vector<Complex> grid_positions(int M, BoxMuller& bm) {
  std::vector<Complex> q(M);
  for (int i = 0; i < M; ++i)
    q[i] = Complex((i - 0.5 * (M - 1)) * 0.29, 0.0) + 0.02 * bm.cnormal();
  return q;
}

void rescale_spins(std::vector<Matrix>& blocks, double scale) {
  double maxabs = 0.0;
  for (const auto& b : blocks) maxabs = std::max(maxabs, matnorm(b));
  if (maxabs == 0.0) return;
  for (auto& b : blocks) b *= Complex(scale / maxabs, 0.0);
}

}  // namespace

PhaseState::PhaseState(int N_in, int M_in, Complex eta_in)
    : N(N_in),
      M(M_in),
      eta(eta_in),
      q(M_in),
      qdot(M_in),
      S(static_cast<size_t>(M_in) * M_in, Matrix(N_in)) {
  if (N < 1 || M < 1) throw DimensionMismatch("PhaseState requires N, M >= 1");
}

const Matrix& PhaseState::spin(int i, int j) const {
  if (i < 0 || i >= M || j < 0 || j >= M)
    throw IndexOutOfRange("PhaseState::spin index out of range");
  return S[static_cast<size_t>(i) * M + j];
}

Matrix& PhaseState::spin(int i, int j) {
  if (i < 0 || i >= M || j < 0 || j >= M)
    throw IndexOutOfRange("PhaseState::spin index out of range");
  return S[static_cast<size_t>(i) * M + j];
}

Complex PhaseState::spin_trace(int i) const { return spin(i, i).trace(); }

double PhaseState::off_shell_norm() const {
  double worst = 0.0;
  for (int i = 0; i < M; ++i) worst = std::max(worst, std::abs(mu(i)));
  return worst;
}

void PhaseState::sync_qdot() {
  for (int i = 0; i < M; ++i) qdot[i] = spin_trace(i);
}

PhaseState random_state(int N, int M, Complex eta, std::uint64_t seed,
                        double scale) {
  BoxMuller bm(seed);
  PhaseState st(N, M, eta);
  st.q = grid_positions(M, bm);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      Matrix& b = st.spin(i, j);
      for (int a = 0; a < N; ++a)
        for (int c = 0; c < N; ++c) b(a, c) = bm.cnormal();
    }
  rescale_spins(st.S, scale);
  st.sync_qdot();
  return st;
}

PhaseState rank1_state(int N, int M, Complex eta, std::uint64_t seed,
                       double scale) {
  BoxMuller bm(seed);
  PhaseState st(N, M, eta);
  st.q = grid_positions(M, bm);
  const int nm = N * M;
  std::vector<Complex> xi(nm), psi(nm);
  for (auto& v : xi) v = bm.cnormal();
  for (auto& v : psi) v = bm.cnormal();
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      Matrix& b = st.spin(i, j);
      for (int a = 0; a < N; ++a)
        for (int c = 0; c < N; ++c) b(a, c) = xi[i * N + a] * psi[j * N + c];
    }
  rescale_spins(st.S, scale);
  st.sync_qdot();
  return st;
}

BlockMatrix build_L(const RProvider& p, const PhaseState& st, Complex z) {
  const TensorOp perm = permutation_op(st.N);
  BlockMatrix L(st.N, st.M);
  for (int i = 0; i < st.M; ++i)
    for (int j = 0; j < st.M; ++j) {
      const Complex arg = st.q[i] - st.q[j] + st.eta;
      require_pair_regular(p, arg, i, j, "build_L");
      L.set_block(i, j, trace_with_perm(p.quantum(z, arg), perm, st.spin(i, j)));
    }
  return L;
}

BlockMatrix build_M(const RProvider& p, const PhaseState& st, Complex z) {
  const TensorOp perm = permutation_op(st.N);
  const TensorOp finite = p.finite_part_arg(z);
  BlockMatrix Mm(st.N, st.M);
  for (int i = 0; i < st.M; ++i)
    for (int j = 0; j < st.M; ++j) {
      if (i == j) {
        Mm.set_block(i, i, Complex(-1.0, 0.0) *
                               trace_with_perm(finite, perm, st.spin(i, i)));
      } else {
        const Complex arg = st.q[i] - st.q[j];
        require_pair_regular(p, arg, i, j, "build_M");
        Mm.set_block(i, j, Complex(-1.0, 0.0) * trace_with_perm(
                                                    p.quantum(z, arg), perm,
                                                    st.spin(i, j)));
      }
    }
  return Mm;
}

Matrix J_eta(const RProvider& p, Complex eta, const Matrix& x) {
  const TensorOp kernel = p.finite_part_arg(eta) - p.classical_finite();
  return tr2_contract(kernel, x);
}

Matrix J_eta_q(const RProvider& p, Complex eta, Complex q, const Matrix& x) {
  const TensorOp kernel = p.finite_part_arg(q + eta) - p.finite_part_arg(q);
  return tr2_contract(kernel, x);
}

std::vector<Matrix> spin_derivative(const RProvider& p, const PhaseState& st) {
  const int M = st.M;
  const TensorOp k_eta = p.finite_part_arg(st.eta) - p.classical_finite();
  // Kernels of J^{eta, q_ik} for every ordered pair.
  std::vector<TensorOp> pair_kernel(static_cast<size_t>(M) * M);
  for (int i = 0; i < M; ++i)
    for (int k = 0; k < M; ++k) {
      if (i == k) continue;
      const Complex qik = st.q[i] - st.q[k];
      pair_kernel[static_cast<size_t>(i) * M + k] =
          p.finite_part_arg(qik + st.eta) - p.finite_part_arg(qik);
    }
  auto j_pair = [&](int i, int k, const Matrix& x) {
    return tr2_contract(pair_kernel[static_cast<size_t>(i) * M + k], x);
  };

  std::vector<Matrix> j_diag(M);
  for (int i = 0; i < M; ++i) j_diag[i] = tr2_contract(k_eta, st.spin(i, i));

  std::vector<Matrix> dS(static_cast<size_t>(M) * M, Matrix(st.N));
  for (int i = 0; i < M; ++i) {
    Matrix acc = commutator(st.spin(i, i), j_diag[i]);
    for (int k = 0; k < M; ++k) {
      if (k == i) continue;
      acc += st.spin(i, k) * j_pair(k, i, st.spin(k, i)) -
             j_pair(i, k, st.spin(i, k)) * st.spin(k, i);
    }
    dS[static_cast<size_t>(i) * M + i] = std::move(acc);
  }
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      if (i == j) continue;
      Matrix acc = st.spin(i, j) * j_diag[j] - j_diag[i] * st.spin(i, j);
      for (int k = 0; k < M; ++k) {
        if (k != j) acc += st.spin(i, k) * j_pair(k, j, st.spin(k, j));
        if (k != i) acc -= j_pair(i, k, st.spin(i, k)) * st.spin(k, j);
      }
      dS[static_cast<size_t>(i) * M + j] = std::move(acc);
    }
  return dS;
}

StateDerivative eom_rhs(const RProvider& p, const PhaseState& st, bool strict) {
  if (strict && st.off_shell_norm() > 1e-10) {
    std::ostringstream os;
    os << "eom_rhs: state violates the on-shell constraint by "
       << st.off_shell_norm();
    throw OffShell(os.str());
  }
  StateDerivative d;
  d.dq.resize(st.M);
  for (int i = 0; i < st.M; ++i) d.dq[i] = st.spin_trace(i);
  d.dS = spin_derivative(p, st);
  return d;
}

double lax_residual(const RProvider& p, const PhaseState& st, Complex z,
                    bool include_extra) {
  const TensorOp perm = permutation_op(st.N);
  const BlockMatrix L = build_L(p, st, z);
  const BlockMatrix Mm = build_M(p, st, z);
  const std::vector<Matrix> dS = spin_derivative(p, st);

  BlockMatrix residual = commutator(L, Mm) * Complex(-1.0, 0.0);
  for (int i = 0; i < st.M; ++i)
    for (int j = 0; j < st.M; ++j) {
      const Complex arg = st.q[i] - st.q[j] + st.eta;
      const Matrix f_term =
          trace_with_perm(p.f_derivative(z, arg), perm, st.spin(i, j));
      // Ldot by the chain rule: q-dependence through F, spins through
      // the equations of motion.
      Matrix ldot = trace_with_perm(p.quantum(z, arg), perm,
                                    dS[static_cast<size_t>(i) * st.M + j]);
      ldot += (st.qdot[i] - st.qdot[j]) * f_term;
      Matrix entry = residual.block(i, j) + ldot;
      if (include_extra) entry -= (st.mu(i) - st.mu(j)) * f_term;
      residual.set_block(i, j, std::move(entry));
    }
  return matnorm(residual);
}

double rank1_check(const PhaseState& st) {
  const TensorOp perm = permutation_op(st.N);
  const Matrix one = Matrix::identity(st.N);
  double worst = 0.0;
  for (int i = 0; i < st.M; ++i)
    for (int k = 0; k < st.M; ++k) {
      if (i == k) continue;
      const TensorOp lhs =
          compose(compose(tensor_product(st.spin(i, k), one), perm),
                  tensor_product(st.spin(k, i), one));
      const TensorOp rhs = tensor_product(st.spin(i, i), st.spin(k, k));
      worst = std::max(worst, matnorm(lhs - rhs));
    }
  return worst;
}

Rank1Derivative rank1_eom(const RProvider& p, const PhaseState& st) {
  const double res = rank1_check(st);
  if (res >= 1e-10) {
    std::ostringstream os;
    os << "rank1_eom: rank-one residual " << res << " >= 1e-10";
    throw NotRankOne(os.str());
  }
  const int M = st.M;
  const TensorOp perm = permutation_op(st.N);
  const TensorOp k_eta = p.finite_part_arg(st.eta) - p.classical_finite();

  Rank1Derivative d;
  d.dq.resize(M);
  d.dS_diag.resize(M);
  for (int i = 0; i < M; ++i) {
    Matrix acc = commutator(st.spin(i, i), tr2_contract(k_eta, st.spin(i, i)));
    for (int k = 0; k < M; ++k) {
      if (k == i) continue;
      const Complex qki = st.q[k] - st.q[i];
      const Complex qik = st.q[i] - st.q[k];
      const TensorOp kernel_ki =
          p.finite_part_arg(qki + st.eta) - p.finite_part_arg(qki);
      const TensorOp kernel_ik =
          p.finite_part_arg(qik + st.eta) - p.finite_part_arg(qik);
      const Matrix jt = tr2_contract(compose(perm, kernel_ki), st.spin(k, k));
      const Matrix jb = tr2_contract(compose(kernel_ik, perm), st.spin(k, k));
      acc += st.spin(i, i) * jt - jb * st.spin(i, i);
    }
    d.dS_diag[i] = std::move(acc);
    d.dq[i] = st.spin_trace(i);
  }
  return d;
}

Matrix spin_rs_L(const EllipticContext& ctx, const PhaseState& st, Complex z) {
  if (st.N != 1) throw DimensionMismatch("spin_rs_L requires N = 1");
  Matrix L(st.M);
  for (int i = 0; i < st.M; ++i)
    for (int j = 0; j < st.M; ++j)
      L(i, j) = st.spin(i, j)(0, 0) *
                kronecker_phi(ctx, z, st.q[i] - st.q[j] + st.eta);
  return L;
}

Matrix spin_rs_M(const EllipticContext& ctx, const PhaseState& st, Complex z) {
  if (st.N != 1) throw DimensionMismatch("spin_rs_M requires N = 1");
  Matrix Mm(st.M);
  for (int i = 0; i < st.M; ++i)
    for (int j = 0; j < st.M; ++j) {
      if (i == j)
        Mm(i, i) = -(e1(ctx, z) + e1(ctx, st.eta)) * st.spin(i, i)(0, 0);
      else
        Mm(i, j) = -st.spin(i, j)(0, 0) *
                   kronecker_phi(ctx, z, st.q[i] - st.q[j]);
    }
  return Mm;
}

Matrix spin_rs_eom(const EllipticContext& ctx, const PhaseState& st) {
  if (st.N != 1) throw DimensionMismatch("spin_rs_eom requires N = 1");
  const int M = st.M;
  auto S = [&](int i, int j) { return st.spin(i, j)(0, 0); };
  Matrix dS(M);
  for (int i = 0; i < M; ++i) {
    Complex acc{};
    for (int k = 0; k < M; ++k) {
      if (k == i) continue;
      const Complex qik = st.q[i] - st.q[k];
      acc -= S(i, k) * S(k, i) *
             (e1(ctx, qik + st.eta) + e1(ctx, qik - st.eta) -
              2.0 * e1(ctx, qik));
    }
    dS(i, i) = acc;
  }
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      if (i == j) continue;
      Complex acc{};
      for (int k = 0; k < M; ++k) {
        if (k != j) {
          const Complex qkj = st.q[k] - st.q[j];
          acc += S(i, k) * S(k, j) * (e1(ctx, qkj + st.eta) - e1(ctx, qkj));
        }
        if (k != i) {
          const Complex qik = st.q[i] - st.q[k];
          acc -= S(i, k) * S(k, j) * (e1(ctx, qik + st.eta) - e1(ctx, qik));
        }
      }
      dS(i, j) = acc;
    }
  return dS;
}

Matrix top_L(const RProvider& p, const PhaseState& st, Complex z) {
  if (st.M != 1) throw DimensionMismatch("top_L requires M = 1");
  return tr2_contract(p.quantum(st.eta, z), st.spin(0, 0));
}

Matrix top_M(const RProvider& p, const PhaseState& st, Complex z) {
  if (st.M != 1) throw DimensionMismatch("top_M requires M = 1");
  return Complex(-1.0, 0.0) * tr2_contract(p.classical_r(z), st.spin(0, 0));
}

Matrix top_eom(const RProvider& p, const PhaseState& st) {
  if (st.M != 1) throw DimensionMismatch("top_eom requires M = 1");
  return commutator(st.spin(0, 0), J_eta(p, st.eta, st.spin(0, 0)));
}

namespace {

nlohmann::ordered_json complex_to_json(Complex v) {
  return nlohmann::ordered_json::array({v.real(), v.imag()});
}

Complex complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError("complex value must be a [re, im] array");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string state_to_json(const PhaseState& st) {
  nlohmann::ordered_json j;
  j["N"] = st.N;
  j["M"] = st.M;
  j["eta"] = complex_to_json(st.eta);
  auto qs = nlohmann::ordered_json::array();
  for (Complex v : st.q) qs.push_back(complex_to_json(v));
  j["q"] = std::move(qs);
  auto qds = nlohmann::ordered_json::array();
  for (Complex v : st.qdot) qds.push_back(complex_to_json(v));
  j["qdot"] = std::move(qds);
  auto blocks = nlohmann::ordered_json::array();
  for (int i = 0; i < st.M; ++i) {
    auto row = nlohmann::ordered_json::array();
    for (int jj = 0; jj < st.M; ++jj) {
      auto block = nlohmann::ordered_json::array();
      for (int a = 0; a < st.N; ++a) {
        auto brow = nlohmann::ordered_json::array();
        for (int c = 0; c < st.N; ++c)
          brow.push_back(complex_to_json(st.spin(i, jj)(a, c)));
        block.push_back(std::move(brow));
      }
      row.push_back(std::move(block));
    }
    blocks.push_back(std::move(row));
  }
  j["S"] = std::move(blocks);
  return j.dump();
}

PhaseState state_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("state JSON parse error: ") + e.what());
  }
  try {
    PhaseState st(j.at("N").get<int>(), j.at("M").get<int>(),
                  complex_from_json(j.at("eta")));
    const auto& q = j.at("q");
    const auto& qdot = j.at("qdot");
    if (static_cast<int>(q.size()) != st.M ||
        static_cast<int>(qdot.size()) != st.M)
      throw ConfigError("state JSON: q/qdot size does not match M");
    for (int i = 0; i < st.M; ++i) {
      st.q[i] = complex_from_json(q[i]);
      st.qdot[i] = complex_from_json(qdot[i]);
    }
    const auto& blocks = j.at("S");
    if (static_cast<int>(blocks.size()) != st.M)
      throw ConfigError("state JSON: S grid does not match M");
    for (int i = 0; i < st.M; ++i) {
      if (static_cast<int>(blocks[i].size()) != st.M)
        throw ConfigError("state JSON: S grid does not match M");
      for (int jj = 0; jj < st.M; ++jj) {
        const auto& block = blocks[i][jj];
        if (static_cast<int>(block.size()) != st.N)
          throw ConfigError("state JSON: spin block does not match N");
        for (int a = 0; a < st.N; ++a) {
          if (static_cast<int>(block[a].size()) != st.N)
            throw ConfigError("state JSON: spin block does not match N");
          for (int c = 0; c < st.N; ++c)
            st.spin(i, jj)(a, c) = complex_from_json(block[a][c]);
        }
      }
    }
    return st;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("state JSON structure error: ") + e.what());
  }
}

}  // namespace laxtop
