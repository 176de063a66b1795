#include "laxtop/axioms.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

namespace laxtop {

namespace {

using Sample = std::vector<Complex>;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void parallel_for(int count, const std::function<void(int)>& fn) {
  const unsigned budget = thread_budget();
  if (budget <= 1 || count < 16) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  const unsigned workers = std::min<unsigned>(budget, (count + 15) / 16);
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

constexpr double kSkipped = -1.0;

// Generic identity runner: deterministic rejection sampling against the
// guard, parallel residual evaluation, associative max reduction with
// lowest-index tie break.
IdentityReport run_identity(
    const std::string& name, const SamplePlan& plan, double tol,
    const std::vector<std::string>& vars,
    const std::function<double(const Sample&)>& guard_distance,
    const std::function<double(const Sample&)>& residual) {
  IdentityReport rep;
  rep.identity = name;
  rep.requested = plan.count;
  rep.tolerance = tol;

  std::mt19937_64 rng(plan.seed ^ fnv1a(name));
  std::uniform_real_distribution<double> dist(plan.lo, plan.hi);

  std::vector<Sample> samples;
  samples.reserve(plan.count);
  const long max_attempts = std::max<long>(1000, 60L * plan.count);
  for (long attempt = 0; attempt < max_attempts &&
                         static_cast<int>(samples.size()) < plan.count;
       ++attempt) {
    Sample s(vars.size());
    for (auto& v : s) v = Complex(dist(rng), dist(rng));
    if (guard_distance(s) < plan.pole_guard) {
      ++rep.skipped;
      continue;
    }
    samples.push_back(std::move(s));
  }

  std::vector<double> residuals(samples.size(), 0.0);
  parallel_for(static_cast<int>(samples.size()), [&](int i) {
    try {
      residuals[i] = residual(samples[i]);
    } catch (const NearPole&) {
      residuals[i] = kSkipped;
    }
  });

  int worst = -1;
  for (size_t i = 0; i < residuals.size(); ++i) {
    if (residuals[i] == kSkipped) {
      ++rep.skipped;
      continue;
    }
    ++rep.accepted;
    if (worst < 0 || residuals[i] > rep.max_residual) {
      rep.max_residual = residuals[i];
      worst = static_cast<int>(i);
    }
  }
  if (worst >= 0)
    for (size_t v = 0; v < vars.size(); ++v)
      rep.worst_point.emplace_back(vars[v], samples[worst][v]);
  rep.pass = rep.accepted > 0 && rep.max_residual < tol;
  return rep;
}

double min_ctx_distance(const EllipticContext& ctx,
                        std::initializer_list<Complex> pts) {
  double best = 1e300;
  for (Complex p : pts) best = std::min(best, singular_distance(ctx, p));
  return best;
}

struct ProviderDist {
  const RProvider& p;
  double args(std::initializer_list<Complex> pts) const {
    double best = 1e300;
    for (Complex u : pts) best = std::min(best, p.argument_distance(u));
    return best;
  }
  double supers(std::initializer_list<Complex> pts) const {
    double best = 1e300;
    for (Complex u : pts) best = std::min(best, p.superscript_distance(u));
    return best;
  }
};

}  // namespace

unsigned thread_budget() {
  if (const char* env = std::getenv("LAXTOP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

IdentityReport check_fay(const EllipticContext& ctx, const SamplePlan& plan,
                         double tol) {
  return run_identity(
      "fay", plan, tol, {"z1", "z2", "q1", "q2"},
      [&](const Sample& s) {
        const Complex z1 = s[0], z2 = s[1], q1 = s[2], q2 = s[3];
        return min_ctx_distance(
            ctx, {z1, z2, q1, q2, z1 + q1, z2 + q2, z1 - z2, z1 - z2 + q1,
                  q1 + q2, z2 + q1 + q2, z2 - z1 + q2, z1 + q1 + q2});
      },
      [&](const Sample& s) {
        const Complex z1 = s[0], z2 = s[1], q1 = s[2], q2 = s[3];
        const Complex lhs =
            kronecker_phi(ctx, z1, q1) * kronecker_phi(ctx, z2, q2);
        const Complex rhs =
            kronecker_phi(ctx, z1 - z2, q1) * kronecker_phi(ctx, z2, q1 + q2) +
            kronecker_phi(ctx, z2 - z1, q2) * kronecker_phi(ctx, z1, q1 + q2);
        return std::abs(lhs - rhs);
      });
}

IdentityReport check_degeneration(const EllipticContext& ctx,
                                  const SamplePlan& plan, double tol) {
  return run_identity(
      "degeneration", plan, tol, {"z", "q1", "q2"},
      [&](const Sample& s) {
        const Complex z = s[0], q1 = s[1], q2 = s[2];
        return min_ctx_distance(
            ctx, {z, q1, q2, q1 + q2, z + q1, z + q2, z + q1 + q2});
      },
      [&](const Sample& s) {
        const Complex z = s[0], q1 = s[1], q2 = s[2];
        const Complex lhs =
            kronecker_phi(ctx, z, q1) * kronecker_phi(ctx, z, q2);
        const Complex rhs =
            kronecker_phi(ctx, z, q1 + q2) *
            (e1(ctx, z) + e1(ctx, q1) + e1(ctx, q2) - e1(ctx, q1 + q2 + z));
        return std::abs(lhs - rhs);
      });
}

IdentityReport check_unitarity_scalar(const EllipticContext& ctx,
                                      const SamplePlan& plan, double tol) {
  return run_identity(
      "unitarity_scalar", plan, tol, {"z", "q"},
      [&](const Sample& s) {
        const Complex z = s[0], q = s[1];
        return min_ctx_distance(ctx, {z, q, z + q, z - q});
      },
      [&](const Sample& s) {
        const Complex z = s[0], q = s[1];
        const Complex lhs =
            kronecker_phi(ctx, z, q) * kronecker_phi(ctx, z, -q);
        return std::abs(lhs - (wp(ctx, z) - wp(ctx, q)));
      });
}

IdentityReport check_rewritten(const EllipticContext& ctx,
                               const SamplePlan& plan, double tol) {
  return run_identity(
      "rewritten_degeneration", plan, tol, {"z", "q1", "q2"},
      [&](const Sample& s) {
        const Complex z = s[0], q1 = s[1], q2 = s[2];
        return min_ctx_distance(
            ctx, {z, q1, q2, q1 + q2, z + q1, z + q2, z + q1 + q2});
      },
      [&](const Sample& s) {
        const Complex z = s[0], q1 = s[1], q2 = s[2];
        const Complex lhs =
            kronecker_phi(ctx, z, q1) * kronecker_phi(ctx, z, q2);
        const Complex rhs =
            kronecker_phi(ctx, z, q1 + q2) * (e1(ctx, q1) + e1(ctx, q2)) -
            phi_dz(ctx, z, q1 + q2);
        return std::abs(lhs - rhs);
      });
}

IdentityReport check_quasi_periodicity(const EllipticContext& ctx,
                                       const SamplePlan& plan, double tol) {
  if (ctx.regime != Regime::elliptic)
    throw WrongRegime("quasi-periodicity check requires the elliptic regime");
  const Complex two_pi_i{0.0, 2.0 * std::numbers::pi};
  return run_identity(
      "quasi_periodicity", plan, tol, {"z", "q"},
      [&](const Sample& s) {
        const Complex z = s[0], q = s[1];
        return min_ctx_distance(ctx, {z, q, z + q});
      },
      [&](const Sample& s) {
        const Complex z = s[0], q = s[1];
        const Complex base = kronecker_phi(ctx, z, q);
        const double r1 = std::abs(kronecker_phi(ctx, z + 1.0, q) - base);
        const double r2 = std::abs(kronecker_phi(ctx, z + ctx.tau, q) -
                                   std::exp(-two_pi_i * q) * base);
        return std::max(r1, r2);
      });
}

std::vector<IdentityReport> scalar_identity_suite(const EllipticContext& ctx,
                                                  const SamplePlan& plan,
                                                  double tol) {
  std::vector<IdentityReport> out;
  out.push_back(check_fay(ctx, plan, tol));
  out.push_back(check_degeneration(ctx, plan, tol));
  out.push_back(check_unitarity_scalar(ctx, plan, tol));
  out.push_back(check_rewritten(ctx, plan, tol));
  if (ctx.regime == Regime::elliptic)
    out.push_back(check_quasi_periodicity(ctx, plan, tol));
  return out;
}

IdentityReport check_aybe(const RProvider& p, const SamplePlan& plan,
                          double tol) {
  const ProviderDist d{p};
  return run_identity(
      "aybe", plan, tol, {"z", "w", "q1", "q2", "q3"},
      [&](const Sample& s) {
        const Complex z = s[0], w = s[1];
        const Complex q12 = s[2] - s[3], q23 = s[3] - s[4], q13 = s[2] - s[4];
        return std::min(d.supers({z, w, z - w}), d.args({q12, q23, q13}));
      },
      [&](const Sample& s) {
        const Complex z = s[0], w = s[1];
        const Complex q12 = s[2] - s[3], q23 = s[3] - s[4], q13 = s[2] - s[4];
        const ThreeOp lhs = compose(act_space(p.quantum(z, q12), 12),
                                    act_space(p.quantum(w, q23), 23));
        const ThreeOp rhs =
            compose(act_space(p.quantum(w, q13), 13),
                    act_space(p.quantum(z - w, q12), 12)) +
            compose(act_space(p.quantum(w - z, q23), 23),
                    act_space(p.quantum(z, q13), 13));
        return matnorm(lhs - rhs);
      });
}

IdentityReport check_skew(const RProvider& p, const SamplePlan& plan,
                          double tol) {
  const ProviderDist d{p};
  return run_identity(
      "skew_symmetry", plan, tol, {"z", "q"},
      [&](const Sample& s) {
        return std::min(d.supers({s[0], -s[0]}), d.args({s[1], -s[1]}));
      },
      [&](const Sample& s) {
        return matnorm(p.quantum(s[0], s[1]) +
                       swap_spaces(p.quantum(-s[0], -s[1])));
      });
}

IdentityReport check_unitarity(const RProvider& p, const SamplePlan& plan,
                               double tol) {
  const ProviderDist d{p};
  const TensorOp one = TensorOp::identity(p.site_dim());
  return run_identity(
      "unitarity", plan, tol, {"z", "q"},
      [&](const Sample& s) {
        return std::min({d.supers({s[0]}), d.args({s[1], -s[1]}),
                         d.args({s[0]})});
      },
      [&](const Sample& s) {
        const Complex z = s[0], q = s[1];
        const TensorOp prod =
            compose(p.quantum(z, q), swap_spaces(p.quantum(z, -q)));
        return matnorm(prod - (p.weierstrass(z) - p.weierstrass(q)) * one);
      });
}

IdentityReport check_unitarity_skew(const RProvider& p, const SamplePlan& plan,
                                    double tol) {
  IdentityReport skew = check_skew(p, plan, tol);
  IdentityReport unit = check_unitarity(p, plan, tol);
  IdentityReport rep = skew.max_residual >= unit.max_residual ? skew : unit;
  rep.identity = "unitarity_skew";
  rep.requested = skew.requested + unit.requested;
  rep.accepted = skew.accepted + unit.accepted;
  rep.skipped = skew.skipped + unit.skipped;
  rep.pass = skew.pass && unit.pass;
  return rep;
}

IdentityReport check_qybe(const RProvider& p, const SamplePlan& plan,
                          double tol) {
  const ProviderDist d{p};
  return run_identity(
      "qybe", plan, tol, {"hbar", "z1", "z2", "z3"},
      [&](const Sample& s) {
        const Complex z12 = s[1] - s[2], z13 = s[1] - s[3], z23 = s[2] - s[3];
        return std::min(d.supers({s[0]}), d.args({z12, z13, z23}));
      },
      [&](const Sample& s) {
        const Complex h = s[0];
        const Complex z12 = s[1] - s[2], z13 = s[1] - s[3], z23 = s[2] - s[3];
        const ThreeOp r12 = act_space(p.quantum(h, z12), 12);
        const ThreeOp r13 = act_space(p.quantum(h, z13), 13);
        const ThreeOp r23 = act_space(p.quantum(h, z23), 23);
        return matnorm(compose(compose(r12, r13), r23) -
                       compose(compose(r23, r13), r12));
      });
}

IdentityReport check_master(const RProvider& p, const SamplePlan& plan,
                            double tol) {
  const ProviderDist d{p};
  return run_identity(
      "master", plan, tol, {"z", "x", "y"},
      [&](const Sample& s) {
        return std::min(d.supers({s[0]}), d.args({s[1], s[2], s[1] + s[2]}));
      },
      [&](const Sample& s) {
        const Complex z = s[0], x = s[1], y = s[2];
        const ThreeOp lhs = compose(act_space(p.quantum(z, x), 12),
                                    act_space(p.quantum(z, y), 23));
        const ThreeOp rhs =
            compose(act_space(p.quantum(z, x + y), 13),
                    act_space(p.classical_r(x), 12)) +
            compose(act_space(p.classical_r(y), 23),
                    act_space(p.quantum(z, x + y), 13)) -
            act_space(p.d_superscript(z, x + y), 13);
        return matnorm(lhs - rhs);
      });
}

std::vector<IdentityReport> check_degenerations(const RProvider& p,
                                                const SamplePlan& plan,
                                                double tol) {
  const ProviderDist d{p};
  const TensorOp P = permutation_op(p.site_dim());
  std::vector<IdentityReport> out;

  out.push_back(run_identity(
      "degeneration_x", plan, tol, {"z", "y"},
      [&](const Sample& s) {
        return std::min(d.supers({s[0]}), d.args({s[1]}));
      },
      [&](const Sample& s) {
        const Complex z = s[0], y = s[1];
        const ThreeOp lhs = compose(act_space(p.finite_part_arg(z), 12),
                                    act_space(p.quantum(z, y), 23));
        const ThreeOp rhs =
            compose(act_space(p.f_derivative(z, y), 13), act_space(P, 12)) +
            compose(act_space(p.quantum(z, y), 13),
                    act_space(p.classical_finite(), 12)) +
            compose(act_space(p.classical_r(y), 23),
                    act_space(p.quantum(z, y), 13)) -
            act_space(p.d_superscript(z, y), 13);
        return matnorm(lhs - rhs);
      }));

  out.push_back(run_identity(
      "degeneration_y", plan, tol, {"z", "x"},
      [&](const Sample& s) {
        return std::min(d.supers({s[0]}), d.args({s[1]}));
      },
      [&](const Sample& s) {
        const Complex z = s[0], x = s[1];
        const ThreeOp lhs = compose(act_space(p.quantum(z, x), 12),
                                    act_space(p.finite_part_arg(z), 23));
        const ThreeOp rhs =
            compose(act_space(p.quantum(z, x), 13),
                    act_space(p.classical_r(x), 12)) +
            compose(act_space(p.classical_finite(), 23),
                    act_space(p.quantum(z, x), 13)) +
            compose(act_space(P, 23), act_space(p.f_derivative(z, x), 13)) -
            act_space(p.d_superscript(z, x), 13);
        return matnorm(lhs - rhs);
      }));

  out.push_back(run_identity(
      "degeneration_combined", plan, tol, {"z", "q", "eta"},
      [&](const Sample& s) {
        return std::min(d.supers({s[0]}), d.args({s[1], s[2], s[1] + s[2]}));
      },
      [&](const Sample& s) {
        const Complex z = s[0], q = s[1], eta = s[2];
        const ThreeOp lhs =
            compose(act_space(p.finite_part_arg(z), 12),
                    act_space(p.quantum(z, q + eta), 23)) -
            compose(act_space(p.quantum(z, eta), 12),
                    act_space(p.quantum(z, q), 23));
        const ThreeOp rhs =
            compose(act_space(p.f_derivative(z, q + eta), 13),
                    act_space(P, 12)) +
            compose(act_space(p.quantum(z, q + eta), 13),
                    act_space(p.classical_finite() - p.classical_r(eta), 12)) +
            compose(act_space(p.classical_r(q + eta) - p.classical_r(q), 23),
                    act_space(p.quantum(z, q + eta), 13));
        return matnorm(lhs - rhs);
      }));

  out.push_back(run_identity(
      "degeneration_shifted", plan, tol, {"z", "a", "b", "eta"},
      [&](const Sample& s) {
        const Complex a = s[1], b = s[2], eta = s[3];
        return std::min(d.supers({s[0]}),
                        d.args({a, b, a + eta, b + eta, a + b + eta}));
      },
      [&](const Sample& s) {
        const Complex z = s[0], a = s[1], b = s[2], eta = s[3];
        const ThreeOp lhs =
            compose(act_space(p.quantum(z, a), 12),
                    act_space(p.quantum(z, b + eta), 23)) -
            compose(act_space(p.quantum(z, a + eta), 12),
                    act_space(p.quantum(z, b), 23));
        const ThreeOp rhs =
            compose(act_space(p.quantum(z, a + b + eta), 13),
                    act_space(p.classical_r(a) - p.classical_r(a + eta), 12)) +
            compose(act_space(p.classical_r(b + eta) - p.classical_r(b), 23),
                    act_space(p.quantum(z, a + b + eta), 13));
        return matnorm(lhs - rhs);
      }));

  return out;
}

IdentityReport check_swap(const RProvider& p, const SamplePlan& plan,
                          double tol) {
  const ProviderDist d{p};
  const TensorOp P = permutation_op(p.site_dim());
  return run_identity(
      "swap", plan, tol, {"z", "q"},
      [&](const Sample& s) {
        return std::min(std::min(d.supers({s[0]}), d.supers({s[1]})),
                        std::min(d.args({s[0]}), d.args({s[1]})));
      },
      [&](const Sample& s) {
        return matnorm(p.quantum(s[0], s[1]) -
                       compose(p.quantum(s[1], s[0]), P));
      });
}

IdentityReport check_classical_limit(const RProvider& p, const SamplePlan& plan,
                                     double tol) {
  const ProviderDist d{p};
  const TensorOp one = TensorOp::identity(p.site_dim());
  return run_identity(
      "classical_limit", plan, tol, {"z"},
      [&](const Sample& s) {
        return std::min(d.args({s[0]}), d.supers({s[0]}));
      },
      [&](const Sample& s) {
        const Complex z = s[0];
        const TensorOp r = p.classical_r(z);
        const TensorOp target =
            Complex(0.5, 0.0) * (compose(r, r) - p.weierstrass(z) * one);
        double res = matnorm(p.hbar_linear_coeff(z) - target);
        // Remainder of the h-expansion after the linear term must shrink
        // at least linearly between h = 1e-2 and h = 1e-3.
        auto remainder = [&](double h) {
          const Complex ch(h, 0.0);
          TensorOp m = p.quantum(ch, z) - Complex(1.0 / h, 0.0) * one - r;
          m *= Complex(1.0 / h, 0.0);
          return matnorm(m - p.hbar_linear_coeff(z));
        };
        const double d1 = remainder(1e-2);
        const double d2 = remainder(1e-3);
        if (d1 > 1e-12 && d2 > 1e-10 && d2 > 0.3 * d1) res = std::max(res, 1.0);
        return res;
      });
}

std::vector<IdentityReport> provider_suite(const RProvider& p,
                                           const SamplePlan& plan, double tol) {
  std::vector<IdentityReport> out;
  out.push_back(check_aybe(p, plan, tol));
  out.push_back(check_skew(p, plan, tol));
  out.push_back(check_unitarity(p, plan, tol));
  out.push_back(check_qybe(p, plan, tol));
  out.push_back(check_swap(p, plan, tol));
  out.push_back(check_classical_limit(p, plan, tol));
  out.push_back(check_master(p, plan, tol));
  for (auto& rep : check_degenerations(p, plan, tol)) out.push_back(std::move(rep));
  return out;
}

std::string reports_to_json(const std::vector<IdentityReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& rep : reports) {
    nlohmann::ordered_json j;
    j["identity"] = rep.identity;
    j["requested"] = rep.requested;
    j["accepted"] = rep.accepted;
    j["skipped"] = rep.skipped;
    j["max_residual"] = rep.max_residual;
    j["tolerance"] = rep.tolerance;
    j["pass"] = rep.pass;
    nlohmann::ordered_json wp = nlohmann::ordered_json::object();
    for (const auto& [name, value] : rep.worst_point)
      wp[name] = nlohmann::ordered_json::array({value.real(), value.imag()});
    j["worst_point"] = std::move(wp);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

}  // namespace laxtop
