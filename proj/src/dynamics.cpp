#include "laxtop/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace laxtop {

namespace {

// Flat complex vector view of the dynamical variables. Layout:
// q (M entries), optional qdot (M entries in track_mu mode), then the
// spin blocks row-major.
struct Flat {
  int N, M;
  bool with_qdot;
  std::vector<Complex> v;

  static Flat from_state(const PhaseState& st, bool with_qdot) {
    Flat f;
    f.N = st.N;
    f.M = st.M;
    f.with_qdot = with_qdot;
    f.v.reserve(st.M * (with_qdot ? 2 : 1) +
                static_cast<size_t>(st.M) * st.M * st.N * st.N);
    f.v.insert(f.v.end(), st.q.begin(), st.q.end());
    if (with_qdot) f.v.insert(f.v.end(), st.qdot.begin(), st.qdot.end());
    for (const auto& b : st.S)
      f.v.insert(f.v.end(), b.data().begin(), b.data().end());
    return f;
  }

  PhaseState to_state(Complex eta) const {
    PhaseState st(N, M, eta);
    size_t pos = 0;
    for (int i = 0; i < M; ++i) st.q[i] = v[pos++];
    if (with_qdot)
      for (int i = 0; i < M; ++i) st.qdot[i] = v[pos++];
    for (auto& b : st.S)
      for (auto& entry : b.data()) entry = v[pos++];
    if (!with_qdot) st.sync_qdot();
    return st;
  }

  Flat& axpy(double a, const Flat& o) {
    for (size_t i = 0; i < v.size(); ++i) v[i] += a * o.v[i];
    return *this;
  }
};

void check_configuration(const RProvider& p, const PhaseState& st, double t) {
  const double guard = p.context().pole_guard;
  for (int i = 0; i < st.M; ++i)
    for (int j = 0; j < st.M; ++j) {
      if (i == j) continue;
      const Complex qij = st.q[i] - st.q[j];
      if (p.argument_distance(qij) < guard ||
          p.argument_distance(qij + st.eta) < guard) {
        std::ostringstream os;
        os << "singular configuration at t = " << t << ": pair (" << i << ","
           << j << ") too close to the singular set";
        throw SingularConfiguration(os.str());
      }
    }
}

// Time derivative of the flattened state.
Flat derivative(const RProvider& p, const Flat& f, Complex eta, double t) {
  const PhaseState st = f.to_state(eta);
  check_configuration(p, st, t);
  const std::vector<Matrix> dS = spin_derivative(p, st);
  Flat d;
  d.N = f.N;
  d.M = f.M;
  d.with_qdot = f.with_qdot;
  d.v.reserve(f.v.size());
  if (f.with_qdot) {
    // dq = qdot, dqdot_i = tr(dS^{ii})
    for (int i = 0; i < st.M; ++i) d.v.push_back(st.qdot[i]);
    for (int i = 0; i < st.M; ++i)
      d.v.push_back(dS[static_cast<size_t>(i) * st.M + i].trace());
  } else {
    for (int i = 0; i < st.M; ++i) d.v.push_back(st.spin_trace(i));
  }
  for (const auto& b : dS) d.v.insert(d.v.end(), b.data().begin(), b.data().end());
  return d;
}

Flat rk4_flat(const RProvider& p, const Flat& y, Complex eta, double t,
              double dt) {
  const Flat k1 = derivative(p, y, eta, t);
  Flat y2 = y;
  y2.axpy(dt / 2.0, k1);
  const Flat k2 = derivative(p, y2, eta, t + dt / 2.0);
  Flat y3 = y;
  y3.axpy(dt / 2.0, k2);
  const Flat k3 = derivative(p, y3, eta, t + dt / 2.0);
  Flat y4 = y;
  y4.axpy(dt, k3);
  const Flat k4 = derivative(p, y4, eta, t + dt);
  Flat out = y;
  out.axpy(dt / 6.0, k1);
  out.axpy(dt / 3.0, k2);
  out.axpy(dt / 3.0, k3);
  out.axpy(dt / 6.0, k4);
  return out;
}

}  // namespace

PhaseState rk4_step(const RProvider& p, const PhaseState& st, double dt) {
  if (dt <= 0.0) throw ConfigError("rk4_step requires dt > 0");
  const Flat y = Flat::from_state(st, /*with_qdot=*/false);
  PhaseState out = rk4_flat(p, y, st.eta, 0.0, dt).to_state(st.eta);
  out.sync_qdot();
  return out;
}

std::vector<Complex> invariants_of(const RProvider& p, const PhaseState& st,
                                   const std::vector<Complex>& z_samples,
                                   int max_order) {
  std::vector<Complex> out;
  out.reserve(z_samples.size() * max_order);
  for (Complex z : z_samples) {
    const Matrix L = assemble(build_L(p, st, z));
    Matrix power = L;
    for (int k = 1; k <= max_order; ++k) {
      out.push_back(power.trace());
      if (k < max_order) power = power * L;
    }
  }
  return out;
}

std::pair<Trajectory, ConservationReport> integrate(const RProvider& p,
                                                    const PhaseState& start,
                                                    const TrajectoryConfig& cfg) {
  if (cfg.dt <= 0.0) throw ConfigError("integrate requires dt > 0");
  if (cfg.steps < 0) throw ConfigError("integrate requires steps >= 0");
  if (cfg.record_every < 1) throw ConfigError("record_every must be >= 1");
  for (Complex z : cfg.z_samples)
    if (p.superscript_distance(z) < p.context().pole_guard)
      throw ConfigError("spectral sample too close to the singular set");

  Trajectory traj;
  traj.invariant_max_order = cfg.invariant_max_order;
  traj.z_samples = cfg.z_samples;

  auto record = [&](double t, const PhaseState& st) {
    Snapshot snap;
    snap.t = t;
    snap.state = st;
    snap.invariants =
        invariants_of(p, st, cfg.z_samples, cfg.invariant_max_order);
    snap.mu_norm = st.off_shell_norm();
    traj.snapshots.push_back(std::move(snap));
  };

  Flat y = Flat::from_state(start, cfg.track_mu);
  record(0.0, y.to_state(start.eta));
  for (int step = 0; step < cfg.steps; ++step) {
    const double t = step * cfg.dt;
    y = rk4_flat(p, y, start.eta, t, cfg.dt);
    if ((step + 1) % cfg.record_every == 0 || step + 1 == cfg.steps)
      record((step + 1) * cfg.dt, y.to_state(start.eta));
  }

  ConservationReport report;
  const size_t n_inv = traj.snapshots.front().invariants.size();
  for (size_t idx = 0; idx < n_inv; ++idx) {
    DriftEntry entry;
    entry.k = static_cast<int>(idx % cfg.invariant_max_order) + 1;
    entry.z = cfg.z_samples[idx / cfg.invariant_max_order];
    entry.initial = traj.snapshots.front().invariants[idx];
    for (const auto& snap : traj.snapshots)
      entry.max_drift =
          std::max(entry.max_drift, std::abs(snap.invariants[idx] - entry.initial));
    const double scale = std::max(std::abs(entry.initial), 1e-30);
    entry.rel_drift = entry.max_drift / scale;
    report.max_rel_drift = std::max(report.max_rel_drift, entry.rel_drift);
    report.entries.push_back(entry);
  }
  return {std::move(traj), std::move(report)};
}

double constraint_drift(const Trajectory& traj) {
  double worst = 0.0;
  for (const auto& snap : traj.snapshots) worst = std::max(worst, snap.mu_norm);
  return worst;
}

double rank1_drift(const Trajectory& traj) {
  double worst = 0.0;
  for (const auto& snap : traj.snapshots)
    worst = std::max(worst, rank1_check(snap.state));
  return worst;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.snapshots.empty()) return;
  const int M = traj.snapshots.front().state.M;
  os << "t";
  for (int i = 0; i < M; ++i)
    os << ",q" << i << "_re,q" << i << "_im";
  for (int i = 0; i < M; ++i)
    os << ",qdot" << i << "_re,qdot" << i << "_im";
  for (size_t zi = 0; zi < traj.z_samples.size(); ++zi)
    for (int k = 1; k <= traj.invariant_max_order; ++k)
      os << ",I" << k << "_z" << zi << "_re,I" << k << "_z" << zi << "_im";
  os << "\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    os << buf;
  };
  for (const auto& snap : traj.snapshots) {
    std::snprintf(buf, sizeof buf, "%.17g", snap.t);
    os << buf;
    for (int i = 0; i < M; ++i) {
      put(snap.state.q[i].real());
      put(snap.state.q[i].imag());
    }
    for (int i = 0; i < M; ++i) {
      put(snap.state.qdot[i].real());
      put(snap.state.qdot[i].imag());
    }
    for (Complex v : snap.invariants) {
      put(v.real());
      put(v.imag());
    }
    os << "\n";
  }
}

}  // namespace laxtop
