#pragma once

#include <iosfwd>
#include <vector>

#include "laxtop/lax.hpp"

namespace laxtop {

struct TrajectoryConfig {
  double dt = 1e-3;
  int steps = 1000;
  std::vector<Complex> z_samples;
  int invariant_max_order = 4;  // I_k(z) = tr L(z)^k for k = 1..order
  int record_every = 10;
  // When set, qdot is integrated as an independent variable with
  // qddot_i = tr(dS^{ii}) so the constraint mu_i = qdot_i - tr S^{ii}
  // is genuinely monitored instead of being re-synchronized.
  bool track_mu = false;
};

struct Snapshot {
  double t = 0.0;
  PhaseState state;
  std::vector<Complex> invariants;  // flattened (z, k), k fastest
  double mu_norm = 0.0;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  int invariant_max_order = 0;
  std::vector<Complex> z_samples;
};

struct DriftEntry {
  int k = 0;
  Complex z;
  Complex initial;
  double max_drift = 0.0;
  double rel_drift = 0.0;
};

struct ConservationReport {
  std::vector<DriftEntry> entries;
  double max_rel_drift = 0.0;
};

// One classical RK4 step on the flattened complex state (q, S) with
// dq_i = tr S^{ii}; qdot is re-synchronized afterwards. Throws
// SingularConfiguration when a pairwise distance check fails.
PhaseState rk4_step(const RProvider& p, const PhaseState& st, double dt);

std::vector<Complex> invariants_of(const RProvider& p, const PhaseState& st,
                                   const std::vector<Complex>& z_samples,
                                   int max_order);

std::pair<Trajectory, ConservationReport> integrate(const RProvider& p,
                                                    const PhaseState& start,
                                                    const TrajectoryConfig& cfg);

// Max over recorded snapshots of max_i |qdot_i - tr S^{ii}|.
double constraint_drift(const Trajectory& traj);

// Max over recorded snapshots of the rank-one residual.
double rank1_drift(const Trajectory& traj);

// CSV with columns t, q_i (re, im), qdot_i (re, im), then one column
// pair per invariant; 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace laxtop
