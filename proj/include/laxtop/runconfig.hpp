#pragma once

#include <optional>
#include <string>
#include <vector>

#include "laxtop/axioms.hpp"
#include "laxtop/dynamics.hpp"

namespace laxtop {

// Batch run configuration, parsed from JSON. See README for the schema.
struct RunConfig {
  Regime regime = Regime::rational;
  Complex tau{0.0, 1.0};
  int N = 1;
  int M = 1;
  Complex eta{0.23, 0.11};
  std::uint64_t seed = 1;

  struct Initial {
    enum class Mode { random, rank1, file };
    Mode mode = Mode::random;
    std::string path;
    double scale = 1.0;
  } initial;

  double dt = 1e-3;
  int steps = 1000;
  std::vector<Complex> z_samples;
  int invariant_max_order = 4;
  int record_every = 10;

  struct Tolerances {
    double identity = 1e-8;
    double lax = 1e-9;
    double conservation = 1e-6;
  } tolerances;

  int samples = 200;          // identity verification sample count
  double sample_guard = 5e-2;
  int series_cutoff = 32;
  double pole_guard = 1e-6;

  EllipticContext context() const;
  SamplePlan plan() const;
  TrajectoryConfig trajectory() const;
  PhaseState initial_state() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

}  // namespace laxtop
