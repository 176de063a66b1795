#include "laxtop/runconfig.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace laxtop {

namespace {

Complex complex_field(const nlohmann::json& j, const char* name,
                      Complex fallback) {
  if (!j.contains(name)) return fallback;
  const auto& v = j.at(name);
  if (!v.is_array() || v.size() != 2)
    throw ConfigError(std::string(name) + " must be a [re, im] array");
  return {v[0].get<double>(), v[1].get<double>()};
}

Regime parse_regime(const std::string& s) {
  if (s == "rational") return Regime::rational;
  if (s == "trigonometric") return Regime::trigonometric;
  if (s == "elliptic") return Regime::elliptic;
  throw ConfigError("unknown regime '" + s + "'");
}

}  // namespace

EllipticContext RunConfig::context() const {
  switch (regime) {
    case Regime::rational:
      return EllipticContext::make_rational(pole_guard);
    case Regime::trigonometric:
      return EllipticContext::make_trigonometric(pole_guard);
    case Regime::elliptic:
      return EllipticContext::make_elliptic(tau, series_cutoff, pole_guard);
  }
  throw ConfigError("invalid regime");
}

SamplePlan RunConfig::plan() const {
  SamplePlan p;
  p.seed = seed;
  p.count = samples;
  p.pole_guard = sample_guard;
  return p;
}

TrajectoryConfig RunConfig::trajectory() const {
  TrajectoryConfig t;
  t.dt = dt;
  t.steps = steps;
  t.z_samples = z_samples;
  t.invariant_max_order = invariant_max_order;
  t.record_every = record_every;
  return t;
}

PhaseState RunConfig::initial_state() const {
  switch (initial.mode) {
    case Initial::Mode::random:
      return random_state(N, M, eta, seed, initial.scale);
    case Initial::Mode::rank1:
      return rank1_state(N, M, eta, seed, initial.scale);
    case Initial::Mode::file: {
      std::ifstream in(initial.path);
      if (!in) throw ConfigError("cannot open state file " + initial.path);
      std::ostringstream buf;
      buf << in.rdbuf();
      PhaseState st = state_from_json(buf.str());
      if (st.N != N || st.M != M)
        throw ConfigError("state file dimensions do not match config");
      return st;
    }
  }
  throw ConfigError("invalid initial mode");
}

RunConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  RunConfig cfg;
  try {
    if (j.contains("regime")) cfg.regime = parse_regime(j.at("regime"));
    cfg.tau = complex_field(j, "tau", cfg.tau);
    if (j.contains("N")) cfg.N = j.at("N").get<int>();
    if (j.contains("M")) cfg.M = j.at("M").get<int>();
    cfg.eta = complex_field(j, "eta", cfg.eta);
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("initial")) {
      const auto& init = j.at("initial");
      if (init.contains("mode")) {
        const std::string mode = init.at("mode");
        if (mode == "random")
          cfg.initial.mode = RunConfig::Initial::Mode::random;
        else if (mode == "rank1")
          cfg.initial.mode = RunConfig::Initial::Mode::rank1;
        else if (mode == "file")
          cfg.initial.mode = RunConfig::Initial::Mode::file;
        else
          throw ConfigError("unknown initial mode '" + mode + "'");
      }
      if (init.contains("path")) cfg.initial.path = init.at("path");
      if (init.contains("scale")) cfg.initial.scale = init.at("scale").get<double>();
      if (cfg.initial.mode == RunConfig::Initial::Mode::file &&
          cfg.initial.path.empty())
        throw ConfigError("initial mode 'file' requires a path");
    }

    if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
    if (j.contains("steps")) cfg.steps = j.at("steps").get<int>();
    if (j.contains("z_samples")) {
      for (const auto& v : j.at("z_samples")) {
        if (!v.is_array() || v.size() != 2)
          throw ConfigError("z_samples entries must be [re, im] arrays");
        cfg.z_samples.emplace_back(v[0].get<double>(), v[1].get<double>());
      }
    }
    if (j.contains("invariant_max_order"))
      cfg.invariant_max_order = j.at("invariant_max_order").get<int>();
    if (j.contains("record_every"))
      cfg.record_every = j.at("record_every").get<int>();

    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      if (t.contains("identity"))
        cfg.tolerances.identity = t.at("identity").get<double>();
      if (t.contains("lax")) cfg.tolerances.lax = t.at("lax").get<double>();
      if (t.contains("conservation"))
        cfg.tolerances.conservation = t.at("conservation").get<double>();
    }

    if (j.contains("samples")) cfg.samples = j.at("samples").get<int>();
    if (j.contains("sample_guard"))
      cfg.sample_guard = j.at("sample_guard").get<double>();
    if (j.contains("series_cutoff"))
      cfg.series_cutoff = j.at("series_cutoff").get<int>();
    if (j.contains("pole_guard"))
      cfg.pole_guard = j.at("pole_guard").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config structure error: ") + e.what());
  }

  if (cfg.N < 1 || cfg.M < 1) throw ConfigError("N and M must be >= 1");
  if (cfg.N > 1 && cfg.regime != Regime::elliptic)
    throw ConfigError("N >= 2 requires the elliptic regime");
  if (cfg.dt <= 0.0) throw ConfigError("dt must be positive");
  if (cfg.steps < 0) throw ConfigError("steps must be non-negative");
  if (cfg.samples < 1) throw ConfigError("samples must be >= 1");
  if (cfg.tolerances.identity <= 0.0 || cfg.tolerances.lax <= 0.0 ||
      cfg.tolerances.conservation <= 0.0)
    throw ConfigError("tolerances must be positive");
  if (cfg.initial.scale <= 0.0) throw ConfigError("initial.scale must be positive");
  cfg.context();  // validates regime parameters
  if (cfg.z_samples.empty())
    cfg.z_samples = {{0.137, 0.211}, {-0.302, 0.155}, {0.241, -0.187},
                     {-0.163, -0.274}, {0.058, 0.313}};
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace laxtop
