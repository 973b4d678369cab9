#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wickfield/fields.hpp"
#include "wickfield/interaction.hpp"
#include "wickfield/kernels.hpp"
#include "wickfield/oracle.hpp"
#include "wickfield/sampler.hpp"

namespace wickfield {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2, kExitVerification = 3 };

struct LaplaceSpec {
  Point center;
  Point half_widths;
  double amplitude = 1.0;
  TestFunction function() const;
  nlohmann::json to_json() const;
};

struct OracleFunctionalSpec {
  std::string kind;  // count | laplace | moment
  LaplaceSpec laplace;
  MomentQuery moment;
  nlohmann::json to_json() const;
};

struct VerifySpec {
  std::vector<std::string> tests;
  int trials = 1000;
  long samples = 4000;
  /// Two points for invariance and null tests (defaults: near the window center).
  std::vector<Point> points;
  Point shift;
  /// Minkowski points and rapidity for the boost tests.
  std::vector<Point> minkowski;
  double chi = 0.3;
  int moment_order = 2;
  nlohmann::json to_json() const;
};

/// Fully resolved run configuration; every key has a default.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string out = "out";
  int workers = 1;

  Space space = Space::euclidean(1);
  std::vector<Interval> window{{0.0, 1.0}};
  nlohmann::json kernel = {{"kind", "gaussian"}};
  nlohmann::json potential = {{"profile", "widom_rowlinson"}, {"beta", 1.0}};
  SamplerConfig sampler;
  long samples = 1000;
  int batches = 32;
  std::string samples_from;

  std::vector<MomentQuery> moments;
  std::vector<LaplaceSpec> laplace;

  SeriesSpec series;
  std::vector<OracleFunctionalSpec> functionals;

  VerifySpec verify;

  Window sampling_window() const;
  Kernel make_kernel() const;
  PotentialSpec make_potential() const;
  /// Effective configuration with every default resolved. Workers and the
  /// output directory are excluded: results do not depend on them.
  nlohmann::json to_json() const;
};

/// Parses and validates every section before anything runs. Throws
/// ValidationError naming the offending key.
RunConfig parse_config(const nlohmann::json& j);

struct CliOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;
};

/// sample | estimate | oracle | verify | report. Returns the process exit code
/// and prints errors to stderr.
int run_command(const std::string& command, const CliOptions& options);

/// Throws NumericalError when any number in j is not finite.
void require_finite(const nlohmann::json& j, const std::string& where = "output");

}  // namespace wickfield
