#pragma once

#include "fracgauge/quadrature.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracgauge {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A measure on the mesh as written in a config file.
///   {"kind": "zero"}
///   {"kind": "density", "density": "phi" | "constant" | "radial_polynomial",
///    "scale": g, "value": c, "coefficients": [c0, c1, ...]}
///   {"kind": "atoms", "atoms": [{"x": .., "y": .., "mass": ..}, ...]}
/// radial_polynomial is sum_k c_k r^k with r the distance to the domain
/// centroid.
struct MeasureSpec {
  enum class Kind { Zero, Density, Atoms };
  enum class Density { Phi, Constant, RadialPolynomial };

  Kind kind = Kind::Zero;
  Density density = Density::Constant;
  double scale = 1.0;
  double value = 1.0;
  std::vector<double> coefficients;
  std::vector<Atom> atoms;
};

struct OutputSpec {
  std::string report = "report.json";
  std::string csv = "nodes.csv";
  std::string summary = "summary.json";
};

struct RunConfig {
  Domain domain = Domain::unit_disk();
  double alpha = 1.0;
  int resolution = 32;
  MeasureSpec omega;
  MeasureSpec nu;
  double tolerance = 1e-10;
  int max_terms = 10000;
  std::uint64_t seed = 0;
  AMode a_mode = AMode::Calibrated;
  OutputSpec output;
};

/// Parses and validates a config. Unknown keys anywhere are rejected.
/// Throws ConfigError with a message naming the offending field.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Weights of a measure spec on an assembled matrix.
WeightVector discretize(const MeasureSpec& spec, const KernelMatrix& K, AMode mode);

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitDivergence = 2, kExitCheckFailed = 3 };

inline const std::vector<std::string>& verify_checks() {
  static const std::vector<std::string> names{"gphi", "fubini", "tnorm", "equivalence",
                                              "bounds", "counterexample", "hardy", "coercivity"};
  return names;
}

/// Each command writes its artifacts under out_dir and logs one-line progress
/// notes to `log`. Return values follow ExitCode.
int cmd_solve(const RunConfig& config, const std::string& out_dir, std::ostream& log);
int cmd_gauge(const RunConfig& config, const std::string& out_dir, std::ostream& log);
int cmd_verify(const RunConfig& config, const std::string& which, const std::string& out_dir, std::ostream& log);

}  // namespace fracgauge
