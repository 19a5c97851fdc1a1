#pragma once

// Experiment configuration (YAML, `version: 1`), example-system generators,
// and command dispatch for the `ergo` tool.
//
//   version: 1
//   command: average
//   mode: rational
//   system: "cyclic_rotations q=4 steps=[1,3]"
//   functions:
//     f: {indicator: 0}
//   params: {kind: averaged_multiple, functions: [f, f], grid: [16, 32, 64]}
//
// Generator subsets in `params.subset` are 1-based, as are names like T1 in
// the output; the library API is 0-based.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ergo/averages.hpp"
#include "ergo/core.hpp"

namespace ergo {

enum class ArithmeticMode { Float, Rational };

std::string_view mode_name(ArithmeticMode mode);
std::optional<ArithmeticMode> parse_mode(std::string_view text);

using ParamList = std::vector<std::pair<std::string, std::string>>;

struct SystemSpec {
  // generator form: name + parameters (values kept as canonical text, lists as "[1,2]")
  std::string generator;
  ParamList params;
  std::vector<SystemSpec> factors;  // product_of
  // inline form
  std::size_t points = 0;
  std::vector<Permutation> transforms;
  std::vector<std::string> weights;  // empty: uniform

  bool is_inline() const { return generator.empty(); }
  bool operator==(const SystemSpec&) const = default;
};

struct FunctionSpec {
  enum class Kind { Values, Indicator, Character, Random };
  Kind kind = Kind::Values;
  std::vector<std::string> values;   // Values; Random draws from these (default -1, 1)
  Point point = 0;                   // Indicator
  std::int64_t frequency = 0;        // Character: x -> cos or sin(2π k x / q)
  std::uint64_t modulus = 0;         // Character: q (0: number of points)
  bool sine = false;
  std::uint64_t seed = 0;            // Random

  bool operator==(const FunctionSpec&) const = default;
};

struct StreamSpec {
  std::string generator;              // rotations | skew
  std::vector<double> alphas;         // rotations
  double alpha = 0, beta = 0;         // skew
  std::vector<double> x0;
  std::vector<StreamFunction> functions;

  bool operator==(const StreamSpec& o) const;
};

struct CommandParams {
  std::vector<std::size_t> subset;  // 1-based; empty: all generators
  std::string sigma;                // e.g. "101"; empty: all ones
  Point x = 0;
  std::vector<std::uint64_t> grid;  // empty: default grid
  std::string kind = "multiple";
  std::vector<std::string> functions;
  std::uint64_t nmax = 32;

  bool operator==(const CommandParams&) const = default;
};

struct ExperimentConfig {
  int version = 1;
  std::string command = "validate";
  ArithmeticMode mode = ArithmeticMode::Rational;
  std::uint64_t seed = 7;
  std::size_t cap = Limits{}.max_support;
  std::optional<SystemSpec> system;
  std::optional<StreamSpec> stream;
  std::vector<std::pair<std::string, FunctionSpec>> functions;
  CommandParams params;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Errors: ParseError (with line/column), UnknownGenerator, CapExceeded.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);

/// Compact generator text, e.g. "cyclic_rotations q=4 steps=[1,2]".
/// `line`/`column` locate the text for error reporting.
SystemSpec parse_generator_text(const std::string& text, std::size_t line = 1, std::size_t column = 1);
std::string generator_text(const SystemSpec& spec);

/// cyclic_rotations q steps; power_system q a; skew_product q a b;
/// product_of (factors); random_commuting m d [seed] [max_power] [nonuniform].
/// `default_seed` applies when random_commuting has no seed parameter.
/// Errors: UnknownGenerator, ParseError, CapExceeded, validation errors.
template <class S>
FiniteSystem<S> generate_system(const SystemSpec& spec, const Limits& limits = {}, std::uint64_t default_seed = 7);

/// Errors: InvalidArgument (indicator out of range, or a character with
/// irrational values in rational mode).
template <class S>
Observable<S> materialize_function(const FunctionSpec& spec, std::size_t m);

struct RunOptions {
  std::string out_dir = ".";
  std::optional<ArithmeticMode> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> cap;
};

/// Runs cfg.command, writing artifacts under out_dir and a summary to `log`.
/// Returns 0, or 5 when an asserted check fails; module errors propagate.
int run_command(const ExperimentConfig& cfg, const RunOptions& options, std::ostream& log);

}  // namespace ergo
