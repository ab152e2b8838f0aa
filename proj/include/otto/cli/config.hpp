#pragma once

#include <cstddef>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "otto/constraint.hpp"
#include "otto/optimizer.hpp"
#include "otto/tolerances.hpp"

namespace otto::cli {

enum class Command { Simulate, Optimize, Expand, Sweep, Compare };
enum class Format { Csv, Json };

std::string to_string(Command c);
Command parse_command(std::string_view text);

/// Raw key/value pairs. Keys are lowercased; parameters live under "param.NAME"
/// and tolerance overrides under "tol.NAME".
using KeyValues = std::map<std::string, std::string, std::less<>>;

struct SweepAxis {
  std::string variable;
  double from = 0.0;
  double to = 0.0;
  int points = 0;
  bool log = false;

  double value(int index) const;
};

struct RunConfig {
  Command command = Command::Simulate;

  // Engine.
  std::vector<double> levels;
  std::vector<double> cold_levels;
  std::optional<double> chi;
  std::optional<double> beta_c;
  std::optional<double> beta_h;
  double xi = 1.0;

  // Constraint problem.
  std::string constraint;  // source text, empty when absent
  std::string preset;      // preset name, empty when absent
  ParamMap params;
  double g0 = 1.0;
  std::optional<double> eta_c;
  EhBracket eh_bracket{};
  double sigma_c = 1.0;
  double sigma_h = 1.0;

  // Sweep.
  std::optional<SweepAxis> sweep;
  Command base = Command::Optimize;

  Format format = Format::Csv;
  std::string out;  // empty means stdout
  Tolerances tol{};

  // The key/value view the config was built from; sweeps rebuild from it.
  KeyValues source;

  bool has_constraint() const { return !constraint.empty() || !preset.empty(); }
  std::size_t n_levels() const { return levels.empty() ? 2 : levels.size(); }
};

/// Flat `key = value` text: one pair per line, `#` starts a comment, values may
/// be single- or double-quoted. Throws ConfigError naming the line on bad syntax.
KeyValues parse_config_text(std::string_view text);
KeyValues read_config_file(const std::string& path);

/// Validated config with defaults applied. Throws ConfigError naming the key.
RunConfig build_config(const KeyValues& kv);

/// Command line (without argv[0]). `--config PATH` is read first and flags
/// override its keys. Returns nullopt after printing help to `help_out`.
std::optional<RunConfig> load_config(const std::vector<std::string>& args,
                                     std::ostream& help_out = std::cout);

/// Config of sweep point `index`: the base command with the axis key set.
RunConfig sweep_point(const RunConfig& sweep, int index);

/// The constraint from `constraint` text or `preset`, with params bound.
ConstraintExpr make_constraint(const RunConfig& cfg);

}  // namespace otto::cli
