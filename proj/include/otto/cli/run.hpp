#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "otto/cli/config.hpp"

namespace otto::cli {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  Table table;
  bool not_an_engine = false;  // simulate only: the cycle produced no net work
  std::vector<std::string> warnings;
};

// Column sets, fixed per command.
const std::vector<std::string>& columns(Command c);

/// Evaluate a config. Sweep points run concurrently; rows keep axis order.
Report execute(const RunConfig& cfg);

/// 17 significant digits, '.' decimal, header row first.
std::string to_csv(const Table& t);
/// One object per row; a single-row table becomes a bare object unless
/// `force_array`.
std::string to_json(const Table& t, bool force_array = false);

/// Execute and write the output (and `<out>.meta.json` beside a file output).
/// Returns 0 on success, 2 when the result is not an engine, 1 on any other
/// failure, with a one-line diagnostic on `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parse arguments (without argv[0]) and run.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace otto::cli
