#include "otto/cli/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "otto/errors.hpp"
#include "otto/spectra.hpp"

namespace otto::cli {

namespace {

constexpr std::array kKnownKeys = {
    "command", "levels", "cold_levels", "chi",    "beta_c", "beta_h", "t_c",    "t_h",
    "xi",      "constraint", "preset",  "g0",     "eta_c",  "eh_lo",  "eh_hi",  "sigma_c",
    "sigma_h", "axis",   "from",        "to",     "points", "log",    "base",   "format",
    "out",
};

// Keys a sweep axis may name directly; anything else is taken as a parameter.
constexpr std::array kSweepableKeys = {
    "chi", "beta_c", "beta_h", "t_c", "t_h", "xi", "g0", "eta_c", "sigma_c", "sigma_h",
};

template <std::size_t N>
bool contains(const std::array<const char*, N>& keys, std::string_view key) {
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Keys are case-insensitive except for parameter names, which the constraint
// language distinguishes.
std::string normalize_key(std::string_view key) {
  std::string out = lower(key);
  if (out.rfind("param.", 0) == 0) out.replace(6, std::string::npos, key.substr(6));
  return out;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::string* find(const KeyValues& kv, std::string_view key) {
  const auto it = kv.find(key);
  return it == kv.end() ? nullptr : &it->second;
}

double to_number(std::string_view key, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(key), "expected a number, got '" + std::string(text) + "'");
  }
  if (!std::isfinite(v)) throw ConfigError(std::string(key), "value must be finite");
  return v;
}

std::optional<double> number(const KeyValues& kv, std::string_view key) {
  const std::string* v = find(kv, key);
  if (!v) return std::nullopt;
  return to_number(key, *v);
}

double positive(std::string_view key, double value) {
  if (!(value > 0.0)) throw ConfigError(std::string(key), "must be positive");
  return value;
}

bool to_bool(std::string_view key, std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(std::string(key), "expected true or false, got '" + std::string(text) + "'");
}

std::vector<double> levels_of(std::string_view key, const std::string& text) {
  try {
    return parse_levels(text);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string(key), e.what());
  }
}

Command infer_base(const KeyValues& kv) {
  if (const std::string* b = find(kv, "base")) {
    const Command c = parse_command(*b);
    if (c == Command::Sweep) throw ConfigError("base", "a sweep cannot sweep a sweep");
    return c;
  }
  return (find(kv, "constraint") || find(kv, "preset")) ? Command::Optimize : Command::Simulate;
}

// The config of one sweep point: the axis key replaced by `value`.
KeyValues substitute_axis(const KeyValues& kv, const SweepAxis& axis, Command base, double value) {
  KeyValues out = kv;
  for (const char* k : {"axis", "from", "to", "points", "log", "base"}) out.erase(k);
  out["command"] = to_string(base);
  if (axis.variable == "beta") {
    // Scale both inverse temperatures at a fixed ratio.
    const auto bc = number(kv, "beta_c");
    const auto bh = number(kv, "beta_h");
    if (!bc || !bh) throw ConfigError("axis", "axis 'beta' needs beta_c and beta_h");
    out["beta_c"] = format_number(value);
    out["beta_h"] = format_number(value * (*bh / *bc));
  } else if (contains(kSweepableKeys, axis.variable)) {
    out[axis.variable] = format_number(value);
  } else {
    out["param." + axis.variable] = format_number(value);
  }
  return out;
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Optimize: return "optimize";
    case Command::Expand: return "expand";
    case Command::Sweep: return "sweep";
    case Command::Compare: return "compare";
  }
  return "unknown";
}

Command parse_command(std::string_view text) {
  const std::string t = lower(trim(text));
  for (Command c : {Command::Simulate, Command::Optimize, Command::Expand, Command::Sweep,
                    Command::Compare}) {
    if (t == to_string(c)) return c;
  }
  throw ConfigError("command", "unknown command '" + std::string(text) + "'");
}

double SweepAxis::value(int index) const {
  const double t = static_cast<double>(index) / (points - 1);
  if (index == points - 1) return to;
  if (log) return from * std::pow(to / from, t);
  return from + (to - from) * t;
}

KeyValues parse_config_text(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);

    // Strip a trailing comment that is not inside quotes.
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '#') {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where, "expected key = value");
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    if (!valid_key(key)) throw ConfigError(where, "invalid key '" + key + "'");
    std::string_view value = trim(line.substr(eq + 1));
    if (!value.empty() && (value.front() == '"' || value.front() == '\'')) {
      if (value.size() < 2 || value.back() != value.front()) {
        throw ConfigError(key, "unterminated quote on " + where);
      }
      value = value.substr(1, value.size() - 2);
    }
    if (!kv.emplace(key, std::string(value)).second) {
      throw ConfigError(key, "duplicate key on " + where);
    }
  }
  return kv;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

ConstraintExpr make_constraint(const RunConfig& cfg) {
  try {
    if (!cfg.preset.empty()) return preset(cfg.preset, cfg.params);
    return ConstraintExpr::parse(cfg.constraint, cfg.params);
  } catch (const ParseError& e) {
    throw ConfigError("constraint", e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(cfg.preset.empty() ? "constraint" : "preset", e.what());
  }
}

RunConfig build_config(const KeyValues& kv) {
  RunConfig cfg;
  cfg.source = kv;

  for (const auto& [key, value] : kv) {
    if (key.rfind("param.", 0) == 0) {
      const std::string name = key.substr(6);
      if (name.empty()) throw ConfigError(key, "missing parameter name");
      cfg.params[name] = to_number(key, value);
    } else if (key.rfind("tol.", 0) == 0) {
      if (!set_tolerance(cfg.tol, key.substr(4), to_number(key, value))) {
        throw ConfigError(key, "unknown tolerance");
      }
    } else if (!contains(kKnownKeys, key)) {
      throw ConfigError(key, "unknown key");
    }
  }

  if (const std::string* c = find(kv, "command")) {
    cfg.command = parse_command(*c);
  } else if (find(kv, "axis")) {
    cfg.command = Command::Sweep;
  } else {
    cfg.command = infer_base(kv);
  }

  if (cfg.command == Command::Sweep) {
    SweepAxis axis;
    const std::string* var = find(kv, "axis");
    if (!var) throw ConfigError("axis", "missing required key");
    axis.variable = normalize_key(trim(*var));
    if (axis.variable.rfind("param.", 0) == 0) {
      axis.variable = axis.variable.substr(6);
    } else if (contains(kKnownKeys, lower(axis.variable)) || lower(axis.variable) == "beta") {
      axis.variable = lower(axis.variable);
    }
    if (!valid_key(axis.variable) ||
        (contains(kKnownKeys, axis.variable) && !contains(kSweepableKeys, axis.variable))) {
      throw ConfigError("axis", "cannot sweep '" + *var + "'");
    }
    for (const char* k : {"from", "to", "points"}) {
      if (!find(kv, k)) throw ConfigError(k, "missing required key");
    }
    axis.from = *number(kv, "from");
    axis.to = *number(kv, "to");
    const double points = *number(kv, "points");
    if (points != std::floor(points) || points < 2 || points > 1e7) {
      throw ConfigError("points", "must be an integer >= 2");
    }
    axis.points = static_cast<int>(points);
    if (const std::string* l = find(kv, "log")) axis.log = to_bool("log", *l);
    if (axis.log && !(axis.from > 0.0 && axis.to > 0.0)) {
      throw ConfigError("log", "a log axis needs positive from and to");
    }
    const Command base = infer_base(kv);
    // Validate the base command at the first point; each point is rebuilt at run time.
    RunConfig first = build_config(substitute_axis(kv, axis, base, axis.from));
    first.command = Command::Sweep;
    first.base = base;
    first.sweep = axis;
    first.source = kv;
    return first;
  }

  // Temperatures.
  const bool has_beta = find(kv, "beta_c") || find(kv, "beta_h");
  const bool has_t = find(kv, "t_c") || find(kv, "t_h");
  if (has_beta && has_t) {
    throw ConfigError(find(kv, "t_c") ? "t_c" : "t_h",
                      "conflicting temperature spec: give beta_c/beta_h or t_c/t_h, not both");
  }
  if (has_beta) {
    if (auto b = number(kv, "beta_c")) cfg.beta_c = positive("beta_c", *b);
    if (auto b = number(kv, "beta_h")) cfg.beta_h = positive("beta_h", *b);
  } else if (has_t) {
    if (auto t = number(kv, "t_c")) cfg.beta_c = 1.0 / positive("t_c", *t);
    if (auto t = number(kv, "t_h")) cfg.beta_h = 1.0 / positive("t_h", *t);
  }
  if (auto x = number(kv, "xi")) {
    if (!(*x > 0.0 && *x <= 1.0)) throw ConfigError("xi", "must lie in (0, 1]");
    cfg.xi = *x;
  }

  if (const std::string* l = find(kv, "levels")) cfg.levels = levels_of("levels", *l);
  if (const std::string* l = find(kv, "cold_levels")) cfg.cold_levels = levels_of("cold_levels", *l);
  cfg.chi = number(kv, "chi");

  if (const std::string* c = find(kv, "constraint")) cfg.constraint = std::string(trim(*c));
  if (const std::string* p = find(kv, "preset")) cfg.preset = lower(trim(*p));
  if (!cfg.constraint.empty() && !cfg.preset.empty()) {
    throw ConfigError("preset", "give either constraint or preset, not both");
  }
  if (auto g = number(kv, "g0")) cfg.g0 = *g;
  if (auto lo = number(kv, "eh_lo")) cfg.eh_bracket.lo = positive("eh_lo", *lo);
  if (auto hi = number(kv, "eh_hi")) cfg.eh_bracket.hi = positive("eh_hi", *hi);
  if (!(cfg.eh_bracket.lo < cfg.eh_bracket.hi)) throw ConfigError("eh_hi", "must exceed eh_lo");
  if (auto s = number(kv, "sigma_c")) cfg.sigma_c = *s;
  if (auto s = number(kv, "sigma_h")) cfg.sigma_h = *s;

  cfg.eta_c = number(kv, "eta_c");
  if (cfg.beta_c && cfg.beta_h) {
    const double from_baths = 1.0 - *cfg.beta_h / *cfg.beta_c;
    if (!cfg.eta_c) {
      cfg.eta_c = from_baths;
    } else if (std::abs(*cfg.eta_c - from_baths) > 1e-12) {
      throw ConfigError("eta_c", "conflicts with the bath temperatures");
    }
  }

  if (const std::string* f = find(kv, "format")) {
    const std::string t = lower(trim(*f));
    if (t == "csv") {
      cfg.format = Format::Csv;
    } else if (t == "json") {
      cfg.format = Format::Json;
    } else {
      throw ConfigError("format", "expected csv or json, got '" + *f + "'");
    }
  }
  if (const std::string* o = find(kv, "out")) cfg.out = *o;

  switch (cfg.command) {
    case Command::Simulate:
      if (cfg.levels.empty()) throw ConfigError("levels", "missing required key");
      if (cfg.chi && !cfg.cold_levels.empty()) {
        throw ConfigError("cold_levels", "give either chi or cold_levels, not both");
      }
      if (!cfg.chi && cfg.cold_levels.empty()) throw ConfigError("chi", "missing required key");
      if (!cfg.beta_c) throw ConfigError(has_t ? "t_c" : "beta_c", "missing required key");
      if (!cfg.beta_h) throw ConfigError(has_t ? "t_h" : "beta_h", "missing required key");
      break;
    case Command::Optimize:
    case Command::Compare:
      if (!cfg.eta_c) throw ConfigError("eta_c", "missing required key");
      if (!(*cfg.eta_c > 0.0 && *cfg.eta_c < 1.0)) throw ConfigError("eta_c", "must lie in (0, 1)");
      [[fallthrough]];
    case Command::Expand:
      if (!cfg.has_constraint()) throw ConfigError("constraint", "missing required key");
      make_constraint(cfg);
      break;
    case Command::Sweep:
      break;
  }
  return cfg;
}

RunConfig sweep_point(const RunConfig& sweep, int index) {
  if (!sweep.sweep) throw InvalidArgument("sweep_point: not a sweep config");
  const SweepAxis& axis = *sweep.sweep;
  return build_config(substitute_axis(sweep.source, axis, sweep.base, axis.value(index)));
}

std::optional<RunConfig> load_config(const std::vector<std::string>& args, std::ostream& help_out) {
  CLI::App app{"Work and efficiency at maximal work of ultra-hot quantum Otto engines.", "otto"};
  app.allow_extras(false);

  std::string positional;
  app.add_option("COMMAND", positional, "simulate | optimize | expand | sweep | compare");

  std::string config_path;
  app.add_option("--config", config_path, "flat key = value config file");

  struct Flag {
    const char* names;
    const char* key;
    const char* help;
  };
  static constexpr Flag kFlags[] = {
      {"--command", "command", "command (alternative to the positional form)"},
      {"--levels", "levels", "hot spectrum, comma separated"},
      {"--cold-levels", "cold_levels", "cold spectrum, comma separated"},
      {"--chi", "chi", "compression deviation; the cold spectrum is (1 - chi) * hot"},
      {"--beta-c", "beta_c", "inverse cold-bath temperature"},
      {"--beta-h", "beta_h", "inverse hot-bath temperature"},
      {"--t-c,--T-c", "t_c", "cold-bath temperature"},
      {"--t-h,--T-h", "t_h", "hot-bath temperature"},
      {"--xi", "xi", "swap parameter in (0, 1]"},
      {"--constraint", "constraint", "constraint expression G(Ec, Eh)"},
      {"--preset", "preset", "named constraint"},
      {"--g0", "g0", "constraint value"},
      {"--eta-c", "eta_c", "Carnot efficiency"},
      {"--eh-lo", "eh_lo", "initial |E_h| bracket, lower end"},
      {"--eh-hi", "eh_hi", "initial |E_h| bracket, upper end"},
      {"--sigma-c", "sigma_c", "low-dissipation cold coefficient"},
      {"--sigma-h", "sigma_h", "low-dissipation hot coefficient"},
      {"--axis", "axis", "sweep variable"},
      {"--from", "from", "sweep start"},
      {"--to", "to", "sweep stop"},
      {"--points", "points", "sweep point count"},
      {"--base", "base", "command evaluated at each sweep point"},
      {"--format", "format", "csv | json"},
      {"--out", "out", "output path (stdout when absent)"},
  };
  std::map<std::string, std::string> values;
  std::vector<std::pair<CLI::Option*, const char*>> options;
  for (const Flag& f : kFlags) {
    options.emplace_back(app.add_option(f.names, values[f.key], f.help), f.key);
  }
  bool log_axis = false;
  CLI::Option* log_flag = app.add_flag("--log", log_axis, "log-spaced sweep axis");
  std::vector<std::string> params;
  app.add_option("--param", params, "constraint parameter NAME=VALUE (repeatable)");
  std::vector<std::string> tols;
  app.add_option("--tol", tols, "tolerance override NAME=VALUE (repeatable)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    help_out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError("arguments", e.what());
  }

  KeyValues kv;
  if (!config_path.empty()) kv = read_config_file(config_path);
  for (const auto& [opt, key] : options) {
    if (opt->count() > 0) kv[key] = values[key];
  }
  if (log_flag->count() > 0) kv["log"] = log_axis ? "true" : "false";

  const auto split_pairs = [&kv](const std::vector<std::string>& items, const std::string& prefix,
                                 const char* flag) {
    for (const std::string& item : items) {
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ConfigError(flag, "expected NAME=VALUE, got '" + item + "'");
      }
      kv[normalize_key(prefix + std::string(trim(std::string_view(item).substr(0, eq))))] =
          item.substr(eq + 1);
    }
  };
  split_pairs(params, "param.", "param");
  split_pairs(tols, "tol.", "tol");

  if (!positional.empty()) {
    if (const std::string* c = find(kv, "command"); c && parse_command(*c) != parse_command(positional)) {
      throw ConfigError("command", "positional command '" + positional + "' conflicts with '" + *c + "'");
    }
    kv["command"] = positional;
  }
  return build_config(kv);
}

}  // namespace otto::cli
