#include "otto/cli/run.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "otto/errors.hpp"
#include "otto/optimizer.hpp"
#include "otto/spectra.hpp"
#include "otto/thermal_cycle.hpp"
#include "otto/universality.hpp"

namespace otto::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

OptimizationProblem make_problem(const RunConfig& cfg) {
  OptimizationProblem p{make_constraint(cfg)};
  p.g0 = cfg.g0;
  p.eta_c = cfg.eta_c.value_or(0.5);
  p.beta_c = cfg.beta_c.value_or(1.0);
  p.xi = cfg.xi;
  p.n_levels = cfg.n_levels();
  p.eh_bracket = cfg.eh_bracket;
  p.tol = cfg.tol;
  return p;
}

Report simulate(const RunConfig& cfg) {
  const Spectrum hot = make_spectrum(cfg.levels, cfg.tol);
  double chi = 0.0;
  const EngineSpec e = [&] {
    if (cfg.chi) {
      chi = *cfg.chi;
      return EngineSpec::uniform(hot, chi, *cfg.beta_h, *cfg.beta_c, cfg.xi);
    }
    Spectrum cold = make_spectrum(cfg.cold_levels, cfg.tol);
    chi = hot.norm() > 0.0 ? 1.0 - cold.norm() / hot.norm() : kNaN;
    return EngineSpec(hot, std::move(cold), *cfg.beta_h, *cfg.beta_c, cfg.xi);
  }();

  const CycleResult r = exact_cycle(e);
  const double ultra = ultra_hot_work(e);
  Report rep;
  rep.table.columns = columns(Command::Simulate);
  rep.table.rows.push_back({chi, e.beta_c(), e.beta_h(), e.xi(),
                            static_cast<std::int64_t>(e.n_levels()), r.work, ultra,
                            ultra + beta2_correction(e), r.q_hot, r.q_cold,
                            r.is_engine() ? r.efficiency : kNaN});
  rep.not_an_engine = !r.is_engine();
  return rep;
}

Report optimize(const RunConfig& cfg) {
  const OptimizationProblem p = make_problem(cfg);
  const OptimizationResult r = maximize_work(p);
  Report rep;
  rep.table.columns = columns(Command::Optimize);
  rep.table.rows.push_back({p.constraint.source(), p.g0, p.eta_c, r.chi_star, r.eta_star,
                            r.eh_star, r.work_star, r.residual, r.converged});
  if (r.near_boundary) {
    rep.warnings.push_back("maximum at chi = " + std::to_string(r.chi_star) +
                           " lies at the eta_c boundary");
  }
  if (!r.converged) {
    rep.warnings.push_back("optimality residual " + std::to_string(r.residual) +
                           " exceeds tolerance");
  }
  return rep;
}

Report expand(const RunConfig& cfg) {
  const OptimizationProblem p = make_problem(cfg);
  const ConstraintExpr& c = p.constraint;
  Report rep;

  const OrderChangingReport oc = order_changing_check(c, cfg.eta_c, p.g0);
  ExpansionCoeffs coeffs;
  std::string classification = "order_changing";
  if (oc.order_changing) {
    coeffs = expansion_coeffs(c, 1.0);
  } else {
    // The chi = 0 point of the constraint fixes the reference norm.
    const double reference = solve_eh(p, 0.0);
    coeffs = expansion_coeffs(c, reference);
    classification = to_string(a_bounds_check(c, reference).classification);
  }
  if (oc.boundary_case) rep.warnings.push_back(oc.report);

  double a_fit = kNaN;
  double b_fit = kNaN;
  try {
    const FittedExpansion fit = fit_expansion(c, p.g0, p);
    a_fit = fit.a;
    b_fit = fit.b;
  } catch (const Error& e) {
    rep.warnings.push_back(std::string("numeric fit unavailable: ") + e.what());
  }

  rep.table.columns = columns(Command::Expand);
  rep.table.rows.push_back({c.source(), coeffs.a, coeffs.b, a_fit, b_fit, coeffs.symmetric,
                            oc.order_changing, classification});
  return rep;
}

Report compare(const RunConfig& cfg) {
  const OptimizationProblem p = make_problem(cfg);
  const OptimizationResult r = maximize_work(p);
  const ClassicalComparison cl = classical_comparators(p.eta_c, cfg.sigma_c, cfg.sigma_h);
  Report rep;
  rep.table.columns = columns(Command::Compare);
  rep.table.rows.push_back({p.eta_c, r.eta_star, cl.eta_ld_low, cl.eta_ld_high, cl.eta_ca,
                            cl.eta_ld_series(), r.eta_star > cl.eta_ld_high,
                            p.constraint.source()});
  if (r.near_boundary) {
    rep.warnings.push_back("maximum at chi = " + std::to_string(r.chi_star) +
                           " lies at the eta_c boundary");
  }
  return rep;
}

Report execute_single(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::Simulate: return simulate(cfg);
    case Command::Optimize: return optimize(cfg);
    case Command::Expand: return expand(cfg);
    case Command::Compare: return compare(cfg);
    case Command::Sweep: break;
  }
  throw InvalidArgument("nested sweep");
}

Report sweep(const RunConfig& cfg) {
  const SweepAxis& axis = *cfg.sweep;
  const auto n = static_cast<std::size_t>(axis.points);
  std::vector<Report> reports(n);
  std::vector<std::exception_ptr> errors(n);

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        reports[i] = execute_single(sweep_point(cfg, static_cast<int>(i)));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::min<std::size_t>(n, 16));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }

  Report rep;
  rep.table.columns = {"index", "sweep_" + axis.variable};
  const auto& base = columns(cfg.base);
  rep.table.columns.insert(rep.table.columns.end(), base.begin(), base.end());
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Cell> row{static_cast<std::int64_t>(i), axis.value(static_cast<int>(i))};
    for (Cell& cell : reports[i].table.rows.at(0)) row.push_back(std::move(cell));
    rep.table.rows.push_back(std::move(row));
    for (const std::string& w : reports[i].warnings) {
      rep.warnings.push_back("point " + std::to_string(i) + ": " + w);
    }
  }
  return rep;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  const bool quote = s.find_first_of(",\"\n\r") != std::string::npos ||
                     (!s.empty() && (s.front() == ' ' || s.back() == ' '));
  if (!quote) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else {
          return csv_field(v);
        }
      },
      cell);
}

nlohmann::ordered_json json_cell(const Cell& cell) {
  return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, cell);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw ConfigError("out", "cannot write '" + path + "'");
}

std::string stage_of(const RunConfig& cfg) {
  if (cfg.command == Command::Sweep) return "sweep(" + to_string(cfg.base) + ")";
  return to_string(cfg.command);
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

const std::vector<std::string>& columns(Command c) {
  static const std::vector<std::string> kSimulate = {
      "chi",       "beta_c",         "beta_h", "xi",     "N",         "work_exact",
      "work_ultra", "work_corrected", "q_hot",  "q_cold", "eta_exact"};
  static const std::vector<std::string> kOptimize = {
      "constraint", "g0", "eta_c", "chi_star", "eta_star", "eh_star", "work_star", "residual",
      "converged"};
  static const std::vector<std::string> kExpand = {
      "constraint", "a_analytic", "b_analytic", "a_fit", "b_fit", "symmetric", "order_changing",
      "classification"};
  static const std::vector<std::string> kCompare = {
      "eta_c",  "eta_star",      "eta_ld_low",       "eta_ld_high",
      "eta_ca", "eta_ld_series", "exceeds_ld_upper", "constraint"};
  static const std::vector<std::string> kNone;
  switch (c) {
    case Command::Simulate: return kSimulate;
    case Command::Optimize: return kOptimize;
    case Command::Expand: return kExpand;
    case Command::Compare: return kCompare;
    case Command::Sweep: break;
  }
  return kNone;
}

Report execute(const RunConfig& cfg) {
  return cfg.command == Command::Sweep ? sweep(cfg) : execute_single(cfg);
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t j = 0; j < t.columns.size(); ++j) {
    if (j) out += ',';
    out += csv_field(t.columns[j]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += csv_cell(row[j]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& t, bool force_array) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t j = 0; j < row.size(); ++j) obj[t.columns.at(j)] = json_cell(row[j]);
    rows.push_back(std::move(obj));
  }
  if (!force_array && rows.size() == 1) return rows[0].dump(2) + '\n';
  return rows.dump(2) + '\n';
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string stage = stage_of(cfg);
  int code = 0;
  try {
    const Report rep = execute(cfg);
    for (const std::string& w : rep.warnings) err << "otto: warning: " << one_line(w) << '\n';
    const std::string text = cfg.format == Format::Csv
                                 ? to_csv(rep.table)
                                 : to_json(rep.table, cfg.command == Command::Sweep);
    if (rep.not_an_engine && cfg.command == Command::Simulate) {
      err << "otto: simulate: not an engine: the cycle does not turn hot-bath heat into work\n";
      code = 2;
    }
    if (cfg.out.empty()) {
      out << text;
    } else {
      write_file(cfg.out, text);
      nlohmann::ordered_json meta;
      meta["command"] = to_string(cfg.command);
      if (cfg.command == Command::Sweep) meta["base"] = to_string(cfg.base);
      meta["timestamp"] = utc_timestamp();
      meta["rows"] = rep.table.rows.size();
      meta["columns"] = rep.table.columns;
      meta["exit_code"] = code;
      meta["config"] = nlohmann::ordered_json(cfg.source);
      write_file(cfg.out + ".meta.json", meta.dump(2) + '\n');
    }
    return code;
  } catch (const NotAnEngine& e) {
    err << "otto: " << stage << ": not an engine: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "otto: config: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "otto: " << stage << ": " << one_line(e.what()) << '\n';
    return 1;
  }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> cfg;
  try {
    cfg = load_config(args, out);
  } catch (const std::exception& e) {
    err << "otto: config: " << one_line(e.what()) << '\n';
    return 1;
  }
  if (!cfg) return 0;
  return run(*cfg, out, err);
}

}  // namespace otto::cli
