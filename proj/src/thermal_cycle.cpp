#include "otto/thermal_cycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "otto/errors.hpp"

namespace otto {

EngineSpec::EngineSpec(Spectrum hot, Spectrum cold, double beta_h, double beta_c, double xi)
    : hot_(std::move(hot)), cold_(std::move(cold)), beta_h_(beta_h), beta_c_(beta_c), xi_(xi) {
  if (hot_.size() != cold_.size()) {
    throw InvalidArgument("hot and cold spectra differ in size: " + std::to_string(hot_.size()) +
                          " vs " + std::to_string(cold_.size()));
  }
  if (!(beta_h_ > 0.0) || !std::isfinite(beta_h_)) {
    throw InvalidArgument("beta_h must be positive and finite");
  }
  if (!(beta_c_ >= beta_h_) || !std::isfinite(beta_c_)) {
    throw InvalidArgument("beta_c must be finite and >= beta_h");
  }
  if (!(xi_ > 0.0 && xi_ <= 1.0)) {
    throw InvalidArgument("swap parameter xi must lie in (0, 1]");
  }
  eta_c_ = 1.0 - beta_h_ / beta_c_;
}

EngineSpec EngineSpec::uniform(const Spectrum& hot, double chi, double beta_h, double beta_c,
                               double xi) {
  return EngineSpec(hot, compress(hot, {chi}), beta_h, beta_c, xi);
}

Populations gibbs_populations(const Spectrum& s, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("inverse temperature must be finite and >= 0");
  }
  const auto levels = s.levels();
  const double ground = *std::min_element(levels.begin(), levels.end());
  Populations p(levels.size());
  double z = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    p[i] = std::exp(-beta * (levels[i] - ground));
    z += p[i];
  }
  if (!std::isfinite(z) || z <= 0.0) {
    throw DomainError("Gibbs partition sum is not finite");
  }
  for (double& x : p) x /= z;
  return p;
}

double swap_factor(double xi) { return xi / (2.0 - xi); }

SwapSteadyState swap_steady_state(std::span<const double> p_hot_th,
                                  std::span<const double> p_cold_th, double xi) {
  if (p_hot_th.size() != p_cold_th.size()) {
    throw InvalidArgument("population vectors differ in size");
  }
  if (!(xi > 0.0 && xi <= 1.0)) {
    throw InvalidArgument("swap parameter xi must lie in (0, 1]");
  }
  const double keep = 1.0 - xi;
  const double denom = 2.0 - xi;
  SwapSteadyState out{Populations(p_hot_th.size()), Populations(p_hot_th.size())};
  for (std::size_t i = 0; i < p_hot_th.size(); ++i) {
    out.after_hot[i] = (p_hot_th[i] + keep * p_cold_th[i]) / denom;
    out.after_cold[i] = (p_cold_th[i] + keep * p_hot_th[i]) / denom;
  }
  return out;
}

CycleResult exact_cycle(const EngineSpec& e) {
  const Populations p_hot = gibbs_populations(e.hot(), e.beta_h());
  const Populations p_cold = gibbs_populations(e.cold(), e.beta_c());

  CycleResult r;
  auto steady = swap_steady_state(p_hot, p_cold, e.xi());
  r.pop_after_hot = std::move(steady.after_hot);
  r.pop_after_cold = std::move(steady.after_cold);

  // p_A - p_B taken from the thermal gap directly; differencing the two
  // steady-state vectors would lose digits at small beta.
  const double factor = swap_factor(e.xi());
  for (std::size_t i = 0; i < e.n_levels(); ++i) {
    const double gap = factor * (p_hot[i] - p_cold[i]);
    r.q_hot += e.hot()[i] * gap;
    r.q_cold -= e.cold()[i] * gap;
    r.work += (e.hot()[i] - e.cold()[i]) * gap;
  }
  r.efficiency = r.q_hot > 0.0 ? r.work / r.q_hot : std::numeric_limits<double>::quiet_NaN();
  return r;
}

double ultra_hot_work(const EngineSpec& e) {
  const double cross = e.cold().dot(e.hot());
  const double n = static_cast<double>(e.n_levels());
  return swap_factor(e.xi()) / n *
         ((e.beta_c() + e.beta_h()) * cross - e.beta_c() * e.cold().norm_sq() -
          e.beta_h() * e.hot().norm_sq());
}

double parallel_work(double chi, double norm_sq_h, double beta_c, double eta_c, double xi,
                     std::size_t n_levels) {
  return swap_factor(xi) * beta_c * chi * (eta_c - chi) * norm_sq_h /
         static_cast<double>(n_levels);
}

double beta2_correction(const EngineSpec& e) {
  const double bc2 = e.beta_c() * e.beta_c();
  const double bh2 = e.beta_h() * e.beta_h();
  double sum = 0.0;
  for (std::size_t i = 0; i < e.n_levels(); ++i) {
    const double c = e.cold()[i];
    const double h = e.hot()[i];
    sum += 0.5 * bc2 * c * c * c + 0.5 * bh2 * h * h * h - 0.5 * bc2 * c * c * h -
           0.5 * bh2 * h * h * c;
  }
  return swap_factor(e.xi()) * sum / static_cast<double>(e.n_levels());
}

BathObservablePair bath_observables(const Spectrum& s, double beta) {
  const Populations p = gibbs_populations(s, beta);
  const auto levels = s.levels();
  double mean = 0.0;
  double mean_sq = 0.0;
  double purity = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    mean += p[i] * levels[i];
    mean_sq += p[i] * levels[i] * levels[i];
    purity += p[i] * p[i];
  }
  const double n = static_cast<double>(s.size());
  const double b2 = beta * beta;

  BathObservablePair out;
  out.exact = {mean, purity, b2 * (mean_sq - mean * mean)};
  out.ultra_hot = {beta * s.norm_sq() / n, 1.0 / n + b2 * s.norm_sq() / (n * n),
                   b2 * s.norm_sq() / n};
  return out;
}

double exact_efficiency(const EngineSpec& e) {
  const CycleResult r = exact_cycle(e);
  if (!(r.q_hot > 0.0) || !(r.work > 0.0)) {
    throw NotAnEngine("cycle is not an engine: q_hot = " + std::to_string(r.q_hot) +
                      ", work = " + std::to_string(r.work));
  }
  return r.work / r.q_hot;
}

}  // namespace otto
