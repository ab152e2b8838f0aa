#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "otto/spectra.hpp"

namespace otto {

using Populations = std::vector<double>;

/// Hot and cold level sets of a four-stroke Otto cycle, the two bath inverse
/// temperatures, and the swap parameter xi of the thermal strokes.
class EngineSpec {
 public:
  /// Throws InvalidArgument unless hot.size() == cold.size(),
  /// 0 < beta_h <= beta_c and 0 < xi <= 1.
  EngineSpec(Spectrum hot, Spectrum cold, double beta_h, double beta_c, double xi = 1.0);

  /// cold = (1 - chi) * hot.
  static EngineSpec uniform(const Spectrum& hot, double chi, double beta_h, double beta_c,
                            double xi = 1.0);

  const Spectrum& hot() const noexcept { return hot_; }
  const Spectrum& cold() const noexcept { return cold_; }
  double beta_h() const noexcept { return beta_h_; }
  double beta_c() const noexcept { return beta_c_; }
  double xi() const noexcept { return xi_; }
  std::size_t n_levels() const noexcept { return hot_.size(); }

  /// 1 - beta_h / beta_c.
  double eta_c() const noexcept { return eta_c_; }

 private:
  Spectrum hot_;
  Spectrum cold_;
  double beta_h_;
  double beta_c_;
  double xi_;
  double eta_c_;
};

struct CycleResult {
  double work = 0.0;    // net output, positive for an engine
  double q_hot = 0.0;   // absorbed from the hot bath
  double q_cold = 0.0;  // absorbed from the cold bath
  double efficiency = 0.0;  // work / q_hot, NaN unless q_hot > 0
  Populations pop_after_hot;
  Populations pop_after_cold;

  bool is_engine() const noexcept { return q_hot > 0.0 && work > 0.0; }
};

/// Gibbs weights exp(-beta E_i) / Z, evaluated with the minimum level
/// subtracted so that large beta cannot overflow.
Populations gibbs_populations(const Spectrum& s, double beta);

struct SwapSteadyState {
  Populations after_hot;
  Populations after_cold;
};

/// Limit cycle of the partial swap thermalization
///   p_A = (1 - xi) p_B + xi p_hot,   p_B = (1 - xi) p_A + xi p_cold.
SwapSteadyState swap_steady_state(std::span<const double> p_hot_th,
                                  std::span<const double> p_cold_th, double xi);

/// xi / (2 - xi): the fraction of the full-thermalization population gap left by
/// a partial swap.
double swap_factor(double xi);

/// Finite-temperature cycle with heat and work from the steady-state populations.
CycleResult exact_cycle(const EngineSpec& e);

/// Leading order in beta of the cycle work.
double ultra_hot_work(const EngineSpec& e);

/// Ultra-hot work of a uniformly compressed engine in terms of chi.
double parallel_work(double chi, double norm_sq_h, double beta_c, double eta_c, double xi,
                     std::size_t n_levels);

/// Order-beta^2 term of the work; vanishes for spectra symmetric about zero.
double beta2_correction(const EngineSpec& e);

struct BathObservables {
  double internal_energy = 0.0;
  double purity = 0.0;
  double heat_capacity = 0.0;
};

struct BathObservablePair {
  BathObservables exact;
  // Magnitude form: internal_energy = beta |E|^2 / N. The exact Gibbs trace of a
  // zero-mean spectrum is -beta |E|^2 / N to the same order.
  BathObservables ultra_hot;
};

BathObservablePair bath_observables(const Spectrum& s, double beta);

/// work / q_hot of the exact cycle. Throws NotAnEngine when q_hot <= 0 or the
/// work is not positive.
double exact_efficiency(const EngineSpec& e);

}  // namespace otto
