#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "otto/tolerances.hpp"

namespace otto {

/// Zero-mean set of N >= 2 energy levels with its cached squared norm.
///
/// Level i of a hot spectrum and level i of a cold spectrum label the same
/// eigenstate, so input order is preserved. `sorted()` gives the canonical
/// ascending view used for equality and symmetry tests.
class Spectrum {
 public:
  std::span<const double> levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }
  double norm_sq() const noexcept { return norm_sq_; }
  double norm() const noexcept;
  double operator[](std::size_t i) const noexcept { return levels_[i]; }

  double dot(const Spectrum& other) const;
  std::vector<double> sorted() const;

  friend bool operator==(const Spectrum&, const Spectrum&) = default;

 private:
  friend Spectrum make_spectrum(std::span<const double>, const Tolerances&);
  friend Spectrum scaled(const Spectrum&, double);

  Spectrum(std::vector<double> levels, double norm_sq)
      : levels_(std::move(levels)), norm_sq_(norm_sq) {}

  std::vector<double> levels_;
  double norm_sq_ = 0.0;
};

/// Shifts `raw` to zero mean. Throws InvalidArgument for fewer than two
/// levels or non-finite input.
Spectrum make_spectrum(std::span<const double> raw, const Tolerances& tol = {});

inline Spectrum make_spectrum(std::initializer_list<double> raw) {
  return make_spectrum(std::span<const double>(raw.begin(), raw.size()));
}

/// factor * s, preserving the zero mean.
Spectrum scaled(const Spectrum& s, double factor);

/// Uniform compression deviation: E_c = (1 - chi) E_h.
struct CompressionDeviation {
  double chi = 0.0;

  /// The compression ratio 1 / (1 - chi).
  double compression_ratio() const { return 1.0 / (1.0 - chi); }
};

/// Cold spectrum (1 - chi) * hot. Throws InvalidArgument when chi >= 1.
Spectrum compress(const Spectrum& hot, CompressionDeviation chi);

bool is_engine_regime(double chi, double eta_c);

/// True when the sorted levels mirror about zero within `tol` (absolute,
/// scaled by max |level|).
bool is_symmetric_spectrum(const Spectrum& s, double tol = 1e-12);

/// True when consecutive sorted levels have equal gaps within `tol`.
bool is_evenly_spaced(const Spectrum& s, double tol = 1e-12);

/// Parses a comma-separated list such as "-1, 0, 1".
std::vector<double> parse_levels(std::string_view text);

}  // namespace otto
