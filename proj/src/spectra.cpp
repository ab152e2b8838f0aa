#include "otto/spectra.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "otto/errors.hpp"

namespace otto {

namespace {

double sum_of_squares(std::span<const double> v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double Spectrum::norm() const noexcept { return std::sqrt(norm_sq_); }

double Spectrum::dot(const Spectrum& other) const {
  if (other.size() != size()) {
    throw InvalidArgument("spectrum dimension mismatch: " + std::to_string(size()) + " vs " +
                          std::to_string(other.size()));
  }
  return std::inner_product(levels_.begin(), levels_.end(), other.levels_.begin(), 0.0);
}

std::vector<double> Spectrum::sorted() const {
  std::vector<double> out = levels_;
  std::sort(out.begin(), out.end());
  return out;
}

Spectrum make_spectrum(std::span<const double> raw, const Tolerances& tol) {
  if (raw.size() < 2) {
    throw InvalidArgument("a spectrum needs at least 2 levels, got " + std::to_string(raw.size()));
  }
  for (double x : raw) {
    if (!std::isfinite(x)) throw InvalidArgument("spectrum levels must be finite");
  }

  std::vector<double> levels(raw.begin(), raw.end());
  const auto n = static_cast<double>(levels.size());
  // A mean already at rounding level is left alone, which keeps the shift
  // idempotent; the second pass removes the rounding left by the first.
  for (int pass = 0; pass < 2; ++pass) {
    const double mean = std::accumulate(levels.begin(), levels.end(), 0.0) / n;
    if (std::abs(mean) <= n * std::numeric_limits<double>::epsilon() * max_abs(levels)) break;
    for (double& x : levels) x -= mean;
  }

  const double mean = std::accumulate(levels.begin(), levels.end(), 0.0) / n;
  if (std::abs(mean) > tol.mean_rel * max_abs(levels) && max_abs(levels) > 0.0) {
    throw InvalidArgument("spectrum could not be shifted to zero mean");
  }
  const double norm_sq = sum_of_squares(levels);
  return Spectrum(std::move(levels), norm_sq);
}

Spectrum scaled(const Spectrum& s, double factor) {
  std::vector<double> levels(s.levels().begin(), s.levels().end());
  for (double& x : levels) x *= factor;
  return Spectrum(std::move(levels), factor * factor * s.norm_sq());
}

Spectrum compress(const Spectrum& hot, CompressionDeviation chi) {
  if (!(chi.chi < 1.0)) {
    throw InvalidArgument("compression deviation must be < 1, got " + std::to_string(chi.chi));
  }
  return scaled(hot, 1.0 - chi.chi);
}

bool is_engine_regime(double chi, double eta_c) { return chi >= 0.0 && chi <= eta_c; }

bool is_symmetric_spectrum(const Spectrum& s, double tol) {
  const std::vector<double> v = s.sorted();
  const double scale = std::max(max_abs(v), 1.0);
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(v[i] + v[n - 1 - i]) > tol * scale) return false;
  }
  return true;
}

bool is_evenly_spaced(const Spectrum& s, double tol) {
  const std::vector<double> v = s.sorted();
  const double scale = std::max(max_abs(v), 1.0);
  const double gap = v[1] - v[0];
  for (std::size_t i = 2; i < v.size(); ++i) {
    if (std::abs((v[i] - v[i - 1]) - gap) > tol * scale) return false;
  }
  return true;
}

std::vector<double> parse_levels(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(start, comma - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    if (item.empty()) {
      throw InvalidArgument("empty entry in level list '" + std::string(text) + "'");
    }
    if (item.front() == '+') item.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw InvalidArgument("not a number: '" + std::string(item) + "'");
    }
    out.push_back(value);
    start = comma + 1;
  }
  return out;
}

}  // namespace otto
