#pragma once

#include <string_view>

namespace otto {

// Numerical knobs shared by every module. Defaults are the library contract;
// the CLI may override individual fields with --tol name=value.
struct Tolerances {
  // Zero-mean check on a Spectrum, relative to max |level|.
  double mean_rel = 1e-12;
  // Mirror-symmetry and even-spacing checks on spectra.
  double spectrum_symmetry = 1e-12;
  // |G((1-chi) r, r) - g0| <= root_rel * (1 + |g0|) for an accepted |E_h| root.
  double root_rel = 1e-12;
  // |optimality residual| below which maximize_work reports convergence.
  double residual = 1e-9;
  // chi* above this fraction of eta_c raises the boundary-proximity warning.
  double boundary_fraction = 0.999;
  // The work scan runs on (edge * eta_c, eta_c - edge * eta_c).
  double chi_edge = 1e-9;
  int work_scan_samples = 128;
  int bracket_scan_points = 256;
  double bracket_growth = 4.0;
  double bracket_max_decades = 40.0;
  int max_iterations = 200;
};

/// Sets the field called `name`. Returns false for unknown names.
bool set_tolerance(Tolerances& tol, std::string_view name, double value);

}  // namespace otto
