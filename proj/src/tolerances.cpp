#include "otto/tolerances.hpp"

#include <cmath>

namespace otto {

bool set_tolerance(Tolerances& tol, std::string_view name, double value) {
  if (name == "mean_rel") tol.mean_rel = value;
  else if (name == "spectrum_symmetry") tol.spectrum_symmetry = value;
  else if (name == "root_rel") tol.root_rel = value;
  else if (name == "residual") tol.residual = value;
  else if (name == "boundary_fraction") tol.boundary_fraction = value;
  else if (name == "chi_edge") tol.chi_edge = value;
  else if (name == "work_scan_samples") tol.work_scan_samples = static_cast<int>(std::lround(value));
  else if (name == "bracket_scan_points") tol.bracket_scan_points = static_cast<int>(std::lround(value));
  else if (name == "bracket_growth") tol.bracket_growth = value;
  else if (name == "bracket_max_decades") tol.bracket_max_decades = value;
  else if (name == "max_iterations") tol.max_iterations = static_cast<int>(std::lround(value));
  else return false;
  return true;
}

}  // namespace otto
